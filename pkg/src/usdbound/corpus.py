"""Built-in regression corpus of worked discrimination instances.

Every expected value is a number printed in the source literature (or a
closed form derived there), with its citation in ``provenance``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import applicable_forms
from .phase_bound import MinimizerConfig, minimize_bound
from .schmidt import (
    conversion_probability,
    minimize_eta_norm,
    schmidt_spectrum,
    vidal_probability,
)
from .solver import SolverConfig, solve_optimal
from .statesets import StateSet, gram, make_stateset, states_from_gram

PAPER_TOL = 5e-4
CLOSED_FORM_TOL = 2e-6
MINIMIZER_TOL = 2e-6
IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class CorpusCase:
    name: str
    instance: StateSet
    provenance: str
    expected_bound: float | None = None
    bound_tol: float = PAPER_TOL
    expected_p_opt: float | None = None
    p_opt_tol: float = PAPER_TOL
    expected_class: str | None = None
    expected_gamma: tuple[float, ...] | None = None
    gamma_tol: float = 1e-4
    min_bound_gap: float | None = None


@dataclass
class CaseResult:
    name: str
    provenance: str
    bound: float
    expected_bound: float | None
    p_opt: float
    expected_p_opt: float | None
    solution_class: str
    expected_class: str | None
    gamma: list[float]
    bound_gap: float
    povm_valid: bool
    eta_min_spread: float
    vidal_residual: float
    closed_forms: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


_S3 = 1.0 / np.sqrt(3.0)
EXAMPLE_I_STATES = np.array([[1, 0, 0], [_S3, _S3, _S3], [_S3, _S3, -_S3]], dtype=complex)
EXAMPLE_II_STATES = np.array(
    [[1, 0, 0], np.array([1, 2, 0]) / np.sqrt(5), np.array([2, 2, 3]) / np.sqrt(17)],
    dtype=complex,
)


def geometrically_uniform_states() -> np.ndarray:
    """U_i |psi> for the four-element diagonal sign group."""
    u2 = np.diag([1, -1, 1, -1])
    u3 = np.diag([1, 1, -1, -1])
    psi = np.array([2, 2, 1, 3]) / (3 * np.sqrt(2))
    return np.array([psi, u2 @ psi, u3 @ psi, u2 @ u3 @ psi], dtype=complex)


def example_one_extended(p: float) -> StateSet:
    """Example I states plus a fourth state orthogonal to all of them."""
    states = np.zeros((4, 4), dtype=complex)
    states[:3, :3] = EXAMPLE_I_STATES
    states[3, 3] = 1.0
    q = (1.0 - p) / 3.0
    return make_stateset(states, [q, q, q, p])


def two_state_instance(p1: float, s: float, phase: float = 0.0) -> StateSet:
    psi2 = np.array([s * np.exp(1j * phase), np.sqrt(1 - s * s)])
    return make_stateset([[1, 0], psi2], [p1, 1 - p1])


def symmetric_real_instance(s: float) -> StateSet:
    g = (1 - s) * np.eye(3) + s * np.ones((3, 3))
    return make_stateset(states_from_gram(g), normalize=True)


def builtin_corpus() -> list[CorpusCase]:
    cases = [
        CorpusCase(
            name="example1",
            instance=make_stateset(EXAMPLE_I_STATES),
            provenance="Example I: bound 0.4444; optimum gamma = {0, 2/3, 2/3}, P_opt = 4/9 (Sun et al. 2001)",
            expected_bound=0.4444,
            expected_p_opt=4 / 9,
            p_opt_tol=1e-4,
            expected_class="Boundary",
            expected_gamma=(0.0, 2 / 3, 2 / 3),
        ),
        CorpusCase(
            name="example2",
            instance=make_stateset(EXAMPLE_II_STATES, [0.30, 0.35, 0.35]),
            provenance="Example II: interior singular optimum, bound 0.4430 agrees with P_opt (Pang-Wu 2009)",
            expected_bound=0.4430,
            expected_p_opt=0.4430,
            expected_class="InteriorSingular",
        ),
        CorpusCase(
            name="example3",
            instance=make_stateset(EXAMPLE_II_STATES, [0.10, 0.80, 0.10]),
            provenance="Example III: boundary optimum, bound 0.4758 vs P_opt 0.4632 (Pang-Wu 2009)",
            expected_bound=0.4758,
            expected_p_opt=0.4632,
            expected_class="Boundary",
            min_bound_gap=0.01,
        ),
        CorpusCase(
            name="four_state_gu",
            instance=make_stateset(geometrically_uniform_states()),
            provenance="Four geometrically uniform states: bound 0.2222, optimal value 2/9 (Eldar 2003)",
            expected_bound=0.2222,
            expected_p_opt=2 / 9,
        ),
    ]
    for p in (0.2, 0.5, 0.8):
        cases.append(
            CorpusCase(
                name=f"example1_n4_p{p:.1f}",
                instance=example_one_extended(p),
                provenance="Example I extended by an orthogonal fourth state: bound p + 0.4444(1-p), P_opt = p + (4/9)(1-p)",
                expected_bound=p + 0.4444 * (1 - p),
                expected_p_opt=p + 4 / 9 * (1 - p),
                expected_class="Boundary",
                expected_gamma=(0.0, 2 / 3, 2 / 3, 1.0),
            )
        )
    for p1, s, phase in ((0.5, 0.3, 0.0), (0.5, 0.7, 1.1), (0.3, 0.4, -2.0), (0.9, 0.5, 0.4)):
        equal = p1 == 0.5
        cases.append(
            CorpusCase(
                name=f"two_state_p{p1:.1f}_s{s:.1f}",
                instance=two_state_instance(p1, s, phase),
                provenance="Two states: bound 1 - 2 sqrt(p1 p2)|<psi1|psi2>|, equal to the IDP optimum for equal priors",
                expected_bound=1 - 2 * np.sqrt(p1 * (1 - p1)) * s,
                bound_tol=1e-10,
                expected_p_opt=(1 - s) if equal else None,
                p_opt_tol=1e-5,
            )
        )
    for s in (0.1, 0.3, 0.5):
        cases.append(
            CorpusCase(
                name=f"symmetric_s{s:.1f}",
                instance=symmetric_real_instance(s),
                provenance="Three equiprobable states with equal real overlaps s: bound 1 - s, the optimal value (Sun et al. 2001)",
                expected_bound=1 - s,
                bound_tol=CLOSED_FORM_TOL,
                expected_p_opt=1 - s,
                p_opt_tol=1e-5,
            )
        )
    return sorted(cases, key=lambda c: c.name)


def _check(failures: list[str], label: str, got: float, want: float | None, tol: float) -> None:
    if want is not None and not abs(got - want) <= tol:
        failures.append(f"{label}: {got:.10g} vs expected {want:.10g} (tol {tol:g})")


def run_case(case: CorpusCase, seed: int = 42, tol: float | None = None) -> CaseResult:
    mcfg = MinimizerConfig(seed=seed) if tol is None else MinimizerConfig(seed=seed, tol=tol)
    states = case.instance
    bound = minimize_bound(states, mcfg)
    sol = solve_optimal(states, SolverConfig(minimizer=mcfg))
    failures: list[str] = []
    _check(failures, "bound", bound.value, case.expected_bound, case.bound_tol)
    _check(failures, "p_opt", sol.p_opt, case.expected_p_opt, case.p_opt_tol)
    label = str(sol.solution_class.label)
    if case.expected_class is not None and label != case.expected_class:
        failures.append(f"class: {label} vs expected {case.expected_class}")
    if case.expected_gamma is not None:
        err = float(np.abs(sol.gamma_opt.gamma - np.asarray(case.expected_gamma)).max())
        if err > case.gamma_tol:
            failures.append(f"gamma: max deviation {err:.3e} (tol {case.gamma_tol:g})")
    if case.min_bound_gap is not None and not sol.bound_gap > case.min_bound_gap:
        failures.append(f"bound gap {sol.bound_gap:.6f} not above {case.min_bound_gap}")
    if sol.p_opt > bound.value + MINIMIZER_TOL:
        failures.append("p_opt exceeds the bound")
    if not sol.povm_valid:
        failures.append("reconstructed POVM failed validation")

    eta_mins = [minimize_eta_norm(states, k, mcfg).value for k in range(1, states.n_states + 1)]
    spread = float(max(abs(v - bound.value) for v in eta_mins))
    if spread > MINIMIZER_TOL:
        failures.append(f"eta minima differ from the bound by {spread:.3e}")
    vidal_res = abs(
        conversion_probability(states, bound.argmin)
        - vidal_probability(schmidt_spectrum(states, bound.argmin))
    )
    if vidal_res > IDENTITY_TOL:
        failures.append(f"conversion vs Vidal residual {vidal_res:.3e}")

    forms = {}
    for form in applicable_forms(states, gram(states)):
        forms[form.formula_id] = form.value
        if abs(form.value - bound.value) > CLOSED_FORM_TOL:
            failures.append(f"closed form {form.formula_id} = {form.value:.10g} disagrees with bound")

    return CaseResult(
        name=case.name,
        provenance=case.provenance,
        bound=bound.value,
        expected_bound=case.expected_bound,
        p_opt=sol.p_opt,
        expected_p_opt=case.expected_p_opt,
        solution_class=label,
        expected_class=case.expected_class,
        gamma=[float(x) for x in sol.gamma_opt.gamma],
        bound_gap=sol.bound_gap,
        povm_valid=sol.povm_valid,
        eta_min_spread=spread,
        vidal_residual=float(vidal_res),
        closed_forms=forms,
        failures=failures,
    )


def select_cases(pattern: str | None = None, cases: list[CorpusCase] | None = None) -> list[CorpusCase]:
    """Cases whose name matches the regular expression ``pattern`` (search semantics)."""
    cases = builtin_corpus() if cases is None else cases
    if pattern is None:
        return cases
    try:
        rx = re.compile(pattern)
    except re.error as exc:
        raise ValueError(f"invalid filter pattern {pattern!r}: {exc}") from exc
    return [c for c in cases if rx.search(c.name)]


def run_corpus(pattern: str | None = None, seed: int = 42, tol: float | None = None) -> list[CaseResult]:
    results = [run_case(c, seed=seed, tol=tol) for c in select_cases(pattern)]
    return sorted(results, key=lambda r: r.name)
