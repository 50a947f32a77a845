"""Analytic values of the phase bound for structured instances.

Each form is usable on its own (scalar arguments) or through
:func:`applicable_forms`, which checks the structural precondition on the
Gram data of a concrete instance before evaluating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statesets import GramData, StateSet, gram

STRUCTURE_TOL = 1e-9


@dataclass(frozen=True)
class ClosedFormResult:
    value: float
    formula_id: str
    applicable: bool = True
    reason: str = ""


def _not_applicable(formula_id: str, reason: str) -> ClosedFormResult:
    return ClosedFormResult(value=float("nan"), formula_id=formula_id, applicable=False, reason=reason)


def _check_probs(p, n: int) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.shape != (n,) or np.any(p <= 0) or np.any(p >= 1) or abs(p.sum() - 1) > STRUCTURE_TOL:
        raise ValueError(f"expected {n} probabilities in (0, 1) summing to 1, got {p.tolist()}")
    return p


def _check_modulus(g: float, name: str) -> float:
    if not 0.0 <= g < 1.0:
        raise ValueError(f"{name} must lie in [0, 1), got {g}")
    return float(g)


def two_state_bound(p1: float, p2: float, overlap_modulus: float) -> ClosedFormResult:
    """1 - 2 sqrt(p1 p2) |<psi_1|psi_2>|."""
    _check_probs([p1, p2], 2)
    s = _check_modulus(overlap_modulus, "overlap")
    return ClosedFormResult(1.0 - 2.0 * np.sqrt(p1 * p2) * s, "two_state")


def three_state_one_orthogonal(p, g13: float, g23: float, g12: float = 0.0) -> ClosedFormResult:
    """Three states with <psi_1|psi_2> = 0: 1 - 2[sqrt(p1 p3) g13 + sqrt(p2 p3) g23]."""
    fid = "three_state_one_orthogonal"
    p1, p2, p3 = _check_probs(p, 3)
    g13 = _check_modulus(g13, "g13")
    g23 = _check_modulus(g23, "g23")
    if abs(g12) > STRUCTURE_TOL:
        return _not_applicable(fid, f"|<psi_1|psi_2>| = {abs(g12):.3e} is not zero")
    return ClosedFormResult(1.0 - 2.0 * (np.sqrt(p1 * p3) * g13 + np.sqrt(p2 * p3) * g23), fid)


def invariant_phase(phases) -> float:
    """phi_12 + phi_23 - phi_13, wrapped to (-pi, pi].

    ``phases`` is (phi_12, phi_13, phi_23), the arguments of <psi_i|psi_j>.
    """
    phi12, phi13, phi23 = (float(x) for x in phases)
    total = phi12 + phi23 - phi13
    wrapped = np.angle(np.exp(1j * total))
    return float(np.pi if np.isclose(wrapped, -np.pi, atol=1e-15) else wrapped)


def three_state_invariant_phase(p, moduli, phases) -> ClosedFormResult:
    """Invariant phase equal to pi: 1 - 2 sum_{i<j} sqrt(p_i p_j) |G_ij|.

    ``moduli`` and ``phases`` are ordered (12, 13, 23). A vanishing overlap
    leaves its phase undefined; the form then holds whatever the others are.
    """
    fid = "three_state_invariant_phase"
    p1, p2, p3 = _check_probs(p, 3)
    g12, g13, g23 = (_check_modulus(float(g), "modulus") for g in moduli)
    if min(g12, g13, g23) > STRUCTURE_TOL:
        phi = invariant_phase(phases)
        # distance to pi on the circle
        miss = abs(np.angle(np.exp(1j * (phi - np.pi))))
        if miss > STRUCTURE_TOL:
            return _not_applicable(fid, f"invariant phase {phi:.6f} is not pi")
    value = 1.0 - 2.0 * (np.sqrt(p1 * p2) * g12 + np.sqrt(p1 * p3) * g13 + np.sqrt(p2 * p3) * g23)
    return ClosedFormResult(value, fid)


def three_state_symmetric_real(s: float) -> ClosedFormResult:
    """Equal priors and equal real overlaps s: 1 - s."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"overlap must lie in (0, 1), got {s}")
    return ClosedFormResult(1.0 - float(s), "three_state_symmetric_real")


def applicable_forms(states: StateSet, g: GramData | None = None) -> list[ClosedFormResult]:
    """Evaluate every closed form whose precondition holds for ``states``."""
    g = g or gram(states)
    p = states.priors
    n = states.n_states
    out: list[ClosedFormResult] = []
    if n == 2:
        out.append(two_state_bound(p[0], p[1], g.moduli[0, 1]))
        return out
    if n != 3:
        return out

    m, ph = g.moduli, g.phases
    moduli = (m[0, 1], m[0, 2], m[1, 2])
    if m[0, 1] <= STRUCTURE_TOL:
        out.append(three_state_one_orthogonal(p, m[0, 2], m[1, 2], g12=m[0, 1]))
    inv = three_state_invariant_phase(p, moduli, (ph[0, 1], ph[0, 2], ph[1, 2]))
    if inv.applicable:
        out.append(inv)
    vals = g.gram[np.triu_indices(3, 1)]
    equal_priors = np.allclose(p, 1.0 / 3.0, rtol=0.0, atol=STRUCTURE_TOL)
    real_equal = np.all(np.abs(vals - vals[0]) <= STRUCTURE_TOL) and abs(vals[0].imag) <= STRUCTURE_TOL
    if equal_priors and real_equal and 0.0 < vals[0].real < 1.0:
        out.append(three_state_symmetric_real(vals[0].real))
    return out
