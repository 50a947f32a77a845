"""Exact optimal unambiguous discrimination over the convex feasible set.

The feasible success-probability vectors are

    S = {gamma : X - diag(gamma) >= 0, gamma >= 0},   X = Gram matrix,

and the optimum maximizes sum_i p_i gamma_i over S. Optima sit on the
critical region where the smallest eigenvalue of X - diag(gamma) vanishes.
"""

from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .phase_bound import MinimizerConfig, minimize_bound
from .statesets import GramData, StateSet, gram

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9
NONNEG_TOL = 1e-12
CRITICAL_UPPER = 1e-6
BOUNDARY_TOL = 1e-6
SIMPLE_GAP = 1e-8
GRADIENT_MATCH_TOL = 1e-4
POVM_TOL = 1e-9
COMPLETENESS_TOL = 1e-10
_FLAT = 1e-14


class SolutionLabel(str, enum.Enum):
    INTERIOR_NONSINGULAR = "InteriorNonsingular"
    INTERIOR_SINGULAR = "InteriorSingular"
    BOUNDARY = "Boundary"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class GammaPoint:
    gamma: np.ndarray
    sigma_min: float
    feasible: bool

    @classmethod
    def at(cls, g: GramData, gamma) -> "GammaPoint":
        gamma = np.asarray(gamma, dtype=float)
        s, _ = sigma_min(g, gamma)
        ok = bool(s >= -FEASIBILITY_TOL and np.all(gamma >= -NONNEG_TOL))
        return cls(gamma=gamma, sigma_min=s, feasible=ok)


@dataclass(frozen=True)
class SigmaGradient:
    """Gradient of the smallest eigenvalue, or the degeneracy evidence."""

    gradient: np.ndarray | None
    gap: float

    @property
    def degenerate(self) -> bool:
        return self.gradient is None


@dataclass(frozen=True)
class SolutionClass:
    label: SolutionLabel
    gap: float
    gradient: np.ndarray | None = None
    zero_indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class PovmReport:
    elements: np.ndarray  # (N+1, d, d); the last one is the inconclusive outcome
    success_residual: float
    min_success_eig: float
    inconclusive_min_eig: float
    completeness_residual: float

    @property
    def valid(self) -> bool:
        return (
            self.success_residual < POVM_TOL
            and self.min_success_eig >= -POVM_TOL
            and self.inconclusive_min_eig >= -POVM_TOL
            and self.completeness_residual < COMPLETENESS_TOL
        )


@dataclass(frozen=True)
class SolverConfig:
    t_init: float = 1e-1
    t_final: float = 1e-12
    t_factor: float = 10.0
    pin_tol: float = 1e-5
    newton_tol: float = 1e-12
    max_newton: int = 200
    minimizer: MinimizerConfig = field(default_factory=MinimizerConfig)


@dataclass(frozen=True)
class SolverResult:
    gamma_opt: GammaPoint
    p_opt: float
    solution_class: SolutionClass
    povm_valid: bool
    bound: float
    bound_gap: float
    converged: bool
    pinned: tuple[int, ...] = ()
    povm: PovmReport | None = None


def _gram_matrix(g) -> np.ndarray:
    return g.gram if isinstance(g, GramData) else np.asarray(g, dtype=complex)


def sigma_min(g: GramData, gamma) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue of X - diag(gamma) and a unit eigenvector."""
    x = _gram_matrix(g)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (x.shape[0],):
        raise ValueError(f"gamma must have length {x.shape[0]}")
    w, v = np.linalg.eigh(x - np.diag(gamma))
    return float(w[0]), v[:, 0]


def sigma_min_gradient(g: GramData, gamma) -> SigmaGradient:
    """d sigma_min / d gamma_i = -|v_i|^2 when the smallest eigenvalue is simple."""
    x = _gram_matrix(g)
    w, v = np.linalg.eigh(x - np.diag(np.asarray(gamma, dtype=float)))
    gap = float(w[1] - w[0]) if w.size > 1 else np.inf
    if gap <= SIMPLE_GAP:
        return SigmaGradient(gradient=None, gap=gap)
    return SigmaGradient(gradient=-np.abs(v[:, 0]) ** 2, gap=gap)


def classify(states: StateSet, point: GammaPoint, priors=None) -> SolutionClass:
    """Boundary / interior nonsingular / interior singular label for an optimum."""
    p = states.priors if priors is None else np.asarray(priors, dtype=float)
    if not (-FEASIBILITY_TOL <= point.sigma_min <= CRITICAL_UPPER):
        raise ValueError(
            f"point is not on the critical region (sigma_min = {point.sigma_min:.3e})"
        )
    g = gram(states)
    sg = sigma_min_gradient(g, point.gamma)
    zeros = tuple(int(i) for i in np.flatnonzero(point.gamma < BOUNDARY_TOL))
    if zeros:
        return SolutionClass(SolutionLabel.BOUNDARY, sg.gap, sg.gradient, zeros)
    if not sg.degenerate and np.linalg.norm(sg.gradient + p) < GRADIENT_MATCH_TOL:
        return SolutionClass(SolutionLabel.INTERIOR_NONSINGULAR, sg.gap, sg.gradient)
    return SolutionClass(SolutionLabel.INTERIOR_SINGULAR, sg.gap, sg.gradient)


def reconstruct_povm(states: StateSet, gamma) -> PovmReport:
    """POVM with success elements gamma_i |dual_i><dual_i| and its validation."""
    gamma = np.asarray(gamma, dtype=float)
    lam = states.states.T  # columns are the states
    n, d = states.n_states, states.dim
    if gamma.shape != (n,):
        raise ValueError(f"gamma must have length {n}")
    duals = np.linalg.pinv(lam).conj().T  # columns: <dual_i|psi_j> = delta_ij
    elements = np.empty((n + 1, d, d), dtype=complex)
    for i in range(n):
        elements[i] = gamma[i] * np.outer(duals[:, i], duals[:, i].conj())
    elements[n] = np.eye(d) - elements[:n].sum(axis=0)

    # <psi_i| Pi_j |psi_i> against gamma_i delta_ij
    probs = np.einsum("di,jde,ei->ij", lam.conj(), elements[:n], lam).real
    success_residual = float(np.abs(probs - np.diag(gamma)).max())
    herm = 0.5 * (elements + elements.conj().transpose(0, 2, 1))
    min_success = float(min(np.linalg.eigvalsh(herm[i])[0] for i in range(n)))
    inconclusive = float(np.linalg.eigvalsh(herm[n])[0])
    completeness = float(np.abs(elements.sum(axis=0) - np.eye(d)).max())
    return PovmReport(
        elements=elements,
        success_residual=success_residual,
        min_success_eig=min_success,
        inconclusive_min_eig=inconclusive,
        completeness_residual=completeness,
    )


def _try_cholesky(m: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return False
    return True


def _barrier_path(x: np.ndarray, p: np.ndarray, free: np.ndarray, cfg: SolverConfig):
    """Follow the central path of p.gamma + t(logdet(X - G) + sum_free log gamma).

    Returns the last central point and whether every Newton stage met the
    decrement tolerance.
    """
    n = x.shape[0]
    gamma = np.zeros(n)
    gamma[free] = 0.5 * np.linalg.eigvalsh(x)[0]
    ok_all = True
    t = cfg.t_init
    while True:
        ok = False
        for _ in range(cfg.max_newton):
            m = x - np.diag(gamma)
            minv = np.linalg.inv(m)
            gf = gamma[free]
            grad = p[free] - t * minv.diagonal().real[free] + t / gf
            hess = -t * (np.abs(minv) ** 2)[np.ix_(free, free)] - t * np.diag(1.0 / gf**2)
            step = -np.linalg.solve(hess, grad)
            dec = float(grad @ step)  # Newton decrement squared, >= 0
            # below ~1e-14 the predicted gain is lost in rounding of the objective
            if dec / t < cfg.newton_tol or dec < _FLAT:
                ok = True
                break
            val = float(p @ gamma) + t * (np.linalg.slogdet(m)[1] + np.log(gf).sum())
            a = 1.0
            while a > 1e-20:
                trial = gamma.copy()
                trial[free] = gf + a * step
                if np.all(trial[free] > 0) and _try_cholesky(x - np.diag(trial)):
                    mt = x - np.diag(trial)
                    vt = float(p @ trial) + t * (
                        np.linalg.slogdet(mt)[1] + np.log(trial[free]).sum()
                    )
                    if vt >= val + 0.25 * a * dec:
                        break
                a *= 0.5
            else:
                break
            gamma = trial
        ok_all &= ok
        if t <= cfg.t_final * (1 + 1e-9):
            return gamma, ok_all
        t = max(t / cfg.t_factor, cfg.t_final)


def _to_critical(x: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Scale gamma by the largest tau >= 1 keeping X - tau*diag(gamma) >= 0."""
    if not np.any(gamma > 0):
        return gamma
    root = np.sqrt(np.clip(gamma, 0.0, None))
    k = root[:, None] * np.linalg.inv(x) * root[None, :]
    lam = float(np.linalg.eigvalsh(0.5 * (k + k.conj().T))[-1])
    tau = 1.0 / lam
    if tau < 1.0:
        return gamma
    # stay on the feasible side of the eigenvalue crossing
    for shrink in (0.0, 1e-15, 1e-14, 1e-13, 1e-12):
        cand = tau * (1.0 - shrink) * gamma
        if np.linalg.eigvalsh(x - np.diag(cand))[0] >= -1e-15:
            return cand
    return gamma


def solve_optimal(states: StateSet, cfg: SolverConfig | None = None) -> SolverResult:
    """Maximize sum_i p_i gamma_i over the feasible set.

    Log-det barrier continuation with Newton steps; coordinates that collapse
    below ``cfg.pin_tol`` are pinned to zero and the reduced problem is solved
    again. The final point is pushed along its ray onto the critical region.
    """
    cfg = cfg or SolverConfig()
    g = gram(states)
    x = g.gram
    p = np.asarray(states.priors, dtype=float)
    n = states.n_states

    free = np.arange(n)
    gamma, ok = _barrier_path(x, p, free, cfg)
    pinned = np.flatnonzero(gamma < cfg.pin_tol)
    if pinned.size:
        free = np.setdiff1d(np.arange(n), pinned)
        logger.debug("pinning %s to zero and re-solving", pinned.tolist())
        if free.size:
            gamma, ok = _barrier_path(x, p, free, cfg)
        else:
            gamma = np.zeros(n)

    gamma = _to_critical(x, gamma)
    gamma[pinned] = 0.0
    point = GammaPoint.at(g, gamma)
    p_opt = float(p @ gamma)
    klass = classify(states, point)
    povm = reconstruct_povm(states, gamma)
    bound = minimize_bound(states, cfg.minimizer).value
    if not ok:
        logger.warning("barrier Newton stages did not all reach tolerance")
    return SolverResult(
        gamma_opt=point,
        p_opt=p_opt,
        solution_class=klass,
        povm_valid=povm.valid,
        bound=bound,
        bound_gap=bound - p_opt,
        converged=ok,
        pinned=tuple(int(i) for i in pinned),
        povm=povm,
    )


def _feasible_mask(x: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    m = np.broadcast_to(x, (gammas.shape[0], n, n)).copy()
    idx = np.arange(n)
    m[:, idx, idx] -= gammas
    return np.linalg.eigvalsh(m)[:, 0] >= 0.0


def brute_force_oracle(states: StateSet, resolution: int | None = None, chunk: int = 50_000) -> float:
    """Grid search for max p.gamma over [0,1]^N intersected with the feasible set.

    The best grid point is refined once over its half-step neighbourhood. The
    result is feasible by construction, hence a lower bound on P_opt.
    """
    n = states.n_states
    if resolution is None:
        resolution = 60 if n <= 3 else 30
    if resolution < 20:
        raise ValueError(f"resolution must be at least 20, got {resolution}")
    x = gram(states).gram
    p = np.asarray(states.priors, dtype=float)
    h = 1.0 / resolution
    axis = np.arange(resolution + 1) * h

    # rows in lexicographic order of the index vectors
    grid = np.indices((resolution + 1,) * n).reshape(n, -1).T
    best_val, best_pt = -np.inf, None
    for start in range(0, grid.shape[0], chunk):
        gammas = axis[grid[start : start + chunk]]
        vals = gammas @ p
        # only points that could beat the incumbent need an eigenvalue check
        cand = np.flatnonzero(vals > best_val)
        if cand.size == 0:
            continue
        feas = _feasible_mask(x, gammas[cand])
        if not np.any(feas):
            continue
        c = cand[feas]
        j = c[np.argmax(vals[c])]  # first maximum is the lexicographically smallest
        if vals[j] > best_val:
            best_val, best_pt = float(vals[j]), gammas[j]

    if best_pt is None:
        return 0.0
    offsets = np.array(list(itertools.product((-0.5, 0.0, 0.5), repeat=n))) * h
    near = np.clip(best_pt + offsets, 0.0, 1.0)
    feas = _feasible_mask(x, near)
    vals = near @ p
    if np.any(feas):
        best_val = max(best_val, float(vals[feas].max()))
    return best_val
