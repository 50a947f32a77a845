"""Minimization of the phase-weighted norm ||sum_j sqrt(p_j) e^{i theta_j} |psi_j>||^2.

The minimum over the free phases is an upper bound on the optimal average
success probability of unambiguous discrimination. The objective is a
trigonometric polynomial on the (N-1)-torus (theta_1 is fixed to 0), so a
multi-start local search with analytic derivatives is cheap and reliable at
the sizes of interest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .statesets import GramData, StateSet, gram

TWO_PI = 2.0 * np.pi
_FLAT = 1e-13


@dataclass(frozen=True)
class MinimizerConfig:
    n_starts: int = 64
    seed: int = 42
    tol: float = 1e-10
    max_iter: int = 10_000
    armijo: float = 1e-4
    max_halvings: int = 60


@dataclass(frozen=True)
class BoundResult:
    """Outcome of :func:`minimize_bound`.

    ``argmin`` is a full phase vector with ``argmin[0] == 0``. ``start_points``
    holds every start that was tried (same convention), ``start_values`` the
    objective there.
    """

    value: float
    argmin: np.ndarray
    starts_used: int
    best_gradient_norm: float
    converged: bool
    iterations: int = 0
    start_points: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    start_values: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _as_phase_vector(theta, n: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape != (n,):
        raise ValueError(f"phase vector must have length {n}, got {theta.size}")
    return theta


def _check_priors(priors, n: int) -> np.ndarray:
    p = np.asarray(priors, dtype=float).ravel()
    if p.shape != (n,):
        raise ValueError(f"expected {n} priors, got {p.size}")
    return p


def objective(g: GramData, priors, theta) -> float:
    """Pairwise cosine form of the bound objective.

    ``1 + sum_{i<j} 2 sqrt(p_i p_j) |G_ij| cos(theta_j - theta_i + phi_ij)``,
    where the leading 1 is ``sum_i p_i G_ii``. ``theta[0]`` need not be zero.
    """
    n = g.n_states
    p = _check_priors(priors, n)
    theta = _as_phase_vector(theta, n)
    iu, ju = np.triu_indices(n, 1)
    pairs = 2.0 * np.sqrt(p[iu] * p[ju]) * g.moduli[iu, ju]
    angles = theta[ju] - theta[iu] + g.phases[iu, ju]
    return float(np.dot(p, g.gram.diagonal().real) + np.dot(pairs, np.cos(angles)))


def norm_objective(states: StateSet | np.ndarray, priors, theta) -> float:
    """Direct evaluation of ``||sum_j sqrt(p_j) e^{i theta_j} psi_j||^2``."""
    arr = states.states if isinstance(states, StateSet) else np.asarray(states, dtype=complex)
    n = arr.shape[0]
    p = _check_priors(priors, n)
    theta = _as_phase_vector(theta, n)
    vec = (np.sqrt(p) * np.exp(1j * theta)) @ arr
    return float(np.vdot(vec, vec).real)


def objective_gradient(g: GramData, priors, theta) -> np.ndarray:
    """Derivative of :func:`objective` with respect to theta_2..theta_N."""
    n = g.n_states
    p = _check_priors(priors, n)
    theta = _as_phase_vector(theta, n)
    # d/d theta_k of 2 sqrt(p_i p_k)|G_ik| cos(theta_k - theta_i + phi_ik), with phi antisymmetric
    diff = theta[None, :] - theta[:, None] + g.phases
    w = 2.0 * np.sqrt(np.outer(p, p)) * g.moduli
    np.fill_diagonal(w, 0.0)
    # column k collects the pairs (i, k); the cosine is even so both orderings agree
    grad = -(w * np.sin(diff)).sum(axis=0)
    return grad[1:]


def _batch_terms(G: np.ndarray, sp: np.ndarray, thetas: np.ndarray):
    c = sp * np.exp(1j * thetas)
    gc = c @ G.T
    f = np.einsum("ki,ki->k", c.conj(), gc).real
    return c, gc, f


def _batch_values(G, sp, thetas):
    return _batch_terms(G, sp, thetas)[2]


def _batch_derivatives(G: np.ndarray, sp: np.ndarray, thetas: np.ndarray):
    """Objective, gradient and Hessian for a batch of full phase vectors (K, N)."""
    c, gc, f = _batch_terms(G, sp, thetas)
    s = c * gc.conj()
    grad = -2.0 * s.imag
    hess = 2.0 * (c[:, :, None] * G.conj()[None, :, :] * c.conj()[:, None, :]).real
    idx = np.arange(G.shape[0])
    hess[:, idx, idx] -= 2.0 * s.real
    return f, grad, hess


def _descend(G, sp, starts, cfg: MinimizerConfig):
    """Run damped Newton / gradient descent with backtracking from every start.

    ``starts`` are reduced vectors (K, N-1). Returns final reduced points,
    values, gradient norms, convergence flags and the iteration count.
    """
    k, m = starts.shape
    x = starts.copy()
    full = np.zeros((k, m + 1))
    active = np.ones(k, dtype=bool)
    converged = np.zeros(k, dtype=bool)
    gnorm = np.full(k, np.inf)
    fval = np.empty(k)
    it = 0
    for it in range(1, cfg.max_iter + 1):
        ids = np.flatnonzero(active)
        if ids.size == 0:
            break
        full[ids, 1:] = x[ids]
        f, grad, hess = _batch_derivatives(G, sp, full[ids])
        g = grad[:, 1:]
        h = hess[:, 1:, 1:]
        fval[ids] = f
        gn = np.linalg.norm(g, axis=1)
        gnorm[ids] = gn
        done = gn <= cfg.tol
        converged[ids[done]] = True
        active[ids[done]] = False
        keep = ~done
        ids, f, g, h = ids[keep], f[keep], g[keep], h[keep]
        if ids.size == 0:
            break

        direction = -g.copy()
        eig = np.linalg.eigvalsh(h)
        newton = eig[:, 0] > 1e-10 * np.maximum(1.0, np.abs(eig[:, -1]))
        if np.any(newton):
            direction[newton] = -np.linalg.solve(h[newton], g[newton][:, :, None])[:, :, 0]
        slope = np.einsum("ki,ki->k", g, direction)
        # a Newton step that is not a descent direction falls back to the gradient
        bad = slope >= 0
        direction[bad] = -g[bad]
        slope[bad] = -gn[keep][bad] ** 2

        step = np.ones(ids.size)
        pending = np.ones(ids.size, dtype=bool)
        trial = x[ids].copy()
        for _ in range(cfg.max_halvings):
            if not np.any(pending):
                break
            cand = x[ids][pending] + step[pending, None] * direction[pending]
            full_c = np.concatenate([np.zeros((cand.shape[0], 1)), cand], axis=1)
            fc = _batch_values(G, sp, full_c)
            ok = fc <= f[pending] + cfg.armijo * step[pending] * slope[pending]
            # decreases below float resolution of f cannot be certified by Armijo
            ok |= (-slope[pending] < _FLAT * np.maximum(1.0, np.abs(f[pending]))) & (
                fc <= f[pending] + _FLAT * np.maximum(1.0, np.abs(f[pending]))
            )
            where = np.flatnonzero(pending)
            trial[where[ok]] = cand[ok]
            pending[where[ok]] = False
            step[where[~ok]] *= 0.5
        stalled = pending
        x[ids[~stalled]] = np.mod(trial[~stalled], TWO_PI)
        # no acceptable step: at machine precision for this start
        active[ids[stalled]] = False

    ids = np.flatnonzero(active | ~converged)
    if ids.size:
        full[ids, 1:] = x[ids]
        f, grad, _ = _batch_derivatives(G, sp, full[ids])
        fval[ids] = f
        gnorm[ids] = np.linalg.norm(grad[:, 1:], axis=1)
        converged[ids] = gnorm[ids] <= cfg.tol
    return x, fval, gnorm, converged, it


def minimize_phase_form(
    G: np.ndarray, priors, cfg: MinimizerConfig | None = None, extra_starts=None
) -> BoundResult:
    """Minimize ``c^dagger G c`` with ``c_j = sqrt(p_j) e^{i theta_j}`` over theta_2..theta_N.

    Starts: theta_j = pi - arg G_1j first, then any ``extra_starts`` (reduced
    vectors), then ``cfg.n_starts`` uniform random points from ``cfg.seed``.
    The lowest value wins; ties go to the lowest start index.
    """
    cfg = cfg or MinimizerConfig()
    G = np.asarray(G, dtype=complex)
    n = G.shape[0]
    p = _check_priors(priors, n)
    sp = np.sqrt(p)

    off = np.abs(G - np.diag(G.diagonal()))
    if not np.any(off > 0.0):
        val = float(np.dot(p, G.diagonal().real))
        zero = np.zeros(n)
        return BoundResult(
            value=val, argmin=zero, starts_used=0, best_gradient_norm=0.0, converged=True,
            start_points=np.zeros((0, n)), start_values=np.zeros(0),
        )

    rng = np.random.default_rng(cfg.seed)
    blocks = [np.mod(np.pi - np.angle(G[0, 1:]), TWO_PI)[None, :]]
    if extra_starts is not None:
        blocks.append(np.atleast_2d(np.asarray(extra_starts, dtype=float)))
    blocks.append(rng.uniform(0.0, TWO_PI, size=(cfg.n_starts, n - 1)))
    starts = np.concatenate(blocks, axis=0)
    start_full = np.concatenate([np.zeros((starts.shape[0], 1)), starts], axis=1)
    start_values = _batch_values(G, sp, start_full)

    x, fval, gnorm, conv, iters = _descend(G, sp, starts, cfg)
    best = int(np.argmin(fval))  # argmin returns the first index on ties
    argmin = np.concatenate([[0.0], x[best]])
    return BoundResult(
        value=float(fval[best]),
        argmin=argmin,
        starts_used=int(starts.shape[0]),
        best_gradient_norm=float(gnorm[best]),
        converged=bool(conv[best]),
        iterations=int(iters),
        start_points=start_full,
        start_values=start_values,
    )


def minimize_bound(states: StateSet, cfg: MinimizerConfig | None = None) -> BoundResult:
    """Upper bound on the optimal average success probability for ``states``."""
    g = gram(states)
    return minimize_phase_form(g.gram, states.priors, cfg)
