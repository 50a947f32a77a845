"""Entanglement-transfer view of the bound.

The state sum_j sqrt(p_j) e^{i theta_j} |psi_j> |Phi_j> (Phi_j the Fourier
family of maximally entangled states) has Schmidt coefficients
||eta_k|| / sqrt(N). Its optimal local conversion probability to a maximally
entangled state is min_k ||eta_k||^2, which gives an independent route to the
phase bound. The bipartite vector itself is never built: the eta norms carry
everything needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phase_bound import BoundResult, MinimizerConfig, minimize_phase_form, norm_objective
from .statesets import StateSet, gram

IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class EtaFamily:
    vectors: np.ndarray  # (N, d), row k-1 is eta_k
    norms_sq: np.ndarray


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Squared Schmidt coefficients, sorted in descending order."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("spectrum must be a non-empty 1-D sequence")
        if np.any(c <= 0):
            raise ValueError("Schmidt coefficients must be strictly positive")
        if np.any(np.diff(c) > 1e-15):
            raise ValueError("spectrum must be sorted in descending order")
        if abs(c.sum() - 1.0) > 1e-10:
            raise ValueError(f"spectrum sums to {c.sum():.12g}, not 1")
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True)
class PhaseShiftReport:
    k: int
    eta_norm_sq: float
    shifted_norm_sq: float
    shifted_theta: np.ndarray

    @property
    def residual(self) -> float:
        return abs(self.eta_norm_sq - self.shifted_norm_sq)


def _fourier_phases(n: int, k: int) -> np.ndarray:
    """exp(2 pi i (r-1)(k-1)/N) for r = 1..N; ``k`` is 1-based."""
    r = np.arange(n)
    return np.exp(2j * np.pi * r * (k - 1) / n)


def _theta(theta, n: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape != (n,):
        raise ValueError(f"phase vector must have length {n}, got {theta.size}")
    return theta


def eta_family(states: StateSet, theta) -> EtaFamily:
    n = states.n_states
    theta = _theta(theta, n)
    weights = np.sqrt(states.priors) * np.exp(1j * theta)
    coeff = np.array([weights * _fourier_phases(n, k) for k in range(1, n + 1)])
    vectors = coeff @ states.states
    norms_sq = np.einsum("kd,kd->k", vectors.conj(), vectors).real
    return EtaFamily(vectors=vectors, norms_sq=norms_sq)


def schmidt_spectrum(states: StateSet, theta) -> SchmidtSpectrum:
    norms_sq = eta_family(states, theta).norms_sq
    if np.any(norms_sq <= 0):
        raise ValueError("vanishing eta vector: the states are linearly dependent")
    alphas = np.sort(norms_sq / states.n_states)[::-1]
    # absorb rounding so the coefficients sum to one exactly enough for the invariant
    return SchmidtSpectrum(alphas / alphas.sum())


def vidal_terms(spec: SchmidtSpectrum) -> np.ndarray:
    """q_l = (sum_{i>=l} alpha_i) / ((d - l + 1) / d) for l = 1..d."""
    a = spec.coeffs
    d = a.size
    tails = np.cumsum(a[::-1])[::-1]
    return tails * d / (d - np.arange(d))


def vidal_probability(spec: SchmidtSpectrum) -> float:
    """Optimal probability of converting to a maximally entangled d x d state.

    Computed as min_l q_l and checked against the closed form d * alpha_d.
    """
    a = spec.coeffs
    if a.size == 0:
        raise ValueError("empty spectrum")
    q_min = float(vidal_terms(spec).min())
    closed = float(a.size * a[-1])
    if abs(q_min - closed) > IDENTITY_TOL:
        raise ArithmeticError(f"min_l q_l = {q_min!r} differs from d*alpha_d = {closed!r}")
    return q_min


def conversion_probability(states: StateSet, theta) -> float:
    """min_k ||eta_k||^2 for the given phases."""
    return float(eta_family(states, theta).norms_sq.min())


def check_phase_shift_equivalence(states: StateSet, k: int, theta) -> PhaseShiftReport:
    """Compare ||eta_k(theta)||^2 with ||eta_1(theta')||^2 for the shifted phases.

    theta'_r = theta_r + 2 pi (r-1)(k-1)/N.
    """
    n = states.n_states
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    theta = _theta(theta, n)
    lhs = float(eta_family(states, theta).norms_sq[k - 1])
    shifted = theta + 2.0 * np.pi * np.arange(n) * (k - 1) / n
    rhs = norm_objective(states, states.priors, shifted)
    return PhaseShiftReport(k=k, eta_norm_sq=lhs, shifted_norm_sq=rhs, shifted_theta=shifted)


def minimize_eta_norm(states: StateSet, k: int, cfg: MinimizerConfig | None = None) -> BoundResult:
    """Minimize ||eta_k||^2 over the phases with the bound minimizer.

    eta_k is the bound vector for the states rotated by the k-th Fourier
    phases, so the same minimizer applies to the rotated Gram matrix.
    """
    n = states.n_states
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    w = _fourier_phases(n, k)
    g = gram(states).gram
    rotated = np.conj(w)[:, None] * g * w[None, :]
    return minimize_phase_form(rotated, states.priors, cfg)
