"""Discrimination instances: validated state sets and their Gram data."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

NORM_TOL = 1e-9
PRIOR_TOL = 1e-9
INDEPENDENCE_TOL = 1e-10


class InstanceError(ValueError):
    """Raised for malformed or physically invalid discrimination instances."""


@dataclass(frozen=True)
class StateSet:
    """N pure states of dimension ``dim`` with prior probabilities.

    ``states`` has shape (N, dim); row i is |psi_i>. Construct through
    :func:`make_stateset` or :func:`parse_stateset` so the invariants are
    checked.
    """

    dim: int
    states: np.ndarray
    priors: np.ndarray

    @property
    def n_states(self) -> int:
        return self.states.shape[0]

    def to_dict(self) -> dict:
        return {
            "dim": int(self.dim),
            "states": [[[float(z.real), float(z.imag)] for z in row] for row in self.states],
            "priors": [float(p) for p in self.priors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class GramData:
    """Gram matrix ``gram[i, j] = <psi_i|psi_j>`` with its moduli and phases.

    ``phases`` is a full antisymmetric matrix; only the entries with i < j are
    meaningful (phi_ji = -phi_ij, diagonal 0).
    """

    gram: np.ndarray
    moduli: np.ndarray
    phases: np.ndarray

    @property
    def n_states(self) -> int:
        return self.gram.shape[0]

    def upper_phases(self) -> dict[tuple[int, int], float]:
        n = self.n_states
        return {(i, j): float(self.phases[i, j]) for i in range(n) for j in range(i + 1, n)}


def check_states(states: Any) -> np.ndarray:
    """Coerce ``states`` to a complex (N, d) array with N >= 2 and d >= N."""
    arr = np.asarray(states, dtype=complex)
    if arr.ndim != 2:
        raise InstanceError(f"states must be a 2-D array (N, d), got shape {arr.shape}")
    n, d = arr.shape
    if n < 2:
        raise InstanceError(f"need at least two states, got {n}")
    if d < n:
        raise InstanceError(f"dimension {d} is smaller than the number of states {n}")
    if not np.all(np.isfinite(arr)):
        raise InstanceError("states contain non-finite entries")
    return arr


def check_priors(priors: Any, n: int) -> np.ndarray:
    """Validate a probability vector of length ``n``; ``None`` means uniform."""
    if priors is None:
        return np.full(n, 1.0 / n)
    p = np.asarray(priors, dtype=float).ravel()
    if p.shape != (n,):
        raise InstanceError(f"expected {n} priors, got {p.size}")
    if not np.all(np.isfinite(p)) or np.any(p <= 0) or np.any(p >= 1):
        raise InstanceError("priors must lie strictly between 0 and 1")
    if abs(p.sum() - 1.0) > PRIOR_TOL:
        raise InstanceError(f"priors sum to {p.sum():.12g}, not 1")
    return p


def make_stateset(states: Any, priors: Any = None, normalize: bool = False) -> StateSet:
    """Build a validated :class:`StateSet`.

    With ``normalize=True`` the states are rescaled to unit norm and the
    priors divided by their sum instead of being rejected.
    """
    arr = check_states(states)
    norms = np.linalg.norm(arr, axis=1)
    if normalize:
        if np.any(norms == 0):
            raise InstanceError("cannot normalize a zero vector")
        arr = arr / norms[:, None]
        if priors is not None:
            raw = np.asarray(priors, dtype=float).ravel()
            if raw.size and np.all(np.isfinite(raw)) and raw.sum() > 0:
                priors = raw / raw.sum()
    elif np.any(np.abs(norms - 1.0) > NORM_TOL):
        bad = int(np.argmax(np.abs(norms - 1.0)))
        raise InstanceError(f"state {bad} has norm {norms[bad]:.12g}; use normalize to rescale")
    p = check_priors(priors, arr.shape[0])

    g = arr.conj() @ arr.T
    lam_min = float(np.linalg.eigvalsh(g)[0])
    if lam_min <= INDEPENDENCE_TOL:
        raise InstanceError(
            f"states are linearly dependent (smallest Gram eigenvalue {lam_min:.3e})"
        )
    arr.setflags(write=False)
    p.setflags(write=False)
    return StateSet(dim=arr.shape[1], states=arr, priors=p)


def _parse_state(entry: Any, dim: int, index: int) -> np.ndarray:
    if not isinstance(entry, list):
        raise InstanceError(f"state {index} must be a list")
    if len(entry) != dim:
        raise InstanceError(f"state {index} has length {len(entry)}, expected dim={dim}")
    out = np.empty(dim, dtype=complex)
    for k, z in enumerate(entry):
        if isinstance(z, (int, float)) and not isinstance(z, bool):
            out[k] = float(z)
        elif isinstance(z, list) and len(z) == 2 and all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in z
        ):
            out[k] = complex(z[0], z[1])
        else:
            raise InstanceError(f"state {index}, component {k}: expected real or [re, im]")
    return out


def parse_stateset(text: str | dict, normalize: bool = False) -> StateSet:
    """Parse the JSON instance format into a validated :class:`StateSet`.

    ``{"dim": d, "states": [[[re, im], ...], ...], "priors": [...]}``; a state
    may also be a flat list of reals, and missing priors mean uniform.
    """
    if isinstance(text, dict):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"malformed instance JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceError("instance must be a JSON object")
    if "dim" not in doc or "states" not in doc:
        raise InstanceError("instance requires 'dim' and 'states'")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InstanceError("'dim' must be a positive integer")
    states = doc["states"]
    if not isinstance(states, list) or not states:
        raise InstanceError("'states' must be a non-empty list")
    arr = np.array([_parse_state(s, dim, i) for i, s in enumerate(states)])
    priors = doc.get("priors")
    if priors is not None and (
        not isinstance(priors, list)
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in priors)
    ):
        raise InstanceError("'priors' must be a list of numbers")
    return make_stateset(arr, priors, normalize=normalize)


def load_stateset(path: str, normalize: bool = False) -> StateSet:
    with open(path, encoding="utf-8") as fh:
        return parse_stateset(fh.read(), normalize=normalize)


def gram(states: StateSet | np.ndarray) -> GramData:
    """Gram matrix of the states, with moduli and phases in (-pi, pi]."""
    arr = states.states if isinstance(states, StateSet) else np.asarray(states, dtype=complex)
    g = arr.conj() @ arr.T
    g = 0.5 * (g + g.conj().T)
    np.fill_diagonal(g, g.diagonal().real)
    moduli = np.abs(g)
    phases = np.angle(g)
    # angle() returns -pi for negative reals with a -0.0 imaginary part
    phases[np.isclose(phases, -np.pi, rtol=0.0, atol=1e-15)] = np.pi
    phases = np.triu(phases, 1)
    phases = phases - phases.T
    for a in (g, moduli, phases):
        a.setflags(write=False)
    return GramData(gram=g, moduli=moduli, phases=phases)


def states_from_gram(g: Any) -> np.ndarray:
    """Rows |psi_i> (dimension N) whose Gram matrix is ``g``.

    Uses the Hermitian square root, so ``g`` must be positive definite.
    """
    g = np.asarray(g, dtype=complex)
    w, v = np.linalg.eigh(g)
    if w[0] <= 0:
        raise InstanceError("Gram matrix is not positive definite")
    root = (v * np.sqrt(w)) @ v.conj().T
    # columns of root are the states: root^dagger root = g
    return root.T.copy()
