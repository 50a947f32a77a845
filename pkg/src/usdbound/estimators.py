"""scikit-learn style wrappers.

``X`` is the (N, d) array of states (one state per row) and ``sample_weight``
the prior probabilities, so the estimators plug into ``clone``,
``get_params`` / ``set_params`` and parameter searches.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .phase_bound import MinimizerConfig, minimize_bound
from .solver import SolverConfig, solve_optimal
from .statesets import check_states, make_stateset


class PhaseBound(BaseEstimator):
    """Multi-start minimizer of the phase bound.

    Fitted attributes: ``bound_``, ``thetas_``, ``converged_``,
    ``n_starts_used_``, ``result_``.
    """

    def __init__(self, n_starts=64, seed=42, tol=1e-10, max_iter=10_000, normalize=False):
        self.n_starts = n_starts
        self.seed = seed
        self.tol = tol
        self.max_iter = max_iter
        self.normalize = normalize

    def _config(self) -> MinimizerConfig:
        return MinimizerConfig(
            n_starts=self.n_starts, seed=self.seed, tol=self.tol, max_iter=self.max_iter
        )

    def fit(self, X, y=None, sample_weight=None):
        states = make_stateset(check_states(X), sample_weight, normalize=self.normalize)
        res = minimize_bound(states, self._config())
        self.states_ = states
        self.result_ = res
        self.bound_ = res.value
        self.thetas_ = res.argmin
        self.converged_ = res.converged
        self.n_starts_used_ = res.starts_used
        return self

    def score(self, X=None, y=None, sample_weight=None):
        """The fitted bound (refits when ``X`` is given)."""
        if X is not None:
            self.fit(X, sample_weight=sample_weight)
        check_is_fitted(self, "bound_")
        return self.bound_


class OptimalUSD(BaseEstimator):
    """Optimal unambiguous discrimination measurement for a set of states.

    ``fit`` solves for the success probabilities; ``predict_proba`` then gives
    the outcome distribution of the reconstructed POVM on arbitrary input
    states, with the inconclusive outcome in the last column.
    """

    def __init__(self, t_final=1e-12, pin_tol=1e-5, n_starts=64, seed=42, normalize=False):
        self.t_final = t_final
        self.pin_tol = pin_tol
        self.n_starts = n_starts
        self.seed = seed
        self.normalize = normalize

    def fit(self, X, y=None, sample_weight=None):
        states = make_stateset(check_states(X), sample_weight, normalize=self.normalize)
        cfg = SolverConfig(
            t_final=self.t_final,
            pin_tol=self.pin_tol,
            minimizer=MinimizerConfig(n_starts=self.n_starts, seed=self.seed),
        )
        res = solve_optimal(states, cfg)
        self.states_ = states
        self.result_ = res
        self.gamma_ = res.gamma_opt.gamma
        self.p_opt_ = res.p_opt
        self.bound_ = res.bound
        self.solution_class_ = str(res.solution_class.label)
        self.povm_ = res.povm.elements
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "povm_")
        x = np.atleast_2d(np.asarray(X, dtype=complex))
        if x.shape[1] != self.states_.dim:
            raise ValueError(f"expected states of dimension {self.states_.dim}, got {x.shape[1]}")
        x = x / np.linalg.norm(x, axis=1, keepdims=True)
        probs = np.einsum("sd,kde,se->sk", x.conj(), self.povm_, x).real
        return np.clip(probs, 0.0, 1.0)

    def predict(self, X):
        """Most likely outcome per input state; -1 stands for inconclusive."""
        probs = self.predict_proba(X)
        out = np.argmax(probs, axis=1)
        return np.where(out == probs.shape[1] - 1, -1, out)

    def score(self, X=None, y=None, sample_weight=None):
        """Optimal average success probability of the fitted instance."""
        check_is_fitted(self, "p_opt_")
        return self.p_opt_
