"""Country fitness and product complexity via the nonlinear fixed point.

The map (Tacchella et al., Sci. Rep. 2, 2012) scores a country by the
plain sum of its products' complexities, so the weights are extensive in
basket size, and penalizes a product harmonically by the inverse fitness
of every exporter: one weak exporter is enough to cap a product's
complexity. Both vectors are rescaled to unit mean after every step.

Iteration stops when values settle below ``tol`` or, because weak
countries' scores can decay geometrically forever without any rank
movement, when the dense rank orders of both vectors have been stable
for ``rank_patience`` consecutive iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .errors import NonConvergence, ZeroDenominator
from .matrix import BinaryCPMatrix
from .ranking import RankingResult, dense_rank
from .validation import as_cp_matrix, check_positive_vector


@dataclass(frozen=True, eq=False)
class FitnessResult:
    """Converged (or last) state of the fitness/complexity iteration."""

    countries: tuple[str, ...]
    products: tuple[str, ...]
    fitness: np.ndarray  # per-country, mean 1
    complexity: np.ndarray  # per-product, mean 1
    iterations: int
    converged: bool
    final_rank_stability: int
    residual: float

    def country_ranking(self) -> RankingResult:
        return RankingResult(
            algorithm="fitness",
            entities=self.countries,
            scores=self.fitness.copy(),
            ranks=dense_rank(self.fitness),
            metadata=self._metadata(),
        )

    def product_ranking(self) -> RankingResult:
        return RankingResult(
            algorithm="fitness",
            entities=self.products,
            scores=self.complexity.copy(),
            ranks=dense_rank(self.complexity),
            metadata=self._metadata(),
        )

    def _metadata(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
        }


def _step(dense: np.ndarray, f: np.ndarray, q: np.ndarray):
    f_new = dense @ q
    inv_sums = dense.T @ (1.0 / f)
    if (inv_sums == 0).any():
        raise ZeroDenominator("a product has no exporters")
    q_new = 1.0 / inv_sums
    return f_new / f_new.mean(), q_new / q_new.mean()


def fitness_step(m: BinaryCPMatrix, f, q):
    """One mean-normalized update of (fitness, complexity)."""
    m = as_cp_matrix(m)
    f = check_positive_vector(f, len(m.countries), "fitness")
    q = check_positive_vector(q, len(m.products), "complexity")
    return _step(m.m.astype(np.float64), f, q)


def fitness_fixed_point(
    m: BinaryCPMatrix,
    tol: float = 1e-9,
    max_iter: int = 1000,
    rank_patience: int = 20,
) -> FitnessResult:
    """Iterate from the uniform start f = q = 1 until convergence.

    Converged means either the max relative change of both vectors fell
    below ``tol`` or the dense rank orders of both vectors were
    unchanged for ``rank_patience`` consecutive iterations (an order
    alternating with period 2, which the simultaneous update produces on
    some decaying structures, counts as unchanged). Hitting ``max_iter``
    without either raises :class:`NonConvergence` with the last state
    attached.
    """
    m = as_cp_matrix(m)
    dense = m.m.astype(np.float64)
    f = np.ones(len(m.countries))
    q = np.ones(len(m.products))
    ranks = [(dense_rank(f), dense_rank(q))] * 2  # (t-2, t-1)
    stable = 0
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            f_new, q_new = _step(dense, f, q)
        if (
            not (np.isfinite(f_new).all() and np.isfinite(q_new).all())
            or (f_new <= 0).any()
            or (q_new <= 0).any()
        ):
            break  # decay under/overflowed; surface as NonConvergence
        residual = max(
            float(np.max(np.abs(f_new - f) / f)), float(np.max(np.abs(q_new - q) / q))
        )
        new_ranks = (dense_rank(f_new), dense_rank(q_new))
        # The simultaneous update can lock decaying symmetric structures
        # into a period-2 order; alternation counts as a settled order.
        if any(
            np.array_equal(new_ranks[0], old[0]) and np.array_equal(new_ranks[1], old[1])
            for old in ranks
        ):
            stable += 1
        else:
            stable = 0
        f, q = f_new, q_new
        ranks = [ranks[1], new_ranks]
        if residual < tol or stable >= rank_patience:
            return FitnessResult(
                countries=m.countries,
                products=m.products,
                fitness=f,
                complexity=q,
                iterations=iteration,
                converged=True,
                final_rank_stability=stable,
                residual=residual,
            )
    last = FitnessResult(
        countries=m.countries,
        products=m.products,
        fitness=f,
        complexity=q,
        iterations=max_iter,
        converged=False,
        final_rank_stability=stable,
        residual=residual,
    )
    raise NonConvergence(
        f"no convergence after {max_iter} iterations (residual {residual:.3e})",
        result=last,
    )


class FitnessComplexity(BaseEstimator):
    """Estimator wrapper around :func:`fitness_fixed_point`.

    After ``fit(X)`` (X a BinaryCPMatrix or 0/1 array) the scores are on
    ``fitness_`` / ``complexity_`` with label tuples ``countries_`` /
    ``products_``.
    """

    def __init__(self, tol: float = 1e-9, max_iter: int = 1000, rank_patience: int = 20):
        self.tol = tol
        self.max_iter = max_iter
        self.rank_patience = rank_patience

    def fit(self, X, y=None):
        result = fitness_fixed_point(
            as_cp_matrix(X),
            tol=self.tol,
            max_iter=self.max_iter,
            rank_patience=self.rank_patience,
        )
        self.result_ = result
        self.countries_ = result.countries
        self.products_ = result.products
        self.fitness_ = result.fitness
        self.complexity_ = result.complexity
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.residual_ = result.residual
        return self
