"""Country/product complexity indices from mutual averaging.

Three equivalent views are exposed: the alternating-averages iteration
(method of reflections, Hidalgo & Hausmann, PNAS 2009), the coupled
linear equations (a country's index is proportional to the mean index of
its products and vice versa), and the eigenproblem of the row-stochastic
country similarity matrix W those equations reduce to. Any eigenvector
of W solves the coupled pair, so the index order ``order_n`` is an
explicit parameter; the literature convention is the second.

Scale gauge: only the product a*b = 1/lambda is fixed by the equations,
so a = 1 is chosen and recorded on the solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator

from .errors import DegenerateSpectrum, InvalidParameter
from .matrix import BinaryCPMatrix
from .ranking import RankingResult, dense_rank
from .validation import as_cp_matrix

GAP_TOL = 1e-10
MAGNITUDE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """Raw and standardized index vectors for one eigenvector order."""

    order_n: int
    eigenvalue: float
    countries: tuple[str, ...]
    products: tuple[str, ...]
    eci_raw: np.ndarray
    pci_raw: np.ndarray
    a: float
    b: float
    eci_z: np.ndarray
    pci_z: np.ndarray

    def country_ranking(self) -> RankingResult:
        return RankingResult(
            algorithm="eci",
            entities=self.countries,
            scores=self.eci_z.copy(),
            ranks=dense_rank(self.eci_z),
            metadata=self._metadata(),
        )

    def product_ranking(self) -> RankingResult:
        return RankingResult(
            algorithm="eci",
            entities=self.products,
            scores=self.pci_z.copy(),
            ranks=dense_rank(self.pci_z),
            metadata=self._metadata(),
        )

    def _metadata(self) -> dict:
        return {
            "order_n": self.order_n,
            "lambda": self.eigenvalue,
            "standardization": "population",
        }


@dataclass(frozen=True, eq=False)
class ReflectionsTrace:
    """Alternating-averages levels; level 0 is diversification/ubiquity."""

    countries: tuple[str, ...]
    products: tuple[str, ...]
    country_levels: np.ndarray  # (depth + 1, C)
    product_levels: np.ndarray  # (depth + 1, P)
    depth: int

    def to_csv_text(self) -> str:
        header = "entity,kind," + ",".join(f"level_{n}" for n in range(self.depth + 1))
        lines = [header]
        for i, c in enumerate(self.countries):
            vals = ",".join(repr(float(v)) for v in self.country_levels[:, i])
            lines.append(f"{c},country,{vals}")
        for j, p in enumerate(self.products):
            vals = ",".join(repr(float(v)) for v in self.product_levels[:, j])
            lines.append(f"{p},product,{vals}")
        return "\n".join(lines) + "\n"


def country_similarity_matrix(m: BinaryCPMatrix) -> np.ndarray:
    """Row-stochastic W with W_cc' = (1/k_c) sum_p M_cp M_c'p / k_p."""
    m = as_cp_matrix(m)
    dense = m.m.astype(np.float64)
    d = m.diversification.astype(np.float64)
    u = m.ubiquity.astype(np.float64)
    return (dense / d[:, None]) @ (dense / u[None, :]).T


def product_similarity_matrix(m: BinaryCPMatrix) -> np.ndarray:
    """Product-side analogue of :func:`country_similarity_matrix`."""
    m = as_cp_matrix(m)
    dense = m.m.astype(np.float64)
    d = m.diversification.astype(np.float64)
    u = m.ubiquity.astype(np.float64)
    return (dense / u[None, :]).T @ (dense / d[:, None])


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks with ties sharing their average position (Spearman input)."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _orient(vec: np.ndarray, diversification: np.ndarray, countries) -> np.ndarray:
    """Fix the eigenvector sign: nonnegative Spearman correlation with
    diversification, falling back to a nonnegative entry for the
    lexicographically first country with a nonzero score."""
    r1 = _average_ranks(vec)
    r2 = _average_ranks(diversification)
    s1, s2 = r1.std(), r2.std()
    corr = 0.0
    if s1 > 0 and s2 > 0:
        corr = float(np.mean((r1 - r1.mean()) * (r2 - r2.mean())) / (s1 * s2))
    if corr < 0:
        return -vec
    if corr == 0.0:
        for i in np.argsort(np.asarray(countries)):
            if vec[i] != 0:
                return -vec if vec[i] < 0 else vec
    return vec


def _zscore(vec: np.ndarray) -> np.ndarray:
    std = vec.std()  # population convention
    # numerically constant vectors standardize to zero instead of noise
    if std <= 1e-12 * max(float(np.max(np.abs(vec))), 1e-300):
        return np.zeros_like(vec)
    return (vec - vec.mean()) / std


def eci_eigen(m: BinaryCPMatrix, order_n: int = 2) -> EigenSolution:
    """Index vectors from the N-th eigenvector of W (descending eigenvalues).

    W is similar to the symmetric PSD matrix S = D^-1/2 M U^-1 M^T D^-1/2,
    so the spectrum is computed with a dense symmetric solver (real,
    deterministic, residual well below the 1e-8 contract). The leading
    eigenvalue is 1 with the uniform eigenvector. Raises
    :class:`DegenerateSpectrum` when the requested eigenvalue is within
    1e-10 of a neighbour (eigenvector not unique) or below 1e-12 in
    magnitude (no nontrivial direction).
    """
    m = as_cp_matrix(m)
    n_countries = len(m.countries)
    if not 1 <= order_n <= n_countries:
        raise InvalidParameter(
            f"order_n must be in [1, {n_countries}], got {order_n}"
        )
    dense = m.m.astype(np.float64)
    d = m.diversification.astype(np.float64)
    u = m.ubiquity.astype(np.float64)
    half = dense / np.sqrt(d)[:, None] / np.sqrt(u)[None, :]
    s = half @ half.T
    s = (s + s.T) / 2.0
    evals, evecs = scipy.linalg.eigh(s)
    evals = evals[::-1]  # descending
    evecs = evecs[:, ::-1]
    lam = float(evals[order_n - 1])
    if abs(lam) < MAGNITUDE_TOL:
        raise DegenerateSpectrum(
            f"eigenvalue {order_n} is {lam:.3e}; only the trivial solution exists"
        )
    if order_n > 1 and abs(lam - evals[order_n - 2]) < GAP_TOL:
        raise DegenerateSpectrum(
            f"eigenvalues {order_n - 1} and {order_n} coincide; eigenvector undefined"
        )
    if order_n < n_countries and abs(lam - evals[order_n]) < GAP_TOL:
        raise DegenerateSpectrum(
            f"eigenvalues {order_n} and {order_n + 1} coincide; eigenvector undefined"
        )
    vec = evecs[:, order_n - 1] / np.sqrt(d)  # eigenvector of W
    vec = vec / np.linalg.norm(vec)
    eci_raw = _orient(vec, m.diversification, m.countries)
    a = 1.0
    b = 1.0 / lam
    pci_raw = b * (dense.T @ eci_raw) / u
    return EigenSolution(
        order_n=order_n,
        eigenvalue=lam,
        countries=m.countries,
        products=m.products,
        eci_raw=eci_raw,
        pci_raw=pci_raw,
        a=a,
        b=b,
        eci_z=_zscore(eci_raw),
        pci_z=_zscore(pci_raw),
    )


def eci_residual(m: BinaryCPMatrix, sol: EigenSolution) -> float:
    """Max violation of the two coupled averaging equations on the raw
    vectors, scaled by the largest entry magnitude."""
    m = as_cp_matrix(m)
    dense = m.m.astype(np.float64)
    d = m.diversification.astype(np.float64)
    u = m.ubiquity.astype(np.float64)
    mean_pci = (dense @ sol.pci_raw) / d
    mean_eci = (dense.T @ sol.eci_raw) / u
    res_c = np.max(np.abs(sol.eci_raw - sol.a * mean_pci))
    res_p = np.max(np.abs(sol.pci_raw - sol.b * mean_eci))
    scale = max(np.max(np.abs(sol.eci_raw)), np.max(np.abs(sol.pci_raw)), 1e-300)
    return float(max(res_c, res_p) / scale)


def method_of_reflections(m: BinaryCPMatrix, depth: int) -> ReflectionsTrace:
    """Alternating averages k_c^(n) = <k_p^(n-1)>_c, k_p^(n) = <k_c^(n-1)>_p
    starting from the degree vectors."""
    m = as_cp_matrix(m)
    if depth < 0:
        raise InvalidParameter("depth must be >= 0")
    dense = m.m.astype(np.float64)
    d = m.diversification.astype(np.float64)
    u = m.ubiquity.astype(np.float64)
    kc = [d.copy()]
    kp = [u.copy()]
    for _ in range(depth):
        kc.append((dense @ kp[-1]) / d)
        kp.append((dense.T @ kc[-2]) / u)
    return ReflectionsTrace(
        countries=m.countries,
        products=m.products,
        country_levels=np.array(kc),
        product_levels=np.array(kp),
        depth=depth,
    )


class EciEigen(BaseEstimator):
    """Estimator wrapper around :func:`eci_eigen`.

    After ``fit(X)`` the standardized scores are on ``eci_z_`` /
    ``pci_z_`` and the eigenvalue on ``eigenvalue_``.
    """

    def __init__(self, order_n: int = 2):
        self.order_n = order_n

    def fit(self, X, y=None):
        sol = eci_eigen(as_cp_matrix(X), order_n=self.order_n)
        self.solution_ = sol
        self.countries_ = sol.countries
        self.products_ = sol.products
        self.eigenvalue_ = sol.eigenvalue
        self.eci_raw_ = sol.eci_raw
        self.pci_raw_ = sol.pci_raw
        self.eci_z_ = sol.eci_z
        self.pci_z_ = sol.pci_z
        self.a_ = sol.a
        self.b_ = sol.b
        return self
