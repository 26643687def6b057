"""Product-removal experiments and cross-algorithm ranking comparison.

The headline experiment restricts one country's export basket to a
chosen subset (down to a single product), recomputes both ranking
algorithms from scratch on the restricted matrix, and reports the
before/after ranks and scores. Because an eigen-index country score is
the (scaled) mean index of its basket, keeping only an above-average
product raises it, while the fitness score, an extensive sum, collapses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .eci import EigenSolution, eci_eigen
from .errors import (
    EntityMismatch,
    InvalidParameter,
    NotCurrentlyExported,
    UnknownEntity,
)
from .fitness import fitness_fixed_point
from .matrix import BinaryCPMatrix
from .ranking import RankingResult, dense_rank


@dataclass(frozen=True)
class CounterfactualOutcome:
    """Before/after ranks and scores for the restricted country."""

    country: str
    kept_products: tuple[str, ...]
    fitness_rank_before: int
    fitness_rank_after: int
    eci_rank_before: int
    eci_rank_after: int
    fitness_score_before: float
    fitness_score_after: float
    eci_z_before: float
    eci_z_after: float

    def to_json_obj(self) -> dict:
        return {
            "country": self.country,
            "kept_products": list(self.kept_products),
            "fitness_rank_before": self.fitness_rank_before,
            "fitness_rank_after": self.fitness_rank_after,
            "eci_rank_before": self.eci_rank_before,
            "eci_rank_after": self.eci_rank_after,
            "fitness_score_before": self.fitness_score_before,
            "fitness_score_after": self.fitness_score_after,
            "eci_z_before": self.eci_z_before,
            "eci_z_after": self.eci_z_after,
        }


@dataclass(frozen=True, eq=False)
class RankingComparison:
    """Agreement statistics between two rankings over one entity set."""

    entities: tuple[str, ...]
    spearman: float
    kendall_tau: float
    top_k_overlap: float
    k: int
    rank_deltas: np.ndarray  # rank in b minus rank in a, aligned with entities

    def to_json_obj(self) -> dict:
        return {
            "spearman": self.spearman,
            "kendall_tau": self.kendall_tau,
            "top_k_overlap": self.top_k_overlap,
            "k": self.k,
            "rank_deltas": {e: int(d) for e, d in zip(self.entities, self.rank_deltas)},
        }

    def to_csv_text(self) -> str:
        lines = [
            f"# spearman={self.spearman!r} kendall_tau={self.kendall_tau!r}"
            f" top_{self.k}_overlap={self.top_k_overlap!r}",
            "entity,rank_delta",
        ]
        for e, d in zip(self.entities, self.rank_deltas):
            lines.append(f"{e},{int(d)}")
        return "\n".join(lines) + "\n"


def restrict_country(
    m: BinaryCPMatrix, country: str, kept_products: Sequence[str]
) -> BinaryCPMatrix:
    """Zero the country's row outside ``kept_products``.

    Products left without any exporter are removed and recorded on the
    result; no other country's row changes.
    """
    try:
        ci = m.country_index(country)
    except KeyError:
        raise UnknownEntity(f"unknown country {country!r}") from None
    kept = tuple(dict.fromkeys(kept_products))
    if not kept:
        raise InvalidParameter("kept_products must be nonempty")
    kept_idx = []
    for code in kept:
        try:
            pj = m.product_index(code)
        except KeyError:
            raise UnknownEntity(f"unknown product {code!r}") from None
        if m.m[ci, pj] == 0:
            raise NotCurrentlyExported(f"{country} does not currently export {code}")
        kept_idx.append(pj)
    dense = m.m.copy()
    row = np.zeros(len(m.products), dtype=np.int8)
    row[kept_idx] = 1
    dense[ci] = row
    return BinaryCPMatrix.from_dense(m.countries, m.products, dense)


def coalfish_experiment(
    m: BinaryCPMatrix,
    country: str,
    product: str,
    *,
    order_n: int = 2,
    frozen_pci: bool = False,
    tol: float = 1e-9,
    max_iter: int = 1000,
    rank_patience: int = 20,
) -> CounterfactualOutcome:
    """Restrict ``country`` to ``product`` alone and re-rank it.

    By default both algorithms are recomputed from scratch on the
    restricted matrix. With ``frozen_pci`` the product indices of the
    unrestricted matrix are kept fixed and country scores are re-derived
    as scaled basket means, which isolates the averaging argument from
    the spectral re-equilibration.
    """
    fit_before = fitness_fixed_point(m, tol=tol, max_iter=max_iter, rank_patience=rank_patience)
    eig_before = eci_eigen(m, order_n=order_n)
    restricted = restrict_country(m, country, [product])
    fit_after = fitness_fixed_point(
        restricted, tol=tol, max_iter=max_iter, rank_patience=rank_patience
    )
    if frozen_pci:
        eci_z_after, eci_ranks_after = _frozen_pci_scores(restricted, eig_before)
    else:
        eig_after = eci_eigen(restricted, order_n=order_n)
        eci_z_after = eig_after.eci_z
        eci_ranks_after = dense_rank(eci_z_after)

    ci_before = m.country_index(country)
    ci_after = restricted.country_index(country)
    fit_ranks_before = dense_rank(fit_before.fitness)
    fit_ranks_after = dense_rank(fit_after.fitness)
    eci_ranks_before = dense_rank(eig_before.eci_z)
    return CounterfactualOutcome(
        country=country,
        kept_products=(product,),
        fitness_rank_before=int(fit_ranks_before[ci_before]),
        fitness_rank_after=int(fit_ranks_after[ci_after]),
        eci_rank_before=int(eci_ranks_before[ci_before]),
        eci_rank_after=int(eci_ranks_after[ci_after]),
        fitness_score_before=float(fit_before.fitness[ci_before]),
        fitness_score_after=float(fit_after.fitness[ci_after]),
        eci_z_before=float(eig_before.eci_z[ci_before]),
        eci_z_after=float(eci_z_after[ci_after]),
    )


def _frozen_pci_scores(restricted: BinaryCPMatrix, eig_before: EigenSolution):
    """Country scores as scaled basket means over the unrestricted PCIs."""
    pci_by_code = dict(zip(eig_before.products, eig_before.pci_raw))
    pci = np.array([pci_by_code[p] for p in restricted.products])
    dense = restricted.m.astype(np.float64)
    raw = eig_before.a * (dense @ pci) / restricted.diversification
    std = raw.std()
    z = (raw - raw.mean()) / std if std > 0 else np.zeros_like(raw)
    return z, dense_rank(z)


def compare_rankings(a: RankingResult, b: RankingResult, k: int = 10) -> RankingComparison:
    """Spearman, Kendall tau, top-k overlap, and per-entity rank deltas.

    Deltas are ``rank_b - rank_a`` (positive = worse in b); swapping the
    arguments flips their sign and keeps the statistics.
    """
    if set(a.entities) != set(b.entities):
        raise EntityMismatch("rankings cover different entity sets")
    entities = tuple(sorted(a.entities))
    ra = np.array([a.rank_of(e) for e in entities], dtype=np.int64)
    rb = np.array([b.rank_of(e) for e in entities], dtype=np.int64)
    if len(entities) < 2:
        spearman = kendall = 1.0
    else:
        spearman = float(stats.spearmanr(ra, rb).statistic)
        kendall = float(stats.kendalltau(ra, rb).statistic)
    k_eff = min(k, len(entities))
    top_a = {e for e, _, _ in _top_rows(a)[:k_eff]}
    top_b = {e for e, _, _ in _top_rows(b)[:k_eff]}
    return RankingComparison(
        entities=entities,
        spearman=spearman,
        kendall_tau=kendall,
        top_k_overlap=len(top_a & top_b) / k_eff,
        k=k_eff,
        rank_deltas=rb - ra,
    )


def _top_rows(r: RankingResult):
    return r.rows()
