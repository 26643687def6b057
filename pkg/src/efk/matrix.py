"""Comparative-advantage filtering and structure of the country-product network.

Builds the binary matrix M (1 iff a country is a competitive exporter of
a product, by the Balassa criterion), exposes diversification and
ubiquity degrees, and quantifies nestedness with the NODF score of
Almeida-Neto et al. (Oikos 117, 2008).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import EmptyInput, EmptyMatrix, InvalidParameter, LengthMismatch
from .ingest import TradeTable


@dataclass(frozen=True, eq=False)
class RcaTable:
    """Revealed comparative advantage values, aligned with a TradeTable."""

    year: int
    countries: tuple[str, ...]
    products: tuple[str, ...]
    values: np.ndarray  # (C, P) float64


@dataclass(frozen=True, eq=False)
class BinaryCPMatrix:
    """0/1 country x product matrix with nonzero row and column degrees.

    ``dropped_countries`` / ``dropped_products`` record entities removed
    while re-establishing the degree invariants (binarization, noise, or
    counterfactual restriction).
    """

    countries: tuple[str, ...]
    products: tuple[str, ...]
    m: np.ndarray  # (C, P) int8, entries 0/1
    dropped_countries: tuple[str, ...] = ()
    dropped_products: tuple[str, ...] = ()

    def __post_init__(self):
        m = np.asarray(self.m)
        if m.ndim != 2:
            raise InvalidParameter("matrix must be 2-dimensional")
        if not np.isin(m, (0, 1)).all():
            raise InvalidParameter("matrix entries must be 0 or 1")
        if m.shape != (len(self.countries), len(self.products)):
            raise LengthMismatch("country/product labels do not match matrix shape")
        if len(set(self.countries)) != len(self.countries):
            raise InvalidParameter("duplicate country codes")
        if len(set(self.products)) != len(self.products):
            raise InvalidParameter("duplicate product codes")
        if m.size == 0:
            raise EmptyMatrix("matrix has no entries")
        if (m.sum(axis=1) == 0).any() or (m.sum(axis=0) == 0).any():
            raise InvalidParameter("zero row/column present; use from_dense to drop them")
        # fixed memory layout so downstream BLAS sums are reproducible
        object.__setattr__(self, "m", np.ascontiguousarray(m.astype(np.int8)))

    @classmethod
    def from_dense(
        cls,
        countries: Sequence[str],
        products: Sequence[str],
        dense,
        dropped_countries: tuple[str, ...] = (),
        dropped_products: tuple[str, ...] = (),
    ) -> "BinaryCPMatrix":
        """Build a matrix, dropping and recording all-zero rows/columns."""
        dense = np.asarray(dense)
        if dense.sum() == 0:
            raise EmptyMatrix("no entries survive")
        keep_rows = dense.sum(axis=1) > 0
        keep_cols = dense.sum(axis=0) > 0
        return cls(
            countries=tuple(c for c, k in zip(countries, keep_rows) if k),
            products=tuple(p for p, k in zip(products, keep_cols) if k),
            m=dense[keep_rows][:, keep_cols],
            dropped_countries=dropped_countries
            + tuple(c for c, k in zip(countries, keep_rows) if not k),
            dropped_products=dropped_products
            + tuple(p for p, k in zip(products, keep_cols) if not k),
        )

    @property
    def diversification(self) -> np.ndarray:
        """Per-country number of competitively exported products."""
        return self.m.sum(axis=1, dtype=np.int64)

    @property
    def ubiquity(self) -> np.ndarray:
        """Per-product number of competitive exporters."""
        return self.m.sum(axis=0, dtype=np.int64)

    def country_index(self, code: str) -> int:
        try:
            return self.countries.index(code)
        except ValueError:
            raise KeyError(code) from None

    def product_index(self, code: str) -> int:
        try:
            return self.products.index(code)
        except ValueError:
            raise KeyError(code) from None

    def equals(self, other: "BinaryCPMatrix") -> bool:
        return (
            self.countries == other.countries
            and self.products == other.products
            and np.array_equal(self.m, other.m)
        )

    def to_csv_text(self) -> str:
        lines = ["," + ",".join(self.products)]
        for i, country in enumerate(self.countries):
            lines.append(country + "," + ",".join(str(int(v)) for v in self.m[i]))
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "countries": list(self.countries),
            "products": list(self.products),
            "rows": [[int(v) for v in row] for row in self.m],
        }

    @classmethod
    def from_csv(cls, source: str | IO) -> "BinaryCPMatrix":
        text = source.read() if hasattr(source, "read") else source
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise EmptyInput("empty matrix file")
        products = tuple(lines[0].split(",")[1:])
        countries = []
        rows = []
        for ln in lines[1:]:
            parts = ln.split(",")
            if len(parts) != len(products) + 1:
                raise InvalidParameter(f"matrix row {parts[0]!r} has wrong width")
            countries.append(parts[0])
            rows.append([int(v) for v in parts[1:]])
        return cls(countries=tuple(countries), products=products, m=np.array(rows))


@dataclass(frozen=True)
class NestednessReport:
    """NODF scores in [0, 100] plus the matrix fill in (0, 1]."""

    nodf_rows: float
    nodf_cols: float
    nodf_total: float
    fill: float


def rca(table: TradeTable) -> RcaTable:
    """Balassa revealed comparative advantage.

    RCA_cp = (V_cp / sum_p V_cp) / (sum_c V_cp / sum_cp V_cp); entries
    whose row or column total is zero map to 0.
    """
    values = np.asarray(table.values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInput("empty trade table")
    total = values.sum()
    if total <= 0:
        raise EmptyInput("world total is zero")
    row_tot = values.sum(axis=1, keepdims=True)
    col_tot = values.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (values / row_tot) / (col_tot / total)
    out = np.nan_to_num(out, nan=0.0, posinf=0.0, neginf=0.0)
    return RcaTable(
        year=table.year, countries=table.countries, products=table.products, values=out
    )


def binarize(rca_table: RcaTable, threshold: float = 1.0) -> BinaryCPMatrix:
    """Threshold RCA at ``threshold`` (inclusive) into a BinaryCPMatrix.

    Countries and products left without any entry are dropped and
    recorded on the result.
    """
    if threshold <= 0:
        raise InvalidParameter("threshold must be positive")
    dense = (rca_table.values >= threshold).astype(np.int8)
    return BinaryCPMatrix.from_dense(rca_table.countries, rca_table.products, dense)


def _nodf_side(m: np.ndarray) -> tuple[float, int]:
    """Sum of paired NODF contributions over one side, plus the pair count."""
    n = m.shape[0]
    if n < 2:
        return 0.0, 0
    deg = m.sum(axis=1)
    overlap = (m @ m.T).astype(np.float64)
    total = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            if deg[i] != deg[j]:
                total += 100.0 * overlap[i, j] / min(deg[i], deg[j])
    return total, n * (n - 1) // 2


def nestedness(m: BinaryCPMatrix) -> NestednessReport:
    """NODF nestedness: ordered pairs with strictly decreasing degree
    contribute the percentage of the smaller basket that overlaps the
    larger; equal-degree pairs contribute zero.
    """
    dense = m.m.astype(np.float64)
    row_sum, row_pairs = _nodf_side(dense)
    col_sum, col_pairs = _nodf_side(dense.T)
    nodf_rows = row_sum / row_pairs if row_pairs else 0.0
    nodf_cols = col_sum / col_pairs if col_pairs else 0.0
    pairs = row_pairs + col_pairs
    nodf_total = (row_sum + col_sum) / pairs if pairs else 0.0
    return NestednessReport(
        nodf_rows=nodf_rows,
        nodf_cols=nodf_cols,
        nodf_total=nodf_total,
        fill=float(dense.sum() / dense.size),
    )


def order_by_scores(
    m: BinaryCPMatrix, country_scores: Sequence[float], product_scores: Sequence[float]
) -> BinaryCPMatrix:
    """Reorder rows by descending country score and columns by ascending
    product score (ties broken by code), preserving all values.
    """
    cs = np.asarray(country_scores, dtype=np.float64)
    ps = np.asarray(product_scores, dtype=np.float64)
    if cs.shape != (len(m.countries),) or ps.shape != (len(m.products),):
        raise LengthMismatch("score sequences do not align with matrix axes")
    row_order = sorted(range(len(m.countries)), key=lambda i: (-cs[i], m.countries[i]))
    col_order = sorted(range(len(m.products)), key=lambda j: (ps[j], m.products[j]))
    return BinaryCPMatrix(
        countries=tuple(m.countries[i] for i in row_order),
        products=tuple(m.products[j] for j in col_order),
        m=m.m[np.ix_(row_order, col_order)],
        dropped_countries=m.dropped_countries,
        dropped_products=m.dropped_products,
    )


def is_connected(m: BinaryCPMatrix) -> bool:
    """True iff the bipartite country-product graph is one component."""
    from scipy.sparse import csgraph

    c, p = m.m.shape
    adj = np.zeros((c + p, c + p))
    adj[:c, c:] = m.m
    adj[c:, :c] = m.m.T
    n_comp, _ = csgraph.connected_components(adj, directed=False)
    return int(n_comp) == 1


def write_matrix_json(m: BinaryCPMatrix, stream: IO[str]) -> None:
    json.dump(m.to_json_obj(), stream, indent=2)
    stream.write("\n")


class RcaBinarizer(BaseEstimator, TransformerMixin):
    """Stateless transformer from a TradeTable to a BinaryCPMatrix."""

    def __init__(self, threshold: float = 1.0):
        self.threshold = threshold

    def fit(self, X, y=None):
        return self

    def transform(self, X: TradeTable) -> BinaryCPMatrix:
        return binarize(rca(X), threshold=self.threshold)
