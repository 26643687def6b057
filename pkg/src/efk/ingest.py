"""Parse, validate, and aggregate export and GDP-per-capita CSV data.

Two fixed schemas are accepted, both UTF-8 with ``\\n`` or ``\\r\\n`` line
endings, a decimal point and no thousands separators:

* trade: ``year,exporter,product,value`` (value in current USD, >= 0)
* gdp:   ``country,year,gdppc``         (USD per person, > 0)

Duplicate trade rows for the same (exporter, product) are summed when a
:class:`TradeTable` is built; duplicate GDP rows are an error because a
country-year has a single scalar value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import (
    DuplicateSample,
    EmptyInput,
    MalformedRecord,
    NonPositiveGdp,
)

TRADE_HEADER = "year,exporter,product,value"
GDP_HEADER = "country,year,gdppc"

YEAR_MIN = 1900
YEAR_MAX = 2100


@dataclass(frozen=True)
class TradeRecord:
    """One raw export observation."""

    year: int
    exporter: str
    product: str
    value: float


@dataclass(frozen=True, eq=False)
class TradeTable:
    """Dense country x product export values for a single year.

    Axes are lexicographically sorted and carry no all-zero rows or
    columns; duplicate input rows have been summed.
    """

    year: int
    countries: tuple[str, ...]
    products: tuple[str, ...]
    values: np.ndarray  # (C, P) float64, nonnegative

    def total(self) -> float:
        return float(self.values.sum())

    def value(self, country: str, product: str) -> float:
        return float(
            self.values[self.countries.index(country), self.products.index(product)]
        )

    def equals(self, other: "TradeTable") -> bool:
        return (
            self.year == other.year
            and self.countries == other.countries
            and self.products == other.products
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class GdpSeries:
    """GDP per capita samples for one country, at most one per year."""

    country: str
    samples: dict[int, float] = field(default_factory=dict)

    def years(self) -> tuple[int, ...]:
        return tuple(sorted(self.samples))


def _read_lines(source: bytes | str | IO) -> list[str]:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if source.startswith("﻿"):
        source = source[1:]
    return source.splitlines()


def _parse_year(token: str, line: int) -> int:
    try:
        year = int(token)
    except ValueError:
        raise MalformedRecord(f"non-integer year {token!r}", line) from None
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise MalformedRecord(f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]", line)
    return year


def _parse_code(token: str, line: int, what: str) -> str:
    code = token.strip()
    if not code or any(ch.isspace() for ch in code) or '"' in code:
        raise MalformedRecord(f"invalid {what} code {token!r}", line)
    return code


def parse_trade_csv(source: bytes | str | IO) -> list[TradeRecord]:
    """Parse the trade schema into records, one per data row.

    Rows are not aggregated here; :func:`build_trade_table` sums
    duplicates. Raises :class:`MalformedRecord` with the offending line
    number, or :class:`EmptyInput` if the file holds no data rows.
    """
    lines = _read_lines(source)
    if not lines or lines[0].strip() != TRADE_HEADER:
        raise MalformedRecord(f"expected header {TRADE_HEADER!r}", 1)
    records = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != 4:
            raise MalformedRecord(f"expected 4 columns, got {len(parts)}", lineno)
        year = _parse_year(parts[0].strip(), lineno)
        exporter = _parse_code(parts[1], lineno, "country").upper()
        product = _parse_code(parts[2], lineno, "product")
        try:
            value = float(parts[3])
        except ValueError:
            raise MalformedRecord(f"non-numeric value {parts[3]!r}", lineno) from None
        if not math.isfinite(value) or value < 0:
            raise MalformedRecord(f"value {parts[3].strip()} not a finite nonnegative number", lineno)
        records.append(TradeRecord(year, exporter, product, value))
    if not records:
        raise EmptyInput("no data rows in trade input")
    return records


def build_trade_table(records: Iterable[TradeRecord], year: int) -> TradeTable:
    """Aggregate records of one year into a dense, sorted table.

    Duplicate (exporter, product) pairs are summed; countries and
    products whose total is zero are dropped so every downstream
    denominator is nonzero.
    """
    totals: dict[tuple[str, str], float] = {}
    for rec in records:
        if rec.year != year:
            continue
        key = (rec.exporter, rec.product)
        totals[key] = totals.get(key, 0.0) + rec.value
    if not totals:
        raise EmptyInput(f"no trade records for year {year}")
    countries = sorted({c for c, _ in totals})
    products = sorted({p for _, p in totals})
    values = np.zeros((len(countries), len(products)))
    c_index = {c: i for i, c in enumerate(countries)}
    p_index = {p: j for j, p in enumerate(products)}
    for (c, p), v in totals.items():
        values[c_index[c], p_index[p]] = v
    keep_rows = values.sum(axis=1) > 0
    keep_cols = values.sum(axis=0) > 0
    values = values[keep_rows][:, keep_cols]
    if values.size == 0:
        raise EmptyInput(f"all values for year {year} are zero")
    countries = tuple(c for c, k in zip(countries, keep_rows) if k)
    products = tuple(p for p, k in zip(products, keep_cols) if k)
    return TradeTable(year=year, countries=countries, products=products, values=values)


def write_trade_csv(table: TradeTable, stream: IO[str]) -> None:
    """Serialize nonzero cells with 6 fractional digits (round-trip exact)."""
    stream.write(TRADE_HEADER + "\n")
    for i, country in enumerate(table.countries):
        for j, product in enumerate(table.products):
            v = table.values[i, j]
            if v != 0.0:
                stream.write(f"{table.year},{country},{product},{v:.6f}\n")


def parse_gdp_csv(source: bytes | str | IO) -> list[GdpSeries]:
    """Parse the gdp schema into one series per country.

    Raises :class:`DuplicateSample` on a repeated (country, year) and
    :class:`NonPositiveGdp` on values that a log axis cannot take.
    """
    lines = _read_lines(source)
    if not lines or lines[0].strip() != GDP_HEADER:
        raise MalformedRecord(f"expected header {GDP_HEADER!r}", 1)
    samples: dict[str, dict[int, float]] = {}
    seen_rows = False
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != 3:
            raise MalformedRecord(f"expected 3 columns, got {len(parts)}", lineno)
        country = _parse_code(parts[0], lineno, "country").upper()
        year = _parse_year(parts[1].strip(), lineno)
        try:
            gdppc = float(parts[2])
        except ValueError:
            raise MalformedRecord(f"non-numeric gdppc {parts[2]!r}", lineno) from None
        if not math.isfinite(gdppc) or gdppc <= 0:
            raise NonPositiveGdp(f"line {lineno}: gdppc must be positive, got {parts[2].strip()}")
        per_country = samples.setdefault(country, {})
        if year in per_country:
            raise DuplicateSample(f"line {lineno}: duplicate sample for ({country}, {year})")
        per_country[year] = gdppc
        seen_rows = True
    if not seen_rows:
        raise EmptyInput("no data rows in gdp input")
    return [GdpSeries(country, samples[country]) for country in sorted(samples)]


def write_gdp_csv(series: Iterable[GdpSeries], stream: IO[str]) -> None:
    stream.write(GDP_HEADER + "\n")
    for s in sorted(series, key=lambda s: s.country):
        for year in sorted(s.samples):
            stream.write(f"{s.country},{year},{s.samples[year]!r}\n")
