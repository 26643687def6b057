"""Country trajectories in the GDP-per-capita / fitness plane.

Each country-year becomes a point (x, y) = (log10 GDPpc, log10 fitness).
Forecasts average the realized historical displacements of nearby past
states (nearest-neighbour analogues on z-normalized axes), and the local
displacement dispersion splits the plane into a predictable laminar
regime and a noisy turbulent one. The laminar threshold theta is a
reporting convention of this toolkit, not an estimated quantity, and is
echoed in every output that uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .errors import EmptyInput, InsufficientAnalogues, InvalidParameter
from .fitness import FitnessResult
from .ingest import GdpSeries

LAMINAR = "laminar"
TURBULENT = "turbulent"
NO_DATA = "no-data"


@dataclass(frozen=True)
class TrajectoryPoint:
    """One country-year state; (xn, yn) are z-scored over the reference set."""

    country: str
    year: int
    x: float
    y: float
    xn: float
    yn: float


@dataclass(frozen=True, eq=False)
class TrajectorySet:
    """Immutable point set plus the normalization that defined (xn, yn)."""

    points: tuple[TrajectoryPoint, ...]
    x_mean: float
    x_std: float
    y_mean: float
    y_std: float

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def normalize(self, x: float, y: float) -> tuple[float, float]:
        xn = (x - self.x_mean) / self.x_std if self.x_std > 0 else 0.0
        yn = (y - self.y_mean) / self.y_std if self.y_std > 0 else 0.0
        return xn, yn

    def position(self, country: str, year: int) -> TrajectoryPoint | None:
        return self._index().get((country, year))

    def max_year(self) -> int:
        return max(p.year for p in self.points)

    def _index(self) -> dict:
        if not hasattr(self, "_index_cache"):
            object.__setattr__(
                self, "_index_cache", {(p.country, p.year): p for p in self.points}
            )
        return self._index_cache

    @classmethod
    def from_xy(cls, states: Iterable[tuple[str, int, float, float]]) -> "TrajectorySet":
        """Build from (country, year, x, y) tuples, z-scoring both axes
        over the whole set (population convention)."""
        states = sorted(states)
        if not states:
            raise EmptyInput("no trajectory states")
        xs = np.array([s[2] for s in states])
        ys = np.array([s[3] for s in states])
        if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
            raise InvalidParameter("trajectory coordinates must be finite")
        x_mean, x_std = float(xs.mean()), float(xs.std())
        y_mean, y_std = float(ys.mean()), float(ys.std())
        points = tuple(
            TrajectoryPoint(
                country=c,
                year=yr,
                x=x,
                y=y,
                xn=(x - x_mean) / x_std if x_std > 0 else 0.0,
                yn=(y - y_mean) / y_std if y_std > 0 else 0.0,
            )
            for c, yr, x, y in states
        )
        return cls(points=points, x_mean=x_mean, x_std=x_std, y_mean=y_mean, y_std=y_std)


@dataclass(frozen=True)
class ForecastResult:
    """Mean displacement of the analogues of one query state."""

    query: TrajectoryPoint
    horizon: int
    analogues_used: int
    mean_displacement: tuple[float, float]
    dispersion: tuple[float, float]
    regime: str

    def to_json_obj(self) -> dict:
        return {
            "country": self.query.country,
            "year": self.query.year,
            "x": self.query.x,
            "y": self.query.y,
            "horizon": self.horizon,
            "analogues_used": self.analogues_used,
            "dx": self.mean_displacement[0],
            "dy": self.mean_displacement[1],
            "sx": self.dispersion[0],
            "sy": self.dispersion[1],
            "regime": self.regime,
        }


@dataclass(frozen=True, eq=False)
class RegimeMap:
    """Per-cell regime labels over the normalized bounding box.

    ``labels[ix][iy]`` corresponds to (x_centers[ix], y_centers[iy]).
    """

    x_centers: np.ndarray
    y_centers: np.ndarray
    labels: list[list[str]]
    horizon: int
    radius: float
    theta: float

    def to_json_obj(self) -> dict:
        return {
            "nx": len(self.x_centers),
            "ny": len(self.y_centers),
            "x_centers": [float(v) for v in self.x_centers],
            "y_centers": [float(v) for v in self.y_centers],
            "labels": self.labels,
            "horizon": self.horizon,
            "radius": self.radius,
            "theta": self.theta,
        }


@dataclass(frozen=True)
class BacktestReport:
    """Out-of-sample MAE of the analogue forecast against two baselines."""

    split_year: int
    horizon: int
    radius: float
    n_queries: int
    n_skipped: int
    mae_analogue: float
    mae_persistence: float
    mae_global_mean: float

    def to_json_obj(self) -> dict:
        return {
            "split_year": self.split_year,
            "horizon": self.horizon,
            "radius": self.radius,
            "n_queries": self.n_queries,
            "n_skipped": self.n_skipped,
            "mae_analogue": self.mae_analogue,
            "mae_persistence": self.mae_persistence,
            "mae_global_mean": self.mae_global_mean,
        }


def build_trajectories(
    fitness_by_year: Mapping[int, FitnessResult], gdp: Iterable[GdpSeries]
) -> TrajectorySet:
    """One point per (country, year) present in both sources."""
    gdp_by_country = {s.country: s.samples for s in gdp}
    states = []
    for year, result in fitness_by_year.items():
        for country, fit in zip(result.countries, result.fitness):
            gdppc = gdp_by_country.get(country, {}).get(year)
            if gdppc is None:
                continue
            states.append((country, year, math.log10(gdppc), math.log10(float(fit))))
    if not states:
        raise EmptyInput("no (country, year) overlap between fitness and gdp data")
    return TrajectorySet.from_xy(states)


def _displacement(points: TrajectorySet, p: TrajectoryPoint, horizon: int):
    target = points.position(p.country, p.year + horizon)
    if target is None:
        return None
    return target.x - p.x, target.y - p.y


def analogue_forecast(
    points: TrajectorySet,
    query: TrajectoryPoint,
    horizon: int = 5,
    radius: float = 0.25,
    min_analogues: int = 5,
    theta: float = 0.05,
    max_analogue_year: int | None = None,
) -> ForecastResult:
    """Average the horizon-displacements of all in-radius past states.

    An analogue must have a realized position ``horizon`` years ahead,
    and states of the query's own country are used only when their
    displacement window closes by the query year, so a forecast never
    peeks at its own future. ``max_analogue_year`` tightens that cutoff
    to all countries for out-of-sample evaluation.
    """
    if radius <= 0:
        raise InvalidParameter("radius must be positive")
    if horizon < 1:
        raise InvalidParameter("horizon must be >= 1")
    if min_analogues < 1:
        raise InvalidParameter("min_analogues must be >= 1")
    max_year = points.max_year()
    displacements = []
    for p in points:
        if p.year + horizon > max_year:
            continue
        if max_analogue_year is not None and p.year + horizon > max_analogue_year:
            continue
        if p.country == query.country and p.year + horizon > query.year:
            continue
        if math.hypot(p.xn - query.xn, p.yn - query.yn) > radius:
            continue
        disp = _displacement(points, p, horizon)
        if disp is None:
            continue
        # No-leakage guard for the temporal constraints above.
        assert p.year + horizon <= max_year
        assert p.country != query.country or p.year + horizon <= query.year
        assert max_analogue_year is None or p.year + horizon <= max_analogue_year
        displacements.append(disp)
    if len(displacements) < min_analogues:
        raise InsufficientAnalogues(
            f"found {len(displacements)} analogues, need {min_analogues}",
            found=len(displacements),
        )
    arr = np.array(displacements)
    mean = arr.mean(axis=0)
    if len(displacements) > 1:
        std = arr.std(axis=0, ddof=1)
    else:
        std = np.zeros(2)
    regime = LAMINAR if std[0] <= theta else TURBULENT
    return ForecastResult(
        query=query,
        horizon=horizon,
        analogues_used=len(displacements),
        mean_displacement=(float(mean[0]), float(mean[1])),
        dispersion=(float(std[0]), float(std[1])),
        regime=regime,
    )


def regime_map(
    points: TrajectorySet,
    grid: tuple[int, int] = (10, 10),
    horizon: int = 5,
    radius: float = 0.25,
    min_analogues: int = 5,
    theta: float = 0.05,
) -> RegimeMap:
    """Label grid cells over the normalized bounding box by forecast
    dispersion; cells without enough analogues are 'no-data'."""
    nx, ny = grid
    if nx < 2 or ny < 2:
        raise InvalidParameter("grid must be at least 2x2")
    if len(points) == 0:
        raise EmptyInput("empty point set")
    xn = np.array([p.xn for p in points])
    yn = np.array([p.yn for p in points])
    x_edges = np.linspace(xn.min(), xn.max(), nx + 1)
    y_edges = np.linspace(yn.min(), yn.max(), ny + 1)
    x_centers = (x_edges[:-1] + x_edges[1:]) / 2
    y_centers = (y_edges[:-1] + y_edges[1:]) / 2
    max_year = points.max_year()
    labels = []
    for cx in x_centers:
        column = []
        for cy in y_centers:
            query = TrajectoryPoint(
                country="",  # sentinel: matches no real country
                year=max_year,
                x=points.x_mean + cx * points.x_std,
                y=points.y_mean + cy * points.y_std,
                xn=float(cx),
                yn=float(cy),
            )
            try:
                fc = analogue_forecast(
                    points,
                    query,
                    horizon=horizon,
                    radius=radius,
                    min_analogues=min_analogues,
                    theta=theta,
                )
                column.append(fc.regime)
            except InsufficientAnalogues:
                column.append(NO_DATA)
        labels.append(column)
    return RegimeMap(
        x_centers=x_centers,
        y_centers=y_centers,
        labels=labels,
        horizon=horizon,
        radius=radius,
        theta=theta,
    )


def backtest(
    points: TrajectorySet,
    horizon: int = 5,
    radius: float = 0.25,
    split_year: int | None = None,
    min_analogues: int = 5,
    theta: float = 0.05,
) -> BacktestReport:
    """Score the forecaster on queries at or after ``split_year``.

    Each query sees only displacements whose window closes by the query
    year. The x-axis MAE (GDP-per-capita growth proxy) is compared with
    the persistence baseline dx = 0 and with the global mean displacement
    of the same training window. Queries with too few analogues or an
    empty training window are skipped and counted, keeping all three
    errors on the same query set.
    """
    if split_year is None:
        raise InvalidParameter("split_year is required")
    queries = [
        p
        for p in points
        if p.year >= split_year and _displacement(points, p, horizon) is not None
    ]
    if not queries:
        raise EmptyInput(f"no queries at or after {split_year} with realized outcomes")
    err_analogue, err_persistence, err_global = [], [], []
    skipped = 0
    for qp in queries:
        train_dx = [
            _displacement(points, p, horizon)[0]
            for p in points
            if p.year + horizon <= qp.year
            and _displacement(points, p, horizon) is not None
        ]
        if not train_dx:
            skipped += 1
            continue
        try:
            fc = analogue_forecast(
                points,
                qp,
                horizon=horizon,
                radius=radius,
                min_analogues=min_analogues,
                theta=theta,
                max_analogue_year=qp.year,
            )
        except InsufficientAnalogues:
            skipped += 1
            continue
        dx_true = _displacement(points, qp, horizon)[0]
        err_analogue.append(abs(fc.mean_displacement[0] - dx_true))
        err_persistence.append(abs(dx_true))
        err_global.append(abs(float(np.mean(train_dx)) - dx_true))
    if not err_analogue:
        raise EmptyInput("every query was skipped (insufficient analogues or history)")
    return BacktestReport(
        split_year=split_year,
        horizon=horizon,
        radius=radius,
        n_queries=len(err_analogue),
        n_skipped=skipped,
        mae_analogue=float(np.mean(err_analogue)),
        mae_persistence=float(np.mean(err_persistence)),
        mae_global_mean=float(np.mean(err_global)),
    )


class AnalogueForecaster(BaseEstimator):
    """Estimator wrapper: fit on a TrajectorySet, predict displacements."""

    def __init__(
        self,
        horizon: int = 5,
        radius: float = 0.25,
        min_analogues: int = 5,
        theta: float = 0.05,
    ):
        self.horizon = horizon
        self.radius = radius
        self.min_analogues = min_analogues
        self.theta = theta

    def fit(self, X: TrajectorySet | Iterable[tuple[str, int, float, float]], y=None):
        if isinstance(X, TrajectorySet):
            self.points_ = X
        else:
            self.points_ = TrajectorySet.from_xy(X)
        return self

    def predict(
        self, queries: TrajectoryPoint | Sequence[TrajectoryPoint]
    ) -> ForecastResult | list[ForecastResult]:
        single = isinstance(queries, TrajectoryPoint)
        items = [queries] if single else list(queries)
        results = [
            analogue_forecast(
                self.points_,
                q,
                horizon=self.horizon,
                radius=self.radius,
                min_analogues=self.min_analogues,
                theta=self.theta,
            )
            for q in items
        ]
        return results[0] if single else results
