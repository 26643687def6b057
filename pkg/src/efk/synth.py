"""Synthetic matrices and trajectory fields with known ground truth.

All randomness comes from a counter-based SplitMix64 stream so fixtures
are bit-identical across platforms and reproducible from the documented
algorithm alone:

    gamma = 0x9E3779B97F4A7C15                      (all mod 2**64)
    z     = seed + (counter + 1) * gamma
    z     = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z     = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out   = z ^ (z >> 31)
    u     = (out >> 11) * 2.0**-53                  (uniform in [0, 1))

counter 0, 1, 2, ... reproduces the classic sequential SplitMix64
stream for the same seed (test vectors in the test suite). Gaussian
draws use the Marsaglia polar transform on consecutive uniforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import TrajectorySet
from .errors import EmptyMatrix, InvalidParameter
from .matrix import BinaryCPMatrix

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(seed: int, counter: int) -> int:
    """The counter-th 64-bit output of the SplitMix64 stream for ``seed``."""
    z = (seed + (counter + 1) * _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def counter_uniform(seed: int, counter: int) -> float:
    """Uniform double in [0, 1) from the 53 high bits of one output."""
    return (splitmix64(seed, counter) >> 11) * 2.0 ** -53


class SplitMixStream:
    """Sequential view over the counter-based generator."""

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & _MASK
        self.counter = counter
        self._spare: float | None = None

    def uniform(self) -> float:
        u = counter_uniform(self.seed, self.counter)
        self.counter += 1
        return u

    def gauss(self) -> float:
        """Standard normal via the polar method (log and sqrt only)."""
        if self._spare is not None:
            g, self._spare = self._spare, None
            return g
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        k = math.sqrt(-2.0 * math.log(s) / s)
        self._spare = v * k
        return u * k


@dataclass(frozen=True)
class SynthSpec:
    """Parameters for the nested-matrix generator."""

    countries: int
    products: int
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.countries < 1 or self.products < 1:
            raise InvalidParameter("countries and products must be >= 1")
        if not 0.0 <= self.noise < 1.0:
            raise InvalidParameter("noise must be in [0, 1)")


def nested_matrix(spec: SynthSpec) -> BinaryCPMatrix:
    """Staircase matrix (row i exports the ceil((C-i)*P/C) first products,
    most diversified country on top) with each cell flipped independently
    with probability ``noise``; flip decisions use counter = row*P + col.
    """
    c, p = spec.countries, spec.products
    dense = np.zeros((c, p), dtype=np.int8)
    for i in range(c):
        dense[i, : math.ceil((c - i) * p / c)] = 1
    if spec.noise > 0.0:
        for i in range(c):
            for j in range(p):
                if counter_uniform(spec.seed, i * p + j) < spec.noise:
                    dense[i, j] ^= 1
    if dense.sum() == 0:
        raise EmptyMatrix("noise destroyed every entry")
    countries = tuple(f"C{i + 1:03d}" for i in range(c))
    products = tuple(f"P{j + 1:03d}" for j in range(p))
    return BinaryCPMatrix.from_dense(countries, products, dense)


def drift_field(
    countries: int,
    years: int,
    drift: tuple[float, float],
    noise_sd: float,
    seed: int = 0,
    start_year: int = 2000,
    x_range: tuple[float, float] = (2.5, 4.5),
    y_range: tuple[float, float] = (-0.5, 0.5),
) -> TrajectorySet:
    """Trajectory set where every country advances by ``drift`` plus
    Gaussian noise per year.

    Stream consumption order, for reproducibility: for each country in
    order, the initial (x, y) uniforms, then per year the (x, y) noise
    draws (none when ``noise_sd`` is 0).
    """
    if years < 2:
        raise InvalidParameter("years must be >= 2")
    if countries < 1:
        raise InvalidParameter("countries must be >= 1")
    if noise_sd < 0:
        raise InvalidParameter("noise_sd must be >= 0")
    stream = SplitMixStream(seed)
    dx, dy = drift
    states = []
    for i in range(countries):
        code = f"C{i + 1:03d}"
        x = x_range[0] + (x_range[1] - x_range[0]) * stream.uniform()
        y = y_range[0] + (y_range[1] - y_range[0]) * stream.uniform()
        states.append((code, start_year, x, y))
        for t in range(1, years):
            x += dx
            y += dy
            if noise_sd > 0:
                x += noise_sd * stream.gauss()
                y += noise_sd * stream.gauss()
            states.append((code, start_year + t, x, y))
    return TrajectorySet.from_xy(states)
