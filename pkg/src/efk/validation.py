"""Input validation helpers for the estimator-style entry points."""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter, LengthMismatch
from .matrix import BinaryCPMatrix


def as_cp_matrix(X) -> BinaryCPMatrix:
    """Coerce estimator input into a BinaryCPMatrix.

    Accepts a BinaryCPMatrix as-is, or a 2-D 0/1 array-like, which gets
    generated ``C001..``/``P001..`` labels.
    """
    if isinstance(X, BinaryCPMatrix):
        return X
    dense = np.asarray(X)
    if dense.ndim != 2:
        raise InvalidParameter("expected a BinaryCPMatrix or a 2-D 0/1 array")
    countries = tuple(f"C{i + 1:03d}" for i in range(dense.shape[0]))
    products = tuple(f"P{j + 1:03d}" for j in range(dense.shape[1]))
    return BinaryCPMatrix.from_dense(countries, products, dense.astype(np.int8))


def check_positive_vector(v, n: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise LengthMismatch(f"{name} must have length {n}, got shape {v.shape}")
    if not np.isfinite(v).all() or (v <= 0).any():
        raise InvalidParameter(f"{name} entries must be positive and finite")
    return v
