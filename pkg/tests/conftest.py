import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from efk.matrix import BinaryCPMatrix

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def staircase3() -> BinaryCPMatrix:
    """The 3x3 staircase shared by many examples: row degrees 3, 2, 1."""
    return BinaryCPMatrix(
        countries=("C001", "C002", "C003"),
        products=("P001", "P002", "P003"),
        m=np.array([[1, 1, 1], [1, 1, 0], [1, 0, 0]], dtype=np.int8),
    )


def staircase(n: int) -> BinaryCPMatrix:
    """n x n staircase, most diversified country on top."""
    dense = np.array(
        [[1 if j < n - i else 0 for j in range(n)] for i in range(n)], dtype=np.int8
    )
    return BinaryCPMatrix(
        countries=tuple(f"C{i + 1:03d}" for i in range(n)),
        products=tuple(f"P{j + 1:03d}" for j in range(n)),
        m=dense,
    )
