"""Curvature dynamics, counting and renewal chains for Apollonian circle packings."""
import numba

# TBB is usually absent; prefer the OpenMP/workqueue layers so prange runs quietly.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .curvature import Backend, CurvatureOverflowError, CurvatureVector  # noqa: E402
from .counting import count, count_many  # noqa: E402
from .words import IndexWord, enumerate_index_set, matrix_of_word  # noqa: E402

__all__ = [
    "Backend",
    "CurvatureOverflowError",
    "CurvatureVector",
    "IndexWord",
    "count",
    "count_many",
    "enumerate_index_set",
    "matrix_of_word",
]
__version__ = "0.1.0"
