"""Reference parallel primitives executed on the virtual GPU."""

from ._common import LengthMismatch, NotPowerOfTwo, ShapeMismatch
from .matrix import Matrix, matmul, matrix_add
from .reduce import reduce_sum
from .scan import exclusive_scan_blelloch, inclusive_scan_hillis_steele
from .trace import StepTrace
from .vector import vector_add

__all__ = [
    "LengthMismatch",
    "Matrix",
    "NotPowerOfTwo",
    "ShapeMismatch",
    "StepTrace",
    "exclusive_scan_blelloch",
    "inclusive_scan_hillis_steele",
    "matmul",
    "matrix_add",
    "reduce_sum",
    "vector_add",
]
