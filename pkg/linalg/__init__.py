from linalg.dense import (
    as_matrix,
    batched_matvec,
    is_symmetric,
    loop_matvec,
    require_square,
    sym,
)
from linalg.eigen import SymmetricSpectrum, numeric_rank, singular_values, sym_eig
from linalg.rng import make_rng

__all__ = [
    "as_matrix",
    "batched_matvec",
    "is_symmetric",
    "loop_matvec",
    "require_square",
    "sym",
    "SymmetricSpectrum",
    "numeric_rank",
    "singular_values",
    "sym_eig",
    "make_rng",
]
