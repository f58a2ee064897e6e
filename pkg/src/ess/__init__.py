"""Linear-time solves and log-determinants for semi-separable matrices via banded embedding."""

from .banded import BandedFactorization, BandedMatrix, SingularMatrixError, log_abs_det, lu_factor, lu_solve
from .embedding import (
    ExtendedSystem,
    embed_rank1,
    embed_rankp,
    embed_rhs,
    embed_stable_exponential,
    extended_dim,
    extract_solution,
)
from .semiseparable import (
    ExponentialKernelSpec,
    SemiSeparableSpec,
    entry,
    kernel_entry,
    kernel_to_generators,
    matvec,
)
from .solver import EssFactor, factorize, factorize_naive_unsafe, logdet, residual_inf, solve

__version__ = "0.1.0"
