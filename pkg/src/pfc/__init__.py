"""Perron-Frobenius theory for nonnegative matrices, positive integral
kernels, and cone-preserving operators in finite dimension."""

from .cones import (
    ConeEigenpair,
    ConeKind,
    ConvexCone,
    PositiveFunctional,
    cone_contains,
    cone_eigenvector_finite,
    decompose,
    rank_one_B,
    separating_functional,
)
from .errors import (
    ConeError,
    ConvergenceError,
    DimensionError,
    HarnessError,
    InputError,
    IrreducibleError,
    KernelError,
    NegativeEntryError,
    PFCError,
    PositivityError,
    PreconditionError,
    ReducibleError,
)
from .jentzsch import (
    Kernel,
    QuadratureRule,
    discretize,
    gauss_legendre,
    jentzsch_analyze,
    refine_study,
    schaefer_check,
)
from .krein_rutman import (
    nearly_eigenvector_sequence,
    peripheral_decay,
    positive_eigenvector_compact,
    rotation_approximants,
    spectral_split,
)
from .matrix import (
    ComplexMatrix,
    NonnegativeMatrix,
    Order,
    OrderedVector,
    apply,
    char_poly_value,
    det_lu,
    entrywise_abs,
    entrywise_cmp,
    is_strictly_positive,
    normalize_1,
)
from .perron import (
    collatz_wielandt,
    dominance_compare,
    improve_bound,
    krein_rutman_lower,
    perron_fixed_point,
    perron_irreducible,
    simplicity_check,
)
from .structure import (
    cyclic_normal_form,
    is_irreducible,
    is_primitive,
    period,
    reducible_block_form,
)

__version__ = "0.1.0"
