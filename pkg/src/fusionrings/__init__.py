"""Exact arithmetic for based rings, fusion rings and their based modules."""

from .elements import RingElement, parse_element
from .errors import (
    FusionError,
    IncompatibleDimensionsError,
    InfiniteInnerProductError,
    MalformedDocumentError,
    NoDimensionFunctionError,
    NonIntegerDimensionError,
    NotAFusionSubringError,
    StructuralError,
    UnitGroupError,
    UnknownLabelError,
)
from .rings import (
    BasedRingTable,
    DimensionFunction,
    LazyBasedRing,
    dual,
    frobenius_perron_dims,
    fuse,
    group_of_units,
    ring_dims,
    structure_constant,
    unit_coefficient,
    verify_based_ring,
    verify_lazy_ring,
)
from .constructors import (
    DivisibilityResult,
    SubringClosure,
    cyclic_group_ring,
    fibonacci,
    free_product,
    free_unitary_ring,
    group_ring,
    is_divisible,
    permutation_group_ring,
    subring_generated,
    su2_level,
    su2_ring,
    tensor_product,
)
from .modules import (
    BasedModuleTable,
    CofiniteResult,
    LazyBasedModule,
    ModuleDimensionVector,
    TruncatedModule,
    act,
    connected_components,
    dim_vector,
    induced_module,
    inner,
    is_cofinite,
    is_connected,
    quotient_module,
    singleton_module,
    standard_module,
    twisted_tensor_module,
    verify_module,
)
from .spectra import (
    DynkinVerdict,
    FusionGraph,
    SchurCheck,
    a_infinity_check,
    dynkin_classify,
    export_dot,
    matrix_homomorphism_check,
    module_graph,
    module_matrix,
    schur_norm_check,
    spectral_radius,
    symmetrize,
)
from .torsion import (
    EnumerationResult,
    ModuleSearchConfig,
    TorsionVerdict,
    canonical_form,
    canonical_key,
    chebyshev_coeffs,
    dimension_bound,
    enumerate_modules,
    free_product_module_probe,
    integer_dim_shortcut,
    is_torsion_free,
    tensor_obstruction_probe,
    unfold_word_module,
    word_module_structure_check,
)

__version__ = "0.1.0"
