"""Chern torsion of left-invariant Hermitian metrics on complex Lie algebras."""

from .canonical import (
    canonical_for,
    canonical_package,
    normalize_compact_basis,
    verify_proposition1,
)
from .hermitian import (
    CriticalityReport,
    HermitianMetric,
    abelian_ideal_obstruction,
    analyze,
    chern_torsion,
    gauduchon_eta,
    phi_tensor,
    tensor_A,
    tensor_B,
    unitary_frame,
)
from .lie_core import (
    RealStructureConstants,
    StructureConstants,
    Subspace,
    adjoint_matrix,
    bracket,
    center,
    direct_sum,
    from_matrix_generators,
    is_abelian_ideal,
    is_semisimple,
    jacobi_residual,
    killing_form,
)
from .optimize import (
    OptimizationResult,
    OptimizeConfig,
    diagonal_critical_system,
    diagonal_family,
    diagonal_uniqueness_scan,
    minimize,
    objective,
)

__version__ = "0.1.0"
