"""High-order evaluation of 2D Laplace/Helmholtz volume potentials.

The domain is covered by smooth quadrilateral patches carrying Chebyshev
tensor grids; the weakly singular Newtonian/Helmholtz volume integral is
regularized by subtracting a local Taylor interpolant of the source and
adding back its effect through closed-form polynomial solutions and boundary
layer potentials (Green's third identity).
"""

from .geometry import (
    BUILTIN_DOMAINS,
    BoundaryCurve,
    DomainMesh,
    EdgeCurve,
    PatchMap,
    build_builtin_domain,
    closest_boundary_point,
    closest_point_on_domain,
    curve_edge,
    export_mesh_json,
    line_edge,
    mesh_to_json,
    subdivide_patch,
    transfinite_map,
    winding_number,
)
from .kernels import bessel_j0y0j1y1, green, green_normal_derivative, hankel1_01
from .layers import (
    BoundaryDiscretization,
    LayerDensityTrace,
    discretize_boundary,
    layer_combo,
    layer_combo_many,
    reference_potential,
    s_beta_at,
    s_beta_column,
    s_beta_columns,
    trace_from_functions,
    trace_from_polynomial,
)
from .polynomials import (
    MultiIndex,
    Polynomial2,
    assemble_interpolant,
    assemble_regularizer,
    basis_size,
    helmholtz_poly,
    laplace_poly,
    monomial_basis,
    particular_poly,
    pde_residual,
    poly_eval,
    poly_gradient,
    taylor_coeffs,
    translated_poly,
)
from .quadrature import ChebRule, fejer_rule, integrate_domain, integrate_patch
from .spectral import (
    DerivativeTensor,
    GridField,
    cheb_gradient_param,
    derivative_tensor,
    physical_gradient,
)
from .validation import (
    ConvergenceRow,
    ExperimentConfig,
    emit_error_field,
    manufactured_solution,
    relative_l2_error,
    run_manufactured,
)
from .volume import (
    SourceData,
    VolumeOperator,
    apply_V,
    assemble_T,
    build_operator,
    evaluate,
    evaluate_at_points,
    export_operator,
    read_operator_matrices,
    volume_kernel_matrix,
)

__version__ = "0.1.0"
