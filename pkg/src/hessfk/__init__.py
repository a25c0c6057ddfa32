"""Spectral stability toolkit for planar convex bodies and k-Hessian balls.

Submodules:
  geometry        support-function bodies, quermassintegrals, asymmetry measures
  radial_spectra  unit-ball k-Hessian eigenvalues by radial shooting
  field2d         grid fields, level sets, rearrangement, Hessian integrals
  eigensolver2d   Laplacian / Monge-Ampere eigenvalue estimates on domains
  stability_lab   family sweeps, exponent fits, report persistence
"""

from .geometry import (
    AsymmetryReport,
    BallBody,
    QuermassVector,
    SupportBody2D,
    af_deficit,
    asymmetry_report,
    body_from_json,
    body_to_json,
    bonnesen_gap,
    circumradius,
    gs_pair,
    hausdorff_to_ball,
    inradius,
    make_disk,
    make_ellipse,
    make_smoothed_polygon,
    quermass_2d,
    quermass_ball,
    steiner_point,
    unit_ball_volume,
)
from .radial_spectra import (
    RadialEigenPair,
    hessian_integral_radial,
    lambda_ball,
    rayleigh_paraboloid,
    shoot_eigen,
    sk_radial,
)
from .field2d import (
    GridField2D,
    LevelSetMetrics,
    RearrangedProfile,
    hessian_integral_2d,
    integral_lemma_check,
    is_k_admissible,
    levelset_lemma_check,
    lp_norm,
    make_field,
    norm_comparison,
    polya_szego_gap,
    rearrange,
    superlevel_metrics,
)
from .eigensolver2d import (
    EigenEstimate,
    epsilon_for,
    laplace_eigen,
    ma_eigen_ellipse,
    ma_rayleigh_upper,
)
from .stability_lab import (
    FamilySpec,
    SweepRecord,
    TheoremVerdict,
    check_remark_deficiency,
    check_theorem_main,
    check_theorem_main2,
    export,
    run_sweep,
    volume_lower_bound_gap,
)

__version__ = "0.1.0"
