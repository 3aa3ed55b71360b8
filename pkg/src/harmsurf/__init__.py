"""Harmonic surfaces from Weierstrass data.

The package builds triples of meromorphic one-forms on punctured spheres,
hyperelliptic curves, and rectangular tori, closes their period problems
numerically, evaluates the resulting harmonic maps, and exports triangle
meshes with verification diagnostics.
"""

from .domains import (
    INF,
    ArcSegment,
    Cycle,
    HyperellipticCurve,
    LineSegment,
    PuncturedSphere,
    RectTorus,
    canonical_cycles,
    evaluate_w,
    nearest_feature_distance,
)
from .errors import (
    ClosureError,
    ConfigError,
    DomainError,
    HarmsurfError,
    MeshError,
    PathRoutingError,
    PoleError,
    QuadratureError,
    RankDeficiencyError,
    SlitError,
)
from .forms import (
    ConstantDz,
    HolomorphicBasis,
    OneForm,
    Rational,
    SqrtProduct,
    Term,
    ThetaFunction,
    ThetaQuotient,
    WeierstrassTriple,
    form_eval,
    holomorphic_basis,
    residue,
    theta_eval,
    theta_quotient_eval,
    triple_from_gauss_map,
)
from .quadrature import QuadratureConfig, integrate_cycle, integrate_segment

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
