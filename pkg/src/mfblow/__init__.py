"""Blow-ups of hypersurface surface singularities at matrix factorizations."""

__version__ = "0.1.0"

from .blowup import BlowupChart, blowup_charts, simplify_chart, simplify_ideal
from .errors import MfblowError
from .groebner import (
    DEGREVLEX,
    LEX,
    Ideal,
    MonomialOrder,
    PolyMatrix,
    block_order,
    buchberger,
    det,
    eliminate,
    ideal_member,
    ideal_quotient,
    intersect,
    krull_dim,
    minors,
    normal_form,
    saturate,
)
from .mf import (
    MatrixFactorization,
    NormChoice,
    an_mf,
    cubic_line_mf,
    fundamental_mf,
    norm_ideal,
    presentation,
    rank_of_coker,
    same_norm_class,
    verify_mf,
)
from .pipeline import analyze_blowup, run_pipeline
from .poly import Polynomial, Ring, parse_poly, substitute
from .resgraph import (
    Cycle,
    DualGraph,
    Vertex,
    canonical_cycle,
    contract,
    intersection_matrix,
    is_negative_definite,
    is_small_wrt_gorenstein,
)
from .singularity import (
    PipelineVerdict,
    SingularityReport,
    analyze_chart,
    is_smooth,
    jacobian_matrix,
    pipeline_verdict,
    sing_dimension,
    singular_locus,
    tjurina_total,
)
