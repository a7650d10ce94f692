"""dicutcut: given a directed graph whose best directed cut has value rho,
find an undirected cut of value at least rho.

Pipeline: vector relaxation with triangle constraints (``sdp``), threshold
plus conditioned-hyperplane rounding with a deterministic best-of-rounds
driver (``rounding``), exact brute-force oracles (``oracle``), and
numerical certifiers for every inequality the guarantee rests on
(``analysis``).  Hot loops run in a compiled kernel when available; see
``dicutcut._backend``.
"""

from dicutcut._backend import BACKEND
from dicutcut.graph import (
    CutAssignment,
    DirectedGraph,
    GraphFormatError,
    cut_value,
    dicut_value,
    format_graph,
    parse_graph,
)
from dicutcut.oracle import exact_cut, exact_dicut
from dicutcut.sdp import (
    SdpInstance,
    SolverConfig,
    SolverError,
    VectorSolution,
    build_relaxation,
    check_feasibility,
    sdp_objective,
    solve_relaxation,
)
from dicutcut.rounding import (
    DriveResult,
    RoundingParams,
    RoundingTranscript,
    deterministic_drive,
    project_perp,
    randomized_round,
    rotation_function,
    threshold_candidates,
    z_vectors,
)
from dicutcut.analysis import (
    CertificationReport,
    ConfigTriple,
    alpha,
    bigF,
    bigG,
    certify_bound,
    certify_F_nonneg,
    certify_G_nonneg,
    certify_substitutions,
    delta,
    emit_F_curve,
    realize_vectors,
    rho,
    separation_probability,
)

__version__ = "0.1.0"
