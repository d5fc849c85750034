"""Multipartite entanglement verification with exact local measurements."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .measure import (  # noqa: F401
    MeasurementLedger,
    Observable,
    StateOracle,
    embed_local,
    expectation,
    ic_budget,
    probe_diag,
    probe_im,
    probe_re,
    pure_budgets,
)
from .pureverify import PartyReconstruction, Verdict, VerifyConfig, reconstruct_party, verify_pure_product  # noqa: F401
from .qcore import (  # noqa: F401
    DensityMatrix,
    EigenDecomposition,
    PureState,
    SystemShape,
    apply_slocc,
    basis_pure,
    bell,
    ghz,
    hermitian_eig,
    kron,
    maximally_mixed,
    partial_trace,
    partial_transpose,
    random_pure,
    random_product,
    upb_shifts_state,
    w,
)
from .separability import (  # noqa: F401
    Bipartition,
    DepthReport,
    SeesawConfig,
    SeesawResult,
    is_ppt,
    max_product_overlap,
    pt_invariant,
    pure_entanglement_depth,
    pure_is_product,
    schmidt_rank,
)
from .witness import (  # noqa: F401
    FreeDirection,
    SearchConfig,
    WitnessPair,
    free_directions,
    indistinguishable_pair,
    positivity_radius,
)
