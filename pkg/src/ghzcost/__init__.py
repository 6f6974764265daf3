"""GHZ-state preparation rates for multipartite pure states.

The package covers the full pipeline: dense state primitives (hilbert),
typical-set compression of psi^(x)n (typical), relative-entropy discord
minimized over product bases (discord), the exact LOCC conversion of GHZ
copies into the compressed state (protocol), and closed-form rate bounds
with a mixed-state counterexample (rates).  The `ghzcost` command wraps
the pipeline in seeded, deterministically serialized experiments (cli).
"""
from .hilbert import (
    DensityMatrix,
    GuardExceeded,
    MeasurementSet,
    PartyDims,
    PureState,
    apply_local_unitary,
    apply_measurement,
    basis_state,
    binary_entropy,
    block_copies,
    fidelity,
    partial_trace,
    pure_fidelity,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    relative_entropy,
    remove_known_factor,
    restrict_party,
    shannon_entropy,
    tensor,
    von_neumann_entropy,
)

from .discord import (
    DiscordResult,
    OptimizerConfig,
    SeparableBasis,
    discord_objective,
    finite_t_discord_rate,
    minimize_discord,
)
from .protocol import (
    BranchReport,
    KMap,
    ProtocolInput,
    ProtocolTrace,
    ghz_resource,
    prepare_conversion,
    resource_rate,
    run_protocol,
    trace_path,
)
from .rates import (
    CounterexampleRow,
    Decomposition,
    RateReport,
    bounds_table,
    decomposition_rate,
    ghz_rate_relation,
    known_closed_forms,
    mixed_counterexample,
    teleport_rate,
)
from .typical import (
    AEPReport,
    IndexedTypicalSet,
    JointDistribution,
    TypicalSet,
    TypicalSetStats,
    build_approximate_state,
    build_typical_set,
    coefficient_distribution,
    embed_approximate_state,
    fidelity_to_original,
    index_typical_set,
    typical_set_stats,
)

__version__ = "0.1.0"
