"""Quantum walks on LHZ parity-embedded SK spin glasses, with decoder benchmarks."""

from .errors import (
    CapabilityError,
    IntegrationError,
    InvalidArgumentError,
    ParityWalkError,
    ParseError,
    TreeConstructionError,
)
from .ising import (
    GroundState,
    IsingInstance,
    SpinConfig,
    all_energies,
    energy,
    generate_sk,
    ground_state,
    load_instance,
    save_instance,
)
from .lhz import (
    LhzLayout,
    PhysicalState,
    Plaquette,
    Syndrome,
    build_layout,
    encode,
    layout_to_json,
    physical_diagonal,
    syndrome,
)
from .heuristic import ChiEstimate, chi_bar, dynamic_coefficient, gamma_heur, sample_gaps
from .walk import (
    GammaSweep,
    SuccessWeights,
    WalkParams,
    WalkTrajectory,
    average_success,
    evolve,
    evolve_multi,
    sweep_gamma,
)
from .decoders import (
    BpParams,
    DecoderOutcome,
    DecoderSpec,
    DecoderWeights,
    SpanningTree,
    SyndromeTable,
    TreeSet,
    build_min_weight_table,
    decode_belief_propagation,
    decode_entire,
    decode_min_weight,
    decode_trees,
    nonoverlapping_trees,
    parse_decoder_spec,
    random_spanning_tree,
    success_weights,
    tree_readout,
)
from .treecount import (
    CountLedger,
    ValidityCensus,
    enumerate_covered_states,
    overlap_increment,
    random_chance,
    random_decode_curve,
    semianalytic_count,
)

__version__ = "0.1.0"
