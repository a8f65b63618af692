"""Multi-walker discrete-time quantum walks on arbitrary graphs."""

from .errors import *  # noqa: F401,F403
from .graph import (
    WalkerGraph,
    build_graph,
    cycle_graph,
    graph_from_dict,
    graph_to_dict,
    grover_coin,
    hadamard_coin,
    identity_coin,
    lattice2d_graph,
    line_graph,
    load_graph,
    save_graph,
    validate_graph,
)
from .fock import (
    FockState,
    Mode,
    basis_size,
    create_walker,
    enumerate_basis,
    inner_product,
    product_state,
    state_from_json,
    state_to_json,
    vacuum,
)
from .evolution import (
    CoinSchedule,
    ModeUnitary,
    coin_operator,
    evolve,
    graph_modes,
    lift_and_apply,
    lifted_matrix,
    permanent,
    step_operator,
    transition_amplitude,
    walk_unitary,
)
from .measurement import (
    JPD,
    correlation_entropy,
    detection_probability,
    jpd_from_state,
    jpd_two_walker_closed_form,
    l1_distance,
    meeting_probability,
    project_single_detection,
    single_click_marginal,
)
from .optical import (
    B2_BASIS,
    BeamsplitterNetwork,
    CoherentField,
    balanced_beamsplitter,
    beamsplitter_b2,
    coherent_conditioned_jpd,
    coherent_propagate,
    coherent_separability_check,
    load_network,
    mixed_jpd,
    pyramid_network,
    save_network,
)

__version__ = "0.1.0"
