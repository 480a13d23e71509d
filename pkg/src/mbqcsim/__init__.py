"""One-way quantum computing on four-qubit cluster states, simulated exactly.

The package covers the full loop of a feed-forward cluster-state
experiment: building the cluster and its graph-state relatives, running
measurement patterns with adaptive bases and Pauli-frame corrections,
degrading states to a measured preparation fidelity, verifying them by
maximum-likelihood tomography, scoring outputs with entanglement
measures, and budgeting the feed-forward cycle latency.
"""

from ._accel import active_backend
from .cluster import (
    GraphSpec,
    build_box_cluster,
    build_cluster_state,
    build_graph_state,
    cluster_fidelity,
    find_local_clifford_map,
    local_equivalent,
    stabilizer_expectations,
    stabilizer_group_expectations,
)
from .core import (
    DensityMatrix,
    MeasurementBasis,
    Operator,
    StateVector,
    apply_unitary,
    born_probabilities,
    collapse,
    partial_trace,
    permute_qubits,
    rotation_x,
    rotation_z,
    states_equal_up_to_phase,
    tensor,
    to_density,
)
from .engine import (
    FeedForwardPolicy,
    GroverResult,
    PauliFrame,
    RunResult,
    branch_correction,
    grover_reference_distribution,
    ideal_rotation_output,
    ideal_two_qubit_output,
    measure_qubit,
    run_grover,
    run_single_qubit_rotation,
    run_two_qubit_gate,
)
from .metrics import (
    MetricReport,
    bloch_vector,
    chsh_max,
    chsh_max_grid,
    correlation_matrix,
    fidelity,
    report_for,
    tangle,
    witness,
)
from .noise import (
    NoiseSpec,
    load_density,
    save_density,
    solve_p_for_fidelity,
    white_noise,
)
from .timing import (
    LatencyBudget,
    PipelineSpec,
    delay_line_check,
    duty_cycle_loss,
    switching_accuracy,
    timing_report,
    total_latency,
)
from .tomography import (
    CountRecord,
    MLEConfig,
    MLEResult,
    enumerate_settings,
    load_records,
    mle_reconstruct,
    mle_reconstruct_full,
    monte_carlo_errors,
    save_records,
    simulate_counts,
    single_qubit_tomography,
)

__version__ = "0.1.0"
