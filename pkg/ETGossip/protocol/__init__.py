from .policy import (
    ScheduleKind,
    PolicyKind,
    ThresholdSchedule,
    CommunicationPolicy,
    threshold_at,
    event_trigger_decision,
    periodic_decision,
    probabilistic_decision,
    activation_decision,
)
from .node import NodeState, init_states, compute_drift, mix_with_caches
from .dynamics import (
    stack_models,
    obsolescence_matrix,
    matrix_reference_step,
    average_iterate,
    average_perturbation,
    consensus_energy,
)
from .engine import RoundTrace, run_round
