from .topology import Graph, generate_topology, graph_from_edges, realized_sparsity, count_full_comm
from .mixing import (
    MixingMatrix,
    ValidationReport,
    metropolis_mixing,
    spectral_contraction,
    contraction_power_check,
    validate_mixing,
)
from .serialize import dump_topology, load_topology
