"""Lamplighter random walk spectra via percolation clusters and lattice
animals."""

from ._backend import BACKEND
from .animals import (
    Animal,
    animal_probability,
    boundary,
    enumerate_animals,
    residual_mass,
    total_animal_mass,
)
from .errors import BudgetError, GraphSpecError, IsolatedVertexError
from .graphs import (
    FiniteKernel,
    Graph,
    WalkKernel,
    ball,
    build_graph,
    explicit_graph,
    kernel,
    symmetrize,
    truncate_kernel,
)
from .percolation import ClusterSample, mc_expected_return, sample_cluster, sample_rng
from .spectral import (
    AtomicMeasure,
    EigenSystem,
    eig_symmetric,
    local_spectral_measure,
    merge_atoms,
    mixture_measure,
    moments,
)
from .walk import (
    IOTA,
    LampVector,
    LamplighterOperator,
    config_set,
    expected_return_animal_sum,
    expected_return_animal_sum_sequence,
    return_prob_config_space,
    return_prob_config_space_sequence,
    return_prob_path_sum,
)

__version__ = "0.1.0"
