"""Exact inference and graph-separation analysis for functional causal
models on arbitrary directed graphs over finite alphabets.

Cycles are handled by mapping the model onto an acyclic teleportation
graph and post-selecting on the check vertices; the probability rule, the
p-separation criterion and the solvability taxonomy all come from that
construction.  All arithmetic is exact (rational).
"""

from .errors import (
    CfcmError,
    GraphError,
    InconsistentModel,
    ModelStructureError,
    ZeroProbabilityCondition,
)
from .graph import (
    DirectedGraph,
    VertexId,
    build_graph,
    enumerate_split_sets,
    is_acyclic,
    is_valid_split_set,
    kinship,
    remove_out_edges,
    to_dot,
    topological_order,
)
from .model import (
    Alphabet,
    ErrorVariable,
    FunctionalCausalModel,
    Mechanism,
    enumerate_joint_assignments,
    mechanism_eval,
    models_equal,
    random_model,
    validate_model,
    xor_witness_model,
)
from .dsl import Diagnostic, ModelFormatError, parse_graph, parse_model, serialize_model
from .inference import (
    JointDistribution,
    conditional,
    is_inconsistent,
    joint_distribution,
    marginal,
    normalization_constant,
)
from .separation import (
    PSeparationWitness,
    SeparationQuery,
    ci_holds,
    d_separated,
    p_separated,
)
from .solvability import (
    SolvabilityReport,
    average_num_solutions,
    classify,
    is_markov,
    mechanism_conditional,
    num_solutions,
)
from .teleportation import (
    TeleportationGraph,
    TeleportationModel,
    TeleportationProtocol,
    acyclic_joint,
    build_teleportation_graph,
    build_teleportation_model,
    make_protocol,
    postselected_distribution,
    skewed_prior_protocol,
    success_probability,
    uniform_prior_protocol,
    validate_protocol,
)

__version__ = "0.1.0"
