"""Rainbow independent sets in coloured matroids.

Builds large families of disjoint rainbow independent sets from ``n`` disjoint
bases of a rank-``n`` matroid by lexicographic improvement with recursive
switching, and checks each step against brute-force oracles.
"""

from .family import (
    ColourClassification,
    FamilyError,
    Lex,
    NoPivotError,
    RainbowFamily,
    ReductionTrace,
    availability_graph,
    can_add,
    classify_colours,
    colour_excess,
    k_excess,
    lex_compare,
    reduce_once,
    reduce_trace,
)
from .graphs import BipartiteGraph
from .instances import (
    ColouredInstance,
    InstanceError,
    extend_with_dummies,
    generate_instance,
    make_rota_instance,
    parse_instance,
    serialize_instance,
)
from .matroid import Matroid, MatroidError, augment, build_matroid, check_axioms, is_independent, rank_of
from .switching import (
    ImprovementError,
    SolverParams,
    SwitchError,
    SwitchResult,
    find_P_witness,
    find_removal_pair,
    greedy_initial,
    improve_step,
    solve,
    switch,
)

__version__ = "0.1.0"
