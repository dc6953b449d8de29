"""Simplicial-model epistemic logic and two-process task solvability."""

from .model import (
    Agent, Atom, EmptyComplex, Morphism, SimplicialModel, UnknownFacet, Vertex,
    canonical_text, check_morphism, compose, decide_atom, identity, induced_subcomplex,
    input_atom, is_connected, neighbors_via, validate_model,
)
from .logic import (
    And, AtomRef, CommonKnow, Formula, Implies, Know, Not, Or, evaluate, is_positive,
    parse_formula, random_formula, to_text, truth_set,
)
from .update import ActionModel, EmptyUpdate, UpdateResult, extended_product_update, is_proper, product_update
from .layered import (
    BOX, build_mp, check_view_isomorphism, protocol_graph_from_views, protocol_model,
    subdivision_census, view_of,
)
from .tasks import (
    TaskSpec, TaskSpecError, TaskFileError, build_input_model, build_task_action_model, builtin,
    dump_task_file, load_task, make_task, output_model, parse_task_file,
)
from .analysis import (
    InvariantViolation, NotApplicable, Verdict, check_bisimulation, connectivity_certificate,
    cross_check, demonstrate_no_positive_formula, find_failing_world, max_bisimulation,
    solve_by_formula, solve_by_map, task_formula,
)

__version__ = "0.1.0"
