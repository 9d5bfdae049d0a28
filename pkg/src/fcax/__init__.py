"""fcax: attribute exploration of shared implications for groups of
possibly contradicting, partially informed domain experts."""

from .core import (
    AttributeSet,
    AttributeUniverse,
    Cell,
    Concept,
    IncompleteContext,
    concepts,
    information_leq,
    subposition,
    supremum,
)
from .implications import (
    Implication,
    canonical_base,
    closure,
    equivalent,
    follows,
    holds_in,
    implication,
    l_completion,
    models,
    next_closure,
    relative_canonical_base,
    respects,
    satisfiable_in,
)
from .exploration import (
    AnswerLog,
    ExpertRef,
    ExplorationState,
    Question,
    Verdict,
    run_exploration,
    start,
    validate_counterexample,
)
from .experts import SimulatedView, make_view
from .system import (
    ConflictReport,
    SharedConcept,
    SystemExploration,
    background_for,
    conflict_report,
    merge_log,
    question_reduce,
    run_system,
    shared_context,
    shared_lattice,
    subset_schedule,
)

__version__ = "0.1.0"
