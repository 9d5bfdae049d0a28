"""Resumable exploration of the shared implications of a group of experts.

The session asks one implication question at a time: for the current
premise R (always closed under accepted plus background implications) the
experts are asked which attributes of the maximal satisfiable conclusion
follow from R.  Yes answers are logged as x, rejections merge the
counterexample into the expert's example context and log o, and "I do not
know" adds an artificial counterexample and logs ?.  An attribute is
accepted into the shared conclusion only when every expert confirmed it.
Premises advance in strictly increasing lectic order; a premise is
consumed once its question round closes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .core import (
    AttributeSet,
    AttributeUniverse,
    Cell,
    IncompleteContext,
    subposition,
    _require_same_universe,
)
from .errors import (
    E_ATTRIBUTE_NOT_REFUTED,
    E_CONFLICTS_WITH_PRIOR,
    E_PREMISE_NOT_CERTAIN,
    CounterexampleError,
    ProtocolError,
)
from .implications import Implication, closure_operator, next_closure

PHASE_ASKING = "asking"
PHASE_ADVANCING = "advancing"
PHASE_DONE = "done"


@dataclass(frozen=True)
class ExpertRef:
    """Identifies one expert within a session."""

    id: str
    name: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValueError("expert id must be non-empty")
        if not self.name:
            object.__setattr__(self, "name", self.id)


@dataclass(frozen=True)
class CounterexampleRow:
    """A named object row supplied with a rejection; attributes missing
    from ``cells`` are unknown."""

    name: str
    cells: tuple[tuple[str, Cell], ...]

    @classmethod
    def make(cls, name: str, cells: Mapping[str, Cell]) -> CounterexampleRow:
        return cls(name, tuple(cells.items()))

    def masks(self, universe: AttributeUniverse) -> tuple[int, int]:
        cross = blank = 0
        for attr, value in self.cells:
            bit = 1 << universe.index(attr)
            if value is Cell.CROSS:
                cross |= bit
            elif value is Cell.BLANK:
                blank |= bit
        return cross, blank


VERDICT_YES = "yes"
VERDICT_NO = "no"
VERDICT_UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """One expert's answer to "does R imply m?"."""

    kind: str
    counterexample: CounterexampleRow | None = None

    def __post_init__(self):
        if self.kind not in (VERDICT_YES, VERDICT_NO, VERDICT_UNKNOWN):
            raise ValueError(f"bad verdict kind {self.kind!r}")
        if (self.kind == VERDICT_NO) != (self.counterexample is not None):
            raise ValueError("exactly rejections carry a counterexample")

    @classmethod
    def yes(cls) -> Verdict:
        return cls(VERDICT_YES)

    @classmethod
    def no(cls, name: str, cells: Mapping[str, Cell]) -> Verdict:
        return cls(VERDICT_NO, CounterexampleRow.make(name, cells))

    @classmethod
    def unknown(cls) -> Verdict:
        return cls(VERDICT_UNKNOWN)


_VERDICT_CELL = {VERDICT_YES: Cell.CROSS, VERDICT_NO: Cell.BLANK,
                 VERDICT_UNKNOWN: Cell.UNKNOWN}


def question_name(premise: AttributeSet, attribute: str) -> str:
    """Canonical log key of the single-conclusion question R ⟹ m."""
    return f"{' '.join(premise.names)} -> {attribute}".strip()


def parse_question_name(name: str, universe: AttributeUniverse) -> tuple[AttributeSet, str]:
    left, _, right = name.partition("->")
    premise = universe.subset(left.split())
    attrs = right.split()
    if len(attrs) != 1:
        raise ValueError(f"not a single-conclusion question: {name!r}")
    return premise, attrs[0]


class AnswerLog:
    """The context C of asked questions: one row per (premise, attribute)
    question, one column per expert, cells x (confirmed), o (rejected) or
    ? (said unknown, or never asked)."""

    def __init__(self, universe: AttributeUniverse, experts: Sequence[str]):
        self.universe = universe
        self.experts = tuple(experts)
        self._cells: dict[str, dict[str, Cell]] = {}
        self._parsed: dict[str, tuple[AttributeSet, str]] = {}

    def __len__(self) -> int:
        return len(self._cells)

    @property
    def question_names(self) -> tuple[str, ...]:
        return tuple(self._cells)

    def ensure_question(self, premise: AttributeSet, attribute: str) -> str:
        key = question_name(premise, attribute)
        if key not in self._cells:
            self._cells[key] = {e: Cell.UNKNOWN for e in self.experts}
            self._parsed[key] = (premise, attribute)
        return key

    def set(self, premise: AttributeSet, attribute: str, expert: str, value: Cell) -> None:
        key = self.ensure_question(premise, attribute)
        self._cells[key][expert] = value

    def get(self, premise: AttributeSet, attribute: str, expert: str) -> Cell:
        row = self._cells.get(question_name(premise, attribute))
        if row is None:
            return Cell.UNKNOWN
        return row.get(expert, Cell.UNKNOWN)

    def row(self, name: str) -> dict[str, Cell]:
        return dict(self._cells[name])

    def entries(self):
        """Iterate (name, premise, attribute, {expert: cell}) in ask order."""
        for key, cells in self._cells.items():
            premise, attribute = self._parsed[key]
            yield key, premise, attribute, cells

    def question(self, name: str) -> tuple[AttributeSet, str]:
        return self._parsed[name]

    def copy(self) -> AnswerLog:
        clone = AnswerLog(self.universe, self.experts)
        clone._cells = {k: dict(v) for k, v in self._cells.items()}
        clone._parsed = dict(self._parsed)
        return clone

    def as_context(self) -> IncompleteContext:
        """The log as an incomplete context over an expert universe."""
        expert_universe = AttributeUniverse(self.experts)
        table = [(name, {e: c for e, c in cells.items()})
                 for name, cells in self._cells.items()]
        return IncompleteContext.from_cells(expert_universe, table)


@dataclass(frozen=True)
class Question:
    """Snapshot of the active question: premise, attributes still possibly
    shared, and what each expert still has to answer."""

    premise: AttributeSet
    pending: tuple[str, ...]
    remaining: Mapping[str, tuple[str, ...]]


def artificial_name(premise: AttributeSet, attribute: str) -> str:
    rendered = " ".join(premise.names) or "∅"
    return f"q:{rendered}:{attribute}"


def is_artificial(object_name: str) -> bool:
    return object_name.startswith("q:")


def validate_counterexample(row: CounterexampleRow, premise: AttributeSet,
                            attribute: str,
                            existing: IncompleteContext) -> tuple[int, int]:
    """Check a rejection row: the premise must be certain, the rejected
    attribute certainly absent, and an existing object of the same name
    must merge without x/o clashes.   Returns the row masks."""
    universe = existing.universe
    cross, blank = row.masks(universe)
    if premise.mask & ~cross:
        missing = [a for a in premise.names if not cross >> universe.index(a) & 1]
        raise CounterexampleError(
            E_PREMISE_NOT_CERTAIN,
            f"counterexample {row.name!r} does not certainly contain {missing}")
    if not blank >> universe.index(attribute) & 1:
        raise CounterexampleError(
            E_ATTRIBUTE_NOT_REFUTED,
            f"counterexample {row.name!r} does not certainly lack {attribute!r}")
    if row.name in existing:
        old_cross, old_blank = existing.row(row.name)
        bad = old_cross & blank | old_blank & cross
        if bad:
            cells = [(row.name, a) for j, a in enumerate(universe.names) if bad >> j & 1]
            raise CounterexampleError(
                E_CONFLICTS_WITH_PRIOR,
                f"row {row.name!r} contradicts the stored object", cells)
    return cross, blank


@dataclass
class _ActiveQuestion:
    premise: AttributeSet
    pending: set[str]
    asked: tuple[str, ...]
    answers: dict[tuple[str, str], str] = field(default_factory=dict)


class ExplorationState:
    """One exploration session; mutate through submit/next_question only,
    and serialize submissions externally (single logical writer)."""

    def __init__(self, universe: AttributeUniverse, experts: Sequence[ExpertRef],
                 examples: Mapping[str, IncompleteContext],
                 background: Sequence[Implication],
                 prior_answers: AnswerLog | None = None):
        self.universe = universe
        self.experts = tuple(experts)
        self.expert_ids = tuple(e.id for e in self.experts)
        self.examples: dict[str, IncompleteContext] = dict(examples)
        self.background = tuple(background)
        self.accepted: list[Implication] = []
        self.log = AnswerLog(universe, self.expert_ids)
        self.prior = prior_answers
        self.prompts: list[tuple[str, str]] = []  # (expert id, question name)
        self._R: AttributeSet | None = None  # None until the first advance
        self._premise_consumed = False
        self._done = len(universe) == 0
        self.active: _ActiveQuestion | None = None

    # -- inspection -----------------------------------------------------------

    @property
    def phase(self) -> str:
        if self.active is not None:
            return PHASE_ASKING
        return PHASE_DONE if self._done else PHASE_ADVANCING

    @property
    def premise(self) -> AttributeSet:
        return self._R if self._R is not None else self.universe.empty

    def current_question(self) -> Question | None:
        a = self.active
        if a is None:
            return None
        order = [m for m in self.universe.names if m in a.pending]
        remaining = {
            e: tuple(m for m in order if (e, m) not in a.answers)
            for e in self.expert_ids
        }
        return Question(a.premise, tuple(order), remaining)

    # -- the state machine ----------------------------------------------------

    def _closure(self) -> Callable[[AttributeSet], AttributeSet]:
        return closure_operator(list(self.background) + self.accepted, self.universe)

    def _example_subposition(self) -> IncompleteContext:
        return subposition([self.examples[e] for e in self.expert_ids])

    def _pending_for(self, R: AttributeSet) -> AttributeSet:
        return self._example_subposition().max_satisfiable_conclusion(R) - R

    def next_question(self) -> Question | None:
        """Advance to the next premise with an open conclusion and emit its
        question; None once every premise is exhausted."""
        if self.active is not None:
            raise ProtocolError("a question is still awaiting answers")
        if self._done:
            return None
        close = self._closure()
        if self._R is None:
            R: AttributeSet | None = close(self.universe.empty)
        elif self._premise_consumed:
            R = next_closure(self._R, close)
            self._premise_consumed = False
        else:
            R = self._R
        while R is not None and R.mask != self.universe.full_mask:
            pending = self._pending_for(R)
            if pending.mask:
                self._R = R
                self._emit(pending)
                return self.current_question()
            R = next_closure(R, close)
        self._R = self.universe.full
        self._done = True
        return None

    def _emit(self, pending: AttributeSet) -> None:
        asked = pending.names
        active = _ActiveQuestion(self.premise, set(asked), asked)
        for m in asked:
            self.log.ensure_question(active.premise, m)
        if self.prior is not None:
            for e in self.expert_ids:
                for m in asked:
                    if self.prior.get(active.premise, m, e) is Cell.CROSS:
                        active.answers[(e, m)] = VERDICT_YES
                        self.log.set(active.premise, m, e, Cell.CROSS)
        self.active = active
        self._maybe_close()

    def submit(self, expert: str, attribute: str, verdict: Verdict) -> None:
        """Record one expert's verdict for one pending attribute."""
        a = self.active
        if a is None:
            raise ProtocolError("no question is active")
        if expert not in self.expert_ids:
            raise ProtocolError(f"unknown expert {expert!r}")
        if attribute not in a.pending:
            raise ProtocolError(
                f"attribute {attribute!r} is not pending for premise {a.premise}")
        if (expert, attribute) in a.answers:
            raise ProtocolError(
                f"{expert!r} already answered {question_name(a.premise, attribute)!r}")
        grown = None  # contexts are values, so validate fully before committing
        if verdict.kind == VERDICT_NO:
            cross, blank = validate_counterexample(
                verdict.counterexample, a.premise, attribute, self.examples[expert])
            grown = self.examples[expert].merge_row(
                verdict.counterexample.name, cross, blank)
        elif verdict.kind == VERDICT_UNKNOWN:
            grown = self.examples[expert].merge_row(
                artificial_name(a.premise, attribute),
                a.premise.mask, 1 << self.universe.index(attribute))
        self.prompts.append((expert, question_name(a.premise, attribute)))
        if grown is not None:
            self.examples[expert] = grown
        a.answers[(expert, attribute)] = verdict.kind
        self.log.set(a.premise, attribute, expert, _VERDICT_CELL[verdict.kind])
        if verdict.kind != VERDICT_YES:
            self._refresh_pending()
        self._maybe_close()

    def merge_examples(self, expert: str, ctx: IncompleteContext) -> None:
        """Merge externally provided example rows (information supremum)."""
        if expert not in self.expert_ids:
            raise ProtocolError(f"unknown expert {expert!r}")
        merged = self.examples[expert]
        for name, (cross, blank) in zip(ctx.objects, ctx.rows):
            merged = merged.merge_row(name, cross, blank)
        self.examples[expert] = merged
        if self.active is not None:
            self._refresh_pending()
            self._maybe_close()

    def _refresh_pending(self) -> None:
        a = self.active
        still = self._pending_for(a.premise)
        a.pending &= set(still.names)

    def _maybe_close(self) -> None:
        a = self.active
        if any((e, m) not in a.answers
               for e in self.expert_ids for m in a.pending):
            return
        premise = a.premise
        conclusion = premise | self.universe.subset(a.pending)
        if conclusion.mask != premise.mask:
            self.accepted.append(Implication(premise, conclusion))
        self.active = None
        self._premise_consumed = True

    def result(self) -> tuple[tuple[Implication, ...], dict[str, IncompleteContext], AnswerLog]:
        """Accepted base, final example contexts and the answer log."""
        if self.phase != PHASE_DONE:
            raise ProtocolError("exploration is not finished")
        return tuple(self.accepted), dict(self.examples), self.log


def start(universe: AttributeUniverse, experts: Sequence[ExpertRef | str],
          examples: Mapping[str, IncompleteContext] | None = None,
          background: Sequence[Implication] = (),
          prior_answers: AnswerLog | None = None) -> ExplorationState:
    """Open a session for a non-empty group of experts.

    ``examples`` maps expert ids to initial example contexts (empty by
    default); ``background`` implications are taken to hold for everyone
    and are never asked.  ``prior_answers`` lets an outer system run feed
    answers already on record, so nobody is prompted twice.
    """
    refs = tuple(e if isinstance(e, ExpertRef) else ExpertRef(e) for e in experts)
    if not refs:
        raise ValueError("expert group must be non-empty")
    ids = [e.id for e in refs]
    if len(set(ids)) != len(ids):
        raise ValueError("expert ids must be unique")
    examples = dict(examples or {})
    filled: dict[str, IncompleteContext] = {}
    for e in ids:
        ctx = examples.get(e, IncompleteContext.empty(universe))
        _require_same_universe(universe, ctx.universe)
        filled[e] = ctx
    for imp in background:
        _require_same_universe(universe, imp.universe)
    return ExplorationState(universe, refs, filled, background, prior_answers)


AnswerFn = Callable[[str, AttributeSet, str], Verdict]


def run_exploration(state: ExplorationState, answer: AnswerFn) -> ExplorationState:
    """Drive a session to completion with a deterministic answering order
    (experts in session order, attributes in universe order)."""
    while True:
        question = state.active and state.current_question()
        if question is None:
            question = state.next_question()
        if question is None:
            return state
        while state.active is not None:
            q = state.current_question()
            expert, attribute = next(
                (e, ms[0]) for e, ms in q.remaining.items() if ms)
            state.submit(expert, attribute, answer(expert, q.premise, attribute))
