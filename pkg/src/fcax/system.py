"""Exploration of shared implications over expert subsets (largest first),
answer-log merging, ?-reduction, the shared-implication lattice and the
conflict report.

Every subset exploration reuses what is already known: implications all
members confirmed become background (so those premises are never visited
again), earlier counterexamples stay in the example contexts (so refuted
conclusions never reappear), and confirmed cells from the merged log are
replayed instead of prompting the expert again.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .core import (
    AttributeSet,
    AttributeUniverse,
    Cell,
    IncompleteContext,
    concepts,
    supremum,
)
from .errors import CapExceededError, ConflictError, ProtocolError
from .exploration import (
    AnswerFn,
    AnswerLog,
    ExpertRef,
    ExplorationState,
    Question,
    Verdict,
    is_artificial,
    parse_question_name,
    start,
)
from .implications import Implication, follows

SUBSET_CAP = 8


def subset_schedule(experts: Sequence[str], cap: int = SUBSET_CAP) -> list[tuple[str, ...]]:
    """All non-empty subsets of the expert group, every superset before
    each of its subsets: decreasing cardinality, ties lexicographic."""
    ids = tuple(experts)
    if not 1 <= len(ids) <= cap:
        raise CapExceededError(
            f"{len(ids)} experts (cap {cap}): a full schedule has 2^k-1 subsets")
    schedule: list[tuple[str, ...]] = []
    for size in range(len(ids), 0, -1):
        schedule += sorted(combinations(sorted(ids), size))
    # keep member order as given, only the subset ordering is lexicographic
    order = {e: i for i, e in enumerate(ids)}
    return [tuple(sorted(s, key=order.__getitem__)) for s in schedule]


def validate_schedule(subsets: Sequence[tuple[str, ...]]) -> None:
    seen = [frozenset(s) for s in subsets]
    if len(set(seen)) != len(seen):
        raise ValueError("schedule repeats a subset")
    for i, small in enumerate(seen):
        if not small:
            raise ValueError("schedule contains the empty subset")
        for later in seen[i + 1:]:
            if later > small:
                raise ValueError(
                    f"schedule is not a linear extension of ⊇: {set(later)} "
                    f"after its subset {set(small)}")


def seed_log(universe: AttributeUniverse, experts: Sequence[str],
             impls: Sequence[Implication]) -> AnswerLog:
    """Answer log recording that every expert already confirmed the given
    implications (one single-conclusion row per conclusion attribute); the
    seed makes them background for every subset exploration."""
    log = AnswerLog(universe, tuple(experts))
    for imp in impls:
        for attribute in (imp.conclusion - imp.premise).names:
            for expert in experts:
                log.set(imp.premise, attribute, expert, Cell.CROSS)
    return log


def background_for(log: AnswerLog, subset: Iterable[str]) -> list[Implication]:
    """Logged questions every subset member confirmed, read as implications."""
    members = tuple(subset)
    out = []
    for _, premise, attribute, cells in log.entries():
        if all(cells.get(e) is Cell.CROSS for e in members):
            out.append(Implication(premise, premise | premise.universe.subset([attribute])))
    return out


def merge_log(target: AnswerLog, other: AnswerLog) -> AnswerLog:
    """Union of question rows with cell-wise information suprema.  The
    second log's experts must be among the first's.  Raises ConflictError
    listing every (question, expert) cell where x meets o."""
    if other.universe != target.universe:
        raise ValueError("answer logs cover different attribute universes")
    unknown = set(other.experts) - set(target.experts)
    if unknown:
        raise ValueError(f"log mentions experts outside the system: {sorted(unknown)}")
    merged = target.copy()
    conflicts: list[tuple[str, str]] = []
    for name, premise, attribute, cells in other.entries():
        merged.ensure_question(premise, attribute)
        for expert, value in cells.items():
            if value is Cell.UNKNOWN:
                continue
            current = merged.get(premise, attribute, expert)
            if current is not Cell.UNKNOWN and current is not value:
                conflicts.append((name, expert))
            else:
                merged.set(premise, attribute, expert, value)
    if conflicts:
        raise ConflictError("experts contradict their earlier answers", conflicts)
    return merged


def confirmed_implications(log: AnswerLog) -> dict[str, list[Implication]]:
    """Per expert, every question they answered x, read as implications."""
    out: dict[str, list[Implication]] = {e: [] for e in log.experts}
    for _, premise, attribute, cells in log.entries():
        imp = Implication(premise, premise | premise.universe.subset([attribute]))
        for expert, value in cells.items():
            if value is Cell.CROSS:
                out[expert].append(imp)
    return out


def question_reduce(log: AnswerLog, examples: Mapping[str, IncompleteContext],
                    confirmed: Mapping[str, Sequence[Implication]] | None = None,
                    ) -> AnswerLog:
    """Fill ? cells that are already decided: to x when the question follows
    from the expert's confirmed implications, to o when one of their
    example objects contradicts it.  Iterates to a fixpoint."""
    reduced = log.copy()
    changed = True
    while changed:
        changed = False
        known = (dict(confirmed) if confirmed is not None
                 else confirmed_implications(reduced))
        for _, premise, attribute, cells in reduced.entries():
            for expert in reduced.experts:
                if cells.get(expert) is not Cell.UNKNOWN:
                    continue
                imp = Implication(premise, premise.universe.subset([attribute]))
                value = None
                if follows(known.get(expert, ()), imp):
                    value = Cell.CROSS
                else:
                    ctx = examples.get(expert)
                    if ctx is not None and _has_counterexample(ctx, premise, attribute):
                        value = Cell.BLANK
                if value is not None:
                    reduced.set(premise, attribute, expert, value)
                    changed = True
    return reduced


def _has_counterexample(ctx: IncompleteContext, premise: AttributeSet,
                        attribute: str, real_only: bool = False) -> str | None:
    bit = 1 << ctx.universe.index(attribute)
    for g, (cross, blank) in zip(ctx.objects, ctx.rows):
        if premise.mask & ~cross == 0 and blank & bit:
            if real_only and is_artificial(g):
                continue
            return g
    return None


def shared_context(log: AnswerLog) -> IncompleteContext:
    """The certain fragment of the context of shared implications: asked
    questions against experts, incident exactly where the log shows x."""
    expert_universe = AttributeUniverse(log.experts)
    objects, rows = [], []
    for name, _, _, cells in log.entries():
        cross = 0
        for i, e in enumerate(log.experts):
            if cells.get(e) is Cell.CROSS:
                cross |= 1 << i
        objects.append(name)
        rows.append((cross, expert_universe.full_mask & ~cross))
    return IncompleteContext(expert_universe, objects, rows)


@dataclass(frozen=True)
class SharedConcept:
    """One node of the system of shared implications: the experts of the
    intent jointly certify every implication of the extent (a complete but
    not necessarily irredundant generator of their shared theory, as far
    as it was explored)."""

    experts: tuple[str, ...]
    implications: tuple[Implication, ...]


def shared_lattice(cx: IncompleteContext,
                   universe: AttributeUniverse) -> list[SharedConcept]:
    """Concepts of the shared-implication context, extents parsed back into
    implications over ``universe``."""
    out = []
    for concept in concepts(cx):
        impls = []
        for name in concept.extent:
            premise, attribute = parse_question_name(name, universe)
            impls.append(Implication(premise, premise | universe.subset([attribute])))
        out.append(SharedConcept(concept.intent.names, tuple(impls)))
    return out


@dataclass(frozen=True)
class QuestionFact:
    premise: tuple[str, ...]
    attribute: str
    experts: tuple[str, ...]


@dataclass(frozen=True)
class CellFact:
    object: str
    attribute: str
    values: tuple[tuple[str, str], ...]  # (expert, "x"/"o")


@dataclass(frozen=True)
class PairFact:
    premise: tuple[str, ...]
    attribute: str
    confirmer: str
    refuter: str
    counterexample: str


@dataclass(frozen=True)
class ConflictReport:
    """What the group still disagrees about, in four sections:
    (a) questions refuted by artificial counterexamples only,
    (b) questions confirmed by most experts but not all,
    (c) object cells asserted x by one expert and o by another,
    (d) implications one expert confirmed while another holds a real
        counterexample."""

    artificial_only: tuple[QuestionFact, ...]
    majority_confirmed: tuple[QuestionFact, ...]
    controversial_cells: tuple[CellFact, ...]
    cross_conflicts: tuple[PairFact, ...]

    def to_dict(self) -> dict:
        return {
            "artificial_only": [
                {"premise": list(q.premise), "attribute": q.attribute,
                 "experts": list(q.experts)} for q in self.artificial_only],
            "majority_confirmed": [
                {"premise": list(q.premise), "attribute": q.attribute,
                 "confirmed_by": list(q.experts)} for q in self.majority_confirmed],
            "controversial_cells": [
                {"object": c.object, "attribute": c.attribute,
                 "values": {e: v for e, v in c.values}} for c in self.controversial_cells],
            "cross_conflicts": [
                {"premise": list(p.premise), "attribute": p.attribute,
                 "confirmer": p.confirmer, "refuter": p.refuter,
                 "counterexample": p.counterexample} for p in self.cross_conflicts],
        }

    def to_text(self) -> str:
        def imp_str(premise, attribute):
            return f"{' '.join(premise)} -> {attribute}".strip()

        lines = ["Conflict report", "", "[a] only artificial counterexamples:"]
        lines += [f"  {imp_str(q.premise, q.attribute)}   unknown to: {', '.join(q.experts)}"
                  for q in self.artificial_only] or ["  none"]
        lines += ["", "[b] confirmed by most experts:"]
        lines += [f"  {imp_str(q.premise, q.attribute)}   confirmed by: {', '.join(q.experts)}"
                  for q in self.majority_confirmed] or ["  none"]
        lines += ["", "[c] controversial object cells:"]
        lines += [f"  {c.object} / {c.attribute}   " +
                  ", ".join(f"{e}={v}" for e, v in c.values)
                  for c in self.controversial_cells] or ["  none"]
        lines += ["", "[d] confirmed implication vs. real counterexample:"]
        lines += [f"  {imp_str(p.premise, p.attribute)}   {p.confirmer} confirms, "
                  f"{p.refuter} holds {p.counterexample}"
                  for p in self.cross_conflicts] or ["  none"]
        return "\n".join(lines) + "\n"


def conflict_report(log: AnswerLog, examples: Mapping[str, IncompleteContext],
                    threshold: float = 0.5) -> ConflictReport:
    """Assemble the four conflict sections from the answer log and the
    final example contexts.  ``threshold`` is the confirming share above
    which section (b) flags a question (strictly greater than)."""
    artificial: list[QuestionFact] = []
    majority: list[QuestionFact] = []
    pairs: list[PairFact] = []
    experts = log.experts
    for _, premise, attribute, cells in log.entries():
        confirmers = tuple(e for e in experts if cells.get(e) is Cell.CROSS)
        dissenters = tuple(e for e in experts if e not in confirmers)
        if dissenters and confirmers and len(confirmers) > threshold * len(experts):
            majority.append(QuestionFact(premise.names, attribute, confirmers))
        if dissenters:
            refuting = {e: _has_counterexample(examples[e], premise, attribute)
                        for e in experts if e in examples}
            real = {e: g for e, g in refuting.items()
                    if g is not None and not is_artificial(g)}
            fake = {e: g for e, g in refuting.items()
                    if g is not None and is_artificial(g)}
            if fake and not real:
                artificial.append(QuestionFact(premise.names, attribute, tuple(fake)))
            for refuter in experts:
                g = _has_counterexample(examples.get(refuter,
                                                     IncompleteContext.empty(log.universe)),
                                        premise, attribute, real_only=True)
                if g is None:
                    continue
                for confirmer in confirmers:
                    if confirmer != refuter:
                        pairs.append(PairFact(premise.names, attribute,
                                              confirmer, refuter, g))
    cells_section: list[CellFact] = []
    ids = list(examples)
    seen: set[tuple[str, str]] = set()
    for i, e1 in enumerate(ids):
        ctx1 = examples[e1]
        for g in ctx1.objects:
            for e2 in ids[i + 1:]:
                ctx2 = examples[e2]
                if g not in ctx2:
                    continue
                c1, b1 = ctx1.row(g)
                c2, b2 = ctx2.row(g)
                bad = c1 & b2 | b1 & c2
                for j, attr in enumerate(log.universe.names):
                    if bad >> j & 1 and (g, attr) not in seen:
                        seen.add((g, attr))
                        values = tuple(
                            (e, examples[e].cell(g, attr).value) for e in ids
                            if g in examples[e]
                            and examples[e].cell(g, attr) is not Cell.UNKNOWN)
                        cells_section.append(CellFact(g, attr, values))
    return ConflictReport(tuple(artificial), tuple(majority),
                          tuple(cells_section), tuple(pairs))


class SystemExploration:
    """State machine for the subset-by-subset exploration; resumable
    between subsets and mid-question."""

    def __init__(self, universe: AttributeUniverse, experts: Sequence[ExpertRef | str],
                 examples: Mapping[str, IncompleteContext] | None = None,
                 log: AnswerLog | None = None,
                 subsets: Sequence[Sequence[str]] | None = None):
        refs = tuple(e if isinstance(e, ExpertRef) else ExpertRef(e) for e in experts)
        if not refs:
            raise ValueError("expert group must be non-empty")
        self.universe = universe
        self.experts = refs
        self.expert_ids = tuple(e.id for e in refs)
        if subsets is None:
            self.schedule = subset_schedule(self.expert_ids)
        else:
            self.schedule = [tuple(s) for s in subsets]
            for s in self.schedule:
                missing = set(s) - set(self.expert_ids)
                if missing:
                    raise ValueError(f"schedule names unknown experts: {sorted(missing)}")
            validate_schedule(self.schedule)
        self.position = 0
        self.examples: dict[str, IncompleteContext] = {
            e: (examples or {}).get(e, IncompleteContext.empty(universe))
            for e in self.expert_ids}
        self.log = log.copy() if log is not None else AnswerLog(universe, self.expert_ids)
        self.accepted: dict[tuple[str, ...], tuple[Implication, ...]] = {}
        self.current: ExplorationState | None = None
        self.prompt_history: list[tuple[str, str]] = []

    @property
    def done(self) -> bool:
        return self.current is None and self.position >= len(self.schedule)

    @property
    def current_subset(self) -> tuple[str, ...] | None:
        if self.position < len(self.schedule):
            return self.schedule[self.position]
        return None

    def _ref(self, expert_id: str) -> ExpertRef:
        return next(e for e in self.experts if e.id == expert_id)

    def next_question(self) -> tuple[tuple[str, ...], Question] | None:
        """The next open question together with its subset, advancing
        through (and merging) finished subset explorations; None when the
        whole schedule is exhausted."""
        while True:
            if self.current is None:
                subset = self.current_subset
                if subset is None:
                    return None
                self.current = start(
                    self.universe,
                    [self._ref(e) for e in subset],
                    {e: self.examples[e] for e in subset},
                    background_for(self.log, subset),
                    prior_answers=self.log,
                )
            state = self.current
            question = state.current_question()
            if question is None:
                question = state.next_question()
            if question is not None:
                return self.schedule[self.position], question
            self._finish_subset()

    def _finish_subset(self) -> None:
        subset = self.schedule[self.position]
        accepted, grown, session_log = self.current.result()
        self.accepted[subset] = accepted
        for e in subset:
            self.examples[e] = supremum(self.examples[e], grown[e])
        self.log = merge_log(self.log, session_log)
        self.log = question_reduce(self.log, self.examples)
        self.prompt_history += self.current.prompts
        self.current = None
        self.position += 1

    def submit(self, expert: str, attribute: str, verdict: Verdict) -> None:
        if self.current is None:
            raise ProtocolError("no exploration is active")
        self.current.submit(expert, attribute, verdict)

    def merge_examples(self, expert: str, ctx: IncompleteContext) -> None:
        """Route uploaded example rows to the active subset session when the
        expert takes part in it, and into the system record otherwise."""
        if expert not in self.expert_ids:
            raise ProtocolError(f"unknown expert {expert!r}")
        if self.current is not None and expert in self.current.expert_ids:
            self.current.merge_examples(expert, ctx)
        else:
            self.examples[expert] = supremum(self.examples[expert], ctx)

    def result(self) -> tuple[dict[tuple[str, ...], tuple[Implication, ...]],
                              dict[str, IncompleteContext], AnswerLog]:
        if not self.done:
            raise ProtocolError("system exploration is not finished")
        return dict(self.accepted), dict(self.examples), self.log


def run_system(universe: AttributeUniverse, experts: Sequence[ExpertRef | str],
               answer: AnswerFn,
               examples: Mapping[str, IncompleteContext] | None = None,
               log: AnswerLog | None = None,
               subsets: Sequence[Sequence[str]] | None = None) -> SystemExploration:
    """Drive a full system exploration with the given answering function,
    experts in subset order and attributes in universe order."""
    system = SystemExploration(universe, experts, examples, log, subsets)
    while True:
        item = system.next_question()
        if item is None:
            return system
        _, question = item
        state = system.current
        while state.active is not None:
            q = state.current_question()
            expert, attribute = next(
                (e, ms[0]) for e, ms in q.remaining.items() if ms)
            system.submit(expert, attribute, answer(expert, q.premise, attribute))
