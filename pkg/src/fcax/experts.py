"""Deterministic expert oracles for driving explorations without humans.

A view pairs an example context with an implication theory; it answers
exactly per the protocol: yes when the theory entails the question, no
with the first stored counterexample when one exists, otherwise unknown.
A view marked complete never says unknown: it fabricates the witness
closure(theory, premise), which is a model containing the premise and
missing the asked attribute.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import AttributeSet, Cell, IncompleteContext
from .exploration import Verdict
from .implications import Implication, check_satisfiable, closure


@dataclass(frozen=True)
class SimulatedView:
    """An expert's private knowledge: examples plus an implication theory
    (kept as given, closed semantically on use)."""

    context: IncompleteContext
    theory: tuple[Implication, ...]
    complete: bool = False

    def answer(self, premise: AttributeSet, attribute: str) -> Verdict:
        return answer(self, premise, attribute)


def make_view(ctx: IncompleteContext, theory: Sequence[Implication],
              complete: bool = False) -> SimulatedView:
    """Validate the partial-view condition (the theory's closure stays
    satisfiable in the context) and build the view."""
    check_satisfiable(ctx, theory)
    return SimulatedView(ctx, tuple(theory), complete)


def answer(view: SimulatedView, premise: AttributeSet, attribute: str) -> Verdict:
    if attribute in premise:
        raise ValueError(f"{attribute!r} is part of the premise")
    universe = view.context.universe
    closed = closure(view.theory, premise)
    if attribute in closed:
        return Verdict.yes()
    bit = 1 << universe.index(attribute)
    for g, (cross, blank) in zip(view.context.objects, view.context.rows):
        if premise.mask & ~cross == 0 and blank & bit:
            cells = {a: view.context.cell(g, a) for a in universe.names
                     if view.context.cell(g, a) is not Cell.UNKNOWN}
            return Verdict.no(g, cells)
    if view.complete:
        name = "model:" + " ".join(closed.names)
        cells = {a: (Cell.CROSS if a in closed else Cell.BLANK)
                 for a in universe.names}
        return Verdict.no(name, cells)
    return Verdict.unknown()
