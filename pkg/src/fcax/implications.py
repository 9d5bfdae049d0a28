"""Attribute implications: closure, models, NextClosure, canonical bases.

The closure operator fires rules in rounds until a fixpoint; at the sizes
this package targets (|M| capped at 20 for exhaustive enumerations) that
is more than fast enough.  NextClosure walks the lectic order induced by
the universe's attribute order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .core import AttributeSet, AttributeUniverse, IncompleteContext, _require_same_universe
from .errors import BackgroundError, CapExceededError, SatisfiabilityError

MODEL_ENUMERATION_CAP = 20


@dataclass(frozen=True)
class Implication:
    """Premise ⟹ conclusion over one universe.

    The stored conclusion may overlap the premise; ``normalized`` strips
    the overlap for display and comparison.
    """

    premise: AttributeSet
    conclusion: AttributeSet

    def __post_init__(self):
        _require_same_universe(self.premise.universe, self.conclusion.universe)

    @property
    def universe(self) -> AttributeUniverse:
        return self.premise.universe

    def normalized(self) -> Implication:
        return Implication(self.premise, self.conclusion - self.premise)

    def __str__(self) -> str:
        left = " ".join(self.premise.names)
        right = " ".join((self.conclusion - self.premise).names)
        return f"{left} -> {right}".strip()


def implication(universe: AttributeUniverse, premise: Iterable[str],
                conclusion: Iterable[str]) -> Implication:
    return Implication(universe.subset(premise), universe.subset(conclusion))


def _compile(impls: Sequence[Implication],
             universe: AttributeUniverse) -> list[tuple[int, int]]:
    rules = []
    for imp in impls:
        _require_same_universe(imp.universe, universe)
        rules.append((imp.premise.mask, imp.conclusion.mask))
    return rules


def _close_mask(rules: Sequence[tuple[int, int]], x: int) -> int:
    changed = True
    while changed:
        changed = False
        for premise, conclusion in rules:
            if premise & ~x == 0 and conclusion & ~x:
                x |= conclusion
                changed = True
    return x


def respects(T: AttributeSet, imp: Implication) -> bool:
    """True iff the premise is not contained in T or the conclusion is."""
    _require_same_universe(T.universe, imp.universe)
    return imp.premise.mask & ~T.mask != 0 or imp.conclusion.mask & ~T.mask == 0


def closure(impls: Sequence[Implication], X: AttributeSet) -> AttributeSet:
    """Least superset of X respecting every implication."""
    rules = _compile(impls, X.universe)
    return X.universe.from_mask(_close_mask(rules, X.mask))


def closure_operator(impls: Sequence[Implication],
                     universe: AttributeUniverse) -> Callable[[AttributeSet], AttributeSet]:
    rules = _compile(impls, universe)
    return lambda X: universe.from_mask(_close_mask(rules, X.mask))


def follows(impls: Sequence[Implication], imp: Implication) -> bool:
    """True iff imp holds in every model of the given implications."""
    return imp.conclusion <= closure(impls, imp.premise)


def equivalent(left: Sequence[Implication], right: Sequence[Implication],
               universe: AttributeUniverse) -> bool:
    """Closure-operator equality of two implication sets."""
    return (all(follows(right, imp) for imp in left)
            and all(follows(left, imp) for imp in right))


def holds_in(ctx: IncompleteContext, imp: Implication) -> bool:
    """True iff every object row of a formal context respects imp."""
    return imp.conclusion <= ctx.intent_closure(imp.premise)


def satisfiable_in(ctx: IncompleteContext, imp: Implication) -> bool:
    """True iff imp has no counterexample in the incomplete context, i.e.
    its conclusion fits inside the maximal satisfiable conclusion."""
    return imp.conclusion <= ctx.max_satisfiable_conclusion(imp.premise)


def next_closure(A: AttributeSet,
                 close: Callable[[AttributeSet], AttributeSet]) -> AttributeSet | None:
    """Lectically smallest ``close``-closed set greater than A, or None.

    A need not be closed itself; candidate positions are scanned from the
    largest attribute index down, the standard ⊕ construction.
    """
    universe = A.universe
    n = len(universe)
    a = A.mask
    for i in reversed(range(n)):
        if a >> i & 1:
            continue
        below = (1 << i) - 1
        b = close(universe.from_mask((a & below) | (1 << i))).mask
        if b & below == a & below:
            return universe.from_mask(b)
    return None


def iter_closed_sets(close: Callable[[AttributeSet], AttributeSet],
                     universe: AttributeUniverse) -> Iterator[AttributeSet]:
    """All ``close``-closed subsets of the universe, lazily, in lectic order."""
    current: AttributeSet | None = close(universe.empty)
    while current is not None:
        yield current
        current = next_closure(current, close)


def models(impls: Sequence[Implication], universe: AttributeUniverse,
           cap: int = MODEL_ENUMERATION_CAP) -> list[AttributeSet]:
    """All attribute sets respecting the implications, in lectic order."""
    if len(universe) > cap:
        raise CapExceededError(
            f"universe has {len(universe)} attributes (cap {cap}); "
            "use iter_closed_sets for lazy enumeration")
    return list(iter_closed_sets(closure_operator(impls, universe), universe))


def relative_canonical_base(ctx: IncompleteContext,
                            background: Sequence[Implication] = ()) -> list[Implication]:
    """Canonical base of a formal context relative to background implications.

    With no background this is the Duquenne-Guigues base.  Premises are the
    background-relative pseudo-intents, emitted in lectic order; together
    with the background the result entails every implication valid in the
    context, and no member is redundant.

    Raises BackgroundError when some background implication does not hold
    in the context.
    """
    ctx._require_formal("relative_canonical_base")
    violated = [imp for imp in background if not holds_in(ctx, imp)]
    if violated:
        raise BackgroundError(violated)

    universe = ctx.universe
    found: list[Implication] = []

    def close(X: AttributeSet) -> AttributeSet:
        rules = _compile(list(background) + found, universe)
        return universe.from_mask(_close_mask(rules, X.mask))

    R: AttributeSet | None = close(universe.empty)
    while R is not None and R.mask != universe.full_mask:
        Rpp = ctx.intent_closure(R)
        if Rpp.mask != R.mask:
            found.append(Implication(R, Rpp))
        R = next_closure(R, close)
    return found


def canonical_base(ctx: IncompleteContext) -> list[Implication]:
    return relative_canonical_base(ctx, ())


def check_satisfiable(ctx: IncompleteContext, impls: Sequence[Implication]) -> None:
    """Verify the closure of every object's certain intent stays possible;
    raises SatisfiabilityError naming the first offending object and
    attribute."""
    rules = _compile(impls, ctx.universe)
    for g, (cross, blank) in zip(ctx.objects, ctx.rows):
        closed = _close_mask(rules, cross)
        bad = closed & blank
        if bad:
            attr = ctx.universe.names[(bad & -bad).bit_length() - 1]
            raise SatisfiabilityError(g, attr)


def l_completion(ctx: IncompleteContext,
                 impls: Sequence[Implication]) -> IncompleteContext:
    """Complete an incomplete context so that exactly the given implications
    (semantically closed) hold.

    Every original object's row becomes the closure of its certain intent;
    one fresh object is added for each model not realized that way.  The
    result is formal, informationally above the input, and its valid
    implications are the closure of ``impls``.
    """
    rules = _compile(impls, ctx.universe)
    check_satisfiable(ctx, impls)
    universe = ctx.universe
    full = universe.full_mask
    objects = list(ctx.objects)
    rows = []
    realized = set()
    for cross, _ in ctx.rows:
        closed = _close_mask(rules, cross)
        realized.add(closed)
        rows.append((closed, full & ~closed))
    for model in models(impls, universe):
        if model.mask not in realized:
            objects.append("model:" + " ".join(model.names))
            rows.append((model.mask, full & ~model.mask))
    return IncompleteContext(universe, objects, rows)

