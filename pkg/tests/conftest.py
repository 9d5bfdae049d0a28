"""Shared fixtures and independent brute-force oracles.

The oracles work on plain frozensets and powerset loops so they share no
code path with the package; expected values in the tests are computed
here, never copied from the implementation under test.
"""

from __future__ import annotations

import random
from itertools import chain, combinations

import pytest

from fcax.core import AttributeUniverse, Cell, IncompleteContext

# ---------------------------------------------------------------------------
# brute-force oracles (frozenset world)
# ---------------------------------------------------------------------------


def powerset(items):
    items = list(items)
    return [frozenset(c) for c in
            chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))]


def bf_respects(T: frozenset, premise: frozenset, conclusion: frozenset) -> bool:
    return not premise <= T or conclusion <= T


def bf_models(impls, attrs) -> list[frozenset]:
    """All subsets respecting every (premise, conclusion) pair."""
    return [T for T in powerset(attrs)
            if all(bf_respects(T, p, c) for p, c in impls)]


def bf_closure(impls, X: frozenset, attrs) -> frozenset:
    """Intersection of all models containing X (M itself always qualifies)."""
    out = frozenset(attrs)
    for T in bf_models(impls, attrs):
        if X <= T:
            out &= T
    return out


def lectic_key(subset: frozenset, attrs) -> int:
    """First attribute most significant, so natural int order = lectic order."""
    return sum(1 << (len(attrs) - 1 - i) for i, a in enumerate(attrs) if a in subset)


def lectic_sorted(subsets, attrs) -> list[frozenset]:
    return sorted(subsets, key=lambda s: lectic_key(s, attrs))


def bf_intents(object_intents, attrs) -> list[frozenset]:
    """Closure system generated by the object intents: all intersections
    of subsets of rows, plus the full set (empty intersection)."""
    found = {frozenset(attrs)}
    rows = [frozenset(r) for r in object_intents]
    for selection in powerset(range(len(rows))):
        if selection:
            inter = frozenset(attrs)
            for i in selection:
                inter &= rows[i]
            found.add(inter)
    return lectic_sorted(found, attrs)


def bf_valid(object_intents, premise: frozenset, conclusion: frozenset, attrs) -> bool:
    """Does premise -> conclusion hold in the formal context given by rows?"""
    return all(bf_respects(frozenset(r), premise, conclusion) for r in object_intents)


def bf_pseudo_intents(object_intents, attrs, background=()) -> list[frozenset]:
    """Background-relative pseudo-intents straight from the three-part
    definition, smaller sets first so the recursion is already resolved."""

    def double_prime(X):
        rows = [frozenset(r) for r in object_intents if X <= frozenset(r)]
        out = frozenset(attrs)
        for r in rows:
            out &= r
        return out

    pseudo: list[frozenset] = []
    for P in sorted(powerset(attrs), key=len):
        if not all(bf_respects(P, p, c) for p, c in background):
            continue
        if P == double_prime(P):
            continue
        if all(double_prime(Q) <= P for Q in pseudo if Q < P):
            pseudo.append(P)
    return lectic_sorted(pseudo, attrs)


# ---------------------------------------------------------------------------
# random generators (module-level random with per-test seeds)
# ---------------------------------------------------------------------------


def random_universe(rng: random.Random, max_size: int = 5) -> AttributeUniverse:
    n = rng.randint(1, max_size)
    return AttributeUniverse([f"m{i}" for i in range(n)])


def random_formal_context(rng: random.Random, universe: AttributeUniverse,
                          max_objects: int = 6) -> IncompleteContext:
    n_obj = rng.randint(0, max_objects)
    table = []
    for i in range(n_obj):
        intent = [a for a in universe.names if rng.random() < 0.5]
        table.append((f"g{i}", intent))
    return IncompleteContext.from_intents(universe, table)


def degrade(rng: random.Random, ctx: IncompleteContext,
            p_unknown: float = 0.3) -> IncompleteContext:
    """Forget random cells of a formal context (turn them to ?)."""
    table = []
    for g in ctx.objects:
        cells = {}
        for a in ctx.universe.names:
            if rng.random() >= p_unknown:
                cells[a] = ctx.cell(g, a)
        table.append((g, cells))
    return IncompleteContext.from_cells(ctx.universe, table)


# ---------------------------------------------------------------------------
# common fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def abc() -> AttributeUniverse:
    return AttributeUniverse(["a", "b", "c"])


@pytest.fixture
def k1(abc) -> IncompleteContext:
    """Two partially known objects: g1 has a, lacks c, b unknown; g2 has a
    and b, c unknown."""
    return IncompleteContext.from_cells(abc, [
        ("g1", {"a": Cell.CROSS, "b": Cell.UNKNOWN, "c": Cell.BLANK}),
        ("g2", {"a": Cell.CROSS, "b": Cell.CROSS, "c": Cell.UNKNOWN}),
    ])
