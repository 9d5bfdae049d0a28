"""Attribute universes, incomplete contexts and derivation operators.

Everything here is an immutable value: contexts never change in place,
enlarging or merging them produces new contexts.  Attribute sets are thin
wrappers around integer bitmasks; the position of an attribute in its
universe is fixed at creation and determines the lectic order used by all
enumeration routines.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    ConflictError,
    UniverseMismatchError,
    UnknownAttributeError,
    UnknownObjectError,
)


class Cell(Enum):
    """Three-valued incidence: has / has not / not known."""

    CROSS = "x"
    BLANK = "o"
    UNKNOWN = "?"

    def __repr__(self) -> str:
        return f"Cell.{self.name}"


def cell_leq(a: Cell, b: Cell) -> bool:
    """Information order: ? is below both x and o, which are incomparable."""
    return a is Cell.UNKNOWN or a is b


def cell_sup(a: Cell, b: Cell) -> Cell | None:
    """Supremum in the information order, None when x meets o."""
    if a is b or b is Cell.UNKNOWN:
        return a
    if a is Cell.UNKNOWN:
        return b
    return None


class AttributeUniverse:
    """An ordered, immutable set of attribute names.

    The creation order of the names is the linear order underlying all
    lectic computations, so two universes with the same names in a
    different order are different universes.
    """

    __slots__ = ("names", "_index", "full_mask")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if any(not n for n in names):
            raise ValueError("attribute names must be non-empty")
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be distinct")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        self.full_mask = (1 << len(names)) - 1

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AttributeUniverse) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"AttributeUniverse({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownAttributeError(f"unknown attribute {name!r}") from None

    def subset(self, names: Iterable[str] = ()) -> AttributeSet:
        mask = 0
        for n in names:
            mask |= 1 << self.index(n)
        return AttributeSet(self, mask)

    def from_mask(self, mask: int) -> AttributeSet:
        return AttributeSet(self, mask & self.full_mask)

    @property
    def empty(self) -> AttributeSet:
        return AttributeSet(self, 0)

    @property
    def full(self) -> AttributeSet:
        return AttributeSet(self, self.full_mask)


def _require_same_universe(a: AttributeUniverse, b: AttributeUniverse) -> None:
    if a != b:
        raise UniverseMismatchError(f"universe mismatch: {a!r} vs {b!r}")


@dataclass(frozen=True)
class AttributeSet:
    """A subset of one universe's attributes, stored as a bitmask."""

    universe: AttributeUniverse
    mask: int

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for i, n in enumerate(self.universe.names) if self.mask >> i & 1)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, name: str) -> bool:
        return self.mask >> self.universe.index(name) & 1 == 1

    def __le__(self, other: AttributeSet) -> bool:
        _require_same_universe(self.universe, other.universe)
        return self.mask & ~other.mask == 0

    def __lt__(self, other: AttributeSet) -> bool:
        return self <= other and self.mask != other.mask

    def __or__(self, other: AttributeSet) -> AttributeSet:
        _require_same_universe(self.universe, other.universe)
        return AttributeSet(self.universe, self.mask | other.mask)

    def __and__(self, other: AttributeSet) -> AttributeSet:
        _require_same_universe(self.universe, other.universe)
        return AttributeSet(self.universe, self.mask & other.mask)

    def __sub__(self, other: AttributeSet) -> AttributeSet:
        _require_same_universe(self.universe, other.universe)
        return AttributeSet(self.universe, self.mask & ~other.mask)

    @property
    def lectic_key(self) -> int:
        """Integer whose natural order is the lectic order.

        The first attribute of the universe is the most significant bit, so
        A comes before B exactly when the smallest attribute in which they
        differ belongs to B.
        """
        n = len(self.universe)
        key = 0
        for i in range(n):
            if self.mask >> i & 1:
                key |= 1 << (n - 1 - i)
        return key

    def lectic_lt(self, other: AttributeSet) -> bool:
        _require_same_universe(self.universe, other.universe)
        return self.lectic_key < other.lectic_key

    def __str__(self) -> str:
        return "{" + " ".join(self.names) + "}"


# Object rows are (cross_mask, blank_mask) pairs; bits absent from both
# masks are unknown.
Row = tuple[int, int]


def _row_sup(a: Row, b: Row) -> Row | None:
    cross = a[0] | b[0]
    blank = a[1] | b[1]
    if cross & blank:
        return None
    return cross, blank


class IncompleteContext:
    """A three-valued objects-by-attributes table.

    A formal context is the special case without unknown cells
    (``is_formal``).  Instances are immutable; ``with_row`` and friends
    return new contexts.
    """

    __slots__ = ("universe", "objects", "rows", "_obj_index")

    def __init__(self, universe: AttributeUniverse, objects: Sequence[str] = (),
                 rows: Sequence[Row] = ()):
        objects = tuple(objects)
        rows = tuple(rows)
        if len(objects) != len(rows):
            raise ValueError("object and row counts differ")
        if len(set(objects)) != len(objects):
            raise ValueError("object names must be distinct")
        full = universe.full_mask
        for name, (cross, blank) in zip(objects, rows):
            if cross & ~full or blank & ~full:
                raise ValueError(f"row of {name!r} uses bits outside the universe")
            if cross & blank:
                raise ValueError(f"row of {name!r} marks a cell both x and o")
        self.universe = universe
        self.objects = objects
        self.rows = rows
        self._obj_index = {g: i for i, g in enumerate(objects)}

    # -- construction helpers -------------------------------------------------

    @classmethod
    def empty(cls, universe: AttributeUniverse) -> IncompleteContext:
        return cls(universe)

    @classmethod
    def from_cells(cls, universe: AttributeUniverse,
                   table: Sequence[tuple[str, Mapping[str, Cell]]],
                   default: Cell = Cell.UNKNOWN) -> IncompleteContext:
        objects, rows = [], []
        for name, cells in table:
            cross = blank = 0
            for attr in universe.names:
                value = cells.get(attr, default)
                i = universe.index(attr)
                if value is Cell.CROSS:
                    cross |= 1 << i
                elif value is Cell.BLANK:
                    blank |= 1 << i
            for attr in cells:
                universe.index(attr)  # reject unknown names
            objects.append(name)
            rows.append((cross, blank))
        return cls(universe, objects, rows)

    @classmethod
    def from_intents(cls, universe: AttributeUniverse,
                     table: Sequence[tuple[str, Iterable[str]]]) -> IncompleteContext:
        """Formal context from object intents: listed attributes x, rest o."""
        objects, rows = [], []
        for name, attrs in table:
            cross = universe.subset(attrs).mask
            objects.append(name)
            rows.append((cross, universe.full_mask & ~cross))
        return cls(universe, objects, rows)

    # -- basic access ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.objects)

    def __contains__(self, obj: str) -> bool:
        return obj in self._obj_index

    def object_index(self, obj: str) -> int:
        try:
            return self._obj_index[obj]
        except KeyError:
            raise UnknownObjectError(f"unknown object {obj!r}") from None

    def row(self, obj: str) -> Row:
        return self.rows[self.object_index(obj)]

    def cell(self, obj: str, attr: str) -> Cell:
        cross, blank = self.row(obj)
        bit = 1 << self.universe.index(attr)
        if cross & bit:
            return Cell.CROSS
        if blank & bit:
            return Cell.BLANK
        return Cell.UNKNOWN

    @property
    def is_formal(self) -> bool:
        full = self.universe.full_mask
        return all(cross | blank == full for cross, blank in self.rows)

    def object_intent(self, obj: str) -> AttributeSet:
        """Certain intent of a single object (its x cells)."""
        return self.universe.from_mask(self.row(obj)[0])

    # -- growth (returns new contexts) ----------------------------------------

    def with_row(self, name: str, cross: int, blank: int) -> IncompleteContext:
        if name in self._obj_index:
            raise ValueError(f"object {name!r} already present")
        return IncompleteContext(self.universe, self.objects + (name,),
                                 self.rows + ((cross, blank),))

    def merge_row(self, name: str, cross: int, blank: int) -> IncompleteContext:
        """Add a row, or lift an existing row of the same name to the
        information supremum.  Conflicting cells raise ConflictError."""
        if name not in self._obj_index:
            return self.with_row(name, cross, blank)
        i = self._obj_index[name]
        merged = _row_sup(self.rows[i], (cross, blank))
        if merged is None:
            bad = self.rows[i][0] & blank | self.rows[i][1] & cross
            pairs = [(name, a) for j, a in enumerate(self.universe.names) if bad >> j & 1]
            raise ConflictError("conflicting cells", pairs)
        rows = list(self.rows)
        rows[i] = merged
        return IncompleteContext(self.universe, self.objects, rows)

    # -- derivations ----------------------------------------------------------

    def _object_masks(self, objs: Iterable[str]) -> list[Row]:
        return [self.row(g) for g in objs]

    def certain_intent(self, objs: Iterable[str]) -> AttributeSet:
        """Attributes every given object certainly has; all of M for no objects."""
        mask = self.universe.full_mask
        for cross, _ in self._object_masks(objs):
            mask &= cross
        return self.universe.from_mask(mask)

    def possible_intent(self, objs: Iterable[str]) -> AttributeSet:
        """Attributes no given object certainly lacks."""
        mask = self.universe.full_mask
        for _, blank in self._object_masks(objs):
            mask &= ~blank
        return self.universe.from_mask(mask)

    def certain_extent(self, attrs: AttributeSet) -> tuple[str, ...]:
        _require_same_universe(self.universe, attrs.universe)
        want = attrs.mask
        return tuple(g for g, (cross, _) in zip(self.objects, self.rows)
                     if want & ~cross == 0)

    def possible_extent(self, attrs: AttributeSet) -> tuple[str, ...]:
        _require_same_universe(self.universe, attrs.universe)
        want = attrs.mask
        return tuple(g for g, (_, blank) in zip(self.objects, self.rows)
                     if want & blank == 0)

    def max_satisfiable_conclusion(self, attrs: AttributeSet) -> AttributeSet:
        """Largest conclusion the premise ``attrs`` can still have: the
        possible intent of its certain extent (all of M when that extent is
        empty)."""
        return self.possible_intent(self.certain_extent(attrs))

    # formal-context derivations

    def _require_formal(self, op: str) -> None:
        if not self.is_formal:
            raise ValueError(f"{op} requires a formal context (no ? cells)")

    def derive_attributes(self, objs: Iterable[str]) -> AttributeSet:
        """Attributes common to the given objects (formal contexts only)."""
        self._require_formal("derive_attributes")
        return self.certain_intent(objs)

    def derive_objects(self, attrs: AttributeSet) -> tuple[str, ...]:
        """Objects having all the given attributes (formal contexts only)."""
        self._require_formal("derive_objects")
        return self.certain_extent(attrs)

    def intent_closure(self, attrs: AttributeSet) -> AttributeSet:
        """Double prime: attributes common to all objects having ``attrs``."""
        self._require_formal("intent_closure")
        return self.certain_intent(self.certain_extent(attrs))

    def __repr__(self) -> str:
        return (f"IncompleteContext({len(self.objects)} objects, "
                f"{len(self.universe)} attributes)")


def information_leq(k1: IncompleteContext, k2: IncompleteContext) -> bool:
    """True when k2 contains at least as much information as k1: every
    object of k1 exists in k2 and no cell loses information."""
    _require_same_universe(k1.universe, k2.universe)
    for g, (cross, blank) in zip(k1.objects, k1.rows):
        if g not in k2:
            return False
        c2, b2 = k2.row(g)
        if cross & ~c2 or blank & ~b2:
            return False
    return True


def supremum(k1: IncompleteContext, k2: IncompleteContext) -> IncompleteContext:
    """Least upper bound of two contexts in the information order.

    Objects are united; shared objects get cell-wise suprema.  Raises
    ConflictError listing every (object, attribute) pair where one context
    says x and the other o.
    """
    _require_same_universe(k1.universe, k2.universe)
    names = list(k1.objects) + [g for g in k2.objects if g not in k1]
    conflicts: list[tuple[str, str]] = []
    rows = []
    for g in names:
        r1 = k1.row(g) if g in k1 else (0, 0)
        r2 = k2.row(g) if g in k2 else (0, 0)
        merged = _row_sup(r1, r2)
        if merged is None:
            bad = r1[0] & r2[1] | r1[1] & r2[0]
            conflicts += [(g, a) for j, a in enumerate(k1.universe.names) if bad >> j & 1]
            merged = (0, 0)  # placeholder, we raise below
        rows.append(merged)
    if conflicts:
        raise ConflictError("conflicting information", conflicts)
    return IncompleteContext(k1.universe, names, rows)


def subposition(contexts: Sequence[IncompleteContext]) -> IncompleteContext:
    """Stack contexts over one attribute set; object g of the i-th input
    becomes "i:g" (1-based) so names never collide."""
    if not contexts:
        raise ValueError("subposition of no contexts")
    universe = contexts[0].universe
    objects: list[str] = []
    rows: list[Row] = []
    for i, ctx in enumerate(contexts, start=1):
        _require_same_universe(universe, ctx.universe)
        objects += [f"{i}:{g}" for g in ctx.objects]
        rows += list(ctx.rows)
    return IncompleteContext(universe, objects, rows)


@dataclass(frozen=True)
class Concept:
    """A maximal rectangle of a formal context."""

    extent: tuple[str, ...]
    intent: AttributeSet


def concepts(ctx: IncompleteContext) -> list[Concept]:
    """All concepts of a formal context, in lectic order of intents.

    Enumerates the closure system of intents with NextClosure over the
    double-prime operator; fine for desk-scale contexts.
    """
    from .implications import next_closure  # local import, no cycle at module load

    ctx._require_formal("concepts")
    out = []
    intent: AttributeSet | None = ctx.intent_closure(ctx.universe.empty)
    while intent is not None:
        out.append(Concept(ctx.certain_extent(intent), intent))
        intent = next_closure(intent, ctx.intent_closure)
    return out
