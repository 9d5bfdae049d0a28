"""Example views from the BSI IT-Grundschutz compendium.

Four building blocks (APP.1.1, CON.1, ORP.1, SYS.1.1) restricted to the
elementary threats 18-22; each block's measures-vs-threats table induces
an implication base, and one (complete-view) expert is assumed per block.
Running ``python -m fcax.bsi DIR`` writes the bases as .imp files for use
with the command line tools.

Threats: 18 Poor Planning or Lack of Adaptation, 19 Disclosure of
Sensitive Information, 20 Information or Products from an Unreliable
Source, 21 Manipulation with Hardware or Software, 22 Manipulation of
Information.
"""

from __future__ import annotations

import sys
from pathlib import Path

from .core import AttributeUniverse, IncompleteContext
from .experts import SimulatedView, make_view
from .implications import Implication, implication, l_completion

ATTRIBUTES = ("18", "19", "20", "21", "22")

BLOCKS = ("APP.1.1", "CON.1", "ORP.1", "SYS.1.1")

_BASES: dict[str, tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]] = {
    "APP.1.1": (
        (("18", "20"), ("21",)),
        (("18", "22"), ("19", "20", "21")),
        (("19", "20", "21"), ("18", "22")),
        (("20", "21", "22"), ("18", "19")),
        (("21",), ("20",)),
    ),
    "CON.1": (
        (("18", "22"), ("19", "20", "21")),
        (("19", "21", "22"), ("18", "20")),
        (("20", "22"), ("18", "19", "21")),
        (("21",), ("22",)),
    ),
    "ORP.1": (
        ((), ("19",)),
        (("19", "20"), ("18", "21", "22")),
        (("19", "21"), ("18", "20", "22")),
    ),
    "SYS.1.1": (
        (("18", "19"), ("20",)),
        (("18", "21"), ("19", "20", "22")),
        (("18", "22"), ("19", "20", "21")),
        (("19", "20"), ("18",)),
        (("19", "21"), ("22",)),
        (("20", "21"), ("22",)),
        (("20", "22"), ("21",)),
    ),
}


def universe() -> AttributeUniverse:
    return AttributeUniverse(ATTRIBUTES)


def base(block: str, M: AttributeUniverse | None = None) -> list[Implication]:
    """The implication base of one building block."""
    M = M or universe()
    return [implication(M, p, c) for p, c in _BASES[block]]


def views(M: AttributeUniverse | None = None) -> dict[str, SimulatedView]:
    """One complete-view expert per building block, theory only (the raw
    measure tables are not shipped; accepted shared bases depend only on
    the theories)."""
    M = M or universe()
    return {b: make_view(IncompleteContext.empty(M), base(b, M), complete=True)
            for b in BLOCKS}


def model_context(block: str, M: AttributeUniverse | None = None) -> IncompleteContext:
    """Formal context whose objects are exactly the models of the block's
    base; its valid implications are the block's theory."""
    M = M or universe()
    return l_completion(IncompleteContext.empty(M), base(block, M))


def write_fixture_files(directory: str | Path) -> list[Path]:
    from .formats import write_imp

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for block in BLOCKS:
        path = directory / f"{block}.imp"
        path.write_text(write_imp(base(block)), encoding="utf-8")
        written.append(path)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "."
    for p in write_fixture_files(target):
        print(p)
