"""Bit-exact text formats: .cxt contexts, .imp implication lists and
.session.json session documents.

Parsers reject every deviation from the grammar instead of guessing;
writers emit one canonical form so that write-parse-write round-trips are
byte-identical.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .core import AttributeUniverse, Cell, IncompleteContext
from .errors import ParseError
from .exploration import (
    AnswerLog,
    ExpertRef,
    ExplorationState,
    Verdict,
    _ActiveQuestion,
    parse_question_name,
)
from .implications import Implication
from .system import SystemExploration

SESSION_VERSION = "fcax-session/1"

_CELL_TO_CXT = {Cell.CROSS: "X", Cell.BLANK: ".", Cell.UNKNOWN: "?"}
_CXT_TO_CELL = {"X": Cell.CROSS, ".": Cell.BLANK, "?": Cell.UNKNOWN}


# ---------------------------------------------------------------------------
# .cxt — Burmeister-style contexts, extended with "?" cells
# ---------------------------------------------------------------------------


def write_cxt(ctx: IncompleteContext, name: str = "") -> str:
    lines = ["B", name, str(len(ctx.objects)), str(len(ctx.universe))]
    lines += list(ctx.objects)
    lines += list(ctx.universe.names)
    for g in ctx.objects:
        lines.append("".join(_CELL_TO_CXT[ctx.cell(g, m)] for m in ctx.universe.names))
    return "\n".join(lines) + "\n"


def parse_cxt(text: str) -> IncompleteContext:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # final newline

    def need(i: int, what: str) -> str:
        if i >= len(lines):
            raise ParseError(f"unexpected end of file, expected {what}", i + 1)
        return lines[i]

    if need(0, "format marker 'B'") != "B":
        raise ParseError("first line must be 'B'", 1)
    # line 2 is the context name and may be empty
    need(1, "context name")
    try:
        n_objects = int(need(2, "object count"))
        n_attrs = int(need(3, "attribute count"))
    except ValueError as exc:
        raise ParseError(f"bad count: {exc}", 3) from None
    if n_objects < 0 or n_attrs < 0:
        raise ParseError("counts must be non-negative", 3)
    pos = 4
    objects = [need(pos + i, "object name") for i in range(n_objects)]
    seen: dict[str, int] = {}
    for i, g in enumerate(objects):
        if g in seen:
            raise ParseError(f"duplicate object name {g!r}", pos + i + 1)
        seen[g] = i
    pos += n_objects
    attributes = [need(pos + i, "attribute name") for i in range(n_attrs)]
    try:
        universe = AttributeUniverse(attributes)
    except ValueError as exc:
        raise ParseError(str(exc), pos + 1) from None
    pos += n_attrs
    table = []
    for i, g in enumerate(objects):
        row = need(pos + i, f"row {i + 1}")
        if len(row) != n_attrs:
            raise ParseError(
                f"row {i + 1} has {len(row)} cells, expected {n_attrs}", pos + i + 1)
        cells = {}
        for j, ch in enumerate(row):
            if ch not in _CXT_TO_CELL:
                raise ParseError(
                    f"illegal cell character {ch!r} in column {j + 1}", pos + i + 1)
            cells[attributes[j]] = _CXT_TO_CELL[ch]
        table.append((g, cells))
    pos += n_objects
    if lines[pos:]:
        raise ParseError("trailing content after the last row", pos + 1)
    return IncompleteContext.from_cells(universe, table)


# ---------------------------------------------------------------------------
# .imp — implication lists, one per line, "a b -> c d"
# ---------------------------------------------------------------------------


def parse_imp_line(line: str, universe: AttributeUniverse, line_no: int) -> Implication:
    if "->" not in line:
        raise ParseError("missing '->'", line_no)
    left, _, right = line.partition("->")
    try:
        premise = universe.subset(left.split())
        conclusion = universe.subset(right.split())
    except Exception as exc:
        raise ParseError(str(exc), line_no) from None
    return Implication(premise, conclusion)


def parse_imp(text: str, universe: AttributeUniverse) -> list[Implication]:
    out = []
    for i, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        out.append(parse_imp_line(line, universe, i))
    return out


def write_imp(impls: Sequence[Implication]) -> str:
    if not impls:
        return ""
    return "\n".join(str(i) for i in impls) + "\n"


# ---------------------------------------------------------------------------
# session documents
# ---------------------------------------------------------------------------


def _ctx_doc(ctx: IncompleteContext) -> dict:
    return {
        "objects": list(ctx.objects),
        "rows": ["".join(ctx.cell(g, m).value for m in ctx.universe.names)
                 for g in ctx.objects],
    }


def _ctx_from_doc(doc: dict, universe: AttributeUniverse) -> IncompleteContext:
    cell_by_char = {c.value: c for c in Cell}
    table = []
    for g, row in zip(doc["objects"], doc["rows"]):
        table.append((g, {m: cell_by_char[ch] for m, ch in zip(universe.names, row)}))
    return IncompleteContext.from_cells(universe, table)


def _imp_doc(imp: Implication) -> str:
    # raw form, conclusion exactly as stored (may overlap the premise)
    return f"{' '.join(imp.premise.names)} -> {' '.join(imp.conclusion.names)}"


def _imp_from_doc(text: str, universe: AttributeUniverse) -> Implication:
    return parse_imp_line(text, universe, 1)


def _log_doc(log: AnswerLog) -> list:
    out = []
    for name, _, _, cells in log.entries():
        out.append({
            "question": name,
            "cells": {e: cells[e].value for e in log.experts
                      if cells[e] is not Cell.UNKNOWN},
        })
    return out


def _log_from_doc(doc: list, universe: AttributeUniverse,
                  experts: Sequence[str]) -> AnswerLog:
    cell_by_char = {c.value: c for c in Cell}
    log = AnswerLog(universe, tuple(experts))
    for entry in doc:
        premise, attribute = parse_question_name(entry["question"], universe)
        log.ensure_question(premise, attribute)
        for e, ch in entry["cells"].items():
            log.set(premise, attribute, e, cell_by_char[ch])
    return log


def state_to_doc(state: ExplorationState) -> dict:
    active = state.active
    return {
        "experts": [{"id": e.id, "name": e.name} for e in state.experts],
        "background": [_imp_doc(i) for i in state.background],
        "accepted": [_imp_doc(i) for i in state.accepted],
        "premise": list(state._R.names) if state._R is not None else None,
        "premise_consumed": state._premise_consumed,
        "done": state._done,
        "examples": {e: _ctx_doc(state.examples[e]) for e in state.expert_ids},
        "log": _log_doc(state.log),
        "question": None if active is None else {
            "premise": list(active.premise.names),
            "pending": sorted(active.pending,
                              key=state.universe.index),
            "asked": list(active.asked),
            "answers": [[e, m, kind] for (e, m), kind in active.answers.items()],
        },
        "prompts": [list(p) for p in state.prompts],
    }


def state_from_doc(doc: dict, universe: AttributeUniverse,
                   prior: AnswerLog | None = None) -> ExplorationState:
    refs = tuple(ExpertRef(e["id"], e["name"]) for e in doc["experts"])
    ids = [e.id for e in refs]
    examples = {e: _ctx_from_doc(doc["examples"][e], universe) for e in ids}
    background = [_imp_from_doc(t, universe) for t in doc["background"]]
    state = ExplorationState(universe, refs, examples, background, prior)
    state.accepted = [_imp_from_doc(t, universe) for t in doc["accepted"]]
    state.log = _log_from_doc(doc["log"], universe, ids)
    state._R = universe.subset(doc["premise"]) if doc["premise"] is not None else None
    state._premise_consumed = doc["premise_consumed"]
    state._done = doc["done"]
    q = doc["question"]
    if q is not None:
        state.active = _ActiveQuestion(
            premise=universe.subset(q["premise"]),
            pending=set(q["pending"]),
            asked=tuple(q["asked"]),
            answers={(e, m): kind for e, m, kind in q["answers"]},
        )
    state.prompts = [tuple(p) for p in doc["prompts"]]
    return state


def system_to_doc(system: SystemExploration) -> dict:
    return {
        "experts": [{"id": e.id, "name": e.name} for e in system.experts],
        "schedule": [list(s) for s in system.schedule],
        "position": system.position,
        "examples": {e: _ctx_doc(system.examples[e]) for e in system.expert_ids},
        "log": _log_doc(system.log),
        "accepted": [
            {"subset": list(s), "implications": [_imp_doc(i) for i in impls]}
            for s, impls in system.accepted.items()],
        "current": None if system.current is None else state_to_doc(system.current),
        "prompt_history": [list(p) for p in system.prompt_history],
    }


def system_from_doc(doc: dict, universe: AttributeUniverse) -> SystemExploration:
    refs = [ExpertRef(e["id"], e["name"]) for e in doc["experts"]]
    system = SystemExploration(universe, refs,
                               subsets=[tuple(s) for s in doc["schedule"]])
    system.position = doc["position"]
    system.examples = {e: _ctx_from_doc(doc["examples"][e], universe)
                       for e in system.expert_ids}
    system.log = _log_from_doc(doc["log"], universe, system.expert_ids)
    system.accepted = {
        tuple(entry["subset"]): tuple(_imp_from_doc(t, universe)
                                      for t in entry["implications"])
        for entry in doc["accepted"]}
    if doc["current"] is not None:
        system.current = state_from_doc(doc["current"], universe, prior=system.log)
    system.prompt_history = [tuple(p) for p in doc["prompt_history"]]
    return system


MODE_GROUP = "group"
MODE_SYSTEM = "system"


@dataclass
class Session:
    """A persisted live session: one exploration (group mode) or one
    system exploration, plus the expert access tokens."""

    id: str
    mode: str
    universe: AttributeUniverse
    state: ExplorationState | SystemExploration
    tokens: dict[str, str] = field(default_factory=dict)
    created: str = ""
    updated: str = ""


def session_to_doc(session: Session) -> dict:
    doc = {
        "version": SESSION_VERSION,
        "id": session.id,
        "mode": session.mode,
        "created": session.created,
        "updated": session.updated,
        "attributes": list(session.universe.names),
        "tokens": dict(session.tokens),
    }
    if session.mode == MODE_GROUP:
        doc["state"] = state_to_doc(session.state)
    else:
        doc["state"] = system_to_doc(session.state)
    return doc


def session_from_doc(doc: dict) -> Session:
    if doc.get("version") != SESSION_VERSION:
        raise ParseError(
            f"session version {doc.get('version')!r}, expected {SESSION_VERSION!r}")
    universe = AttributeUniverse(doc["attributes"])
    if doc["mode"] == MODE_GROUP:
        state = state_from_doc(doc["state"], universe)
    elif doc["mode"] == MODE_SYSTEM:
        state = system_from_doc(doc["state"], universe)
    else:
        raise ParseError(f"unknown session mode {doc['mode']!r}")
    return Session(id=doc["id"], mode=doc["mode"], universe=universe, state=state,
                   tokens=dict(doc["tokens"]), created=doc["created"],
                   updated=doc["updated"])


def dumps_session(session: Session) -> str:
    return json.dumps(session_to_doc(session), indent=2, ensure_ascii=False) + "\n"


def save_session(path: str | Path, session: Session) -> None:
    """Write atomically: temp file in the same directory, then rename."""
    path = Path(path)
    data = dumps_session(session)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_session(path: str | Path) -> Session:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    return session_from_doc(doc)
