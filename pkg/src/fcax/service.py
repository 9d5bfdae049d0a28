"""Session-oriented HTTP API for live explorations.

The service holds no algorithmic logic: every state transition is a call
into the exploration / system modules, every response is assembled from
their state.  Sessions are persisted to one JSON file each, replaced
atomically on every mutation, so a restarted process resumes exactly
where it stopped.
"""

from __future__ import annotations

import datetime as _dt
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .core import AttributeUniverse, Cell
from .errors import ConflictError, CounterexampleError, FcaxError, ParseError, ProtocolError
from .exploration import ExplorationState, Verdict, start
from .formats import (
    MODE_GROUP,
    MODE_SYSTEM,
    Session,
    load_session,
    parse_cxt,
    parse_imp,
    save_session,
    write_cxt,
    write_imp,
)
from .system import (
    SystemExploration,
    conflict_report,
    seed_log,
    shared_context,
    shared_lattice,
)

_CELL_BY_CHAR = {c.value: c for c in Cell}


class CreateSessionBody(BaseModel):
    attributes: list[str]
    experts: list[str]
    mode: str = MODE_GROUP
    background: list[str] = Field(default_factory=list)
    examples: dict[str, str] = Field(default_factory=dict)  # expert -> .cxt text
    subsets: list[list[str]] | None = None  # system mode only


class AnswerBody(BaseModel):
    expert: str
    token: str
    premise: list[str]
    attribute: str
    verdict: str  # yes | no | unknown
    counterexample: dict | None = None  # {"name": ..., "cells": {attr: "x"/"o"/"?"}}


class ExamplesBody(BaseModel):
    token: str
    cxt: str


class SessionStore:
    """Sessions on disk plus an in-memory cache with one lock per session
    (mutations serialized per session, sessions independent)."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry = threading.Lock()
        for path in sorted(self.data_dir.glob("*.session.json")):
            session = load_session(path)
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()

    def path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.session.json"

    def add(self, session: Session) -> None:
        with self._registry:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
        save_session(self.path(session.id), session)

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def lock(self, session_id: str) -> threading.Lock:
        return self._locks[session_id]

    def persist(self, session: Session) -> None:
        session.updated = _now()
        save_session(self.path(session.id), session)


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _advance(session: Session) -> None:
    """Make sure the underlying exploration is either waiting on answers
    or finished (never parked between premises)."""
    if session.mode == MODE_GROUP:
        state: ExplorationState = session.state
        if state.active is None and state.phase != "done":
            state.next_question()
    else:
        system: SystemExploration = session.state
        system.next_question()


def _question_doc(session: Session) -> dict | None:
    if session.mode == MODE_GROUP:
        question = session.state.current_question()
    else:
        current = session.state.current
        question = current.current_question() if current is not None else None
    if question is None:
        return None
    return {
        "premise": list(question.premise.names),
        "pending": list(question.pending),
        "remaining": {e: list(ms) for e, ms in question.remaining.items()},
    }


def _subset_key(subset: tuple[str, ...]) -> str:
    return ",".join(subset)


def _state_doc(session: Session) -> dict:
    doc = {
        "id": session.id,
        "mode": session.mode,
        "attributes": list(session.universe.names),
        "created": session.created,
        "updated": session.updated,
    }
    if session.mode == MODE_GROUP:
        state: ExplorationState = session.state
        doc.update({
            "experts": list(state.expert_ids),
            "phase": state.phase,
            "done": state.phase == "done",
            "subset": None,
            "question": _question_doc(session),
            "accepted": [str(i) for i in state.accepted],
        })
    else:
        system: SystemExploration = session.state
        current = system.current
        doc.update({
            "experts": list(system.expert_ids),
            "phase": "done" if system.done else
                     ("asking" if current is not None and current.active is not None
                      else "advancing"),
            "done": system.done,
            "subset": list(system.current_subset) if system.current_subset else None,
            "question": _question_doc(session),
            "accepted": {_subset_key(s): [str(i) for i in impls]
                         for s, impls in system.accepted.items()},
        })
    return doc


def _check_token(session: Session, expert: str, token: str) -> None:
    if expert not in session.tokens:
        raise HTTPException(status_code=404, detail=f"unknown expert {expert!r}")
    if session.tokens[expert] != token:
        raise HTTPException(status_code=403, detail="bad expert token")


def _parse_verdict(body: AnswerBody) -> Verdict:
    if body.verdict == "yes":
        return Verdict.yes()
    if body.verdict == "unknown":
        return Verdict.unknown()
    if body.verdict == "no":
        if not body.counterexample or "name" not in body.counterexample:
            raise HTTPException(status_code=422, detail={
                "code": "E_COUNTEREXAMPLE_MISSING",
                "message": "a rejection needs a named counterexample row"})
        cells = {}
        for attr, ch in (body.counterexample.get("cells") or {}).items():
            if ch not in _CELL_BY_CHAR:
                raise HTTPException(status_code=422, detail={
                    "code": "E_BAD_CELL", "message": f"bad cell value {ch!r}"})
            cells[attr] = _CELL_BY_CHAR[ch]
        return Verdict.no(body.counterexample["name"], cells)
    raise HTTPException(status_code=422, detail={
        "code": "E_BAD_VERDICT", "message": f"bad verdict {body.verdict!r}"})


def _results_doc(session: Session) -> dict:
    doc: dict = {"in_progress": True, "id": session.id, "mode": session.mode}
    if session.mode == MODE_GROUP:
        state: ExplorationState = session.state
        doc["in_progress"] = state.phase != "done"
        log = state.log
        examples = state.examples
        doc["accepted"] = {"": [str(i) for i in state.accepted]}
        report = conflict_report(log, examples)
    else:
        system: SystemExploration = session.state
        doc["in_progress"] = not system.done
        log = system.log
        examples = system.examples
        doc["accepted"] = {_subset_key(s): [str(i) for i in impls]
                           for s, impls in system.accepted.items()}
        report = conflict_report(log, examples)
    cx = shared_context(log)
    lattice = shared_lattice(cx, session.universe)
    doc["shared_lattice"] = [
        {"experts": list(c.experts), "implications": [str(i) for i in c.implications]}
        for c in lattice]
    doc["conflict_report"] = report.to_dict()
    doc["artifacts"] = {
        "shared-log.cxt": write_cxt(log.as_context()),
        **{f"examples-{e}.cxt": write_cxt(ctx) for e, ctx in examples.items()},
        **{(f"accepted-{k}.imp" if k else "accepted.imp"): text
           for k, text in _accepted_imp_texts(doc["accepted"], session).items()},
    }
    return doc


def _accepted_imp_texts(accepted: dict, session: Session) -> dict[str, str]:
    out = {}
    for key, lines in accepted.items():
        impls = parse_imp("\n".join(lines), session.universe)
        out[key] = write_imp(impls)
    return out


def create_app(data_dir: str | Path) -> FastAPI:
    app = FastAPI(title="fcax", version="0.1.0")
    # the browser console may be served from anywhere; tokens gate writes
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = SessionStore(data_dir)

    @app.exception_handler(FcaxError)
    def _fcax_error(_, exc: FcaxError):  # pragma: no cover - safety net
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        if body.mode not in (MODE_GROUP, MODE_SYSTEM):
            raise HTTPException(status_code=422, detail=f"bad mode {body.mode!r}")
        if not body.experts:
            raise HTTPException(status_code=422, detail="expert list is empty")
        try:
            universe = AttributeUniverse(body.attributes)
            background = parse_imp("\n".join(body.background), universe)
            examples = {}
            for expert, text in body.examples.items():
                ctx = parse_cxt(text)
                if ctx.universe != universe:
                    raise HTTPException(status_code=422,
                                        detail=f"examples of {expert!r} use "
                                               "different attributes")
                examples[expert] = ctx
            if body.mode == MODE_GROUP:
                state = start(universe, body.experts, examples, background)
            else:
                # background in system mode = implications everyone already
                # confirmed, recorded in the shared log
                log = (seed_log(universe, body.experts, background)
                       if background else None)
                subsets = ([tuple(s) for s in body.subsets]
                           if body.subsets is not None else None)
                state = SystemExploration(universe, body.experts, examples,
                                          log=log, subsets=subsets)
        except HTTPException:
            raise
        except (ParseError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session = Session(
            id=uuid.uuid4().hex,
            mode=body.mode,
            universe=universe,
            state=state,
            tokens={e: uuid.uuid4().hex for e in body.experts},
            created=_now(),
            updated=_now(),
        )
        _advance(session)
        store.add(session)
        return {"id": session.id, "expert_tokens": dict(session.tokens)}

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return _state_doc(store.get(session_id))

    @app.post("/sessions/{session_id}/answers")
    def post_answer(session_id: str, body: AnswerBody):
        session = store.get(session_id)
        _check_token(session, body.expert, body.token)
        verdict = _parse_verdict(body)
        with store.lock(session_id):
            state = (session.state if session.mode == MODE_GROUP
                     else session.state.current)
            question = state.current_question() if state is not None else None
            if question is None or set(body.premise) != set(question.premise.names):
                raise HTTPException(status_code=409, detail={
                    "code": "E_STALE_QUESTION",
                    "message": "that question is not the active one"})
            try:
                session.state.submit(body.expert, body.attribute, verdict)
            except CounterexampleError as exc:
                raise HTTPException(status_code=422, detail={
                    "code": exc.code, "message": str(exc),
                    "cells": [list(c) for c in exc.cells]})
            except ProtocolError as exc:
                raise HTTPException(status_code=409, detail={
                    "code": "E_STALE_ANSWER", "message": str(exc)})
            _advance(session)
            store.persist(session)
            return _state_doc(session)

    @app.get("/sessions/{session_id}/results")
    def get_results(session_id: str):
        return _results_doc(store.get(session_id))

    @app.post("/sessions/{session_id}/experts/{expert}/examples")
    def upload_examples(session_id: str, expert: str, body: ExamplesBody):
        session = store.get(session_id)
        _check_token(session, expert, body.token)
        with store.lock(session_id):
            try:
                ctx = parse_cxt(body.cxt)
                if ctx.universe != session.universe:
                    raise HTTPException(status_code=422,
                                        detail="examples use different attributes")
                session.state.merge_examples(expert, ctx)
            except ParseError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            except ConflictError as exc:
                raise HTTPException(status_code=409, detail={
                    "code": "E_CONFLICTING_EXAMPLES",
                    "conflicts": [list(c) for c in exc.conflicts]})
            except ProtocolError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            _advance(session)
            store.persist(session)
            return _state_doc(session)

    return app


def serve(port: int, data_dir: str | Path) -> None:  # pragma: no cover
    import uvicorn

    uvicorn.run(create_app(data_dir), host="0.0.0.0", port=port)
