"""Command line front door: compute bases, run simulated explorations,
print lattices and conflict reports, serve the HTTP API."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .core import AttributeUniverse, Cell, IncompleteContext, concepts
from .errors import FcaxError
from .experts import make_view
from .exploration import AnswerLog, ExplorationState, start
from .formats import parse_cxt, parse_imp, write_cxt, write_imp
from .implications import canonical_base, relative_canonical_base
from .system import SystemExploration, conflict_report

CONSULTED_MARK = {Cell.CROSS: "x", Cell.BLANK: ".", Cell.UNKNOWN: "?"}


@click.group()
def main():
    """Attribute exploration for groups of partial, possibly contradicting
    experts."""


def _fail(message: str) -> None:
    raise click.ClickException(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(str(exc))


@main.command()
@click.option("--context", "context_path", required=True,
              help="Formal context (.cxt) to compute the base of.")
@click.option("--background", "background_path", default=None,
              help="Implications (.imp) assumed to hold; the printed base "
                   "is relative to them.")
def base(context_path, background_path):
    """Print the canonical base of a context, optionally relative to
    background implications."""
    try:
        ctx = parse_cxt(_read(context_path))
        background = (parse_imp(_read(background_path), ctx.universe)
                      if background_path else [])
        result = relative_canonical_base(ctx, background)
    except FcaxError as exc:
        _fail(str(exc))
    click.echo(write_imp(result), nl=False)


def _parse_views(view_specs, attributes):
    """Each spec is NAME=ctx.cxt[:thy.imp] or NAME=thy.imp; returns the
    universe and {name: SimulatedView}."""
    parsed = []
    for spec in view_specs:
        name, eq, rest = spec.partition("=")
        if not eq or not name or not rest:
            _fail(f"bad --view {spec!r}, expected NAME=ctx.cxt[:thy.imp]")
        cxt_path = imp_path = None
        for part in rest.split(":"):
            if part.endswith(".cxt"):
                cxt_path = part
            elif part.endswith(".imp"):
                imp_path = part
            else:
                _fail(f"bad --view part {part!r}, expected .cxt or .imp files")
        parsed.append((name, cxt_path, imp_path))
    if len({name for name, _, _ in parsed}) != len(parsed):
        _fail("view names must be unique")

    universe = AttributeUniverse(attributes.split(",")) if attributes else None
    contexts = {}
    for name, cxt_path, _ in parsed:
        if cxt_path:
            ctx = parse_cxt(_read(cxt_path))
            if universe is None:
                universe = ctx.universe
            elif ctx.universe != universe:
                _fail(f"view {name!r} uses different attributes")
            contexts[name] = ctx
    if universe is None:
        _fail("theory-only views need --attributes to fix the universe")

    views = {}
    for name, cxt_path, imp_path in parsed:
        ctx = contexts.get(name, IncompleteContext.empty(universe))
        if imp_path:
            theory = parse_imp(_read(imp_path), universe)
            complete = True
        elif ctx.is_formal:
            theory = canonical_base(ctx)  # the context is the whole view
            complete = True
        else:
            theory = []
            complete = False
        views[name] = make_view(ctx, theory, complete=complete)
    return universe, views


def _drive_block(state: ExplorationState, views, submit) -> list:
    """Answer one subset exploration to completion; returns the
    counterexample record [(premise mask, attribute, expert, name), ...]."""
    rejections = []
    while True:
        while state.active is not None:
            q = state.current_question()
            expert, attribute = next((e, ms[0]) for e, ms in q.remaining.items() if ms)
            verdict = views[expert].answer(q.premise, attribute)
            submit(expert, attribute, verdict)
            if verdict.kind == "no":
                rejections.append((q.premise.mask, attribute, expert,
                                   verdict.counterexample.name))
        if state.next_question() is None:
            return rejections


def _drive(system_or_state, views) -> list:
    """Run everything, returning transcript blocks
    (subset, session log, rejection records)."""
    blocks = []
    if isinstance(system_or_state, SystemExploration):
        system = system_or_state
        while True:
            item = system.next_question()
            if item is None:
                return blocks
            subset, _ = item
            state = system.current
            rejections = _drive_block(state, views, system.submit)
            blocks.append((subset, state.log, rejections))
    else:
        state = system_or_state
        state.next_question()
        rejections = _drive_block(state, views, state.submit)
        return [(state.expert_ids, state.log, rejections)]


def _transcript(universe, expert_ids, blocks) -> str:
    """Table of questions and answers, one block per subset exploration and
    one row per asked attribute: x confirmed, . rejected, ? unanswered,
    blank not consulted; rejections carry the counterexample names."""
    width = max((len(e) for e in expert_ids), default=1)
    lines = [f"columns: {', '.join(expert_ids)}",
             "marks: x yes, . no, ? unknown or withdrawn, blank not consulted"]
    for subset, session_log, rejections in blocks:
        lines.append("")
        lines.append(f"=== experts: {', '.join(subset)}")
        by_premise: dict[int, list[str]] = {}
        for _, premise, attribute, _ in session_log.entries():
            by_premise.setdefault(premise.mask, []).append(attribute)
        for mask, asked in by_premise.items():
            premise = universe.from_mask(mask)
            shown = " ".join(premise.names) or "∅"
            lines.append(f"{shown} -> ({' '.join(asked)}) ?")
            for m in asked:
                marks = []
                for e in expert_ids:
                    if e in subset:
                        marks.append(
                            CONSULTED_MARK[session_log.get(premise, m, e)].ljust(width))
                    else:
                        marks.append(" " * width)
                names = ", ".join(name for pmask, attr, _, name in rejections
                                  if pmask == mask and attr == m)
                lines.append(f"    -> {m:<6} {' '.join(marks)}  {names}".rstrip())
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--view", "view_specs", multiple=True, required=True,
              help="NAME=ctx.cxt[:thy.imp] or NAME=thy.imp; repeatable.")
@click.option("--mode", type=click.Choice(["group", "system"]), default="group")
@click.option("--attributes", default=None,
              help="Comma-separated attribute names (required when no view "
                   "has a .cxt file).")
@click.option("--subsets", default=None,
              help="System mode: explore only these subsets, e.g. "
                   "'A,B,C;A,B;B' (supersets first).")
@click.option("--out", "out_dir", required=True, help="Output directory.")
def explore(view_specs, mode, attributes, subsets, out_dir):
    """Explore the shared implications of simulated experts and write the
    accepted bases, merged answer log, example contexts and transcript."""
    try:
        universe, views = _parse_views(view_specs, attributes)
        if mode == "group":
            state = start(universe, list(views))
            blocks = _drive(state, views)
            accepted, examples, log = state.result()
            bases = {"": accepted}
        else:
            subset_list = None
            if subsets:
                subset_list = [tuple(part.split(",")) for part in subsets.split(";")]
            system = SystemExploration(universe, list(views), subsets=subset_list)
            blocks = _drive(system, views)
            per_subset, examples, log = system.result()
            bases = {"+".join(s): impls for s, impls in per_subset.items()}
    except FcaxError as exc:
        _fail(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for key, impls in bases.items():
        name = f"accepted-{key}.imp" if key else "accepted.imp"
        (out / name).write_text(
            write_imp([i.normalized() for i in impls]), encoding="utf-8")
    (out / "shared-log.cxt").write_text(write_cxt(log.as_context()),
                                        encoding="utf-8")
    for expert, ctx in examples.items():
        (out / f"examples-{expert}.cxt").write_text(write_cxt(ctx),
                                                    encoding="utf-8")
    (out / "transcript.txt").write_text(
        _transcript(universe, tuple(views), blocks), encoding="utf-8")
    click.echo(f"wrote {out}/", err=True)


def _log_from_files(session_dir: Path) -> tuple[AnswerLog, dict, AttributeUniverse]:
    """Rebuild the answer log and example contexts from an explore output
    directory."""
    examples = {}
    for path in sorted(session_dir.glob("examples-*.cxt")):
        expert = path.name[len("examples-"):-len(".cxt")]
        examples[expert] = parse_cxt(path.read_text(encoding="utf-8"))
    if not examples:
        _fail(f"no examples-*.cxt files in {session_dir}")
    universe = next(iter(examples.values())).universe
    log_ctx = parse_cxt((session_dir / "shared-log.cxt").read_text(encoding="utf-8"))
    log = AnswerLog(universe, log_ctx.universe.names)
    from .exploration import parse_question_name

    for name in log_ctx.objects:
        premise, attribute = parse_question_name(name, universe)
        log.ensure_question(premise, attribute)
        for expert in log_ctx.universe.names:
            log.set(premise, attribute, expert, log_ctx.cell(name, expert))
    return log, examples, universe


@main.command()
@click.option("--session", "session_dir", required=True,
              help="Directory written by 'fcax explore --out'.")
@click.option("--json", "json_path", default=None,
              help="Also write the report as JSON to this path.")
@click.option("--threshold", default=0.5, show_default=True,
              help="Section (b) flags questions whose confirming share "
                   "exceeds this fraction.")
def report(session_dir, json_path, threshold):
    """Print the conflict report for an exploration output directory."""
    try:
        log, examples, _ = _log_from_files(Path(session_dir))
        result = conflict_report(log, examples, threshold=threshold)
    except FcaxError as exc:
        _fail(str(exc))
    click.echo(result.to_text(), nl=False)
    if json_path:
        Path(json_path).write_text(
            json.dumps(result.to_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8")


@main.command()
@click.option("--shared", "shared_path", required=True,
              help="Context of shared implications (.cxt, questions x experts).")
@click.option("--dot", "dot_path", default=None,
              help="Also write the lattice as a DOT graph to this path.")
def lattice(shared_path, dot_path):
    """Print the concept lattice of a shared-implication context; only
    certain (x) cells count as incidence."""
    try:
        raw = parse_cxt(_read(shared_path))
    except FcaxError as exc:
        _fail(str(exc))
    # certain projection: ? cells are treated as non-incident
    certain = IncompleteContext(
        raw.universe, raw.objects,
        [(cross, raw.universe.full_mask & ~cross) for cross, _ in raw.rows])
    nodes = concepts(certain)
    for i, concept in enumerate(nodes):
        experts = ", ".join(concept.intent.names) or "(no expert)"
        click.echo(f"concept {i}: experts {{{experts}}}")
        for name in concept.extent:
            click.echo(f"    {name}")
    if dot_path:
        Path(dot_path).write_text(_dot(nodes), encoding="utf-8")


def _dot(nodes) -> str:
    lines = ["digraph shared_implications {", '  node [shape=box, fontsize=10];']
    for i, concept in enumerate(nodes):
        experts = ", ".join(concept.intent.names) or "no expert"
        label = f"{{{experts}}}\\n{len(concept.extent)} implications"
        lines.append(f'  c{i} [label="{label}"];')
    extents = [set(c.extent) for c in nodes]
    for i, small in enumerate(extents):
        for j, large in enumerate(extents):
            if i != j and small < large:
                if not any(small < mid < large for mid in extents):
                    lines.append(f"  c{i} -> c{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--port", default=8000, show_default=True, envvar="FCAX_PORT")
@click.option("--data", "data_dir", default="./fcax-data", show_default=True,
              envvar="FCAX_DATA", help="Directory for session files.")
def serve(port, data_dir):
    """Run the HTTP API for live expert sessions."""
    from .service import serve as run_server

    run_server(port, data_dir)


if __name__ == "__main__":
    main()
