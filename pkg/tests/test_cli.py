import json
import random
from pathlib import Path

import pytest
from click.testing import CliRunner

from fcax import bsi
from fcax.cli import main
from fcax.core import AttributeUniverse
from fcax.formats import parse_imp, write_cxt, write_imp
from fcax.implications import canonical_base

from conftest import random_formal_context


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def fixture_dir(tmp_path):
    bsi.write_fixture_files(tmp_path)
    return tmp_path


def orp_model_cxt(tmp_path) -> Path:
    path = tmp_path / "orp-models.cxt"
    path.write_text(write_cxt(bsi.model_context("ORP.1")), encoding="utf-8")
    return path


VIEW_ARGS = lambda d: [
    "--attributes", ",".join(bsi.ATTRIBUTES),
    "--view", f"APP.1.1={d}/APP.1.1.imp",
    "--view", f"CON.1={d}/CON.1.imp",
    "--view", f"ORP.1={d}/ORP.1.imp",
    "--view", f"SYS.1.1={d}/SYS.1.1.imp",
]


class TestBase:
    def test_model_context_prints_printed_base(self, runner, tmp_path):
        result = runner.invoke(main, ["base", "--context", str(orp_model_cxt(tmp_path))])
        assert result.exit_code == 0, result.output
        assert set(result.output.splitlines()) == \
            {"-> 19", "19 20 -> 18 21 22", "19 21 -> 18 20 22"}

    def test_own_base_as_background_prints_nothing(self, runner, tmp_path):
        ctx_path = orp_model_cxt(tmp_path)
        imp_path = tmp_path / "orp.imp"
        imp_path.write_text(write_imp(bsi.base("ORP.1")), encoding="utf-8")
        result = runner.invoke(main, ["base", "--context", str(ctx_path),
                                      "--background", str(imp_path)])
        assert result.exit_code == 0
        assert result.output == ""

    def test_random_context_matches_library(self, runner, tmp_path):
        rng = random.Random(55)
        u = AttributeUniverse(["a", "b", "c", "d"])
        ctx = random_formal_context(rng, u, max_objects=5)
        path = tmp_path / "random.cxt"
        path.write_text(write_cxt(ctx), encoding="utf-8")
        result = runner.invoke(main, ["base", "--context", str(path)])
        assert result.exit_code == 0
        assert result.output == write_imp(canonical_base(ctx))

    def test_missing_file_fails_nonzero(self, runner):
        result = runner.invoke(main, ["base", "--context", "missing.cxt"])
        assert result.exit_code != 0


class TestExplore:
    def test_group_mode_four_views(self, runner, fixture_dir, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(main, ["explore", *VIEW_ARGS(fixture_dir),
                                      "--mode", "group", "--out", str(out)])
        assert result.exit_code == 0, result.output
        accepted = (out / "accepted.imp").read_text(encoding="utf-8")
        assert set(accepted.splitlines()) == {
            "19 21 -> 22", "19 20 21 22 -> 18", "18 22 -> 19",
            "18 21 -> 20", "18 19 20 22 -> 21"}
        assert (out / "shared-log.cxt").exists()
        assert (out / "examples-APP.1.1.cxt").exists()
        transcript = (out / "transcript.txt").read_text(encoding="utf-8")
        assert "=== experts: APP.1.1, CON.1, ORP.1, SYS.1.1" in transcript
        assert "model:" in transcript  # counterexample names listed

    def test_single_view_yields_its_canonical_base(self, runner, tmp_path):
        ctx_path = orp_model_cxt(tmp_path)
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "explore", "--view", f"ORP.1={ctx_path}", "--mode", "group",
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        accepted = (out / "accepted.imp").read_text(encoding="utf-8")
        assert set(accepted.splitlines()) == \
            {"-> 19", "19 20 -> 18 21 22", "19 21 -> 18 20 22"}

    def test_zero_views_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["explore", "--mode", "group",
                                      "--out", str(tmp_path / "out")])
        assert result.exit_code != 0

    def test_system_mode_writes_per_subset_bases(self, runner, fixture_dir, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(main, ["explore", *VIEW_ARGS(fixture_dir),
                                      "--mode", "system", "--out", str(out)])
        assert result.exit_code == 0, result.output
        files = sorted(p.name for p in out.iterdir())
        assert len([f for f in files if f.startswith("accepted-")]) == 15
        full = (out / "accepted-APP.1.1+CON.1+ORP.1+SYS.1.1.imp").read_text("utf-8")
        assert set(full.splitlines()) == {
            "19 21 -> 22", "19 20 21 22 -> 18", "18 22 -> 19",
            "18 21 -> 20", "18 19 20 22 -> 21"}

    def test_outputs_deterministic(self, runner, fixture_dir, tmp_path):
        outs = []
        for i in range(2):
            out = tmp_path / f"out{i}"
            result = runner.invoke(main, ["explore", *VIEW_ARGS(fixture_dir),
                                          "--mode", "system", "--out", str(out)])
            assert result.exit_code == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        assert outs[0] == outs[1]

    def test_partial_schedule(self, runner, fixture_dir, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "explore", *VIEW_ARGS(fixture_dir), "--mode", "system",
            "--subsets", "APP.1.1,ORP.1;ORP.1", "--out", str(out)])
        assert result.exit_code == 0, result.output
        files = {p.name for p in out.iterdir()}
        assert "accepted-APP.1.1+ORP.1.imp" in files
        assert "accepted-ORP.1.imp" in files


class TestReport:
    def test_appendix_report_majority_section(self, runner, fixture_dir, tmp_path):
        out = tmp_path / "out"
        assert runner.invoke(main, ["explore", *VIEW_ARGS(fixture_dir),
                                    "--mode", "system",
                                    "--out", str(out)]).exit_code == 0
        json_path = tmp_path / "report.json"
        result = runner.invoke(main, ["report", "--session", str(out),
                                      "--json", str(json_path)])
        assert result.exit_code == 0, result.output
        assert "[b] confirmed by most experts:" in result.output
        assert "19 21 -> 18" in result.output
        data = json.loads(json_path.read_text(encoding="utf-8"))
        entries = {(tuple(e["premise"]), e["attribute"]): e["confirmed_by"]
                   for e in data["majority_confirmed"]}
        assert entries[(("19", "21"), "18")] == ["APP.1.1", "CON.1", "ORP.1"]
        # the question everyone but SYS.1.1 confirms, with SYS's real
        # counterexample, lands in sections (b) and (d)
        assert entries[(("20", "21", "22"), "18")] == ["APP.1.1", "CON.1", "ORP.1"]
        dissent = {(tuple(e["premise"]), e["attribute"], e["confirmer"], e["refuter"])
                   for e in data["cross_conflicts"]}
        assert (("20", "21", "22"), "18", "APP.1.1", "SYS.1.1") in dissent
        assert data["controversial_cells"] == []

    def test_quiet_report_all_sections_none(self, runner, tmp_path):
        ctx_path = orp_model_cxt(tmp_path)
        out = tmp_path / "out"
        assert runner.invoke(main, ["explore", "--view", f"ORP.1={ctx_path}",
                                    "--mode", "group",
                                    "--out", str(out)]).exit_code == 0
        result = runner.invoke(main, ["report", "--session", str(out)])
        assert result.exit_code == 0
        assert result.output.count("none") == 4

    def test_controversial_cells_from_flipped_objects(self, runner, tmp_path):
        from fcax.core import Cell, IncompleteContext
        u = bsi.universe()
        out = tmp_path / "session"
        out.mkdir()
        log_u = AttributeUniverse(["E1", "E2"])
        log_ctx = IncompleteContext.from_cells(log_u, [("18 -> 19", {})])
        (out / "shared-log.cxt").write_text(write_cxt(log_ctx), encoding="utf-8")
        e1 = IncompleteContext.from_cells(u, [("X", {"20": Cell.CROSS})])
        e2 = IncompleteContext.from_cells(u, [("X", {"20": Cell.BLANK})])
        (out / "examples-E1.cxt").write_text(write_cxt(e1), encoding="utf-8")
        (out / "examples-E2.cxt").write_text(write_cxt(e2), encoding="utf-8")
        result = runner.invoke(main, ["report", "--session", str(out)])
        assert result.exit_code == 0, result.output
        assert "X / 20" in result.output
        assert "E1=x, E2=o" in result.output


class TestLattice:
    def test_appendix_lattice_places_18_20_21(self, runner, fixture_dir, tmp_path):
        out = tmp_path / "out"
        assert runner.invoke(main, ["explore", *VIEW_ARGS(fixture_dir),
                                    "--mode", "system",
                                    "--out", str(out)]).exit_code == 0
        dot_path = tmp_path / "lattice.dot"
        result = runner.invoke(main, ["lattice", "--shared",
                                      str(out / "shared-log.cxt"),
                                      "--dot", str(dot_path)])
        assert result.exit_code == 0, result.output
        block = next(part for part in result.output.split("concept ")
                     if part.startswith(tuple("0123456789"))
                     and "experts {APP.1.1, ORP.1}" in part)
        assert "18 20 -> 21" in block
        dot = dot_path.read_text(encoding="utf-8")
        assert dot.startswith("digraph")
        assert "APP.1.1, ORP.1" in dot

    def test_empty_log_single_concept(self, runner, tmp_path):
        log_u = AttributeUniverse(["E1"])
        from fcax.core import IncompleteContext
        path = tmp_path / "empty.cxt"
        path.write_text(write_cxt(IncompleteContext.empty(log_u)), encoding="utf-8")
        result = runner.invoke(main, ["lattice", "--shared", str(path)])
        assert result.exit_code == 0
        assert result.output.count("concept") == 1

    def test_two_expert_toy(self, runner, tmp_path):
        log_u = AttributeUniverse(["E1", "E2"])
        from fcax.core import Cell, IncompleteContext
        ctx = IncompleteContext.from_cells(log_u, [
            ("-> a", {"E1": Cell.CROSS, "E2": Cell.CROSS}),
            ("a -> b", {"E1": Cell.CROSS, "E2": Cell.BLANK}),
            ("b -> c", {"E1": Cell.UNKNOWN, "E2": Cell.CROSS}),
        ])
        path = tmp_path / "toy.cxt"
        path.write_text(write_cxt(ctx), encoding="utf-8")
        result = runner.invoke(main, ["lattice", "--shared", str(path)])
        assert result.exit_code == 0
        # hand-checked: intents {}, {E1}, {E2}, {E1,E2} -> 4 concepts
        assert result.output.count("concept") == 4


class TestFixtureDump:
    def test_fixture_files_parse_back(self, fixture_dir):
        u = bsi.universe()
        for block in bsi.BLOCKS:
            text = (fixture_dir / f"{block}.imp").read_text(encoding="utf-8")
            got = parse_imp(text, u)
            assert [str(i) for i in got] == [str(i) for i in bsi.base(block)]
