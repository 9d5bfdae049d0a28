import random

import pytest

from fcax import bsi
from fcax.core import AttributeUniverse, Cell, IncompleteContext, subposition
from fcax.errors import (
    E_ATTRIBUTE_NOT_REFUTED,
    E_CONFLICTS_WITH_PRIOR,
    E_PREMISE_NOT_CERTAIN,
    CounterexampleError,
    ProtocolError,
)
from fcax.experts import make_view
from fcax.exploration import (
    PHASE_ADVANCING,
    PHASE_ASKING,
    PHASE_DONE,
    CounterexampleRow,
    ExpertRef,
    Verdict,
    run_exploration,
    start,
    validate_counterexample,
)
from fcax.implications import (
    canonical_base,
    closure,
    follows,
    holds_in,
    implication,
    l_completion,
    relative_canonical_base,
)

from conftest import powerset, random_formal_context


@pytest.fixture
def M():
    return bsi.universe()


def appendix_state(M, experts=None, background=()):
    return start(M, list(experts or bsi.BLOCKS), background=background)


def drive(state, views):
    return run_exploration(state, lambda e, R, m: views[e].answer(R, m))


class TestStart:
    def test_empty_group_rejected(self, M):
        with pytest.raises(ValueError, match="non-empty"):
            start(M, [])

    def test_duplicate_ids_rejected(self, M):
        with pytest.raises(ValueError, match="unique"):
            start(M, ["E", "E"])

    def test_first_question_covers_all_attributes(self, M):
        state = appendix_state(M)
        q = state.next_question()
        assert q.premise.mask == 0
        assert q.pending == M.names
        assert all(q.remaining[e] == M.names for e in bsi.BLOCKS)
        assert state.phase == PHASE_ASKING

    def test_phases(self, M):
        state = appendix_state(M)
        assert state.phase == PHASE_ADVANCING
        state.next_question()
        assert state.phase == PHASE_ASKING


class TestSubmit:
    def test_yes_records_cross(self, M):
        state = appendix_state(M)
        q = state.next_question()
        state.submit("ORP.1", "19", Verdict.yes())
        assert state.log.get(q.premise, "19", "ORP.1") is Cell.CROSS
        assert state.current_question().remaining["ORP.1"] == \
            tuple(m for m in M.names if m != "19")

    def test_no_merges_counterexample_and_shrinks_pending(self, M):
        state = appendix_state(M)
        state.next_question()
        cells = {m: Cell.BLANK for m in M.names}
        state.submit("APP.1.1", "18", Verdict.no("w", cells))
        assert "w" in state.examples["APP.1.1"]
        # the all-blank row refutes every empty-premise question
        assert state.current_question() is None  # question collapsed and closed
        assert state.log.get(M.empty, "18", "APP.1.1") is Cell.BLANK
        assert state.log.get(M.empty, "19", "APP.1.1") is Cell.UNKNOWN  # never answered

    def test_unknown_adds_artificial_counterexample(self, M):
        state = appendix_state(M)
        state.next_question()
        state.submit("APP.1.1", "18", Verdict.unknown())
        ctx = state.examples["APP.1.1"]
        assert "q:∅:18" in ctx
        assert ctx.cell("q:∅:18", "18") is Cell.BLANK
        assert all(ctx.cell("q:∅:18", m) is Cell.UNKNOWN for m in M.names if m != "18")
        assert state.log.get(M.empty, "18", "APP.1.1") is Cell.UNKNOWN

    def test_artificial_name_includes_premise(self, M):
        views = bsi.views(M)
        partial = make_view(IncompleteContext.empty(M), [], complete=False)
        state = start(M, ["P", "ORP.1"])
        state.next_question()
        state.submit("P", "19", Verdict.unknown())
        assert "q:∅:19" in state.examples["P"]

    def test_duplicate_answer_rejected(self, M):
        state = appendix_state(M)
        state.next_question()
        state.submit("ORP.1", "19", Verdict.yes())
        with pytest.raises(ProtocolError, match="already answered"):
            state.submit("ORP.1", "19", Verdict.yes())

    def test_unknown_expert_and_unpending_attribute(self, M):
        state = appendix_state(M)
        state.next_question()
        with pytest.raises(ProtocolError, match="unknown expert"):
            state.submit("nobody", "19", Verdict.yes())
        cells = {m: Cell.BLANK for m in M.names}
        state.submit("APP.1.1", "18", Verdict.no("w", cells))  # kills everything
        with pytest.raises(ProtocolError):
            state.submit("CON.1", "19", Verdict.yes())  # question already closed

    def test_next_question_while_answers_outstanding(self, M):
        state = appendix_state(M)
        state.next_question()
        with pytest.raises(ProtocolError, match="awaiting"):
            state.next_question()


class TestValidateCounterexample:
    def test_valid_row(self, M):
        ctx = IncompleteContext.empty(M)
        row = CounterexampleRow.make("g", {"18": Cell.CROSS, "22": Cell.CROSS,
                                           "19": Cell.BLANK})
        validate_counterexample(row, M.subset(["18", "22"]), "19", ctx)

    def test_premise_not_certain(self, M):
        ctx = IncompleteContext.empty(M)
        row = CounterexampleRow.make("g", {"18": Cell.CROSS, "19": Cell.BLANK})
        with pytest.raises(CounterexampleError) as err:
            validate_counterexample(row, M.subset(["18", "22"]), "19", ctx)
        assert err.value.code == E_PREMISE_NOT_CERTAIN

    def test_attribute_not_refuted_by_unknown(self, M):
        ctx = IncompleteContext.empty(M)
        row = CounterexampleRow.make("g", {"18": Cell.CROSS, "22": Cell.CROSS,
                                           "19": Cell.UNKNOWN})
        with pytest.raises(CounterexampleError) as err:
            validate_counterexample(row, M.subset(["18", "22"]), "19", ctx)
        assert err.value.code == E_ATTRIBUTE_NOT_REFUTED

    def test_conflict_with_stored_object(self, M):
        ctx = IncompleteContext.from_cells(M, [("A16", {"20": Cell.CROSS})])
        row = CounterexampleRow.make("A16", {"18": Cell.CROSS, "19": Cell.BLANK,
                                             "20": Cell.BLANK})
        with pytest.raises(CounterexampleError) as err:
            validate_counterexample(row, M.subset(["18"]), "19", ctx)
        assert err.value.code == E_CONFLICTS_WITH_PRIOR
        assert ("A16", "20") in err.value.cells

    def test_unknown_cells_outside_premise_and_target_allowed(self, M):
        ctx = IncompleteContext.empty(M)
        row = CounterexampleRow.make("g", {"18": Cell.CROSS, "19": Cell.BLANK})
        validate_counterexample(row, M.subset(["18"]), "19", ctx)


class TestAcceptance:
    def test_full_group_shared_base(self, M):
        state = appendix_state(M)
        drive(state, bsi.views(M))
        accepted, examples, log = state.result()
        got = {str(i.normalized()) for i in accepted}
        assert got == {"19 21 -> 22", "19 20 21 22 -> 18", "18 22 -> 19",
                       "18 21 -> 20", "18 19 20 22 -> 21"}

    def test_accepted_only_when_every_expert_confirms(self, M):
        state = appendix_state(M)
        drive(state, bsi.views(M))
        accepted, _, log = state.result()
        for imp in accepted:
            for m in (imp.conclusion - imp.premise).names:
                for e in bsi.BLOCKS:
                    assert log.get(imp.premise, m, e) is Cell.CROSS

    def test_premises_strictly_lectic(self, M):
        state = appendix_state(M)
        premises = []
        views = bsi.views(M)
        while True:
            q = state.next_question()
            if q is None:
                break
            premises.append(q.premise)
            while state.active is not None:
                snap = state.current_question()
                e, m = next((e, ms[0]) for e, ms in snap.remaining.items() if ms)
                state.submit(e, m, views[e].answer(q.premise, m))
        keys = [p.lectic_key for p in premises]
        assert keys == sorted(set(keys))

    def test_examples_grow_monotonically(self, M):
        from fcax.core import information_leq
        state = appendix_state(M)
        views = bsi.views(M)
        snapshots = {e: [state.examples[e]] for e in bsi.BLOCKS}
        while True:
            q = state.next_question()
            if q is None:
                break
            while state.active is not None:
                snap = state.current_question()
                e, m = next((e, ms[0]) for e, ms in snap.remaining.items() if ms)
                state.submit(e, m, views[e].answer(q.premise, m))
                for ex in bsi.BLOCKS:
                    assert information_leq(snapshots[ex][-1], state.examples[ex])
                    snapshots[ex].append(state.examples[ex])

    def test_determinism(self, M):
        runs = []
        for _ in range(2):
            state = appendix_state(M)
            drive(state, bsi.views(M))
            accepted, examples, log = state.result()
            runs.append((
                tuple(str(i) for i in accepted),
                {e: (ctx.objects, ctx.rows) for e, ctx in examples.items()},
                tuple((n, tuple(sorted((k, v.value) for k, v in log.row(n).items())))
                      for n in log.question_names),
            ))
        assert runs[0] == runs[1]

    def test_background_covering_everything_yields_empty_base(self, M):
        first = appendix_state(M)
        drive(first, bsi.views(M))
        accepted, _, _ = first.result()
        second = appendix_state(M, background=accepted)
        drive(second, bsi.views(M))
        again, _, _ = second.result()
        assert again == ()


class TestTheoremOracle:
    def test_accepted_base_is_relative_base_of_completion_universe(self):
        rng = random.Random(101)
        for _ in range(25):
            n = rng.randint(1, 5)
            u = AttributeUniverse([f"m{i}" for i in range(n)])
            k = rng.randint(1, 3)
            views = {}
            for i in range(k):
                ctx = random_formal_context(rng, u, max_objects=5)
                views[f"E{i}"] = make_view(
                    IncompleteContext.empty(u), canonical_base(ctx), complete=True)
            state = start(u, list(views))
            run_exploration(state, lambda e, R, m: views[e].answer(R, m))
            accepted, examples, _ = state.result()
            universe_ctx = subposition(
                [l_completion(IncompleteContext.empty(u), v.theory)
                 for v in views.values()])
            expected = relative_canonical_base(universe_ctx, ())
            assert [str(i.normalized()) for i in accepted] == \
                [str(i.normalized()) for i in expected]
            final = subposition([examples[e] for e in views])
            for P in powerset(u.names):
                R = u.subset(P)
                assert closure(list(accepted), R).mask == \
                    final.max_satisfiable_conclusion(R).mask

    def test_accepted_base_relative_to_nonempty_background(self):
        """With shared background implications, the exploration returns the
        background-relative canonical base of the completion universe."""
        rng = random.Random(107)
        checked = 0
        while checked < 15:
            n = rng.randint(2, 5)
            u = AttributeUniverse([f"m{i}" for i in range(n)])
            views = {f"E{i}": make_view(
                IncompleteContext.empty(u),
                canonical_base(random_formal_context(rng, u, max_objects=4)),
                complete=True) for i in range(rng.randint(1, 3))}
            probe = start(u, list(views))
            run_exploration(probe, lambda e, R, m: views[e].answer(R, m))
            shared, _, _ = probe.result()
            if not shared:
                continue
            background = list(shared)[: rng.randint(1, len(shared))]
            state = start(u, list(views), background=background)
            run_exploration(state, lambda e, R, m: views[e].answer(R, m))
            accepted, _, _ = state.result()
            universe_ctx = subposition(
                [l_completion(IncompleteContext.empty(u), v.theory)
                 for v in views.values()])
            expected = relative_canonical_base(universe_ctx, background)
            assert [str(i.normalized()) for i in accepted] == \
                [str(i.normalized()) for i in expected]
            checked += 1

    def test_soundness_every_acceptance_in_every_theory(self):
        rng = random.Random(103)
        for _ in range(15):
            n = rng.randint(1, 5)
            u = AttributeUniverse([f"m{i}" for i in range(n)])
            views = {f"E{i}": make_view(
                IncompleteContext.empty(u),
                canonical_base(random_formal_context(rng, u, max_objects=4)),
                complete=True) for i in range(rng.randint(1, 3))}
            state = start(u, list(views))
            run_exploration(state, lambda e, R, m: views[e].answer(R, m))
            accepted, _, _ = state.result()
            for imp in accepted:
                for view in views.values():
                    assert follows(view.theory, imp)

    def test_result_before_done_rejected(self, M):
        state = appendix_state(M)
        state.next_question()
        with pytest.raises(ProtocolError):
            state.result()


class TestPartialExperts:
    def test_unknown_blocks_acceptance_but_logs_distinctly(self):
        u = AttributeUniverse(["a", "b"])
        knows = make_view(IncompleteContext.empty(u),
                          [implication(u, ["a"], ["b"])], complete=False)
        clueless = make_view(IncompleteContext.empty(u), [], complete=False)
        views = {"K": knows, "U": clueless}
        state = start(u, ["K", "U"])
        run_exploration(state, lambda e, R, m: views[e].answer(R, m))
        accepted, examples, log = state.result()
        assert accepted == ()  # nothing unanimous
        a = u.subset(["a"])
        assert log.get(a, "b", "K") is Cell.CROSS
        assert log.get(a, "b", "U") is Cell.UNKNOWN
        assert "q:a:b" in examples["U"]
