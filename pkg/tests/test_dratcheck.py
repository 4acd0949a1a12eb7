import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kellersat import dratcheck, encoder, satkit
from kellersat.dratcheck import ProofStep
from kellersat.kellergraph import KellerInstance
from kellersat.satkit import Formula


def test_rup_accepts_resolvents():
    db = dratcheck.build_db([(1, 2), (-1, 3)])
    assert dratcheck.check_rup((2, 3), db)


def test_rup_rejects_empty_on_consistent_db():
    db = dratcheck.build_db([(1, 2)])
    assert not dratcheck.check_rup((), db)


def test_rup_learned_clause_replay():
    inst = KellerInstance(2, 2)
    dbe = encoder.encode(inst)
    f = Formula(dbe.num_vars, dbe.clauses)
    buf = io.StringIO()
    satkit.solve(f, proof_file=buf, seed=2)
    steps = dratcheck.parse_drat_text(buf.getvalue())
    db = dratcheck.build_db(f)
    for st in steps:
        if st.kind != "a" or not st.lits:
            continue
        assert dratcheck.check_rup(st.lits, db)
        db.add_clause(st.lits)


def test_rat_vacuous_pivot_accepted():
    # fresh positive unit over a variable with no negative occurrences
    db = dratcheck.build_db([(1, 2)], extra_vars=2)
    assert dratcheck.check_rat((3,), db)


def test_rat_rejected_when_resolvent_not_implied():
    # resolving (3) with (-3 1) gives (1), which nothing propagates
    db = dratcheck.build_db([(-3, 1), (2, 3)])
    assert not dratcheck.check_rat((3,), db)


def test_rat_any_rup_clause_accepted_regardless_of_pivot():
    db = dratcheck.build_db([(1,), (-1, 2)])
    assert dratcheck.check_rat((2, 3), db, pivot=3)


def test_rat_pivot_must_be_in_clause():
    db = dratcheck.build_db([(1, 2)])
    with pytest.raises(ValueError):
        dratcheck.check_rat((1, 2), db, pivot=5)


def test_check_proof_accepts_solver_output():
    inst = KellerInstance(2, 2)
    dbe = encoder.encode(inst)
    f = Formula(dbe.num_vars, dbe.clauses)
    buf = io.StringIO()
    satkit.solve(f, proof_file=buf, seed=0)
    res = dratcheck.check_proof(f, dratcheck.parse_drat_text(buf.getvalue()))
    assert res.accepted
    assert res.empty_derived


def test_check_proof_rejects_flipped_literal():
    inst = KellerInstance(2, 2)
    dbe = encoder.encode(inst)
    f = Formula(dbe.num_vars, dbe.clauses)
    buf = io.StringIO()
    satkit.solve(f, proof_file=buf, seed=0)
    steps = dratcheck.parse_drat_text(buf.getvalue())
    target = next(i for i, st in enumerate(steps) if len(st.lits) >= 2)
    lits = list(steps[target].lits)
    lits[0] = -lits[0]
    mutated = steps[:target] + [ProofStep("a", tuple(lits))] + steps[target + 1 :]
    res = dratcheck.check_proof(f, mutated)
    if res.accepted:
        # flipping may happen to produce another valid proof only if the
        # mutated clause itself still checks; rule that out explicitly
        db = dratcheck.build_db(f)
        for st in steps[:target]:
            db.add_clause(st.lits)
        assert dratcheck.check_rat(tuple(lits), db)
    else:
        assert res.failed_step is not None


def test_check_proof_requires_empty_clause():
    f = Formula(2, [(1, 2)])
    res = dratcheck.check_proof(f, [ProofStep("a", (1,))])
    assert not res.accepted
    assert "empty" in res.reason


def test_proof_prefixes_recheck():
    inst = KellerInstance(3, 2)
    dbe = encoder.encode(inst)
    f = Formula(dbe.num_vars, dbe.clauses)
    buf = io.StringIO()
    satkit.solve(f, proof_file=buf, seed=9)
    steps = dratcheck.parse_drat_text(buf.getvalue())
    rng = random.Random(1)
    for _ in range(5):
        cut = rng.randrange(1, len(steps))
        assert dratcheck.check_proof(f, steps[:cut], require_empty=False).accepted


def test_deletions_applied_and_units_skipped():
    f = Formula(3, [(1, 2), (3,)])
    steps = [
        ProofStep("d", (1, 2)),
        ProofStep("d", (3,)),  # unit deletion ignored by default
        ProofStep("a", (-3,)),
    ]
    # keeping the unit makes the later strengthening unsound, so it is rejected
    res = dratcheck.check_proof(f, steps, require_empty=False)
    assert not res.accepted
    assert res.failed_step == 2
    assert res.deletions_applied == 1
    assert res.deletions_skipped == 1

    # honoring the deletion makes (-3) a vacuous pivot addition
    strict = dratcheck.check_proof(f, steps, strict_deletions=True, require_empty=False)
    assert strict.accepted
    assert strict.deletions_applied == 2


def test_deleted_clause_no_longer_propagates():
    f = Formula(2, [(1, 2)])
    steps = [
        ProofStep("a", (-1,)),  # vacuous pivot: nothing contains 1... except (1, 2)
    ]
    # (1,2) contains the negated pivot; resolvent (2) is not implied
    assert not dratcheck.check_proof(f, steps, require_empty=False).accepted
    steps = [ProofStep("d", (1, 2)), ProofStep("a", (-1,))]
    assert dratcheck.check_proof(f, steps, require_empty=False).accepted


def test_fuzz_no_empty_proof_for_satisfiable_formulas():
    rng = random.Random(99)
    for _ in range(40):
        nv = rng.randint(3, 6)
        clauses = []
        for _ in range(rng.randint(2, 10)):
            clause = tuple(
                rng.choice([-1, 1]) * v
                for v in rng.sample(range(1, nv + 1), rng.randint(1, 3))
            )
            clauses.append(clause)
        f = Formula(nv, clauses)
        if satkit.solve(f, seed=0).status != satkit.SAT:
            continue
        bogus = [
            ProofStep("a", tuple(rng.choice([-1, 1]) * v for v in rng.sample(range(1, nv + 1), 2)))
            for _ in range(3)
        ] + [ProofStep("a", ())]
        res = dratcheck.check_proof(f, bogus)
        assert not res.accepted


def test_trim_reduces_and_reverifies():
    inst = KellerInstance(3, 2)
    dbe = encoder.encode(inst)
    f = Formula(dbe.num_vars, dbe.clauses)
    buf = io.StringIO()
    satkit.solve(f, proof_file=buf, seed=4)
    steps = dratcheck.parse_drat_text(buf.getvalue())
    trimmed, stats = dratcheck.trim(f, steps)
    assert stats.trimmed_steps <= stats.original_steps
    assert stats.trimmed_steps < stats.original_steps  # CDCL output has slack
    assert dratcheck.check_proof(f, trimmed).accepted


def test_trim_trivial_proof_is_fixpoint():
    f = Formula(1, [(1,), (-1,)])
    trimmed, stats = dratcheck.trim(f, [ProofStep("a", ())])
    assert [st.lits for st in trimmed] == [()]
    again, _ = dratcheck.trim(f, trimmed)
    assert [st.lits for st in again] == [()]


def test_trim_refuses_invalid_proof():
    f = Formula(2, [(1, 2)])
    with pytest.raises(ValueError):
        dratcheck.trim(f, [ProofStep("a", ())])


def test_trim_handles_deletions():
    inst = KellerInstance(3, 2)
    dbe = encoder.encode(inst)
    f = Formula(dbe.num_vars, dbe.clauses)
    buf = io.StringIO()
    satkit.solve(f, proof_file=buf, seed=4)
    steps = dratcheck.parse_drat_text(buf.getvalue())
    # interleave deletions of early learned clauses
    with_dels = []
    for i, st in enumerate(steps):
        with_dels.append(st)
        if i == 10 and len(steps) > 12:
            with_dels.append(ProofStep("d", steps[0].lits))
    if dratcheck.check_proof(f, with_dels).accepted:
        trimmed, stats = dratcheck.trim(f, with_dels)
        assert dratcheck.check_proof(f, trimmed).accepted


def test_trim_fuzz_random_unsat_formulas():
    rng = random.Random(1234)
    trimmed_count = 0
    for _ in range(120):
        nv = rng.randint(3, 7)
        clauses = []
        for _ in range(rng.randint(nv * 2, nv * 5)):
            clause = tuple(
                rng.choice([-1, 1]) * v
                for v in rng.sample(range(1, nv + 1), rng.randint(1, 3))
            )
            clauses.append(clause)
        f = Formula(nv, clauses)
        buf = io.StringIO()
        res = satkit.solve(f, proof_file=buf, seed=7)
        if res.status != satkit.UNSAT:
            continue
        steps = dratcheck.parse_drat_text(buf.getvalue())
        # inject deletions of random earlier additions
        mutated: list[ProofStep] = []
        added: list[ProofStep] = []
        for st in steps:
            mutated.append(st)
            if st.kind == "a" and st.lits:
                added.append(st)
            if added and rng.random() < 0.25:
                mutated.append(ProofStep("d", rng.choice(added).lits))
        if not dratcheck.check_proof(f, mutated).accepted:
            continue  # a deletion may legitimately break the proof
        trimmed, stats = dratcheck.trim(f, mutated)
        assert stats.trimmed_steps <= stats.original_steps
        assert dratcheck.check_proof(f, trimmed).accepted
        trimmed_count += 1
    assert trimmed_count >= 20  # the fuzz must actually exercise trimming


def test_binary_format_roundtrip(tmp_path):
    steps = [
        ProofStep("a", (1, -2, 300)),
        ProofStep("d", (-1, 2)),
        ProofStep("a", (127, -128)),
        ProofStep("a", ()),
    ]
    path = tmp_path / "p.bdrat"
    with open(path, "wb") as fh:
        dratcheck.write_drat_binary(steps, fh)
    assert dratcheck.parse_drat_binary(path.read_bytes()) == steps
    assert dratcheck.load_proof(str(path)) == steps

    tpath = tmp_path / "p.drat"
    with open(tpath, "w") as fh:
        dratcheck.write_drat_text(steps, fh)
    assert dratcheck.load_proof(str(tpath)) == steps


_lit_strategy = st.integers(min_value=1, max_value=400).flatmap(
    lambda v: st.sampled_from([v, -v])
)


@given(
    st.lists(
        st.tuples(
            st.sampled_from(["a", "d"]),
            st.lists(_lit_strategy, max_size=6).map(tuple),
        ),
        max_size=20,
    )
)
@settings(max_examples=60, deadline=None)
def test_binary_roundtrip_property(raw):
    steps = [ProofStep(kind, lits) for kind, lits in raw]
    buf = io.BytesIO()
    dratcheck.write_drat_binary(steps, buf)
    assert dratcheck.parse_drat_binary(buf.getvalue()) == steps


def test_text_binary_agree_on_solver_proof(tmp_path):
    inst = KellerInstance(2, 2)
    dbe = encoder.encode(inst)
    f = Formula(dbe.num_vars, dbe.clauses)
    buf = io.StringIO()
    satkit.solve(f, proof_file=buf, seed=6)
    steps = dratcheck.parse_drat_text(buf.getvalue())
    path = tmp_path / "proof.bdrat"
    with open(path, "wb") as fh:
        dratcheck.write_drat_binary(steps, fh)
    assert dratcheck.parse_drat_binary(path.read_bytes()) == steps
    assert dratcheck.check_proof(f, dratcheck.load_proof(str(path))).accepted
