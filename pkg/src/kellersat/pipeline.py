"""Command-line orchestration.

Subcommands: encode, break, solve, check, trim, tile, verify-clique,
verify-dim8, report.  Case solving checks every refutation immediately;
manifests are deterministic given seed and budget, with wall-clock data
kept in a separate timing field.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import random
import sys
import time
from typing import Optional, Sequence

from . import dratcheck, encoder, kellergraph, satkit, symmetry, tilinglab
from .kellergraph import KellerInstance

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

EXPECTED_CLASS_COUNTS = {
    # s: (matrix classes, stage-2 classes, total cases)
    3: (25, 861, 21_557),
    4: (28, 1326, 37_160),
    6: (28, 1378, 38_616),
}


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Argument handling


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(
        prog="kellersat",
        description="SAT toolkit for clique nonexistence in Keller graphs",
    )
    root.add_argument("--config", help="key=value file mirroring the global flags")
    root.add_argument("--jobs", type=int, default=1, help="parallel case workers")
    root.add_argument("--seed", type=int, default=0)
    root.add_argument("--budget-conflicts", type=int, default=10_000_000)
    root.add_argument("--budget-wall", type=float, default=None)
    root.add_argument("--out-dir", default=".")
    root.add_argument("--strict-deletions", action="store_true")
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="emit the clique-existence CNF")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-s", type=int, required=True)
    p.add_argument("-o", "--output", help="output file (default: keller_n<n>_s<s>.cnf)")

    p = sub.add_parser("break", help="symmetry-break the 7-dimensional instance")
    p.add_argument("-s", type=int, required=True)
    p.add_argument("--sat-cover", action="store_true", help="also run the proof-emitting cover check")
    p.add_argument("--skip-blocking-file", action="store_true")

    p = sub.add_parser("solve", help="solve cases with immediate proof checking")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--cases", help="incremental case file from `break`")
    group.add_argument("-n", type=int, help="build the instance in memory")
    p.add_argument("-s", type=int)
    p.add_argument("--sample", type=int, help="solve a seeded sample of this many cases")
    p.add_argument("--select", help="comma-separated case indices")
    p.add_argument("--trim", action="store_true", help="trim checked proofs")
    p.add_argument("--keep-proofs", action="store_true", help="keep raw proof files")
    p.add_argument("--manifest", help="manifest path (default: manifest.json in out dir)")

    p = sub.add_parser("check", help="check a clausal proof")
    p.add_argument("formula")
    p.add_argument("proof")

    p = sub.add_parser("trim", help="trim a clausal proof")
    p.add_argument("formula")
    p.add_argument("proof")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--binary", action="store_true", help="write the trimmed proof in binary form")

    p = sub.add_parser("tile", help="verify a tiling file")
    p.add_argument("file")
    p.add_argument("--art", action="store_true", help="render 2-dimensional tilings")

    p = sub.add_parser("verify-clique", help="check a clique file")
    p.add_argument("file")

    p = sub.add_parser("verify-dim8", help="dimension-8 satisfiability and tiling path")
    p.add_argument("clique", nargs="?", help="external 256-vertex clique file")
    p.add_argument("--embed", default="3,4,6", help="larger offsets to embed into")
    p.add_argument("--embed-full", action="store_true", help="also propagate the embedded encodings")

    p = sub.add_parser("report", help="summarize a run manifest")
    p.add_argument("manifest")
    return root


def _apply_config(argv: Sequence[str], parser: argparse.ArgumentParser) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        defaults = {}
        with open(known.config) as f:
            for lineno, raw in enumerate(f, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise SystemExit(f"config line {lineno}: expected key=value")
                key, val = line.split("=", 1)
                dest = key.strip().replace("-", "_")
                val = val.strip()
                if dest in ("jobs", "seed", "budget_conflicts"):
                    defaults[dest] = int(val)
                elif dest == "budget_wall":
                    defaults[dest] = float(val)
                elif dest == "strict_deletions":
                    defaults[dest] = val.lower() in ("1", "true", "yes")
                elif dest == "out_dir":
                    defaults[dest] = val
                else:
                    raise SystemExit(f"config line {lineno}: unknown key {key.strip()!r}")
        parser.set_defaults(**defaults)
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# encode


def cmd_encode(args) -> int:
    try:
        inst = KellerInstance(args.n, args.s)
        db = encoder.encode(inst)
    except (encoder.UnsupportedInstanceError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    out = args.output or os.path.join(args.out_dir, f"keller_n{args.n}_s{args.s}.cnf")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    with open(out, "w") as f:
        db.write_dimacs(f)
    print(f"p cnf {db.num_vars} {len(db.clauses)}")
    for fam in encoder.FAMILIES:
        print(f"{fam}: {db.counts.get(fam, 0)}")
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# break


def cmd_break(args) -> int:
    s = args.s
    try:
        inst = KellerInstance(symmetry.DIM, s)
        vm = encoder.VarMap(inst.n, inst.s)
        validated = s in EXPECTED_CLASS_COUNTS
        if not validated:
            print(f"warning: class counts for s={s} are not validated", file=sys.stderr)

        mcls = symmetry.matrix_classes(inst)
        ccls = symmetry.coord34_classes(inst)
        cases = symmetry.enumerate_cases(inst, vm)
    except (symmetry.SymmetryError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if validated:
        want_m, want_c, want_total = EXPECTED_CLASS_COUNTS[s]
        got = (len(mcls), len(ccls), len(cases))
        if got != (want_m, want_c, want_total):
            print(
                f"error: class counts {got} differ from the validated "
                f"({want_m}, {want_c}, {want_total}) for s={s}",
                file=sys.stderr,
            )
            return EXIT_FAIL

    os.makedirs(args.out_dir, exist_ok=True)

    def path(name: str) -> str:
        return os.path.join(args.out_dir, name)

    phi = symmetry.build_phi(inst, vm)
    with open(path(f"phi_s{s}.cnf"), "w") as f:
        phi.write_dimacs(f)

    binaries = symmetry.rat_binaries(vm)
    db = dratcheck.build_db(phi)
    for i, clause in enumerate(binaries):
        t0 = time.monotonic()
        if not dratcheck.check_rat(clause, db):
            print(f"error: symmetry binary {i} failed its redundancy check", file=sys.stderr)
            return EXIT_FAIL
        dt = time.monotonic() - t0
        print(f"binary {i + 1}/3 verified redundant in {dt:.2f}s")
        db.add_clause(clause)
    with open(path(f"sym_binaries_s{s}.drat"), "w") as f:
        dratcheck.write_drat_text([dratcheck.ProofStep("a", c) for c in binaries], f)

    n_blocking = 0
    if not args.skip_blocking_file:
        with open(path(f"blocking_s{s}.cnf"), "w") as f:
            chunks = []
            for _, clause in symmetry.iter_blocking_clauses(inst, vm):
                chunks.append(" ".join(map(str, clause)) + " 0\n")
                n_blocking += 1
            f.write(f"p cnf {vm.num_vars} {n_blocking}\n")
            f.writelines(chunks)

    with open(path(f"cases_s{s}.icnf"), "w") as f:
        f.write(f"c symmetry-broken case file for n={inst.n} s={s}\n")
        f.write("p inccnf\n")
        for c in phi.clauses:
            f.write(" ".join(map(str, c)) + " 0\n")
        for c in binaries:
            f.write(" ".join(map(str, c)) + " 0\n")
        for _, c in symmetry.iter_blocking_clauses(inst, vm):
            f.write(" ".join(map(str, c)) + " 0\n")
        for cube in cases:
            f.write("a " + " ".join(map(str, cube.literals)) + " 0\n")

    with open(path(f"matrix_classes_s{s}.txt"), "w") as f:
        symmetry.write_class_list(f, mcls)
    with open(path(f"coord34_classes_s{s}.txt"), "w") as f:
        symmetry.write_class_list(f, ccls)
    if s >= 3:
        with open(path(f"deep_split_s{s}.txt"), "w") as f:
            symmetry.write_class_list(f, symmetry.hardest_c2_assignments())

    cover = symmetry.cover_check(cases, inst, mode="combinatorial")
    if not cover.passed:
        print(f"error: cover check failed: {cover.failure}", file=sys.stderr)
        return EXIT_FAIL
    print(f"cover check (combinatorial): ok {cover.counts}")
    if args.sat_cover:
        sat_cover = symmetry.cover_check(
            cases, inst, mode="sat", proof_path=path(f"cover_s{s}.drat")
        )
        if not sat_cover.passed:
            print(f"error: refutation cover check failed: {sat_cover.failure}", file=sys.stderr)
            return EXIT_FAIL
        print(f"cover check (refutation): ok, {sat_cover.proof_steps} proof steps")

    print(
        f"s={s}: {len(mcls)} matrix classes, {len(ccls)} stage-2 classes, "
        f"{len(cases)} cases, {n_blocking} blocking clauses"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


_WORKER_STATE: dict = {}


def _init_worker(formula, seed, budget_conflicts, budget_wall, proof_dir, keep, do_trim, strict, ns):
    _WORKER_STATE.update(
        formula=formula,
        seed=seed,
        budget_conflicts=budget_conflicts,
        budget_wall=budget_wall,
        proof_dir=proof_dir,
        keep=keep,
        trim=do_trim,
        strict=strict,
        ns=ns,
    )


def _solve_case(job: tuple[int, tuple[int, ...]]) -> dict:
    index, cube = job
    st = _WORKER_STATE
    return solve_one_case(
        st["formula"],
        index,
        cube,
        seed=st["seed"],
        budget_conflicts=st["budget_conflicts"],
        budget_wall=st["budget_wall"],
        proof_dir=st["proof_dir"],
        keep_proofs=st["keep"],
        do_trim=st["trim"],
        strict_deletions=st["strict"],
        instance_ns=st["ns"],
    )


def solve_one_case(
    formula: satkit.Formula,
    index: int,
    cube: tuple[int, ...],
    seed: int,
    budget_conflicts: Optional[int],
    budget_wall: Optional[float],
    proof_dir: str,
    keep_proofs: bool,
    do_trim: bool,
    strict_deletions: bool,
    instance_ns: Optional[tuple[int, int]] = None,
) -> dict:
    os.makedirs(proof_dir, exist_ok=True)
    proof_path = os.path.join(proof_dir, f"case_{index:05d}.drat")
    t0 = time.monotonic()
    with open(proof_path, "w") as pf:
        result = satkit.solve(
            formula,
            assumptions=cube,
            conflict_budget=budget_conflicts,
            wall_budget=budget_wall,
            seed=seed,
            proof_file=pf,
        )
    entry: dict = {
        "case_index": index,
        "status": result.status,
        "conflicts": result.stats.get("conflicts", 0),
        "decisions": result.stats.get("decisions", 0),
        "propagations": result.stats.get("propagations", 0),
    }
    seconds = time.monotonic() - t0

    if result.status == satkit.UNSAT:
        check_formula = satkit.Formula(
            num_vars=formula.num_vars,
            clauses=list(formula.clauses) + [(l,) for l in cube],
        )
        check = dratcheck.check_proof(
            check_formula, proof_path, strict_deletions=strict_deletions
        )
        entry["proof_checked"] = check.accepted
        entry["proof_steps"] = check.steps_total
        entry["status"] = "UNSAT-verified" if check.accepted else "check-failed"
        if check.accepted and do_trim:
            trimmed, tstats = dratcheck.trim(check_formula, proof_path)
            tpath = os.path.join(proof_dir, f"case_{index:05d}.trimmed.drat")
            with open(tpath, "w") as f:
                dratcheck.write_drat_text(trimmed, f)
            entry["trimmed_steps"] = tstats.trimmed_steps
            entry["trimmed_sha256"] = _sha256_file(tpath)
        if keep_proofs:
            entry["proof_sha256"] = _sha256_file(proof_path)
        else:
            os.unlink(proof_path)
    elif result.status == satkit.SAT:
        if instance_ns is not None:
            inst = KellerInstance(*instance_ns)
            decoded = encoder.decode_model(result.model, inst)
            entry["clique"] = [list(v) for v in decoded]
            entry["clique_verified"] = kellergraph.is_clique(decoded, inst)
        os.unlink(proof_path)
    else:
        if not keep_proofs:
            os.unlink(proof_path)

    entry["_seconds"] = seconds
    return entry


def cmd_solve(args) -> int:
    rng = random.Random(args.seed)
    inst: Optional[KellerInstance] = None
    vm: Optional[encoder.VarMap] = None
    cover_ok = None
    rat_ok = None

    if args.cases:
        formula_full = satkit.parse_dimacs_file(args.cases)
        formula = satkit.Formula(formula_full.num_vars, formula_full.clauses)
        cubes = formula_full.cubes or [()]
        instance_info: dict = {"source": args.cases}
    else:
        if args.s is None:
            print("error: -s is required with -n", file=sys.stderr)
            return EXIT_ERROR
        inst = KellerInstance(args.n, args.s)
        vm = encoder.VarMap(inst.n, inst.s)
        instance_info = {"n": inst.n, "s": inst.s}
        if inst.n == symmetry.DIM:
            db = symmetry.build_broken_db(inst, vm)
            cases = symmetry.enumerate_cases(inst, vm)
            cubes = [c.literals for c in cases]
            formula = satkit.Formula(db.num_vars, db.clauses)
            cover_ok = symmetry.cover_check(cases, inst).passed
            rat_ok = verify_rat_binaries(inst, vm)
        else:
            try:
                db = encoder.encode(inst, vm)
            except encoder.UnsupportedInstanceError as e:
                print(f"error: {e}", file=sys.stderr)
                return EXIT_ERROR
            formula = satkit.Formula(db.num_vars, db.clauses)
            cubes = [()]

    indices = list(range(len(cubes)))
    if args.select:
        try:
            indices = [int(x) for x in args.select.split(",")]
        except ValueError:
            print(f"error: bad case selection {args.select!r}", file=sys.stderr)
            return EXIT_ERROR
        bad = [i for i in indices if not 0 <= i < len(cubes)]
        if bad:
            print(f"error: case indices out of range: {bad}", file=sys.stderr)
            return EXIT_ERROR
    elif args.sample is not None:
        indices = sorted(rng.sample(range(len(cubes)), min(args.sample, len(cubes))))

    os.makedirs(args.out_dir, exist_ok=True)
    proof_dir = os.path.join(args.out_dir, "proofs")
    jobs = [(i, tuple(cubes[i])) for i in indices]

    instance_ns = (inst.n, inst.s) if inst is not None else None
    t_start = time.monotonic()
    if args.jobs > 1:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(
            args.jobs,
            initializer=_init_worker,
            initargs=(
                formula,
                args.seed,
                args.budget_conflicts,
                args.budget_wall,
                proof_dir,
                args.keep_proofs,
                args.trim,
                args.strict_deletions,
                instance_ns,
            ),
        ) as pool:
            entries = pool.map(_solve_case, jobs)
    else:
        entries = [
            solve_one_case(
                formula,
                i,
                cube,
                seed=args.seed,
                budget_conflicts=args.budget_conflicts,
                budget_wall=args.budget_wall,
                proof_dir=proof_dir,
                keep_proofs=args.keep_proofs,
                do_trim=args.trim,
                strict_deletions=args.strict_deletions,
                instance_ns=instance_ns,
            )
            for i, cube in jobs
        ]

    entries.sort(key=lambda e: e["case_index"])
    seconds = {e["case_index"]: round(e.pop("_seconds"), 6) for e in entries}

    # a SAT case is a counterexample candidate, never an error
    candidates = []
    for e in entries:
        if e["status"] == satkit.SAT:
            e["status"] = "counterexample-candidate"
            candidates.append(e["case_index"])
            if "clique" in e and inst is not None:
                path = os.path.join(args.out_dir, f"candidate_case_{e['case_index']:05d}.keller")
                with open(path, "w") as f:
                    kellergraph.write_clique_file(f, [tuple(v) for v in e["clique"]], inst)

    statuses = {e["status"] for e in entries}
    complete = len(indices) == len(cubes)
    caseless = len(cubes) == 1 and not cubes[0]
    if candidates:
        verdict = "counterexample-candidate"
    elif "check-failed" in statuses:
        verdict = "check-failed"
    elif not entries or not complete or statuses != {"UNSAT-verified"}:
        verdict = "incomplete"
    elif caseless or (cover_ok is True and rat_ok is True):
        verdict = "refuted"
    else:
        verdict = "incomplete"

    manifest = {
        "instance": instance_info,
        "case_count": len(cubes),
        "selected": indices,
        "seed": args.seed,
        "budget_conflicts": args.budget_conflicts,
        "budget_wall": args.budget_wall,
        "cover_check_passed": cover_ok,
        "rat_binaries_verified": rat_ok,
        "cases": entries,
        "verdict": verdict,
        "timing": {
            "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "case_seconds": {str(k): v for k, v in sorted(seconds.items())},
            "total_seconds": round(time.monotonic() - t_start, 6),
        },
    }
    manifest_path = args.manifest or os.path.join(args.out_dir, "manifest.json")
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")

    csv_path = os.path.join(args.out_dir, "runtimes.csv")
    with open(csv_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["case_index", "status", "conflicts", "seconds"])
        for e in entries:
            w.writerow([e["case_index"], e["status"], e["conflicts"], seconds[e["case_index"]]])

    print(f"verdict: {verdict} ({len(entries)} cases)")
    for e in entries:
        print(f"  case {e['case_index']}: {e['status']} ({e['conflicts']} conflicts)")
    print(f"wrote {manifest_path} and {csv_path}")
    if verdict in ("check-failed", "counterexample-candidate"):
        return EXIT_FAIL
    return EXIT_OK


def verify_rat_binaries(inst: KellerInstance, vm: Optional[encoder.VarMap] = None) -> bool:
    vm = vm or encoder.VarMap(inst.n, inst.s)
    phi = symmetry.build_phi(inst, vm)
    db = dratcheck.build_db(phi)
    for clause in symmetry.rat_binaries(vm):
        if not dratcheck.check_rat(clause, db):
            return False
        db.add_clause(clause)
    return True


# ---------------------------------------------------------------------------
# check / trim


def cmd_check(args) -> int:
    try:
        formula = satkit.parse_dimacs_file(args.formula)
        result = dratcheck.check_proof(
            formula, args.proof, strict_deletions=args.strict_deletions
        )
    except (OSError, ValueError) as e:
        print(json.dumps({"error": str(e)}))
        return EXIT_ERROR
    print(json.dumps(result.summary(), indent=2, sort_keys=True))
    return EXIT_OK if result.accepted else EXIT_FAIL


def cmd_trim(args) -> int:
    try:
        formula = satkit.parse_dimacs_file(args.formula)
        trimmed, stats = dratcheck.trim(
            formula, args.proof, strict_deletions=args.strict_deletions
        )
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.binary:
        with open(args.output, "wb") as f:
            dratcheck.write_drat_binary(trimmed, f)
    else:
        with open(args.output, "w") as f:
            dratcheck.write_drat_text(trimmed, f)
    print(
        f"trimmed {stats.original_steps} -> {stats.trimmed_steps} steps "
        f"({stats.core_inputs} core input clauses)"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# tile / verify-clique / verify-dim8


def cmd_tile(args) -> int:
    try:
        with open(args.file) as f:
            t = tilinglab.read_tiling(f)
    except (OSError, tilinglab.TilingError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    verdict = tilinglab.verify_tiling(t)
    if not verdict.ok:
        print(f"NOT-A-TILING: {verdict.problem} {verdict.detail}")
        return EXIT_FAIL
    fs = tilinglab.verify_faceshare_free(t)
    counts = tilinglab.measure_discreteness(t)
    print("TILING")
    print("faceshare-free" if fs.ok else f"facesharing at {fs.detail}")
    print(f"discreteness per coordinate: {counts}")
    if args.art:
        print(tilinglab.ascii_art(t))
    return EXIT_OK


def cmd_verify_clique(args) -> int:
    try:
        with open(args.file) as f:
            inst, verts = kellergraph.read_clique_file(f)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    violation = kellergraph.find_clique_violation(verts, inst)
    blocks = {kellergraph.block_of(v, inst) for v in verts}
    print(f"n={inst.n} s={inst.s}: {len(verts)} vertices in {len(blocks)} blocks")
    if violation is not None:
        print(f"NOT-A-CLIQUE: {violation[0]} and {violation[1]} are not adjacent")
        return EXIT_FAIL
    print("CLIQUE")
    return EXIT_OK


def embed_vertex(v: Sequence[int], s_from: int, s_to: int) -> tuple[int, ...]:
    """Offset-preserving embedding: block bits carry over, offsets carry over."""
    out = []
    for c in v:
        w, k = divmod(c, s_from)
        if k >= s_to:
            raise ValueError(f"offset {k} does not fit into the target granularity {s_to}")
        out.append(s_to * w + k)
    return tuple(out)


def cmd_verify_dim8(args) -> int:
    if not args.clique or not os.path.exists(args.clique):
        print("SKIPPED: no external clique file supplied; the dimension-8 path needs one")
        return EXIT_OK
    with open(args.clique) as f:
        inst, verts = kellergraph.read_clique_file(f)
    if inst.n != 8:
        print(f"error: expected an 8-dimensional clique file, got n={inst.n}", file=sys.stderr)
        return EXIT_ERROR
    report: dict = {"n": inst.n, "s": inst.s, "vertices": len(verts)}

    if len(verts) != 256:
        print(f"FAIL: expected 256 vertices, got {len(verts)}")
        return EXIT_FAIL
    violation = kellergraph.find_clique_violation(verts, inst)
    if violation is not None:
        print(f"FAIL: not a clique: {violation[0]} and {violation[1]}")
        return EXIT_FAIL
    print("clique: ok (256 vertices, all pairs adjacent)")

    vm = encoder.VarMap(inst.n, inst.s)
    db = encoder.encode(inst, vm)
    units = encoder.clique_to_units(verts, inst, vm)
    formula = satkit.Formula(db.num_vars, db.clauses + [(u,) for u in units])
    solver = satkit.Solver(formula, seed=0)
    t0 = time.monotonic()
    result = solver.solve(conflict_budget=10_000)
    dt = time.monotonic() - t0
    if result.status != satkit.SAT or result.stats["conflicts"] != 0:
        print(f"FAIL: expected conflict-free satisfiability, got {result.status}")
        return EXIT_FAIL
    assert solver.verify_model(formula, result.model)
    decoded = encoder.decode_model(result.model, inst, vm)
    if set(decoded) != set(verts):
        print("FAIL: decoded model does not match the input clique")
        return EXIT_FAIL
    print(f"satisfiability by propagation: ok ({dt:.3f}s, 0 conflicts)")
    report["propagation_seconds"] = round(dt, 4)

    t = tilinglab.clique_to_tiling(verts, inst)
    fs = tilinglab.verify_faceshare_free(t)
    assert fs.ok
    cells = (2 * inst.s) ** inst.n
    print(f"tiling: ok ({cells} cells covered exactly once, faceshare-free)")

    back = tilinglab.tiling_to_clique(t)
    if set(back) != {tuple(v) for v in verts}:
        print("FAIL: tiling does not translate back to the clique")
        return EXIT_FAIL

    for s_to in [int(x) for x in args.embed.split(",") if x]:
        inst_to = KellerInstance(8, s_to)
        embedded = [embed_vertex(v, inst.s, s_to) for v in verts]
        violation = kellergraph.find_clique_violation(embedded, inst_to)
        if violation is not None:
            print(f"FAIL: embedding into s={s_to} broke adjacency at {violation}")
            return EXIT_FAIL
        print(f"embedding into s={s_to}: adjacency preserved for all pairs")
        if args.embed_full:
            vm_to = encoder.VarMap(8, s_to)
            db_to = encoder.encode(inst_to, vm_to)
            units_to = encoder.clique_to_units(embedded, inst_to, vm_to)
            res = satkit.solve(
                satkit.Formula(db_to.num_vars, db_to.clauses + [(u,) for u in units_to]),
                conflict_budget=10_000,
            )
            if res.status != satkit.SAT or res.stats["conflicts"] != 0:
                print(f"FAIL: embedded encoding for s={s_to} not conflict-free satisfiable")
                return EXIT_FAIL
            print(f"embedded encoding for s={s_to}: satisfiable with 0 conflicts")
    print("dimension-8 verification: ok")
    return EXIT_OK


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    with open(args.manifest) as f:
        manifest = json.load(f)
    print(f"instance: {manifest.get('instance')}")
    print(f"cases: {len(manifest.get('cases', []))} of {manifest.get('case_count')}")
    by_status: dict[str, int] = {}
    for e in manifest.get("cases", []):
        by_status[e["status"]] = by_status.get(e["status"], 0) + 1
    for status, count in sorted(by_status.items()):
        print(f"  {status}: {count}")
    print(f"cover check passed: {manifest.get('cover_check_passed')}")
    print(f"binaries verified: {manifest.get('rat_binaries_verified')}")
    print(f"verdict: {manifest.get('verdict')}")
    bad = manifest.get("verdict") in ("check-failed", "counterexample-candidate")
    return EXIT_FAIL if bad else EXIT_OK


# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = _apply_config(list(argv) if argv is not None else sys.argv[1:], parser)
    handlers = {
        "encode": cmd_encode,
        "break": cmd_break,
        "solve": cmd_solve,
        "check": cmd_check,
        "trim": cmd_trim,
        "tile": cmd_tile,
        "verify-clique": cmd_verify_clique,
        "verify-dim8": cmd_verify_dim8,
        "report": cmd_report,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
