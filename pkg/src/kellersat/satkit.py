"""DIMACS parsing, unit propagation, and a CDCL solver with clausal proof output.

The solver is a straightforward two-watched-literal CDCL: first-UIP learning
with basic clause minimization, exponential VSIDS, phase saving, Luby
restarts (base interval 64), and LBD-ordered deletion of half the learned
clauses whenever the limit is hit.  Every learned clause and every deletion
is appended to a DRAT stream.  Cubes are solved as assumptions placed as
root-level decisions, so learned clauses never depend on the cube and the
final step derives the negated assumption core before the empty clause.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

Clause = tuple[int, ...]


class DimacsParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class Formula:
    num_vars: int
    clauses: list[Clause] = field(default_factory=list)
    cubes: list[Clause] = field(default_factory=list)  # from `a` lines of incremental files

    def check(self) -> None:
        for c in self.clauses + self.cubes:
            for l in c:
                if l == 0 or abs(l) > self.num_vars:
                    raise ValueError(f"literal {l} out of range in {c!r}")


def parse_dimacs(text: str | bytes, strict: bool = False) -> Formula:
    """Parse standard DIMACS or incremental (`p inccnf`) input with cube lines."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    num_vars = 0
    declared_clauses: Optional[int] = None
    inccnf = False
    saw_header = False
    clauses: list[Clause] = []
    cubes: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) >= 2 and parts[1] == "inccnf":
                inccnf = True
                saw_header = True
                continue
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsParseError(lineno, f"bad problem line {line!r}")
            try:
                num_vars = int(parts[2])
                declared_clauses = int(parts[3])
            except ValueError:
                raise DimacsParseError(lineno, f"bad counts in {line!r}") from None
            saw_header = True
            continue
        is_cube = False
        body = line
        if line.startswith("a ") or line == "a":
            if not inccnf and strict:
                raise DimacsParseError(lineno, "cube line outside an incremental file")
            is_cube = True
            body = line[1:]
        try:
            lits = [int(tok) for tok in body.split()]
        except ValueError:
            raise DimacsParseError(lineno, f"bad literal in {line!r}") from None
        if not lits or lits[-1] != 0:
            raise DimacsParseError(lineno, "clause line must end with 0")
        if any(l == 0 for l in lits[:-1]):
            raise DimacsParseError(lineno, "literal 0 inside clause")
        c = tuple(lits[:-1])
        for l in c:
            num_vars = max(num_vars, abs(l))
        if is_cube:
            cubes.append(c)
        else:
            clauses.append(c)
    if strict:
        if not saw_header:
            raise DimacsParseError(0, "missing problem line")
        if declared_clauses is not None and declared_clauses != len(clauses):
            raise DimacsParseError(
                0, f"header declares {declared_clauses} clauses, found {len(clauses)}"
            )
    return Formula(num_vars=num_vars, clauses=clauses, cubes=cubes)


def parse_dimacs_file(path: str | os.PathLike, strict: bool = False) -> Formula:
    with open(path, "rb") as f:
        return parse_dimacs(f.read(), strict=strict)


def write_dimacs(f: TextIO, formula: Formula, comments: Sequence[str] = ()) -> None:
    for line in comments:
        f.write(f"c {line}\n")
    f.write(f"p cnf {formula.num_vars} {len(formula.clauses)}\n")
    for c in formula.clauses:
        f.write(" ".join(map(str, c)) + " 0\n")


def write_icnf(f: TextIO, clauses: Iterable[Clause], cubes: Iterable[Clause],
               comments: Sequence[str] = ()) -> None:
    for line in comments:
        f.write(f"c {line}\n")
    f.write("p inccnf\n")
    for c in clauses:
        f.write(" ".join(map(str, c)) + " 0\n")
    for cube in cubes:
        f.write("a " + " ".join(map(str, cube)) + " 0\n")


# ---------------------------------------------------------------------------
# Solver


SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"


@dataclass
class SolveResult:
    status: str
    model: Optional[list[bool]] = None  # indexed by variable, entry 0 unused
    # literals of the negated-assumption core clause (UNSAT under a cube)
    failed_assumptions: Optional[list[int]] = None
    stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        assert self.status in (SAT, UNSAT, UNKNOWN)


@dataclass
class PropagationResult:
    conflict: Optional[Clause]
    assignment: dict[int, bool]
    propagations: int


def _lit_idx(l: int) -> int:
    return (l << 1) if l > 0 else ((-l << 1) | 1)


def _idx_lit(il: int) -> int:
    v = il >> 1
    return -v if il & 1 else v


class _VarHeap:
    """Max-heap over variables ordered by activity, ties by variable index."""

    def __init__(self, acts: list[float], nvars: int):
        self.acts = acts
        self.heap: list[int] = []
        self.pos = [-1] * (nvars + 1)

    def _lt(self, u: int, v: int) -> bool:
        au, av = self.acts[u], self.acts[v]
        return au > av or (au == av and u < v)

    def _up(self, i: int) -> None:
        heap, pos = self.heap, self.pos
        v = heap[i]
        while i > 0:
            p = (i - 1) >> 1
            if self._lt(v, heap[p]):
                heap[i] = heap[p]
                pos[heap[p]] = i
                i = p
            else:
                break
        heap[i] = v
        pos[v] = i

    def _down(self, i: int) -> None:
        heap, pos = self.heap, self.pos
        v = heap[i]
        n = len(heap)
        while True:
            l = 2 * i + 1
            if l >= n:
                break
            r = l + 1
            c = r if r < n and self._lt(heap[r], heap[l]) else l
            if self._lt(heap[c], v):
                heap[i] = heap[c]
                pos[heap[c]] = i
                i = c
            else:
                break
        heap[i] = v
        pos[v] = i

    def push(self, v: int) -> None:
        if self.pos[v] >= 0:
            return
        self.heap.append(v)
        self.pos[v] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def pop(self) -> int:
        heap, pos = self.heap, self.pos
        top = heap[0]
        last = heap.pop()
        pos[top] = -1
        if heap:
            heap[0] = last
            pos[last] = 0
            self._down(0)
        return top

    def bumped(self, v: int) -> None:
        if self.pos[v] >= 0:
            self._up(self.pos[v])

    def __bool__(self) -> bool:
        return bool(self.heap)


class Solver:
    def __init__(
        self,
        formula: Formula,
        seed: int = 0,
        proof_file: Optional[TextIO] = None,
    ):
        import random

        self.nv = formula.num_vars
        nv = self.nv
        self.proof = proof_file
        self.val = [0] * (2 * nv + 2)  # by literal index: 0 unknown, 1 true, -1 false
        self.level = [0] * (nv + 1)
        self.reason: list[Optional[list[int]]] = [None] * (nv + 1)
        self.trail: list[int] = []  # literal indices
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * nv + 2)]
        self.phase = [False] * (nv + 1)
        rng = random.Random(seed)
        self.activity = [rng.random() * 1e-9 for _ in range(nv + 1)]
        self.var_inc = 1.0
        self.heap = _VarHeap(self.activity, nv)
        self.lbd_of: dict[int, int] = {}
        self.learned: list[list[int]] = []
        self.learned_idx: dict[int, int] = {}
        self.learned_counter = 0
        self.max_learnts = 4000
        self.ok = True
        self.stats = {
            "conflicts": 0,
            "decisions": 0,
            "propagations": 0,
            "restarts": 0,
            "learned": 0,
            "deleted": 0,
        }
        self._seen = bytearray(nv + 1)

        for c in formula.clauses:
            if not self._add_input_clause(c):
                self.ok = False
                break
        if self.ok and self._propagate() is not None:
            self.ok = False
        for v in range(1, nv + 1):
            self.heap.push(v)

    # -- clause handling ----------------------------------------------------

    def _add_input_clause(self, c: Clause) -> bool:
        seen = {}
        lits = []
        for l in c:
            il = _lit_idx(l)
            if il ^ 1 in seen:
                return True  # tautology, always satisfied
            if il not in seen:
                seen[il] = True
                lits.append(il)
        if not lits:
            if self.proof:
                self.proof.write("0\n")
            return False
        if len(lits) == 1:
            return self._enqueue(lits[0], None)
        cl = lits
        self.watches[cl[0]].append(cl)
        self.watches[cl[1]].append(cl)
        return True

    def _attach_learned(self, cl: list[int], lbd: int) -> None:
        self.watches[cl[0]].append(cl)
        self.watches[cl[1]].append(cl)
        self.lbd_of[id(cl)] = lbd
        self.learned.append(cl)
        self.learned_idx[id(cl)] = self.learned_counter
        self.learned_counter += 1

    def _enqueue(self, il: int, reason: Optional[list[int]]) -> bool:
        val = self.val
        if val[il] > 0:
            return True
        if val[il] < 0:
            return False
        val[il] = 1
        val[il ^ 1] = -1
        v = il >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(il)
        return True

    # -- propagation ---------------------------------------------------------

    def _propagate(self) -> Optional[list[int]]:
        val = self.val
        watches = self.watches
        trail = self.trail
        props = 0
        confl: Optional[list[int]] = None
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            fl = p ^ 1
            ws = watches[fl]
            i = 0
            end = len(ws)
            while i < end:
                cl = ws[i]
                if cl[0] == fl:
                    cl[0] = cl[1]
                    cl[1] = fl
                w0 = cl[0]
                if val[w0] > 0:
                    i += 1
                    continue
                found = False
                k = 2
                n = len(cl)
                while k < n:
                    lk = cl[k]
                    if val[lk] >= 0:
                        cl[1] = lk
                        cl[k] = fl
                        watches[lk].append(cl)
                        end -= 1
                        ws[i] = ws[end]
                        ws.pop()
                        found = True
                        break
                    k += 1
                if found:
                    continue
                if val[w0] < 0:
                    confl = cl
                    self.qhead = len(trail)
                    break
                # unit
                val[w0] = 1
                val[w0 ^ 1] = -1
                v = w0 >> 1
                self.level[v] = len(self.trail_lim)
                self.reason[v] = cl
                trail.append(w0)
                i += 1
            if confl is not None:
                break
        self.stats["propagations"] += props
        return confl

    # -- conflict analysis ----------------------------------------------------

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            inv = 1e-100
            acts = self.activity
            for u in range(len(acts)):
                acts[u] *= inv
            self.var_inc *= inv
        self.heap.bumped(v)

    def _analyze(self, confl: list[int]) -> tuple[list[int], int, int]:
        """Returns (learned clause as literal indices, backjump level, lbd)."""
        seen = self._seen
        level = self.level
        reason = self.reason
        trail = self.trail
        cur_level = len(self.trail_lim)
        learnt: list[int] = [0]  # slot for the asserting literal
        counter = 0
        first = True
        idx = len(trail) - 1
        cleanup = []
        c: Optional[list[int]] = confl
        while True:
            assert c is not None
            # reason clauses carry their implied literal in slot 0; skip it
            for q in (c if first else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    cleanup.append(v)
                    self._bump(v)
                    if level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            first = False
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[p >> 1] = 0
            counter -= 1
            if counter == 0:
                break
            c = reason[p >> 1]
        learnt[0] = p ^ 1

        # basic minimization: a literal whose reason lies inside the clause is implied
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is not None and all(seen[l >> 1] or level[l >> 1] == 0 for l in r[1:]):
                continue
            keep.append(q)
        learnt = keep

        for v in cleanup:
            seen[v] = 0
        if len(learnt) == 1:
            bt = 0
        else:
            # move the highest-level literal (below cur) to position 1
            max_i = 1
            for i in range(2, len(learnt)):
                if level[learnt[i] >> 1] > level[learnt[max_i] >> 1]:
                    max_i = i
            learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
            bt = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, bt, lbd

    def _analyze_final(self, start_lits: Iterable[int]) -> list[int]:
        """Negated-assumption core from a conflict touching the assumption prefix."""
        seen = self._seen
        out: list[int] = []
        cleanup = []
        stack = [q for q in start_lits]
        for q in stack:
            v = q >> 1
            if self.level[v] > 0 and not seen[v]:
                seen[v] = 1
                cleanup.append(v)
        for il in reversed(self.trail):
            v = il >> 1
            if not seen[v]:
                continue
            r = self.reason[v]
            if r is None:
                out.append(il ^ 1)  # negation of the assumption decision
            else:
                for q in r:
                    u = q >> 1
                    if u != v and self.level[u] > 0 and not seen[u]:
                        seen[u] = 1
                        cleanup.append(u)
            seen[v] = 0
        for v in cleanup:
            seen[v] = 0
        return out

    # -- backtracking -----------------------------------------------------------

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        val = self.val
        bound = self.trail_lim[lvl]
        for i in range(len(self.trail) - 1, bound - 1, -1):
            il = self.trail[i]
            v = il >> 1
            self.phase[v] = not (il & 1)
            val[il] = 0
            val[il ^ 1] = 0
            self.reason[v] = None
            self.heap.push(v)
        del self.trail[bound:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    # -- clause deletion -----------------------------------------------------

    def _reduce_db(self) -> None:
        locked = set()
        for il in self.trail:
            r = self.reason[il >> 1]
            if r is not None:
                locked.add(id(r))
        cands = [cl for cl in self.learned if id(cl) not in locked and len(cl) > 2]
        cands.sort(key=lambda cl: (self.lbd_of[id(cl)], -self.learned_idx[id(cl)]))
        drop = cands[len(cands) // 2 :]
        dropped = set(map(id, drop))
        if not drop:
            self.max_learnts += 300
            return
        for cl in drop:
            self.watches[cl[0]].remove(cl)
            self.watches[cl[1]].remove(cl)
            if self.proof:
                self.proof.write("d " + " ".join(str(_idx_lit(l)) for l in cl) + " 0\n")
            self.lbd_of.pop(id(cl), None)
            self.learned_idx.pop(id(cl), None)
        self.learned = [cl for cl in self.learned if id(cl) not in dropped]
        self.stats["deleted"] += len(drop)
        self.max_learnts += 300

    # -- main loop -------------------------------------------------------------

    def solve(
        self,
        assumptions: Sequence[int] = (),
        conflict_budget: Optional[int] = 10_000_000,
        wall_budget: Optional[float] = None,
    ) -> SolveResult:
        t0 = time.monotonic()
        if not self.ok:
            if self.proof:
                self.proof.write("0\n")
            self.stats["seconds"] = time.monotonic() - t0
            return SolveResult(UNSAT, failed_assumptions=[], stats=dict(self.stats))

        assume_idx = [_lit_idx(a) for a in assumptions]
        restart_count = 0
        conflicts_until_restart = 64 * _luby(1)
        start_conflicts = self.stats["conflicts"]

        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                conflicts_until_restart -= 1
                if len(self.trail_lim) == 0:
                    if self.proof:
                        self.proof.write("0\n")
                    self.stats["seconds"] = time.monotonic() - t0
                    return SolveResult(UNSAT, failed_assumptions=[], stats=dict(self.stats))
                if len(self.trail_lim) <= len(assume_idx):
                    # conflict inside the assumption prefix: the cube itself fails
                    core = self._analyze_final(confl)
                    self._finish_unsat_under_assumptions(core)
                    self.stats["seconds"] = time.monotonic() - t0
                    return SolveResult(
                        UNSAT,
                        failed_assumptions=[_idx_lit(il) for il in core],
                        stats=dict(self.stats),
                    )
                learnt, bt, lbd = self._analyze(confl)
                self.var_inc /= 0.95
                self._cancel_until(bt)
                if self.proof:
                    self.proof.write(" ".join(str(_idx_lit(l)) for l in learnt) + " 0\n")
                self.stats["learned"] += 1
                if len(learnt) == 1:
                    if not self._enqueue(learnt[0], None):
                        if self.proof:
                            self.proof.write("0\n")
                        self.stats["seconds"] = time.monotonic() - t0
                        return SolveResult(UNSAT, failed_assumptions=[], stats=dict(self.stats))
                else:
                    cl = learnt
                    self._attach_learned(cl, lbd)
                    self._enqueue(cl[0], cl)
                if conflict_budget is not None and (
                    self.stats["conflicts"] - start_conflicts
                ) >= conflict_budget:
                    self.stats["seconds"] = time.monotonic() - t0
                    return SolveResult(UNKNOWN, stats=dict(self.stats))
                if wall_budget is not None and self.stats["conflicts"] % 256 == 0:
                    if time.monotonic() - t0 > wall_budget:
                        self.stats["seconds"] = time.monotonic() - t0
                        return SolveResult(UNKNOWN, stats=dict(self.stats))
                continue

            if len(self.learned) >= self.max_learnts:
                self._reduce_db()

            if conflicts_until_restart <= 0 and len(self.trail_lim) > len(assume_idx):
                restart_count += 1
                self.stats["restarts"] += 1
                conflicts_until_restart = 64 * _luby(restart_count + 1)
                self._cancel_until(len(assume_idx))
                continue

            # place pending assumptions, then decide
            il = -1
            while len(self.trail_lim) < len(assume_idx):
                a = assume_idx[len(self.trail_lim)]
                v = self.val[a]
                if v > 0:
                    self.trail_lim.append(len(self.trail))  # hold the level open
                    continue
                if v < 0:
                    core = self._analyze_final([a ^ 1])
                    core.insert(0, a ^ 1)
                    # dedupe while keeping order
                    seen = set()
                    core = [q for q in core if not (q in seen or seen.add(q))]
                    self._finish_unsat_under_assumptions(core)
                    self.stats["seconds"] = time.monotonic() - t0
                    return SolveResult(
                        UNSAT,
                        failed_assumptions=[_idx_lit(q) for q in core],
                        stats=dict(self.stats),
                    )
                il = a
                break
            if il == -1:
                heap = self.heap
                while heap:
                    v = heap.pop()
                    if self.val[v << 1] == 0:
                        il = (v << 1) | (0 if self.phase[v] else 1)
                        break
                if il == -1:
                    model = self._extract_model()
                    self.stats["seconds"] = time.monotonic() - t0
                    return SolveResult(SAT, model=model, stats=dict(self.stats))
                self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(il, None)

    def _finish_unsat_under_assumptions(self, core: list[int]) -> None:
        if self.proof:
            if core:
                self.proof.write(" ".join(str(_idx_lit(l)) for l in core) + " 0\n")
            self.proof.write("0\n")

    def _extract_model(self) -> list[bool]:
        model = [False] * (self.nv + 1)
        for v in range(1, self.nv + 1):
            model[v] = self.val[v << 1] > 0
        return model

    def verify_model(self, formula: Formula, model: list[bool]) -> bool:
        for c in formula.clauses:
            if not any(model[l] if l > 0 else not model[-l] for l in c):
                return False
        return True


def _luby(i: int) -> int:
    """Luby sequence value for 1-based index i: 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    x = i - 1
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return 1 << seq


def solve(
    formula: Formula,
    assumptions: Sequence[int] = (),
    conflict_budget: Optional[int] = 10_000_000,
    wall_budget: Optional[float] = None,
    seed: int = 0,
    proof_file: Optional[TextIO] = None,
) -> SolveResult:
    """Solve, optionally under a cube of assumptions, logging a DRAT proof.

    On SAT the model is re-verified against every clause before returning.
    On UNSAT under assumptions the proof ends with the negated assumption
    core (derivable from the formula alone) followed by the empty clause,
    so the stream checks against formula plus cube units.
    """
    formula.check()
    solver = Solver(formula, seed=seed, proof_file=proof_file)
    result = solver.solve(
        assumptions=assumptions, conflict_budget=conflict_budget, wall_budget=wall_budget
    )
    if result.status == SAT:
        assert solver.verify_model(formula, result.model), "model failed re-verification"
        for a in assumptions:
            assert result.model[a] if a > 0 else not result.model[-a]
    return result


def propagate(formula: Formula, units: Sequence[int] = ()) -> PropagationResult:
    """Least fixpoint of unit propagation over formula plus the given units."""
    formula.check()
    solver = Solver(formula, seed=0, proof_file=None)
    conflict: Optional[Clause] = None
    if not solver.ok:
        conflict = ()
    else:
        for u in units:
            il = _lit_idx(u)
            if solver.val[il] < 0:
                conflict = (u,)
                break
            solver._enqueue(il, None)
        if conflict is None:
            confl = solver._propagate()
            if confl is not None:
                conflict = tuple(_idx_lit(l) for l in confl)
    assignment = {il >> 1: not (il & 1) for il in solver.trail}
    return PropagationResult(
        conflict=conflict, assignment=assignment, propagations=solver.stats["propagations"]
    )


# ---------------------------------------------------------------------------
# Case export


def export_cases(
    formula_clauses: Sequence[Clause],
    num_vars: int,
    cases: Sequence,
    directory: str | os.PathLike,
    indices: Optional[Sequence[int]] = None,
) -> dict:
    """Write one DIMACS file per selected case (formula plus cube units).

    Returns the manifest (also written to ``manifest.json``): per-case file
    names and content checksums, stable across runs.
    """
    os.makedirs(directory, exist_ok=True)
    chosen = list(indices) if indices is not None else list(range(len(cases)))
    entries = []
    for idx in chosen:
        cube = cases[idx]
        lits = cube.literals if hasattr(cube, "literals") else tuple(cube)
        name = f"case_{idx:05d}.cnf"
        path = os.path.join(directory, name)
        buf = io.StringIO()
        buf.write(f"p cnf {num_vars} {len(formula_clauses) + len(lits)}\n")
        for c in formula_clauses:
            buf.write(" ".join(map(str, c)) + " 0\n")
        for l in lits:
            buf.write(f"{l} 0\n")
        data = buf.getvalue().encode("ascii")
        with open(path, "wb") as f:
            f.write(data)
        entries.append(
            {"case_index": idx, "file": name, "sha256": hashlib.sha256(data).hexdigest()}
        )
    manifest = {"case_count": len(entries), "cases": entries}
    with open(os.path.join(directory, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest
