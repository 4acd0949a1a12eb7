"""Clausal proof checking and trimming.

Forward checking: every added clause must pass reverse unit propagation
(negate, propagate, expect a conflict) or, failing that, the pivot-resolvent
redundancy check on its first literal: every resolvent with a clause
containing the negated pivot must itself pass reverse unit propagation.
Deletions are applied as they appear; deleting a clause that currently
forces a root-level literal is skipped by default (honoring it would leave
the checker state stronger than the database) unless strict deletion mode
is requested, in which case the root trail is rewound and re-propagated.

Trimming: backward dependency analysis from the empty clause; only steps
whose clauses participate in some needed propagation conflict are kept.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Optional, Sequence, TextIO, Union

Clause = tuple[int, ...]


@dataclass(frozen=True)
class ProofStep:
    kind: str  # "a" or "d"
    lits: Clause

    def __post_init__(self) -> None:
        if self.kind not in ("a", "d"):
            raise ValueError(f"bad step kind {self.kind!r}")

    @property
    def pivot(self) -> Optional[int]:
        return self.lits[0] if self.lits else None


@dataclass
class CheckResult:
    accepted: bool
    reason: str = ""
    failed_step: Optional[int] = None
    steps_total: int = 0
    adds_checked: int = 0
    deletions_applied: int = 0
    deletions_skipped: int = 0
    rup_steps: int = 0
    rat_steps: int = 0
    empty_derived: bool = False
    seconds: float = 0.0

    def summary(self) -> dict:
        return {
            "accepted": self.accepted,
            "reason": self.reason,
            "failed_step": self.failed_step,
            "steps_total": self.steps_total,
            "adds_checked": self.adds_checked,
            "deletions_applied": self.deletions_applied,
            "deletions_skipped": self.deletions_skipped,
            "rup_steps": self.rup_steps,
            "rat_steps": self.rat_steps,
            "empty_derived": self.empty_derived,
            "seconds": round(self.seconds, 6),
        }


def _ix(l: int) -> int:
    return (l << 1) if l > 0 else ((-l << 1) | 1)


def _lit(il: int) -> int:
    v = il >> 1
    return -v if il & 1 else v


class CheckerDb:
    """Incremental clause database with root-level propagation and occurrence lists."""

    def __init__(self, num_vars: int):
        self.nv = num_vars
        self.val = [0] * (2 * num_vars + 2)
        self.watches: list[list[int]] = [[] for _ in range(2 * num_vars + 2)]
        # append-only occurrence lists; dead ids are filtered via `alive`
        self.occ: list[list[int]] = [[] for _ in range(2 * num_vars + 2)]
        self.clauses: list[Optional[list[int]]] = []
        self.alive: list[bool] = []
        self.by_key: dict[Clause, list[int]] = {}
        self.trail: list[int] = []
        self.reason: list[int] = [-1] * (num_vars + 1)  # cid, -1 = assumption or none
        self.qhead = 0
        self.root_len = 0  # trail prefix that is root-level
        self.root_conflict: Optional[int] = None  # cid falsified at root
        self.propagations = 0

    def ensure_vars(self, nv: int) -> None:
        if nv <= self.nv:
            return
        grow = nv - self.nv
        self.val.extend([0] * (2 * grow))
        self.reason.extend([-1] * grow)
        for _ in range(2 * grow):
            self.watches.append([])
            self.occ.append([])
        self.nv = nv

    # -- assignment helpers ---------------------------------------------------

    def _assign(self, il: int, reason_cid: int) -> None:
        self.val[il] = 1
        self.val[il ^ 1] = -1
        self.reason[il >> 1] = reason_cid
        self.trail.append(il)

    def _unassign_from(self, pos: int) -> None:
        for i in range(len(self.trail) - 1, pos - 1, -1):
            il = self.trail[i]
            self.val[il] = 0
            self.val[il ^ 1] = 0
            self.reason[il >> 1] = -1
        del self.trail[pos:]
        self.qhead = min(self.qhead, pos)

    # -- propagation -----------------------------------------------------------

    def propagate(self) -> Optional[int]:
        """Run to fixpoint; returns the cid of a falsified clause or None."""
        val = self.val
        watches = self.watches
        trail = self.trail
        clauses = self.clauses
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            fl = p ^ 1
            ws = watches[fl]
            i = 0
            end = len(ws)
            while i < end:
                cid = ws[i]
                cl = clauses[cid]
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
                        watches[lk].append(cid)
                        end -= 1
                        ws[i] = ws[end]
                        ws.pop()
                        found = True
                        break
                    k += 1
                if found:
                    continue
                if val[w0] < 0:
                    self.qhead = len(trail)
                    return cid
                self._assign(w0, cid)
                i += 1
        return None

    def propagate_root(self) -> None:
        if self.root_conflict is not None:
            return
        confl = self.propagate()
        self.root_len = len(self.trail)
        if confl is not None:
            self.root_conflict = confl

    # -- clause management ------------------------------------------------------

    def add_clause(self, lits: Iterable[int]) -> int:
        lits = tuple(lits)
        if lits:
            self.ensure_vars(max(abs(l) for l in lits))
        ils: list[int] = []
        present = set()
        for l in lits:
            il = _ix(l)
            if il not in present:
                present.add(il)
                ils.append(il)
        cid = len(self.clauses)
        self.clauses.append(ils)
        self.alive.append(True)
        key = tuple(sorted(_lit(il) for il in ils))
        self.by_key.setdefault(key, []).append(cid)

        for il in ils:
            self.occ[il].append(cid)

        if not ils:
            if self.root_conflict is None:
                self.root_conflict = cid
            return cid
        if len(ils) == 1:
            il = ils[0]
            if self.val[il] < 0:
                if self.root_conflict is None:
                    self.root_conflict = cid
            elif self.val[il] == 0:
                self._assign(il, cid)
                self.propagate_root()
            return cid

        # prefer non-false watches; if at most one exists the clause propagates
        nonfalse = [il for il in ils if self.val[il] >= 0]
        if len(nonfalse) >= 2:
            a, b = nonfalse[0], nonfalse[1]
        elif len(nonfalse) == 1:
            a = nonfalse[0]
            b = next(il for il in ils if il != a)
        else:
            a, b = ils[0], ils[1]
        ia, ib = ils.index(a), ils.index(b)
        ils[0], ils[ia] = ils[ia], ils[0]
        ib = ils.index(b)
        ils[1], ils[ib] = ils[ib], ils[1]
        self.watches[ils[0]].append(cid)
        self.watches[ils[1]].append(cid)

        if len(nonfalse) == 0:
            if self.root_conflict is None:
                self.root_conflict = cid
        elif len(nonfalse) == 1 and self.val[nonfalse[0]] == 0:
            self._assign(nonfalse[0], cid)
            self.propagate_root()
        return cid

    def find_clause(self, lits: Iterable[int]) -> Optional[int]:
        key = tuple(sorted(set(lits)))
        for cid in reversed(self.by_key.get(key, ())):
            if self.alive[cid]:
                return cid
        return None

    def is_root_reason(self, cid: int) -> bool:
        cl = self.clauses[cid]
        return any(self.val[w] > 0 and self.reason[w >> 1] == cid for w in cl[:2])

    def remove_clause(self, cid: int) -> None:
        """Detach a clause; rewinds and re-propagates if it forced a root literal."""
        cl = self.clauses[cid]
        self.alive[cid] = False
        key = tuple(sorted(_lit(il) for il in cl))
        self.by_key[key].remove(cid)
        if len(cl) >= 2:
            self.watches[cl[0]].remove(cid)
            self.watches[cl[1]].remove(cid)
        # rewind any root assignment this clause was responsible for
        pos = None
        if any(self.reason[w >> 1] == cid for w in cl[:2]):
            for i in range(len(self.trail)):
                il = self.trail[i]
                if self.reason[il >> 1] == cid:
                    pos = i
                    break
        if pos is not None:
            self._unassign_from(pos)
            self.qhead = 0
            self.root_conflict = None
            self.propagate_root()
        elif self.root_conflict == cid:
            self.root_conflict = None
            self.qhead = 0
            self.propagate_root()

    def restore_clause(self, cid: int) -> None:
        """Re-attach a previously removed clause (used by backward trimming)."""
        cl = self.clauses[cid]
        self.alive[cid] = True
        key = tuple(sorted(_lit(il) for il in cl))
        self.by_key.setdefault(key, []).append(cid)
        if not cl:
            if self.root_conflict is None:
                self.root_conflict = cid
            return
        if len(cl) == 1:
            il = cl[0]
            if self.val[il] < 0 and self.root_conflict is None:
                self.root_conflict = cid
            elif self.val[il] == 0:
                self._assign(il, cid)
                self.propagate_root()
            return
        self.watches[cl[0]].append(cid)
        self.watches[cl[1]].append(cid)
        nonfalse = [il for il in cl if self.val[il] >= 0]
        if not nonfalse:
            if self.root_conflict is None:
                self.root_conflict = cid
        elif len(nonfalse) == 1 and self.val[nonfalse[0]] == 0:
            # the propagating literal must sit in slot 0 (reason convention)
            il = nonfalse[0]
            if cl[1] == il:
                cl[0], cl[1] = cl[1], cl[0]
            elif cl[0] != il:
                k = cl.index(il)
                self.watches[cl[0]].remove(cid)
                cl[0], cl[k] = cl[k], cl[0]
                self.watches[cl[0]].append(cid)
            self._assign(il, cid)
            self.propagate_root()

    # -- dependency collection ----------------------------------------------------

    def _collect_deps(self, conflict_cid: int) -> set[int]:
        """Clause ids participating in the conflict, tracing reasons transitively."""
        used = {conflict_cid}
        seen = bytearray(self.nv + 1)
        stack = list(self.clauses[conflict_cid])
        while stack:
            il = stack.pop()
            v = il >> 1
            if seen[v]:
                continue
            seen[v] = 1
            cid = self.reason[v]
            if cid >= 0:
                used.add(cid)
                stack.extend(self.clauses[cid])
        return used

    # -- redundancy checks -----------------------------------------------------------

    def rup(self, lits: Sequence[int], track: bool = False) -> tuple[bool, set[int]]:
        """Does propagating the negation of the clause yield a conflict?"""
        if lits:
            self.ensure_vars(max(abs(l) for l in lits))
        if self.root_conflict is not None:
            deps = self._collect_deps(self.root_conflict) if track else set()
            return True, deps
        mark = len(self.trail)
        qmark = self.qhead
        conflict_cid = None
        trivial_lit = None
        for l in lits:
            il = _ix(l)
            if self.val[il] > 0:
                trivial_lit = il  # clause satisfied at root: negation contradicts trail
                break
            if self.val[il] == 0:
                self._assign(il ^ 1, -1)
        if trivial_lit is not None:
            deps: set[int] = set()
            if track:
                cid = self.reason[trivial_lit >> 1]
                if cid >= 0:
                    deps = self._collect_deps(cid)
            self._unassign_from(mark)
            self.qhead = qmark
            return True, deps
        conflict_cid = self.propagate()
        ok = conflict_cid is not None
        deps = set()
        if ok and track:
            deps = self._collect_deps(conflict_cid)
        self._unassign_from(mark)
        self.qhead = qmark
        return ok, deps

    def rat(self, lits: Sequence[int], track: bool = False) -> tuple[bool, set[int], bool]:
        """RUP-or-pivot-resolvent check; returns (ok, deps, used_rat)."""
        ok, deps = self.rup(lits, track)
        if ok:
            return True, deps, False
        if not lits:
            return False, set(), False
        pivot = lits[0]
        neg_occ = self.occ[_ix(-pivot)]
        all_deps: set[int] = set()
        rest = [l for l in lits if l != pivot]
        rest_set = set(rest)
        for cid in neg_occ:
            if not self.alive[cid]:
                continue
            d = [_lit(il) for il in self.clauses[cid]]
            tautology = False
            resolvent = list(rest)
            for l in d:
                if l == -pivot:
                    continue
                if -l in rest_set or -l in resolvent:
                    tautology = True
                    break
                resolvent.append(l)
            if tautology:
                continue
            ok, deps = self.rup(resolvent, track)
            if not ok:
                return False, set(), True
            all_deps |= deps
            all_deps.add(cid)
        return True, all_deps, True


# ---------------------------------------------------------------------------
# Public checking API


def _clauses_of(formula) -> tuple[int, list[Clause]]:
    if hasattr(formula, "clauses") and hasattr(formula, "num_vars"):
        return formula.num_vars, list(formula.clauses)
    clauses = [tuple(c) for c in formula]
    nv = max((abs(l) for c in clauses for l in c), default=0)
    return nv, clauses


def build_db(formula, extra_vars: int = 0) -> CheckerDb:
    nv, clauses = _clauses_of(formula)
    db = CheckerDb(nv + extra_vars)
    for c in clauses:
        db.add_clause(c)
    db.propagate_root()
    return db


def check_rup(clause: Sequence[int], db: CheckerDb) -> bool:
    ok, _ = db.rup(tuple(clause))
    return ok


def check_rat(clause: Sequence[int], db: CheckerDb, pivot: Optional[int] = None) -> bool:
    clause = tuple(clause)
    if pivot is None:
        if not clause:
            return check_rup(clause, db)
        pivot = clause[0]
    if clause and pivot not in clause:
        raise ValueError(f"pivot {pivot} not in clause {clause!r}")
    ordered = (pivot,) + tuple(l for l in clause if l != pivot) if clause else clause
    ok, _, _ = db.rat(ordered)
    return ok


def check_proof(
    formula,
    proof: Union[Sequence[ProofStep], str],
    strict_deletions: bool = False,
    require_empty: bool = True,
) -> CheckResult:
    """Forward-check a clausal proof against a formula."""
    t0 = time.monotonic()
    steps = load_proof(proof) if isinstance(proof, str) else list(proof)
    nv, clauses = _clauses_of(formula)
    for st in steps:
        for l in st.lits:
            nv = max(nv, abs(l))
    db = CheckerDb(nv)
    for c in clauses:
        db.add_clause(c)
    db.propagate_root()

    res = CheckResult(accepted=False, steps_total=len(steps))
    for t, st in enumerate(steps):
        if st.kind == "d":
            cid = db.find_clause(st.lits)
            if cid is None:
                res.deletions_skipped += 1
                continue
            cl = db.clauses[cid]
            if not strict_deletions and (len(cl) <= 1 or db.is_root_reason(cid)):
                res.deletions_skipped += 1
                continue
            db.remove_clause(cid)
            res.deletions_applied += 1
            continue
        ok, _ = db.rup(st.lits)
        if ok:
            res.rup_steps += 1
        else:
            ok, _, _ = db.rat(st.lits)
            if ok:
                res.rat_steps += 1
        if not ok:
            res.reason = f"step {t}: clause {st.lits!r} is neither propagation-implied nor pivot-redundant"
            res.failed_step = t
            res.seconds = time.monotonic() - t0
            return res
        res.adds_checked += 1
        if not st.lits:
            res.empty_derived = True
            break
        db.add_clause(st.lits)

    if require_empty and not res.empty_derived:
        res.reason = "proof ends without the empty clause"
        res.seconds = time.monotonic() - t0
        return res
    res.accepted = True
    res.reason = "ok"
    res.seconds = time.monotonic() - t0
    return res


@dataclass
class TrimStats:
    original_steps: int
    trimmed_steps: int
    marked_adds: int
    core_inputs: int


def trim(
    formula,
    proof: Union[Sequence[ProofStep], str],
    strict_deletions: bool = False,
) -> tuple[list[ProofStep], TrimStats]:
    """Backward-trim an accepted proof to the steps needed for the empty clause."""
    steps = load_proof(proof) if isinstance(proof, str) else list(proof)
    pre = check_proof(formula, steps, strict_deletions=strict_deletions)
    if not pre.accepted:
        raise ValueError(f"refusing to trim an invalid proof: {pre.reason}")

    nv, clauses = _clauses_of(formula)
    for st in steps:
        for l in st.lits:
            nv = max(nv, abs(l))
    db = CheckerDb(nv)
    input_cids = set()
    for c in clauses:
        input_cids.add(db.add_clause(c))
    db.propagate_root()

    # forward replay (no checking): map step -> cid, find first empty add
    step_cid: dict[int, int] = {}
    deleted_at: dict[int, int] = {}  # step index -> cid it removed
    empty_at = None
    for t, st in enumerate(steps):
        if st.kind == "d":
            cid = db.find_clause(st.lits)
            if cid is None:
                continue
            cl = db.clauses[cid]
            if not strict_deletions and (len(cl) <= 1 or db.is_root_reason(cid)):
                continue
            db.remove_clause(cid)
            deleted_at[t] = cid
            continue
        if not st.lits:
            empty_at = t
            break
        step_cid[t] = db.add_clause(st.lits)
    assert empty_at is not None  # guaranteed by the pre-check

    cid_step = {cid: t for t, cid in step_cid.items()}
    marked_steps: set[int] = {empty_at}
    any_rat = False

    def mark(deps: set[int]) -> None:
        for cid in deps:
            if cid in cid_step:
                marked_steps.add(cid_step[cid])
            # input clauses contribute to the core but are always present

    # the empty clause at step empty_at: conflict of the db state right before it
    ok, deps = db.rup((), track=True)
    assert ok
    core_deps = set(deps)
    mark(deps)

    for t in range(empty_at - 1, -1, -1):
        st = steps[t]
        if st.kind == "d":
            if t in deleted_at:
                db.restore_clause(deleted_at[t])
            continue
        cid = step_cid[t]
        db.remove_clause(cid)
        if t not in marked_steps:
            continue
        ok, deps = db.rup(st.lits, track=True)
        if not ok:
            ok, deps, used_rat = db.rat(st.lits, track=True)
            assert ok, f"step {t} no longer checks during trimming"
            if used_rat:
                any_rat = True
        core_deps |= deps
        mark(deps)

    out: list[ProofStep] = []
    for t in range(empty_at):
        st = steps[t]
        if st.kind == "a" and t in marked_steps:
            out.append(st)
        elif st.kind == "d" and any_rat:
            # with pivot-redundancy steps present, deletions must be preserved
            # so later occurrence lists stay a subset of the originals
            out.append(st)
    out.append(ProofStep("a", ()))

    stats = TrimStats(
        original_steps=len(steps),
        trimmed_steps=len(out),
        marked_adds=sum(1 for st in out if st.kind == "a"),
        core_inputs=len(core_deps & input_cids),
    )
    return out, stats


# ---------------------------------------------------------------------------
# Proof file formats


def parse_drat_text(text: str) -> list[ProofStep]:
    steps: list[ProofStep] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        kind = "a"
        if line.startswith("d ") or line == "d":
            kind = "d"
            line = line[1:]
        toks = line.split()
        try:
            lits = [int(x) for x in toks]
        except ValueError:
            raise ValueError(f"proof line {lineno}: bad literal in {raw!r}") from None
        if not lits or lits[-1] != 0:
            raise ValueError(f"proof line {lineno}: missing terminating 0")
        steps.append(ProofStep(kind, tuple(lits[:-1])))
    return steps


def parse_drat_binary(data: bytes) -> list[ProofStep]:
    steps: list[ProofStep] = []
    i = 0
    n = len(data)
    while i < n:
        tag = data[i]
        i += 1
        if tag == 0x61:
            kind = "a"
        elif tag == 0x64:
            kind = "d"
        else:
            raise ValueError(f"byte {i - 1}: bad step tag 0x{tag:02x}")
        lits: list[int] = []
        while True:
            u = 0
            shift = 0
            while True:
                if i >= n:
                    raise ValueError("truncated binary proof")
                b = data[i]
                i += 1
                u |= (b & 0x7F) << shift
                shift += 7
                if not b & 0x80:
                    break
            if u == 0:
                break
            lits.append(-(u >> 1) if u & 1 else (u >> 1))
        steps.append(ProofStep(kind, tuple(lits)))
    return steps


def write_drat_text(steps: Iterable[ProofStep], f: TextIO) -> None:
    for st in steps:
        prefix = "d " if st.kind == "d" else ""
        f.write(prefix + " ".join(map(str, st.lits)) + " 0\n")


def _varint(u: int) -> bytes:
    out = bytearray()
    while u >= 0x80:
        out.append((u & 0x7F) | 0x80)
        u >>= 7
    out.append(u)
    return bytes(out)


def write_drat_binary(steps: Iterable[ProofStep], f: BinaryIO) -> None:
    for st in steps:
        f.write(b"a" if st.kind == "a" else b"d")
        for l in st.lits:
            u = (abs(l) << 1) | (l < 0)
            f.write(_varint(u))
        f.write(b"\x00")


def load_proof(path: str) -> list[ProofStep]:
    """Load a proof file, sniffing text vs binary (binary contains NUL bytes)."""
    with open(path, "rb") as f:
        data = f.read()
    if b"\x00" in data[:4096] or (data and data[:1] == b"a"):
        return parse_drat_binary(data)
    return parse_drat_text(data.decode("ascii"))
