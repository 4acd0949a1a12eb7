"""Symmetry breaking and case enumeration for the 7-dimensional instances.

Three fixed vertices (19 unit clauses) normalize the search.  The remaining
freedom is split in stages:

  1. A 3x3 corner matrix: the last three coordinates of the three blocks
     that share the first two one-bits with the fixed third vertex.  Three
     binary clauses (each verified as a pivot-redundant addition) enforce
     that adjacent corner pairs can meet, and the surviving assignments are
     reduced to orbit representatives under simultaneous row/column
     permutation combined with per-column relabeling of values above 1.
  2. Coordinates 3 and 4 of four key blocks, reduced under independent
     per-coordinate relabeling of nonzero offsets plus the coordinate swap.
  3. The single hardest case (all-zero stage-2 cells under one specific
     matrix class) is split further on a fifth block's coordinates 3-7,
     reduced under the residual relabelings and the cyclic rotation of the
     last three coordinates: 33 subcases.

Non-canonical assignments are excluded by blocking clauses whose
satisfiability-preservation rests on the group argument; they are tagged
"trusted-symmetry" and are not accompanied by checked derivations.  The
cover check verifies, combinatorially and optionally by an emitted and
checked refutation, that the case cubes plus blocking clauses cover the
whole space.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, TextIO

from .encoder import Clause, ClauseDb, VarMap, encode
from .kellergraph import KellerInstance

DIM = 7

#: (block, coordinate) cells of the corner matrix, in canonical vector order.
MATRIX_CELLS = ((19, 6), (19, 7), (35, 5), (35, 7), (67, 5), (67, 6))
#: (block, coordinate) cells of stage 2, vertex-major.
COORD34_CELLS = ((3, 3), (3, 4), (19, 3), (19, 4), (35, 3), (35, 4), (67, 3), (67, 4))
#: (block, coordinate) cells of the deep split on block 2.
C2_CELLS = ((2, 3), (2, 4), (2, 5), (2, 6), (2, 7))

HARDEST_MATRIX = (0, 1, 1, 0, 0, 1)
HARDEST_COORD34 = (0,) * 8

#: canonical (coordinate 3, coordinate 4) choices for the deep split
C2_PAIR_REPS = ((0, 0), (0, 1), (1, 1))


class SymmetryError(ValueError):
    pass


def _require_dim7(inst: KellerInstance) -> None:
    if inst.n != DIM:
        raise SymmetryError(f"stage-wise symmetry breaking is defined for n={DIM}, got n={inst.n}")
    if inst.s < 2:
        raise SymmetryError("the fixed vertices carry offset 1, which needs s >= 2")


def _cell_literal(vm: VarMap, cell: tuple[int, int], value: int) -> int:
    block, coord = cell
    assert (block >> (coord - 1)) & 1 == 0, "cell coordinates sit in the low block half"
    return vm.x(block, coord, value)


# ---------------------------------------------------------------------------
# Fixed vertices and the three verified binary clauses


def initial_units(inst: KellerInstance, varmap: Optional[VarMap] = None) -> list[int]:
    """The 19 unit literals fixing vertices of blocks 0, 1 and 3."""
    _require_dim7(inst)
    vm = varmap or VarMap(inst.n, inst.s)
    units = [vm.x(0, j, 0) for j in range(1, 8)]
    units.append(vm.x(1, 1, 0))  # value s: block bit 1, offset 0
    units.append(vm.x(1, 2, 1))  # value 1
    units.extend(vm.x(1, j, 0) for j in range(3, 8))
    units.append(vm.x(3, 1, 0))  # value s
    units.append(vm.x(3, 2, 1))  # value s+1
    units.extend(vm.x(3, j, 1) for j in (5, 6, 7))  # value 1
    assert len(units) == 19
    return units


def rat_binaries(varmap: VarMap) -> list[Clause]:
    """Three binaries forcing a meeting offset between corner-matrix rows."""
    x = varmap.x
    return [
        (x(19, 6, 1), x(35, 5, 1)),
        (x(35, 7, 1), x(67, 6, 1)),
        (x(67, 5, 1), x(19, 7, 1)),
    ]


def build_phi(inst: KellerInstance, varmap: Optional[VarMap] = None) -> ClauseDb:
    """Bare encoding plus the 19 fixed-vertex units."""
    vm = varmap or VarMap(inst.n, inst.s)
    db = encode(inst, vm)
    db.extend("fixed_vertices", [(u,) for u in initial_units(inst, vm)], section="fixed_vertices")
    return db


# ---------------------------------------------------------------------------
# Stage 1: the corner matrix


def matrix_assignment_valid(v: Sequence[int]) -> bool:
    return 1 in (v[0], v[2]) and 1 in (v[3], v[5]) and 1 in (v[4], v[1])


def valid_matrix_assignments(s: int) -> list[tuple[int, ...]]:
    return [v for v in itertools.product(range(s), repeat=6) if matrix_assignment_valid(v)]


# vector slot of matrix cell (row, col) with rows/cols 0..2 (diagonal excluded)
_MATRIX_SLOT = {(0, 1): 0, (0, 2): 1, (1, 0): 2, (1, 2): 3, (2, 0): 4, (2, 1): 5}


def _matrix_apply_sigma(v: tuple[int, ...], sigma: tuple[int, int, int]) -> tuple[int, ...]:
    out = [0] * 6
    for (r, c), slot in _MATRIX_SLOT.items():
        out[_MATRIX_SLOT[(sigma[r], sigma[c])]] = v[slot]
    return tuple(out)


def _matrix_apply_column_swap(v: tuple[int, ...], col: int, a: int) -> tuple[int, ...]:
    """Swap values a and a+1 (both above 1) in one matrix column."""
    out = list(v)
    for (r, c), slot in _MATRIX_SLOT.items():
        if c == col:
            if out[slot] == a:
                out[slot] = a + 1
            elif out[slot] == a + 1:
                out[slot] = a
    return tuple(out)


@lru_cache(maxsize=None)
def _matrix_canon_table(s: int) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Assignment -> minimum of its orbit, over all valid assignments."""
    sigmas = [(1, 0, 2), (0, 2, 1), (1, 2, 0)]
    canon: dict[tuple[int, ...], tuple[int, ...]] = {}
    for start in valid_matrix_assignments(s):
        if start in canon:
            continue
        orbit = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            images = [_matrix_apply_sigma(u, sg) for sg in sigmas]
            for col in range(3):
                for a in range(2, s - 1):
                    images.append(_matrix_apply_column_swap(u, col, a))
            for w in images:
                if w not in orbit:
                    orbit.add(w)
                    stack.append(w)
        rep = min(orbit)
        for u in orbit:
            canon[u] = rep
    return canon


def canonical_matrix(v: Sequence[int], s: int) -> tuple[int, ...]:
    t = tuple(v)
    table = _matrix_canon_table(s)
    if t not in table:
        raise SymmetryError(f"{t} violates the pairwise meeting constraints")
    return table[t]


def matrix_classes(inst: KellerInstance) -> list[tuple[int, ...]]:
    _require_dim7(inst)
    return sorted(set(_matrix_canon_table(inst.s).values()))


# ---------------------------------------------------------------------------
# Stage 2: coordinates 3 and 4 of blocks 3, 19, 35, 67


def _relabel_column(col: Sequence[int]) -> tuple[int, ...]:
    """First-occurrence relabeling that fixes 0: lexicographic minimum under
    value permutations of the nonzero offsets."""
    mapping = {0: 0}
    nxt = 1
    out = []
    for v in col:
        m = mapping.get(v)
        if m is None:
            m = mapping[v] = nxt
            nxt += 1
        out.append(m)
    return tuple(out)


def _interleave(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return (a[0], b[0], a[1], b[1], a[2], b[2], a[3], b[3])


def canonical_coord34(assignment: Sequence[int]) -> tuple[int, ...]:
    """Lexicographic orbit minimum under per-coordinate relabeling plus swap."""
    col3 = (assignment[0], assignment[2], assignment[4], assignment[6])
    col4 = (assignment[1], assignment[3], assignment[5], assignment[7])
    ra, rb = _relabel_column(col3), _relabel_column(col4)
    return _interleave(ra, rb) if ra <= rb else _interleave(rb, ra)


@lru_cache(maxsize=None)
def coord34_column_classes(s: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        sorted({_relabel_column(c) for c in itertools.product(range(s), repeat=4)})
    )


def coord34_classes(inst: KellerInstance) -> list[tuple[int, ...]]:
    _require_dim7(inst)
    cols = coord34_column_classes(inst.s)
    reps = [
        _interleave(a, b) for a, b in itertools.combinations_with_replacement(cols, 2)
    ]
    return sorted(reps)


def coord34_column_count_orbit_sum(s: int) -> int:
    """Independent orbit count for one column: average fixed points over the
    relabeling group (permutations of the s-1 nonzero offsets)."""
    total = 0
    for perm in itertools.permutations(range(1, s)):
        fixed = sum(1 for i, v in enumerate(perm, start=1) if v == i)
        total += (1 + fixed) ** 4
    return total // math.factorial(s - 1)


def coord34_class_count_from_columns(s: int) -> int:
    m = coord34_column_count_orbit_sum(s)
    return m * (m + 1) // 2


# ---------------------------------------------------------------------------
# Stage 3: deep split of the hardest case on block 2, coordinates 3-7


def canonical_c2(d: Sequence[int]) -> tuple[int, ...]:
    a3, a4 = d[0], d[1]
    if a3 == 0 and a4 == 0:
        pair = (0, 0)
    elif a3 == 0 or a4 == 0:
        pair = (0, 1)
    else:
        pair = (1, 1)
    triple = tuple(min(v, 2) for v in d[2:5])
    rots = (triple, (triple[2], triple[0], triple[1]), (triple[1], triple[2], triple[0]))
    return pair + min(rots)


def hardest_c2_assignments() -> list[tuple[int, ...]]:
    triples = sorted(
        {min(t, (t[2], t[0], t[1]), (t[1], t[2], t[0])) for t in itertools.product(range(3), repeat=3)}
    )
    out = [pair + t for pair in C2_PAIR_REPS for t in triples]
    assert len(out) == 33
    return out


def hardest_split(
    inst: KellerInstance,
    matrix_assignment: Optional[Sequence[int]] = None,
    coord34_assignment: Optional[Sequence[int]] = None,
) -> list[tuple[int, ...]]:
    """The 33 block-2 subcases; refuses anything but the hardest case."""
    _require_dim7(inst)
    if inst.s < 3:
        raise SymmetryError("the deep split needs s >= 3")
    if matrix_assignment is not None and tuple(matrix_assignment) != HARDEST_MATRIX:
        raise SymmetryError(f"deep split only applies to the matrix class {HARDEST_MATRIX}")
    if coord34_assignment is not None and tuple(coord34_assignment) != HARDEST_COORD34:
        raise SymmetryError("deep split only applies to the all-zero stage-2 class")
    return hardest_c2_assignments()


# ---------------------------------------------------------------------------
# Case cubes


@dataclass(frozen=True)
class CaseCube:
    index: int
    matrix: tuple[int, ...]
    coord34: tuple[int, ...]
    c2: Optional[tuple[int, ...]]
    literals: tuple[int, ...]

    def cells(self) -> tuple[tuple[int, ...], tuple[int, ...], Optional[tuple[int, ...]]]:
        return (self.matrix, self.coord34, self.c2)


def cube_literals(
    vm: VarMap,
    matrix: Sequence[int],
    coord34: Sequence[int],
    c2: Optional[Sequence[int]] = None,
) -> tuple[int, ...]:
    lits = [_cell_literal(vm, cell, v) for cell, v in zip(MATRIX_CELLS, matrix)]
    lits += [_cell_literal(vm, cell, v) for cell, v in zip(COORD34_CELLS, coord34)]
    if c2 is not None:
        lits += [_cell_literal(vm, cell, v) for cell, v in zip(C2_CELLS, c2)]
    return tuple(lits)


def enumerate_cases(inst: KellerInstance, varmap: Optional[VarMap] = None) -> list[CaseCube]:
    """All case cubes, matrix class major, stage-2 class minor; the hardest
    case is replaced by its 33 deep subcases, appended at the end."""
    _require_dim7(inst)
    vm = varmap or VarMap(inst.n, inst.s)
    mcls = matrix_classes(inst)
    ccls = coord34_classes(inst)
    split_hardest = inst.s >= 3
    if split_hardest:
        assert HARDEST_MATRIX in mcls and HARDEST_COORD34 in ccls
    cases: list[CaseCube] = []
    for m in mcls:
        for c in ccls:
            if split_hardest and m == HARDEST_MATRIX and c == HARDEST_COORD34:
                continue
            cases.append(CaseCube(len(cases), m, c, None, cube_literals(vm, m, c)))
    if split_hardest:
        for d in hardest_c2_assignments():
            cases.append(
                CaseCube(
                    len(cases),
                    HARDEST_MATRIX,
                    HARDEST_COORD34,
                    d,
                    cube_literals(vm, HARDEST_MATRIX, HARDEST_COORD34, d),
                )
            )
    return cases


# ---------------------------------------------------------------------------
# Blocking clauses


def iter_blocking_clauses(
    inst: KellerInstance, varmap: Optional[VarMap] = None
) -> Iterator[tuple[str, Clause]]:
    """(stage tag, clause) stream excluding every valid non-canonical
    assignment, in deterministic order.  Deep-split blockers carry the
    hardest-case cells as a condition."""
    _require_dim7(inst)
    vm = varmap or VarMap(inst.n, inst.s)
    s = inst.s
    table = _matrix_canon_table(s)
    for v in valid_matrix_assignments(s):
        if table[v] != v:
            yield (
                "trusted-symmetry:matrix",
                tuple(-l for l in cube_literals(vm, v, HARDEST_COORD34)[:6]),
            )

    cols = list(itertools.product(range(s), repeat=4))
    rel = {c: _relabel_column(c) for c in cols}
    pair_cache: dict[tuple[tuple[int, ...], tuple[int, ...]], tuple[int, ...]] = {}
    for ca in cols:
        ra = rel[ca]
        for cb in cols:
            rb = rel[cb]
            key = (ra, rb)
            canon = pair_cache.get(key)
            if canon is None:
                canon = _interleave(ra, rb) if ra <= rb else _interleave(rb, ra)
                pair_cache[key] = canon
            a = _interleave(ca, cb)
            if a != canon:
                yield (
                    "trusted-symmetry:coord34",
                    tuple(
                        -_cell_literal(vm, cell, v) for cell, v in zip(COORD34_CELLS, a)
                    ),
                )

    if s >= 3:
        condition = tuple(-l for l in cube_literals(vm, HARDEST_MATRIX, HARDEST_COORD34))
        canonical = set(hardest_c2_assignments())
        for d in itertools.product(range(s), repeat=5):
            if d not in canonical:
                yield (
                    "trusted-symmetry:deep",
                    condition
                    + tuple(-_cell_literal(vm, cell, v) for cell, v in zip(C2_CELLS, d)),
                )


def blocking_clauses(
    inst: KellerInstance, varmap: Optional[VarMap] = None
) -> dict[str, list[Clause]]:
    out: dict[str, list[Clause]] = {}
    for tag, clause in iter_blocking_clauses(inst, varmap):
        out.setdefault(tag, []).append(clause)
    return out


def build_broken_db(inst: KellerInstance, varmap: Optional[VarMap] = None) -> ClauseDb:
    """Fixed-vertex formula plus the verified binaries plus all blockers."""
    vm = varmap or VarMap(inst.n, inst.s)
    db = build_phi(inst, vm)
    db.extend("sym_binary", rat_binaries(vm), section="sym_binary")
    start = len(db.clauses)
    for tag, clause in iter_blocking_clauses(inst, vm):
        db.add(tag, clause)
    db.mark_section("trusted-symmetry blocking", start)
    return db


# ---------------------------------------------------------------------------
# Cover checking


@dataclass
class CoverResult:
    passed: bool
    mode: str
    failure: Optional[str] = None
    counts: dict = None  # type: ignore[assignment]
    proof_steps: int = 0

    def __post_init__(self) -> None:
        if self.counts is None:
            self.counts = {}


def cover_check(
    cases: Sequence[CaseCube],
    inst: KellerInstance,
    mode: str = "combinatorial",
    proof_path: Optional[str] = None,
) -> CoverResult:
    if mode == "combinatorial":
        return _cover_check_combinatorial(cases, inst)
    if mode == "sat":
        comb = _cover_check_combinatorial(cases, inst)
        if not comb.passed:
            return comb
        return _cover_check_sat(cases, inst, proof_path)
    raise ValueError(f"unknown cover mode {mode!r}")


def _cover_check_combinatorial(cases: Sequence[CaseCube], inst: KellerInstance) -> CoverResult:
    """Every valid assignment must canonicalize to the cells of exactly one cube."""
    _require_dim7(inst)
    s = inst.s
    res = CoverResult(passed=False, mode="combinatorial")

    mcls = matrix_classes(inst)
    ccls = coord34_classes(inst)
    mset, cset = set(mcls), set(ccls)
    split_hardest = inst.s >= 3

    # canonical sets are fixed points and pairwise distinct by construction
    for m in mcls:
        if canonical_matrix(m, s) != m:
            res.failure = f"matrix representative {m} is not canonical"
            return res
    for c in ccls:
        if canonical_coord34(c) != c:
            res.failure = f"stage-2 representative {c} is not canonical"
            return res

    table = _matrix_canon_table(s)
    for v in valid_matrix_assignments(s):
        if table[v] not in mset:
            res.failure = f"matrix assignment {v} canonicalizes outside the class list"
            return res

    cols = list(itertools.product(range(s), repeat=4))
    rel = {c: _relabel_column(c) for c in cols}
    pair_cache: dict[tuple[tuple[int, ...], tuple[int, ...]], bool] = {}
    for ca in cols:
        ra = rel[ca]
        for cb in cols:
            rb = rel[cb]
            key = (ra, rb)
            ok = pair_cache.get(key)
            if ok is None:
                canon = _interleave(ra, rb) if ra <= rb else _interleave(rb, ra)
                ok = canon in cset
                pair_cache[key] = ok
            if not ok:
                res.failure = (
                    f"stage-2 assignment {_interleave(ca, cb)} canonicalizes outside the class list"
                )
                return res

    d33 = set(hardest_c2_assignments()) if split_hardest else set()
    if split_hardest:
        for d in itertools.product(range(s), repeat=5):
            if canonical_c2(d) not in d33:
                res.failure = f"deep assignment {d} canonicalizes outside the 33 subcases"
                return res

    expected: list[tuple] = []
    for m in mcls:
        for c in ccls:
            if split_hardest and m == HARDEST_MATRIX and c == HARDEST_COORD34:
                continue
            expected.append((m, c, None))
    if split_hardest:
        expected.extend((HARDEST_MATRIX, HARDEST_COORD34, d) for d in sorted(d33))
    got = [case.cells() for case in cases]
    if len(got) != len(set(got)):
        dup = next(g for g in got if got.count(g) > 1)
        res.failure = f"duplicate cube for cells {dup}"
        return res
    missing = set(expected) - set(got)
    if missing:
        m, c, d = sorted(missing)[0]
        res.failure = f"uncovered assignment: matrix={m} coord34={c}" + (
            f" c2={d}" if d else ""
        )
        return res
    extra = set(got) - set(expected)
    if extra:
        res.failure = f"cube outside the case split: {sorted(extra)[0]}"
        return res

    res.passed = True
    res.counts = {
        "matrix_classes": len(mcls),
        "coord34_classes": len(ccls),
        "deep_subcases": len(d33),
        "cases": len(cases),
    }
    return res


class CoverFailure(Exception):
    def __init__(self, assignment: dict):
        super().__init__(f"uncovered assignment {assignment}")
        self.assignment = assignment


def _cover_check_sat(
    cases: Sequence[CaseCube], inst: KellerInstance, proof_path: Optional[str] = None
) -> CoverResult:
    """Refute "some assignment avoids every cube" against the full formula.

    A directed enumeration over the case cells emits a clausal refutation
    (children clauses first, then each prefix clause, ending with the empty
    clause); the proof is then re-checked from scratch against the formula
    with the blocking clauses and the negated cubes conjoined.
    """
    from . import dratcheck
    from .dratcheck import ProofStep

    _require_dim7(inst)
    vm = VarMap(inst.n, inst.s)
    s = inst.s
    res = CoverResult(passed=False, mode="sat")

    full_db = build_broken_db(inst, vm)
    neg_cubes: list[Clause] = [tuple(-l for l in case.literals) for case in cases]
    formula_clauses = full_db.clauses + neg_cubes

    # pruning engine over the cell variables only: their domain clauses,
    # the binaries, the blockers and the negated cubes
    cells = list(MATRIX_CELLS) + list(COORD34_CELLS) + list(C2_CELLS)
    cell_vars: list[list[int]] = [
        [_cell_literal(vm, cell, v) for v in range(s)] for cell in cells
    ]
    small = dratcheck.CheckerDb(vm.num_vars)
    for lits in cell_vars:
        small.add_clause(tuple(lits))
        for a in range(s):
            for b in range(a + 1, s):
                small.add_clause((-lits[a], -lits[b]))
    for c in rat_binaries(vm):
        small.add_clause(c)
    for _, c in iter_blocking_clauses(inst, vm):
        small.add_clause(c)
    for c in neg_cubes:
        small.add_clause(c)
    small.propagate_root()

    hardest_prefix = cube_literals(vm, HARDEST_MATRIX, HARDEST_COORD34)
    steps: list[ProofStep] = []
    prefix: list[int] = []

    def branch_depth() -> int:
        if len(prefix) >= 14 and tuple(prefix[:14]) == hardest_prefix and s >= 3:
            return 19
        return 14

    def descend(depth: int) -> None:
        if depth == branch_depth():
            values = {}
            for (cell, lits_row) in zip(cells, cell_vars):
                for v, lit in enumerate(lits_row):
                    if lit in prefix:
                        values[cell] = v
            raise CoverFailure(values)
        for v in range(s):
            lit = cell_vars[depth][v]
            il = (lit << 1)
            prefix.append(lit)
            if small.val[il] < 0:
                # already refuted by propagation: record the prefix clause
                steps.append(ProofStep("a", tuple(-l for l in prefix)))
                prefix.pop()
                continue
            mark = len(small.trail)
            qmark = small.qhead
            if small.val[il] == 0:
                small._assign(il, -1)
            confl = small.propagate()
            if confl is None:
                descend(depth + 1)
            small._unassign_from(mark)
            small.qhead = qmark
            steps.append(ProofStep("a", tuple(-l for l in prefix)))
            prefix.pop()

    try:
        descend(0)
    except CoverFailure as fail:
        res.failure = str(fail)
        return res
    steps.append(ProofStep("a", ()))

    if proof_path:
        with open(proof_path, "w") as f:
            dratcheck.write_drat_text(steps, f)
    check = dratcheck.check_proof(
        _FormulaView(vm.num_vars, formula_clauses), steps, require_empty=True
    )
    res.passed = check.accepted
    res.proof_steps = len(steps)
    if not check.accepted:
        res.failure = f"emitted refutation rejected: {check.reason}"
    res.counts = {"cases": len(cases), "proof_steps": len(steps)}
    return res


class _FormulaView:
    def __init__(self, num_vars: int, clauses: list[Clause]):
        self.num_vars = num_vars
        self.clauses = clauses


# ---------------------------------------------------------------------------
# Class-list files


def write_class_list(f: TextIO, vectors: Iterable[Sequence[int]]) -> None:
    for v in vectors:
        f.write("(" + ",".join(str(x) for x in v) + ")\n")


def read_class_list(f: TextIO) -> list[tuple[int, ...]]:
    out = []
    for line in f:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(tuple(int(x) for x in line.strip("()").split(",")))
    return out
