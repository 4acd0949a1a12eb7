"""Compact CNF encoding of "G(n, s) contains a clique of size 2^n".

One candidate vertex per block: variable x(i, j, k) says that the block-i
vertex has offset k in coordinate j.  Auxiliary variables support the two
pairwise adjacency requirements ("differ in at least two coordinates" and
"differ by exactly s somewhere"); support variables are defined in one
direction only, so the reverse-implication clauses are deliberately absent.

Clause families:
  domain     exactly-one offset per (block, coordinate)
  diff_def   support literal => the two blocks differ at a coordinate
  diff_req   blocks whose bit vectors differ in one position need a second
             differing coordinate
  shift_def  support literal => the two blocks agree on all offsets of a
             coordinate whose block bits differ (values then differ by s)
  shift_req  every pair of blocks needs some exact-s coordinate
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, TextIO, Union

from .kellergraph import KellerInstance, Vertex, block_bits, block_of, check_vertex

Clause = tuple[int, ...]

FAMILIES = ("domain", "diff_def", "diff_req", "shift_def", "shift_req")


class UnsupportedInstanceError(ValueError):
    """Instance outside the encodable range (n must be at least 2)."""


class MalformedModelError(ValueError):
    """Model violates the exactly-one structure of the offset variables."""


class AuditError(AssertionError):
    """Emitted clause counts disagree with the closed forms."""


class VarMap:
    """Deterministic variable numbering for an (n, s) instance.

    x(i, j, k) ids come first, then the pair-difference support ids (blocks
    at Hamming distance one, pair-lexicographic, coordinate ascending, offset
    ascending), then the exact-shift support ids (all block pairs, pair-
    lexicographic, qualifying coordinate ascending).
    """

    def __init__(self, n: int, s: int):
        self.n = n
        self.s = s
        nb = 1 << n
        self.num_blocks = nb
        self.x_count = nb * n * s
        self.y_ids: dict[tuple[int, int, int, int], int] = {}
        self.z_ids: dict[tuple[int, int, int], int] = {}
        self.diff_pairs: list[tuple[int, int, int]] = []  # (i, i2, lone differing coordinate)
        self.pair_coords: dict[tuple[int, int], tuple[int, ...]] = {}

        nid = self.x_count
        for i in range(nb):
            for i2 in range(i + 1, nb):
                bits = i ^ i2
                if bits & (bits - 1) == 0:
                    j = bits.bit_length()
                    self.diff_pairs.append((i, i2, j))
                    for j2 in range(1, n + 1):
                        if j2 == j:
                            continue
                        for k in range(s):
                            nid += 1
                            self.y_ids[(i, i2, j2, k)] = nid
        self.y_count = nid - self.x_count

        for i in range(nb):
            for i2 in range(i + 1, nb):
                bits = i ^ i2
                coords = tuple(j for j in range(1, n + 1) if (bits >> (j - 1)) & 1)
                self.pair_coords[(i, i2)] = coords
                for j in coords:
                    nid += 1
                    self.z_ids[(i, i2, j)] = nid
        self.z_count = nid - self.x_count - self.y_count
        self.num_vars = nid

    def x(self, i: int, j: int, k: int) -> int:
        return 1 + (i * self.n + (j - 1)) * self.s + k

    def x_units_for(self, v: Sequence[int], inst: KellerInstance) -> list[int]:
        """Unit literals fixing every coordinate of vertex v."""
        i = block_of(v, inst)
        w = block_bits(i, inst.n)
        return [self.x(i, j, v[j - 1] - inst.s * w[j - 1]) for j in range(1, inst.n + 1)]

    def decode_x(self, var: int) -> tuple[int, int, int]:
        """Inverse of x(): (i, j, k) for an offset variable id."""
        if not 1 <= var <= self.x_count:
            raise ValueError(f"{var} is not an offset variable")
        q, k = divmod(var - 1, self.s)
        i, j0 = divmod(q, self.n)
        return i, j0 + 1, k


def expected_variable_counts(n: int, s: int) -> dict[str, int]:
    return {
        "x": (1 << n) * n * s,
        "y": (1 << (n - 1)) * n * s * (n - 1),
        "z": (1 << (2 * n - 2)) * n,
    }


def expected_clause_counts(n: int, s: int) -> dict[str, int]:
    return {
        "domain": (1 << n) * n * (1 + math.comb(s, 2)),
        "diff_def": (1 << n) * n * s * (n - 1),
        "diff_req": (1 << (n - 1)) * n,
        "shift_def": (1 << (2 * n - 1)) * n * s,
        "shift_req": math.comb(1 << n, 2),
    }


def expected_totals(n: int, s: int) -> tuple[int, int]:
    """(variables, clauses) closed-form totals."""
    nvars = (1 << (n - 1)) * n * (s * (n + 1) + (1 << (n - 1)))
    nclauses = (
        (1 << n) * n * (3 + 2 * math.comb(s, 2) + 2 * n * s - 2 * s) // 2
        + (1 << (2 * n - 1)) * n * s
        + math.comb(1 << n, 2)
    )
    return nvars, nclauses


@dataclass
class ClauseDb:
    """Indexed CNF with per-family clause counts and labeled sections.

    Families can interleave inside a section (the pair-difference section
    alternates definitions and requirement clauses per pair), so counts are
    tracked per family while sections record contiguous ranges for comments.
    """

    num_vars: int
    clauses: list[Clause] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)
    sections: list[tuple[str, int, int]] = field(default_factory=list)
    instance: Optional[KellerInstance] = None

    def add(self, tag: str, clause: Iterable[int]) -> None:
        c = tuple(clause)
        if len(frozenset(abs(l) for l in c)) != len(c):
            raise ValueError(f"duplicate or complementary literals in clause {c!r}")
        self.clauses.append(c)
        self.counts[tag] = self.counts.get(tag, 0) + 1

    def extend(self, tag: str, clauses: Iterable[Iterable[int]], section: Optional[str] = None) -> None:
        start = len(self.clauses)
        for c in clauses:
            self.add(tag, c)
        if section is not None:
            self.sections.append((section, start, len(self.clauses)))

    def mark_section(self, label: str, start: int) -> None:
        self.sections.append((label, start, len(self.clauses)))

    def write_dimacs(self, f: TextIO) -> None:
        if self.instance is not None:
            f.write(f"c keller clique encoding n={self.instance.n} s={self.instance.s}\n")
        for label, start, end in self.sections:
            f.write(f"c section {label}: clauses {start + 1}..{end}\n")
        f.write(f"p cnf {self.num_vars} {len(self.clauses)}\n")
        write = f.write
        for c in self.clauses:
            write(" ".join(map(str, c)))
            write(" 0\n")

    def to_dimacs(self) -> str:
        buf = io.StringIO()
        self.write_dimacs(buf)
        return buf.getvalue()


def _ordered(lits: Iterable[int]) -> Clause:
    return tuple(sorted(lits, key=lambda l: (abs(l), l < 0)))


def encode(inst: KellerInstance, varmap: Optional[VarMap] = None) -> ClauseDb:
    """Emit the clique-existence CNF in the fixed deterministic order."""
    n, s = inst.n, inst.s
    if n < 2:
        raise UnsupportedInstanceError("encoding needs n >= 2; the 1-dimensional graph is edgeless")
    vm = varmap or VarMap(n, s)
    db = ClauseDb(num_vars=vm.num_vars, instance=inst)
    nb = vm.num_blocks
    x = vm.x

    start = len(db.clauses)
    for i in range(nb):
        for j in range(1, n + 1):
            db.add("domain", tuple(x(i, j, k) for k in range(s)))
            for k in range(s):
                for k2 in range(k + 1, s):
                    db.add("domain", (-x(i, j, k), -x(i, j, k2)))
    db.mark_section("domain", start)

    start = len(db.clauses)
    for i, i2, j in vm.diff_pairs:
        for j2 in range(1, n + 1):
            if j2 == j:
                continue
            for k in range(s):
                y = vm.y_ids[(i, i2, j2, k)]
                db.add("diff_def", _ordered((-y, x(i, j2, k), x(i2, j2, k))))
                db.add("diff_def", _ordered((-y, -x(i, j2, k), -x(i2, j2, k))))
        db.add(
            "diff_req",
            tuple(vm.y_ids[(i, i2, j2, k)] for j2 in range(1, n + 1) if j2 != j for k in range(s)),
        )
    db.mark_section("diff_def+diff_req", start)

    start = len(db.clauses)
    for i in range(nb):
        for i2 in range(i + 1, nb):
            for j in vm.pair_coords[(i, i2)]:
                z = vm.z_ids[(i, i2, j)]
                for k in range(s):
                    db.add("shift_def", _ordered((-z, x(i, j, k), -x(i2, j, k))))
                    db.add("shift_def", _ordered((-z, -x(i, j, k), x(i2, j, k))))
    db.mark_section("shift_def", start)

    start = len(db.clauses)
    for i in range(nb):
        for i2 in range(i + 1, nb):
            db.add("shift_req", tuple(vm.z_ids[(i, i2, j)] for j in vm.pair_coords[(i, i2)]))
    db.mark_section("shift_req", start)
    return db


def audit_counts(inst: KellerInstance) -> dict[str, tuple[int, int]]:
    """Per-family (expected, emitted) clause counts; raises on any mismatch."""
    db = encode(inst)
    vm = VarMap(inst.n, inst.s)
    expected = expected_clause_counts(inst.n, inst.s)

    report: dict[str, tuple[int, int]] = {}
    for fam in FAMILIES:
        report[fam] = (expected[fam], db.counts.get(fam, 0))
        if report[fam][0] != report[fam][1]:
            raise AuditError(f"family {fam}: expected {report[fam][0]}, emitted {report[fam][1]}")

    var_expected = expected_variable_counts(inst.n, inst.s)
    if (vm.x_count, vm.y_count, vm.z_count) != (
        var_expected["x"],
        var_expected["y"],
        var_expected["z"],
    ):
        raise AuditError("variable family counts disagree with closed forms")
    tot_vars, tot_clauses = expected_totals(inst.n, inst.s)
    if vm.num_vars != tot_vars or len(db.clauses) != tot_clauses:
        raise AuditError("totals disagree with closed forms")
    return report


ModelLike = Union[Mapping[int, bool], Sequence[bool]]


def decode_model(
    model: ModelLike, inst: KellerInstance, varmap: Optional[VarMap] = None
) -> list[Vertex]:
    """Read the chosen per-block vertices out of a truth assignment."""
    vm = varmap or VarMap(inst.n, inst.s)
    out: list[Vertex] = []
    for i in range(vm.num_blocks):
        w = block_bits(i, inst.n)
        coords = []
        for j in range(1, inst.n + 1):
            ks = [k for k in range(inst.s) if model[vm.x(i, j, k)]]
            if len(ks) != 1:
                raise MalformedModelError(
                    f"block {i} coordinate {j}: {len(ks)} offsets set, expected exactly one"
                )
            coords.append(inst.s * w[j - 1] + ks[0])
        out.append(tuple(coords))
    return out


def clique_to_units(
    K: Iterable[Sequence[int]], inst: KellerInstance, varmap: Optional[VarMap] = None
) -> list[int]:
    """Unit literals pinning every coordinate of a full per-block transversal."""
    vm = varmap or VarMap(inst.n, inst.s)
    verts = [check_vertex(v, inst) for v in K]
    if len(verts) != inst.num_blocks:
        raise ValueError(f"need {inst.num_blocks} vertices, got {len(verts)}")
    seen_blocks: dict[int, Vertex] = {}
    units: list[int] = []
    for v in sorted(verts, key=lambda v: block_of(v, inst)):
        i = block_of(v, inst)
        if i in seen_blocks:
            raise ValueError(f"two vertices in block {i}: {seen_blocks[i]} and {v}")
        seen_blocks[i] = v
        units.extend(vm.x_units_for(v, inst))
    return units
