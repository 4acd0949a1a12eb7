"""Exact verification of periodic unit-cube tilings on a rational grid.

Corners live on the (1/s)-grid and are stored as integer numerators; a
tiling is represented by its 2^d corners modulo the even lattice and is
verified on the discrete torus of side 2s: each cube owns s^d grid cells,
and a corner set tiles space iff the (2s)^d cells are covered exactly once.
Facesharing, the corner-shift lemma, and the translation between cliques
and tilings are all checked with integer arithmetic only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, TextIO, Union

from .kellergraph import KellerInstance, Vertex, find_clique_violation

Rational = Union[int, Fraction]


class TilingError(ValueError):
    pass


def cubes_disjoint(x: Sequence[Rational], y: Sequence[Rational]) -> bool:
    """Unit cubes at corners x and y are disjoint iff some coordinate gap >= 1."""
    if len(x) != len(y):
        raise ValueError("corner dimensions differ")
    return any(abs(Fraction(a) - Fraction(b)) >= 1 for a, b in zip(x, y))


def faceshare(x: Sequence[Rational], y: Sequence[Rational]) -> bool:
    """True iff the corners differ by exactly one standard unit vector."""
    if len(x) != len(y):
        raise ValueError("corner dimensions differ")
    off_axis = 0
    unit_gaps = 0
    for a, b in zip(x, y):
        diff = abs(Fraction(a) - Fraction(b))
        if diff == 0:
            continue
        if diff == 1:
            unit_gaps += 1
        else:
            off_axis += 1
    return unit_gaps == 1 and off_axis == 0


@dataclass(frozen=True)
class PeriodicTiling:
    """2^d cube corners on the (1/s)-grid, reduced modulo the even lattice.

    Corners are integer numerator vectors taken modulo 2s.
    """

    d: int
    s: int
    corners: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.corners) != 1 << self.d:
            raise TilingError(f"need exactly {1 << self.d} corners, got {len(self.corners)}")
        period = 2 * self.s
        for corner in self.corners:
            if len(corner) != self.d:
                raise TilingError(f"corner {corner!r} has wrong dimension")
            if not all(isinstance(c, int) for c in corner):
                raise TilingError(f"corner {corner!r} is off the 1/{self.s} grid")
        norm = tuple(tuple(c % period for c in corner) for corner in self.corners)
        object.__setattr__(self, "corners", norm)

    @property
    def period(self) -> int:
        return 2 * self.s


def lattice_tiling(d: int, s: int) -> PeriodicTiling:
    """The integer-lattice tiling: corners s*{0,1}^d in numerator form."""
    corners = tuple(tuple(s * b for b in bits) for bits in itertools.product((0, 1), repeat=d))
    return PeriodicTiling(d, s, corners)


@dataclass
class TilingVerdict:
    ok: bool
    problem: Optional[str] = None
    detail: Optional[tuple] = None


def _cell_index(coords: Sequence[int], period: int) -> int:
    idx = 0
    for c in coords:
        idx = idx * period + c
    return idx


def verify_tiling(t: PeriodicTiling) -> TilingVerdict:
    """Exact single coverage of all (2s)^d torus cells by the 2^d cubes."""
    period = t.period
    s, d = t.s, t.d
    owner = [-1] * (period**d)
    offsets = list(itertools.product(range(s), repeat=d))
    for ci, corner in enumerate(t.corners):
        for off in offsets:
            cell = tuple((corner[j] + off[j]) % period for j in range(d))
            idx = _cell_index(cell, period)
            if owner[idx] >= 0:
                return TilingVerdict(False, "double-covered cell", (cell, owner[idx], ci))
            owner[idx] = ci
    for idx, o in enumerate(owner):
        if o < 0:
            cell = []
            rest = idx
            for _ in range(d):
                rest, c = divmod(rest, period)
                cell.append(c)
            return TilingVerdict(False, "uncovered cell", (tuple(reversed(cell)),))
    return TilingVerdict(True)


def _anchor_map(t: PeriodicTiling) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Binary anchor -> real corner covering it (numerators in (-s, s])."""
    s = t.s
    anchors: dict[tuple[int, ...], tuple[int, ...]] = {}
    for corner in t.corners:
        real = tuple(c if 0 < c <= s else (c - 2 * s if c > s else 0) for c in corner)
        anchor = tuple(1 if 0 < c else 0 for c in real)
        if anchor in anchors:
            raise TilingError(f"two cubes cover the anchor point {anchor}")
        anchors[anchor] = real
    return anchors


def verify_faceshare_free(t: PeriodicTiling) -> TilingVerdict:
    """No cube shares a full facet with an axis neighbor.

    Checks every anchor pair (x, x+e_i) with periodic extension; the shift
    property corner(x+e_i)_i = corner(x)_i + 1 is asserted along the way.
    Requires a verified tiling.
    """
    base = verify_tiling(t)
    if not base.ok:
        raise TilingError(f"not a tiling: {base.problem} {base.detail}")
    s, d = t.s, t.d
    anchors = _anchor_map(t)
    for x, corner in sorted(anchors.items()):
        for i in range(d):
            if x[i] == 0:
                nb = anchors[x[:i] + (1,) + x[i + 1 :]]
            else:
                wrapped = anchors[x[:i] + (0,) + x[i + 1 :]]
                nb = wrapped[:i] + (wrapped[i] + 2 * s,) + wrapped[i + 1 :]
            if nb[i] != corner[i] + s:
                raise TilingError(
                    f"axis-shift property violated at anchor {x}, axis {i + 1}"
                )
            diffs = [abs(nb[j] - corner[j]) for j in range(d)]
            if diffs[i] == s and all(diffs[j] == 0 for j in range(d) if j != i):
                return TilingVerdict(False, "facesharing pair", (x, i + 1))
    return TilingVerdict(True)


def replacement(
    t: PeriodicTiling, i: int, a: Rational, b: Rational, check_faceshare: bool = False
) -> PeriodicTiling:
    """Shift by b, along axis i, every corner whose coordinate i equals a mod 1.

    a and b must lie on the (1/s)-grid; i is 1-based.  The result is
    re-verified; a failure would contradict the shift lemma and raises.
    If the input is faceshare-free and no corner sits at a+b mod 1 on axis
    i, the result is verified faceshare-free as well.
    """
    if not 1 <= i <= t.d:
        raise ValueError(f"axis {i} out of range")
    a_num = _grid_numerator(a, t.s)
    b_num = _grid_numerator(b, t.s)
    j = i - 1
    residue = a_num % t.s
    moved = tuple(
        corner[:j] + ((corner[j] + b_num) % t.period,) + corner[j + 1 :]
        if corner[j] % t.s == residue
        else corner
        for corner in t.corners
    )
    out = PeriodicTiling(t.d, t.s, moved)
    verdict = verify_tiling(out)
    if not verdict.ok:
        raise AssertionError(
            f"shift lemma violated: {verdict.problem} {verdict.detail} (axis {i}, a={a}, b={b})"
        )
    if check_faceshare:
        target = (a_num + b_num) % t.s
        clear = all(corner[j] % t.s != target for corner in t.corners)
        if clear and verify_faceshare_free(t).ok and not verify_faceshare_free(out).ok:
            raise AssertionError("shift lemma faceshare condition violated")
    return out


def _grid_numerator(x: Rational, s: int) -> int:
    f = Fraction(x) * s
    if f.denominator != 1:
        raise ValueError(f"{x} is not on the 1/{s} grid")
    return int(f)


def clique_to_tiling(K: Iterable[Sequence[int]], inst: KellerInstance) -> PeriodicTiling:
    """Corners u/s for the 2^d clique vertices u; verified faceshare-free."""
    verts = [tuple(v) for v in K]
    if len(verts) != 1 << inst.n:
        raise TilingError(f"need a full clique of size {1 << inst.n}, got {len(verts)}")
    violation = find_clique_violation(verts, inst)
    if violation is not None:
        raise TilingError(f"not a clique: {violation[0]} and {violation[1]} are not adjacent")
    t = PeriodicTiling(inst.n, inst.s, tuple(verts))
    verdict = verify_tiling(t)
    if not verdict.ok:
        raise AssertionError(f"clique corners fail to tile: {verdict.problem}")
    fs = verify_faceshare_free(t)
    if not fs.ok:
        raise AssertionError(f"clique tiling has facesharing: {fs.detail}")
    return t


def tiling_to_clique(t: PeriodicTiling) -> list[Vertex]:
    """Vertices s*t(x) mod 2s for the anchor representatives; a clique iff
    the tiling is faceshare-free."""
    base = verify_tiling(t)
    if not base.ok:
        raise TilingError(f"not a tiling: {base.problem} {base.detail}")
    anchors = _anchor_map(t)
    return [tuple(c % t.period for c in anchors[x]) for x in sorted(anchors)]


def measure_discreteness(t: PeriodicTiling) -> list[int]:
    """Distinct residues mod 1 per coordinate; each is at most 2^(d-1)."""
    base = verify_tiling(t)
    if not base.ok:
        raise TilingError(f"not a tiling: {base.problem} {base.detail}")
    counts = []
    for j in range(t.d):
        counts.append(len({corner[j] % t.s for corner in t.corners}))
    bound = 1 << (t.d - 1)
    assert all(c <= bound for c in counts), "pairing bound on residues exceeded"
    return counts


def check_axis_lattices(t: PeriodicTiling) -> bool:
    """Along every torus grid line, the owning cubes' coordinates agree mod 1
    and consecutive cubes sit exactly one unit apart (two cubes per line)."""
    period = t.period
    s, d = t.s, t.d
    verdict = verify_tiling(t)
    if not verdict.ok:
        raise TilingError(f"not a tiling: {verdict.problem}")
    offsets = list(itertools.product(range(s), repeat=d))
    owner: dict[tuple[int, ...], int] = {}
    for ci, corner in enumerate(t.corners):
        for off in offsets:
            owner[tuple((corner[j] + off[j]) % period for j in range(d))] = ci
    for i in range(d):
        for base_cell in itertools.product(range(period), repeat=d - 1):
            line = []
            for c in range(period):
                cell = base_cell[:i] + (c,) + base_cell[i:]
                line.append(owner[cell])
            cubes = {line[c] for c in range(period)}
            if len(cubes) != 2:
                return False
            c1, c2 = sorted(cubes)
            r1 = t.corners[c1][i] % s
            r2 = t.corners[c2][i] % s
            if r1 != r2:
                return False
            if (t.corners[c1][i] - t.corners[c2][i]) % period != s:
                return False
    return True


# ---------------------------------------------------------------------------
# Files and display


def write_tiling(f: TextIO, t: PeriodicTiling) -> None:
    f.write(f"tiling {t.d} {t.s}\n")
    for corner in t.corners:
        f.write(" ".join(str(c) for c in corner) + "\n")


def read_tiling(f: TextIO) -> PeriodicTiling:
    header: Optional[tuple[int, int]] = None
    corners: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(f, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 3 or parts[0] != "tiling":
                raise TilingError(f"line {lineno}: expected header 'tiling <d> <s>'")
            header = (int(parts[1]), int(parts[2]))
            continue
        try:
            corner = tuple(int(x) for x in line.split())
        except ValueError:
            raise TilingError(f"line {lineno}: corners must be integer numerators") from None
        if len(corner) != header[0]:
            raise TilingError(f"line {lineno}: expected {header[0]} coordinates")
        corners.append(corner)
    if header is None:
        raise TilingError("empty tiling file")
    return PeriodicTiling(header[0], header[1], tuple(corners))


def ascii_art(t: PeriodicTiling) -> str:
    """Cell-owner grid for 2-dimensional tilings, one period square."""
    if t.d != 2:
        raise ValueError("text art is only available in two dimensions")
    period = t.period
    owner = [[-1] * period for _ in range(period)]
    for ci, corner in enumerate(t.corners):
        for dx in range(t.s):
            for dy in range(t.s):
                owner[(corner[1] + dy) % period][(corner[0] + dx) % period] = ci
    glyphs = "0123456789abcdefghijklmnopqrstuvwxyz"
    lines = []
    for row in reversed(owner):
        lines.append("".join(glyphs[c % len(glyphs)] if c >= 0 else "." for c in row))
    return "\n".join(lines)
