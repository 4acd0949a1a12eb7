import io
import itertools
import random
from fractions import Fraction

import pytest

from kellersat import kellergraph as kg, tilinglab as tl
from kellersat.kellergraph import KellerInstance


def test_disjointness_examples():
    assert not tl.cubes_disjoint((0, 0), (Fraction(1, 2), Fraction(1, 2)))
    assert tl.cubes_disjoint((0, 0), (1, Fraction(1, 2)))
    assert not tl.cubes_disjoint((0, 0), (0, 0))
    with pytest.raises(ValueError):
        tl.cubes_disjoint((0,), (0, 0))


def test_faceshare_examples():
    assert tl.faceshare((0, 0, 0), (1, 0, 0))
    assert not tl.faceshare((0, 0), (1, 1))
    assert not tl.faceshare((0, 0), (2, 0))
    assert not tl.faceshare((0, 0), (0, 0))
    assert tl.faceshare((Fraction(1, 3), 5), (Fraction(4, 3), 5))


def test_disjointness_matches_interval_oracle():
    # brute interval-overlap oracle on rational boxes
    rng = random.Random(4)
    for _ in range(300):
        d = rng.randint(1, 4)
        x = tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(d))
        y = tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(d))
        overlap = all(max(a, b) < min(a + 1, b + 1) for a, b in zip(x, y))
        assert tl.cubes_disjoint(x, y) == (not overlap)


def test_lattice_tiling_verifies_but_faceshares():
    t = tl.lattice_tiling(3, 2)
    assert tl.verify_tiling(t).ok
    fs = tl.verify_faceshare_free(t)
    assert not fs.ok
    assert fs.problem == "facesharing pair"


def test_verify_tiling_against_independent_oracle():
    # pairwise cubelet-disjointness plus full coverage, computed set-wise
    rng = random.Random(31)
    for _ in range(40):
        d = rng.randint(1, 3)
        s = rng.randint(1, 3)
        if rng.random() < 0.5:
            t = tl.lattice_tiling(d, s)
        else:
            corners = tuple(
                tuple(rng.randrange(2 * s) for _ in range(d)) for _ in range(1 << d)
            )
            t = tl.PeriodicTiling(d, s, corners)
        period = 2 * s
        cells = []
        for corner in t.corners:
            cover = {
                tuple((corner[j] + off[j]) % period for j in range(d))
                for off in itertools.product(range(s), repeat=d)
            }
            cells.append(cover)
        disjoint = all(
            not (cells[a] & cells[b]) for a, b in itertools.combinations(range(len(cells)), 2)
        )
        full = len(set().union(*cells)) == period**d
        assert tl.verify_tiling(t).ok == (disjoint and full)


def test_duplicate_corner_reports_double_cover():
    t = tl.PeriodicTiling(2, 2, ((0, 0), (0, 0), (2, 0), (0, 2)))
    v = tl.verify_tiling(t)
    assert not v.ok
    assert v.problem == "double-covered cell"


def test_overlapping_corners_rejected():
    t = tl.PeriodicTiling(2, 2, ((0, 0), (0, 1), (2, 0), (2, 1)))
    v = tl.verify_tiling(t)
    assert not v.ok


def test_faceshare_free_requires_tiling():
    t = tl.PeriodicTiling(2, 2, ((0, 0), (0, 0), (2, 0), (0, 2)))
    with pytest.raises(tl.TilingError):
        tl.verify_faceshare_free(t)


def _column_tiling() -> tl.PeriodicTiling:
    """One column of cubes shifted by half a unit: a valid tiling with a
    two-valued second coordinate."""
    return tl.PeriodicTiling(2, 2, ((0, 0), (0, 2), (2, 1), (2, 3)))


def test_constructed_column_tiling_discreteness():
    t = _column_tiling()
    assert tl.verify_tiling(t).ok
    assert tl.measure_discreteness(t) == [1, 2]
    assert tl.check_axis_lattices(t)


def test_lattice_discreteness_all_one():
    assert tl.measure_discreteness(tl.lattice_tiling(3, 2)) == [1, 1, 1]


def _brick_tiling(d: int, s: int, rng: random.Random) -> tl.PeriodicTiling:
    """Brick-layer construction: slabs along the last axis, each a recursive
    (d-1)-dimensional tiling, shifted by an arbitrary grid offset."""
    if d == 1:
        start = rng.randrange(2 * s)
        return tl.PeriodicTiling(1, s, ((start,), ((start + s) % (2 * s),)))
    inner_low = _brick_tiling(d - 1, s, rng)
    inner_high = _brick_tiling(d - 1, s, rng)
    z = rng.randrange(2 * s)
    corners = [c + (z,) for c in inner_low.corners]
    corners += [c + ((z + s) % (2 * s),) for c in inner_high.corners]
    return tl.PeriodicTiling(d, s, tuple(corners))


def test_brick_tilings_verify():
    rng = random.Random(77)
    for _ in range(30):
        d = rng.randint(2, 4)
        s = rng.randint(2, 4)
        t = _brick_tiling(d, s, rng)
        assert tl.verify_tiling(t).ok
        counts = tl.measure_discreteness(t)
        assert all(c <= 1 << (d - 1) for c in counts)
        assert tl.check_axis_lattices(t)


def test_replacement_examples():
    t = tl.lattice_tiling(2, 2)
    shifted = tl.replacement(t, 1, 0, Fraction(1, 2))
    assert tl.verify_tiling(shifted).ok
    assert shifted.corners != t.corners
    identity = tl.replacement(t, 1, 0, 0)
    assert identity.corners == t.corners
    # shifting a residue class that is not present changes nothing
    untouched = tl.replacement(_column_tiling(), 1, Fraction(1, 2), 1)
    assert untouched.corners == _column_tiling().corners


def test_replacement_fuzz_reverifies():
    rng = random.Random(123)
    for _ in range(60):
        d = rng.randint(1, 3)
        s = rng.randint(1, 4)
        t = _brick_tiling(d, s, rng) if d > 1 else tl.lattice_tiling(1, s)
        for _ in range(5):
            i = rng.randint(1, d)
            a = Fraction(rng.randrange(s), s)
            b = Fraction(rng.randrange(2 * s), s)
            t = tl.replacement(t, i, a, b, check_faceshare=True)
        assert tl.verify_tiling(t).ok


def test_replacement_off_grid_rejected():
    t = tl.lattice_tiling(2, 2)
    with pytest.raises(ValueError):
        tl.replacement(t, 1, Fraction(1, 3), 0)
    with pytest.raises(ValueError):
        tl.replacement(t, 3, 0, 0)


def test_buddy_property_on_verified_tilings():
    rng = random.Random(9)
    for _ in range(10):
        t = _brick_tiling(3, 2, rng)
        # verify_faceshare_free asserts the shift property internally
        tl.verify_faceshare_free(t)


def test_tiling_to_clique_lattice_is_not_clique():
    t = tl.lattice_tiling(2, 2)
    verts = tl.tiling_to_clique(t)
    inst = KellerInstance(2, 2)
    assert sorted(verts) == [(0, 0), (0, 2), (2, 0), (2, 2)]
    assert not kg.is_clique(verts, inst)


def test_clique_to_tiling_rejects_non_cliques():
    inst = KellerInstance(2, 2)
    with pytest.raises(tl.TilingError):
        tl.clique_to_tiling([(0, 0), (2, 0), (0, 2), (2, 2)], inst)
    with pytest.raises(tl.TilingError):
        tl.clique_to_tiling([(0, 0)], inst)


def test_discreteness_bound_fuzz_d_up_to_8():
    rng = random.Random(55)
    for d in (2, 4, 6, 8):
        t = _brick_tiling(d, 2, rng)
        counts = tl.measure_discreteness(t)
        assert all(c <= 1 << (d - 1) for c in counts)


def test_tiling_file_roundtrip(tmp_path):
    t = _column_tiling()
    buf = io.StringIO()
    tl.write_tiling(buf, t)
    buf.seek(0)
    t2 = tl.read_tiling(buf)
    assert t2.corners == t.corners and (t2.d, t2.s) == (t.d, t.s)
    with pytest.raises(tl.TilingError):
        tl.read_tiling(io.StringIO("tiling 2 2\n0.5 0\n"))
    with pytest.raises(tl.TilingError):
        tl.read_tiling(io.StringIO("bogus\n"))


def test_ascii_art_dimensions():
    art = tl.ascii_art(_column_tiling())
    lines = art.splitlines()
    assert len(lines) == 4 and all(len(l) == 4 for l in lines)
    with pytest.raises(ValueError):
        tl.ascii_art(tl.lattice_tiling(3, 2))
