import io
import itertools
import random

import pytest

from kellersat import kellergraph as kg
from kellersat.kellergraph import KellerInstance


def test_instance_validation():
    KellerInstance(1, 1)
    with pytest.raises(ValueError):
        KellerInstance(0, 2)
    with pytest.raises(ValueError):
        KellerInstance(3, 0)


def test_adjacency_examples():
    inst = KellerInstance(2, 2)
    assert kg.adjacent((0, 0), (2, 3), inst)
    assert not kg.adjacent((0, 0), (0, 2), inst)  # only one coordinate differs
    assert not kg.adjacent((1, 3), (1, 3), inst)
    with pytest.raises(ValueError):
        kg.adjacent((0, 0, 0), (1, 1), inst)
    with pytest.raises(ValueError):
        kg.adjacent((0, 4), (1, 1), inst)


def test_adjacency_symmetric_irreflexive_exhaustive():
    for n, s in itertools.product((1, 2, 3), (1, 2, 3)):
        inst = KellerInstance(n, s)
        if inst.vertex_count > 300:
            continue
        verts = list(kg.all_vertices(inst))
        for u in verts:
            assert not kg.adjacent(u, u, inst)
        for u, v in itertools.combinations(verts, 2):
            assert kg.adjacent(u, v, inst) == kg.adjacent(v, u, inst)


def test_block_of_examples():
    inst = KellerInstance(7, 3)
    assert kg.block_of((0,) * 7, inst) == 0
    assert kg.block_bits(3, 7) == (1, 1, 0, 0, 0, 0, 0)
    assert kg.block_bits(67, 7) == (1, 1, 0, 0, 0, 0, 1)
    assert kg.block_index((1, 1, 0, 0, 0, 0, 1)) == 67
    # vertex carrying offset 1 above the block base in coordinates 1, 2, 7
    s = inst.s
    v = (s, s + 1, 0, 0, 0, 0, s + 1)
    assert kg.block_of(v, inst) == 67


def test_block_partition_exhaustive():
    for n, s in itertools.product((1, 2, 3), (2, 3)):
        inst = KellerInstance(n, s)
        if inst.vertex_count > 300:
            continue
        by_block = {}
        for v in kg.all_vertices(inst):
            i = kg.block_of(v, inst)
            base = kg.block_base(i, inst)
            assert all(0 <= v[j] - base[j] < s for j in range(n))
            by_block.setdefault(i, []).append(v)
        assert len(by_block) == inst.num_blocks
        for members in by_block.values():
            assert len(members) == s**n
            for u, v in itertools.combinations(members, 2):
                assert not kg.adjacent(u, v, inst)


def test_is_clique_examples():
    inst = KellerInstance(2, 2)
    assert kg.is_clique([], inst)
    assert kg.is_clique([(0, 0), (2, 3)], inst)
    # same block can never be adjacent
    assert kg.find_clique_violation([(0, 0), (1, 1)], inst) == ((0, 0), (1, 1))


def test_identity_automorphism():
    inst = KellerInstance(3, 2)
    ident = kg.Automorphism.identity(inst)
    for v in [(0, 1, 2), (3, 3, 3), (1, 0, 2)]:
        assert kg.apply_automorphism(ident, v) == v


def test_coordinate_swap_automorphism():
    inst = KellerInstance(7, 3)
    s = inst.s
    tau = tuple(range(2 * s))
    a = kg.Automorphism((1, 0, 2, 3, 4, 5, 6), tuple(tau for _ in range(7)))
    assert kg.apply_automorphism(a, (s, 1, 0, 0, 0, 0, 0)) == (1, s, 0, 0, 0, 0, 0)


def test_bad_automorphism_rejected():
    # a value map that splits an offset pair is not admissible
    tau = (0, 2, 1, 3)  # s=2: sends 1->2 but 3->3
    with pytest.raises(kg.InvalidAutomorphismError):
        kg.Automorphism((0,), (tau,))
    with pytest.raises(kg.InvalidAutomorphismError):
        kg.Automorphism((0, 0), ((0, 1, 2, 3), (0, 1, 2, 3)))


def test_automorphisms_preserve_adjacency_randomized():
    rng = random.Random(20240)
    trials = 0
    while trials < 10_000:
        n = rng.randint(2, 4)
        s = rng.randint(1, 3)
        inst = KellerInstance(n, s)
        a = kg.random_automorphism(inst, rng)
        u = tuple(rng.randrange(inst.side) for _ in range(n))
        v = tuple(rng.randrange(inst.side) for _ in range(n))
        before = kg.adjacent(u, v, inst)
        after = kg.adjacent(
            kg.apply_automorphism(a, u), kg.apply_automorphism(a, v), inst
        )
        assert before == after
        trials += 1


def test_clique_images_under_automorphisms():
    rng = random.Random(7)
    inst = KellerInstance(2, 2)
    verts = list(kg.all_vertices(inst))
    cliques = []
    for u, v in itertools.combinations(verts, 2):
        if kg.adjacent(u, v, inst):
            cliques.append([u, v])
    for _ in range(200):
        K = rng.choice(cliques)
        a = kg.random_automorphism(inst, rng)
        image = [kg.apply_automorphism(a, v) for v in K]
        assert kg.is_clique(image, inst)
        assert len(set(image)) == len(K)


def test_bruteforce_small_instances():
    assert kg.max_clique_bruteforce(KellerInstance(2, 2)) < 4
    assert kg.max_clique_bruteforce(KellerInstance(3, 2)) < 8
    for s in (1, 2, 3):
        assert kg.max_clique_bruteforce(KellerInstance(1, s)) == 1


def test_bruteforce_below_power_bound_exhaustive():
    for n, s in itertools.product((2, 3), (2, 3)):
        inst = KellerInstance(n, s)
        assert kg.max_clique_bruteforce(inst) < inst.num_blocks


def test_bruteforce_cap_and_bound():
    inst = KellerInstance(2, 2)
    assert kg.max_clique_bruteforce(inst, cap=1) >= 1
    with pytest.raises(ValueError):
        kg.max_clique_bruteforce(KellerInstance(7, 3))


def test_clique_file_roundtrip():
    inst = KellerInstance(2, 2)
    verts = [(0, 0), (2, 3), (1, 2)]
    buf = io.StringIO()
    kg.write_clique_file(buf, verts, inst)
    buf.seek(0)
    inst2, verts2 = kg.read_clique_file(buf)
    assert (inst2.n, inst2.s) == (2, 2)
    assert verts2 == [tuple(v) for v in verts]

    text = "# comment\nkeller 2 2\n0 0  # origin\n2 3\n"
    inst3, verts3 = kg.read_clique_file(io.StringIO(text))
    assert verts3 == [(0, 0), (2, 3)]
    with pytest.raises(ValueError):
        kg.read_clique_file(io.StringIO("not a header\n"))
