"""Keller graphs and their basic combinatorics.

The graph G(n, s) has vertex set {0, ..., 2s-1}^n; two vertices are adjacent
iff they differ by exactly s in at least one coordinate and differ in at
least two coordinates.  The graph is defined by predicates and is only
materialized (for the brute-force clique oracle) below a configurable size
bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, TextIO

Vertex = tuple[int, ...]

#: Refuse to materialize vertex sets larger than this (brute force only).
DEFAULT_MATERIALIZE_BOUND = 100_000


class InvalidAutomorphismError(ValueError):
    """Coordinate map is not in the admissible permutation group."""


@dataclass(frozen=True)
class KellerInstance:
    """An (n, s) instance: dimension n, offset granularity s."""

    n: int
    s: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.s < 1:
            raise ValueError(f"need n >= 1 and s >= 1, got n={self.n} s={self.s}")

    @property
    def side(self) -> int:
        return 2 * self.s

    @property
    def num_blocks(self) -> int:
        return 1 << self.n

    @property
    def vertex_count(self) -> int:
        return self.side**self.n


def check_vertex(v: Sequence[int], inst: KellerInstance) -> Vertex:
    """Validate and normalize a vertex to a tuple."""
    if len(v) != inst.n:
        raise ValueError(f"vertex {v!r} has length {len(v)}, expected {inst.n}")
    t = tuple(int(c) for c in v)
    if any(c < 0 or c >= inst.side for c in t):
        raise ValueError(f"vertex {t!r} has coordinates outside 0..{inst.side - 1}")
    return t


def adjacent(u: Sequence[int], v: Sequence[int], inst: KellerInstance) -> bool:
    """True iff u and v differ by exactly s somewhere and differ in >= 2 coordinates."""
    u = check_vertex(u, inst)
    v = check_vertex(v, inst)
    s = inst.s
    differ = 0
    exact = False
    for a, b in zip(u, v):
        if a != b:
            differ += 1
            if abs(a - b) == s:
                exact = True
    return exact and differ >= 2


def block_bits(i: int, n: int) -> tuple[int, ...]:
    """Bit vector w of block index i; bit k (1-based coordinate k) is w[k-1]."""
    return tuple((i >> (k - 1)) & 1 for k in range(1, n + 1))


def block_index(w: Sequence[int]) -> int:
    return sum(b << k for k, b in enumerate(w))


def block_of(v: Sequence[int], inst: KellerInstance) -> int:
    """Index of the independent block s*w + {0..s-1}^n containing v."""
    v = check_vertex(v, inst)
    return sum((1 << k) for k, c in enumerate(v) if c >= inst.s)


def block_base(i: int, inst: KellerInstance) -> Vertex:
    return tuple(inst.s * b for b in block_bits(i, inst.n))


def offsets_of(v: Sequence[int], inst: KellerInstance) -> tuple[int, ...]:
    """Per-coordinate offset of v inside its block (each in 0..s-1)."""
    v = check_vertex(v, inst)
    return tuple(c % inst.s for c in v)


def all_vertices(inst: KellerInstance, bound: int = DEFAULT_MATERIALIZE_BOUND) -> Iterator[Vertex]:
    if inst.vertex_count > bound:
        raise ValueError(
            f"instance has {inst.vertex_count} vertices, above the materialization bound {bound}"
        )
    side = inst.side

    def rec(prefix: tuple[int, ...]) -> Iterator[Vertex]:
        if len(prefix) == inst.n:
            yield prefix
            return
        for c in range(side):
            yield from rec(prefix + (c,))

    return rec(())


def find_clique_violation(
    vs: Iterable[Sequence[int]], inst: KellerInstance
) -> Optional[tuple[Vertex, Vertex]]:
    """First non-adjacent pair among vs, or None if vs is a clique."""
    verts = [check_vertex(v, inst) for v in vs]
    for a in range(len(verts)):
        for b in range(a + 1, len(verts)):
            if not adjacent(verts[a], verts[b], inst):
                return (verts[a], verts[b])
    return None


def is_clique(vs: Iterable[Sequence[int]], inst: KellerInstance) -> bool:
    return find_clique_violation(vs, inst) is None


@dataclass(frozen=True)
class Automorphism:
    """Coordinate permutation combined with per-coordinate value maps.

    Image coordinate j reads source coordinate sigma[j] and passes it through
    taus[j].  Each tau must map the pair {v, v+s} to another such pair, i.e.
    tau((v+s) mod 2s) == (tau(v)+s) mod 2s for all v; this is exactly the
    group generated by half-swaps and doubled offset permutations.
    """

    sigma: tuple[int, ...]  # permutation of range(n), 0-based
    taus: tuple[tuple[int, ...], ...]  # each a permutation of range(2s)

    def __post_init__(self) -> None:
        n = len(self.sigma)
        if sorted(self.sigma) != list(range(n)):
            raise InvalidAutomorphismError(f"sigma {self.sigma!r} is not a permutation")
        if len(self.taus) != n:
            raise InvalidAutomorphismError("need one value map per coordinate")
        for tau in self.taus:
            side = len(tau)
            s = side // 2
            if side % 2 or sorted(tau) != list(range(side)):
                raise InvalidAutomorphismError(f"tau {tau!r} is not a permutation of an even range")
            for v in range(side):
                if tau[(v + s) % side] != (tau[v] + s) % side:
                    raise InvalidAutomorphismError(
                        f"tau {tau!r} does not respect the offset pairing at {v}"
                    )

    @staticmethod
    def identity(inst: KellerInstance) -> "Automorphism":
        tau = tuple(range(inst.side))
        return Automorphism(tuple(range(inst.n)), tuple(tau for _ in range(inst.n)))


def apply_automorphism(a: Automorphism, v: Sequence[int]) -> Vertex:
    return tuple(a.taus[j][v[a.sigma[j]]] for j in range(len(a.sigma)))


def random_automorphism(inst: KellerInstance, rng: random.Random) -> Automorphism:
    """Uniform-ish sample: random sigma, and per coordinate a random admissible tau."""
    n, s = inst.n, inst.s
    sigma = list(range(n))
    rng.shuffle(sigma)
    taus = []
    for _ in range(n):
        pi = list(range(s))
        rng.shuffle(pi)
        tau = [0] * (2 * s)
        for k in range(s):
            flip = rng.randrange(2)
            tau[k] = pi[k] + s * flip
            tau[k + s] = pi[k] + s * (1 - flip)
        taus.append(tuple(tau))
    return Automorphism(tuple(sigma), tuple(taus))


def max_clique_bruteforce(
    inst: KellerInstance,
    cap: Optional[int] = None,
    bound: int = DEFAULT_MATERIALIZE_BOUND,
) -> int:
    """Exact maximum clique size by branch and bound with greedy-coloring pruning.

    Only usable on instances small enough to materialize; `cap` stops the
    search as soon as a clique of that size is found (useful when only a
    threshold matters).
    """
    verts = list(all_vertices(inst, bound))
    nv = len(verts)
    s = inst.s
    adj = [0] * nv
    for i in range(nv):
        u = verts[i]
        for j in range(i + 1, nv):
            v = verts[j]
            differ = 0
            exact = False
            for a, b in zip(u, v):
                if a != b:
                    differ += 1
                    if a - b == s or b - a == s:
                        exact = True
            if exact and differ >= 2:
                adj[i] |= 1 << j
                adj[j] |= 1 << i

    best = 0

    def color_order(p: int) -> tuple[list[int], list[int]]:
        order: list[int] = []
        bounds: list[int] = []
        color = 0
        rest = p
        while rest:
            color += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                order.append(v)
                bounds.append(color)
                avail &= ~adj[v]
                avail &= ~(1 << v)
                rest &= ~(1 << v)
        return order, bounds

    def expand(size: int, p: int) -> None:
        nonlocal best
        if cap is not None and best >= cap:
            return
        if p == 0:
            if size > best:
                best = size
            return
        order, bounds = color_order(p)
        for idx in range(len(order) - 1, -1, -1):
            if size + bounds[idx] <= best:
                return
            v = order[idx]
            expand(size + 1, p & adj[v])
            p &= ~(1 << v)
            if cap is not None and best >= cap:
                return

    expand(0, (1 << nv) - 1)
    return best


# ---------------------------------------------------------------------------
# Clique files: plain text, `keller <n> <s>` header, one vertex per line,
# `#` starts a comment.


def write_clique_file(f: TextIO, vs: Iterable[Sequence[int]], inst: KellerInstance) -> None:
    f.write(f"keller {inst.n} {inst.s}\n")
    for v in vs:
        f.write(" ".join(str(c) for c in check_vertex(v, inst)) + "\n")


def read_clique_file(f: TextIO) -> tuple[KellerInstance, list[Vertex]]:
    inst: Optional[KellerInstance] = None
    verts: list[Vertex] = []
    for lineno, raw in enumerate(f, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if inst is None:
            parts = line.split()
            if len(parts) != 3 or parts[0] != "keller":
                raise ValueError(f"line {lineno}: expected header 'keller <n> <s>'")
            inst = KellerInstance(int(parts[1]), int(parts[2]))
            continue
        verts.append(check_vertex([int(x) for x in line.split()], inst))
    if inst is None:
        raise ValueError("empty clique file")
    return inst, verts
