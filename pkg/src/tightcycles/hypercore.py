"""Core 3-uniform hypergraph representation and tight-path verification.

Vertices are dense integer ids ``0..n-1``.  A hypergraph is immutable after
construction; every neighbourhood is exposed as an integer bitmask so the
search code can run on plain set algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

__all__ = [
    "Hypergraph3",
    "PairSet",
    "TightPath",
    "Graph",
    "from_edges",
    "degree",
    "codegree",
    "min_degree",
    "min_codegree",
    "shadow_between",
    "verify_tight_path",
    "verify_tight_cycle",
    "first_violation",
    "read_h3",
    "write_h3",
    "bits",
    "mask_of",
]


def bits(mask: int) -> Iterator[int]:
    """Iterate over the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Hypergraph3:
    """Immutable 3-uniform hypergraph with eager pair and vertex indices."""

    __slots__ = (
        "n",
        "triples",
        "_packed",
        "_pair_nbr",
        "_deg",
        "_link_cache",
    )

    def __init__(self, n: int, triples: np.ndarray):
        """Internal constructor; use :func:`from_edges` for validated input."""
        self.n = int(n)
        self.triples = triples  # m x 3 int64, rows sorted, lexicographically ordered
        self.triples.setflags(write=False)
        nn = self.n
        self._packed = triples[:, 0] * nn * nn + triples[:, 1] * nn + triples[:, 2]
        self._packed.setflags(write=False)
        self._pair_nbr = self._build_pair_index()
        deg = np.zeros(nn, dtype=np.int64)
        if len(triples):
            np.add.at(deg, triples.ravel(), 1)
        self._deg = deg
        self._link_cache: dict[int, np.ndarray] | None = None

    # -- construction -------------------------------------------------

    def _build_pair_index(self) -> dict[int, int]:
        n = self.n
        t = self.triples
        if len(t) == 0:
            return {}
        # incidences (pair key u*n+v with u<v, third vertex)
        keys = np.concatenate(
            [t[:, 0] * n + t[:, 1], t[:, 0] * n + t[:, 2], t[:, 1] * n + t[:, 2]]
        )
        thirds = np.concatenate([t[:, 2], t[:, 1], t[:, 0]])
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        thirds = thirds[order]
        uniq, starts = np.unique(keys, return_index=True)
        ends = np.append(starts[1:], len(keys))
        nbytes = (n + 7) // 8
        rows = np.zeros((len(uniq), nbytes), dtype=np.uint8)
        ridx = np.searchsorted(uniq, keys)
        np.bitwise_or.at(
            rows.reshape(-1),
            ridx * nbytes + (thirds >> 3),
            (1 << (thirds & 7)).astype(np.uint8),
        )
        out: dict[int, int] = {}
        for i, key in enumerate(uniq):
            out[int(key)] = int.from_bytes(rows[i].tobytes(), "little")
        del starts, ends
        return out

    # -- basic queries -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.triples)

    def edges(self) -> list[tuple[int, int, int]]:
        return [tuple(row) for row in self.triples.tolist()]

    def has_edge(self, a: int, b: int, c: int) -> bool:
        a, b, c = sorted((a, b, c))
        if a == b or b == c:
            return False
        key = (a * self.n + b) * self.n + c
        i = np.searchsorted(self._packed, key)
        return bool(i < len(self._packed) and self._packed[i] == key)

    def nbr_mask(self, u: int, v: int) -> int:
        """Bitmask of N(u, v), the third vertices completing an edge."""
        if u > v:
            u, v = v, u
        return self._pair_nbr.get(u * self.n + v, 0)

    def link_pairs(self, v: int) -> np.ndarray:
        """The link of ``v``: a k x 2 array of pairs {a, b} with {v,a,b} an edge."""
        if self._link_cache is None:
            cache: dict[int, list] = {i: [] for i in range(self.n)}
            for a, b, c in self.triples.tolist():
                cache[a].append((b, c))
                cache[b].append((a, c))
                cache[c].append((a, b))
            self._link_cache = {
                v: np.array(ps, dtype=np.int64).reshape(-1, 2)
                for v, ps in cache.items()
            }
        return self._link_cache[v]

    def shadow_keys(self) -> Iterable[int]:
        """Pair keys u*n+v (u<v) of the shadow, ascending."""
        return sorted(self._pair_nbr)

    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def __repr__(self) -> str:  # pragma: no cover
        return f"Hypergraph3(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Hypergraph3)
            and self.n == other.n
            and self.triples.shape == other.triples.shape
            and bool(np.all(self.triples == other.triples))
        )

    def __hash__(self) -> int:
        return hash((self.n, self._packed.tobytes()))


def from_edges(n: int, triples: Iterable[Sequence[int]]) -> Hypergraph3:
    """Build a hypergraph from 3-element edges, deduplicating.

    Raises ValueError for out-of-range or repeated vertices in a triple.
    """
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    rows = []
    for t in triples:
        a, b, c = t
        if len({a, b, c}) != 3:
            raise ValueError(f"edge {tuple(t)} repeats a vertex")
        if not all(0 <= x < n for x in (a, b, c)):
            raise ValueError(f"edge {tuple(t)} has a vertex outside 0..{n - 1}")
        rows.append(sorted((a, b, c)))
    if rows:
        arr = np.array(rows, dtype=np.int64)
        arr = np.unique(arr, axis=0)
    else:
        arr = np.zeros((0, 3), dtype=np.int64)
    return Hypergraph3(n, arr)


def from_triple_array(n: int, arr: np.ndarray) -> Hypergraph3:
    """Fast path for generators: rows are assumed valid, possibly unsorted."""
    if len(arr) == 0:
        return Hypergraph3(n, np.zeros((0, 3), dtype=np.int64))
    arr = np.sort(arr.astype(np.int64), axis=1)
    arr = np.unique(arr, axis=0)
    return Hypergraph3(n, arr)


# -- degrees ------------------------------------------------------------


def degree(H: Hypergraph3, v: int) -> int:
    if not 0 <= v < H.n:
        raise ValueError(f"vertex {v} outside 0..{H.n - 1}")
    return int(H._deg[v])


def codegree(H: Hypergraph3, u: int, v: int) -> int:
    if u == v:
        raise ValueError("codegree requires two distinct vertices")
    for x in (u, v):
        if not 0 <= x < H.n:
            raise ValueError(f"vertex {x} outside 0..{H.n - 1}")
    return H.nbr_mask(u, v).bit_count()


def min_degree(H: Hypergraph3) -> int:
    if H.n == 0:
        return 0
    return int(H._deg.min())


def min_codegree(H: Hypergraph3) -> int:
    n = H.n
    if n < 2:
        return 0
    if len(H._pair_nbr) < n * (n - 1) // 2:
        return 0  # some pair has empty neighbourhood
    return min(m.bit_count() for m in H._pair_nbr.values())


# -- pair sets -----------------------------------------------------------


@dataclass(frozen=True)
class PairSet:
    """A set of vertex pairs, either ordered or canonically unordered."""

    ordered: bool
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for a, b in self.members:
            if a == b:
                raise ValueError(f"pair ({a},{a}) has equal endpoints")
        if not self.ordered:
            bad = [p for p in self.members if p[0] > p[1]]
            if bad:
                raise ValueError(f"unordered pairs must be stored as (min,max): {bad[0]}")

    @staticmethod
    def from_ordered(pairs: Iterable[tuple[int, int]]) -> "PairSet":
        return PairSet(True, frozenset((int(a), int(b)) for a, b in pairs))

    @staticmethod
    def from_unordered(pairs: Iterable[tuple[int, int]]) -> "PairSet":
        canon = frozenset((min(a, b), max(a, b)) for a, b in pairs)
        return PairSet(False, canon)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, pair) -> bool:
        a, b = pair
        if self.ordered:
            return (a, b) in self.members
        return (min(a, b), max(a, b)) in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def endpoint_mask_by_first(self, n: int) -> dict[int, int]:
        """For each first coordinate y, the bitmask {v : (y,v) in set}.

        For unordered sets, membership is interpreted symmetrically.
        """
        out: dict[int, int] = {}
        for a, b in self.members:
            out[a] = out.get(a, 0) | (1 << b)
            if not self.ordered:
                out[b] = out.get(b, 0) | (1 << a)
        return out


def shadow_between(H: Hypergraph3, V1: Iterable[int], V2: Iterable[int]) -> PairSet:
    """Ordered pairs (v1, v2) in V1 x V2 whose unordered pair lies in the shadow."""
    s1, s2 = set(V1), set(V2)
    if s1 & s2:
        raise ValueError("V1 and V2 must be disjoint")
    pairs = []
    for a in s1:
        for b in s2:
            if H.nbr_mask(a, b):
                pairs.append((a, b))
    return PairSet.from_ordered(pairs)


# -- tight paths ----------------------------------------------------------


@dataclass(frozen=True)
class TightPath:
    """An ordered vertex sequence; certified against a host at creation sites."""

    vertices: tuple
    is_cycle: bool = False

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def start_pair(self) -> tuple[int, int]:
        return self.vertices[0], self.vertices[1]

    @property
    def end_pair(self) -> tuple[int, int]:
        return self.vertices[-2], self.vertices[-1]

    def reversed(self) -> "TightPath":
        return TightPath(tuple(reversed(self.vertices)), self.is_cycle)

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def vertex_mask(self) -> int:
        return mask_of(self.vertices)


def first_violation(H: Hypergraph3, seq: Sequence[int], cycle: bool = False) -> Optional[str]:
    """None if the sequence certifies, else a message for the first failure."""
    seq = list(seq)
    if len(seq) != len(set(seq)):
        return "repeated vertex"
    if any(not 0 <= v < H.n for v in seq):
        return "vertex out of range"
    minimum = 4 if cycle else 3
    if len(seq) < minimum:
        return f"length {len(seq)} below minimum {minimum}"
    for i in range(len(seq) - 2):
        a, b, c = seq[i], seq[i + 1], seq[i + 2]
        if not H.has_edge(a, b, c):
            return f"triple ({a},{b},{c}) at position {i} is not an edge"
    if cycle:
        a, b, c = seq[-2], seq[-1], seq[0]
        if not H.has_edge(a, b, c):
            return f"wrap triple ({a},{b},{c}) is not an edge"
        a, b, c = seq[-1], seq[0], seq[1]
        if not H.has_edge(a, b, c):
            return f"wrap triple ({a},{b},{c}) is not an edge"
    return None


def verify_tight_path(H: Hypergraph3, seq: Sequence[int]) -> bool:
    return first_violation(H, seq, cycle=False) is None


def verify_tight_cycle(H: Hypergraph3, seq: Sequence[int]) -> bool:
    return first_violation(H, seq, cycle=True) is None


# -- plain graphs ----------------------------------------------------------


class Graph:
    """Minimal undirected graph with bitmask adjacency (used for links and
    the regular-pair probe)."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        self.n = n
        self.adj = [0] * n
        for a, b in edges:
            self.add_edge(a, b)

    def add_edge(self, a: int, b: int) -> None:
        if a == b:
            raise ValueError("loops not allowed")
        self.adj[a] |= 1 << b
        self.adj[b] |= 1 << a

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adj[a] >> b & 1)

    def edge_count(self) -> int:
        return sum(m.bit_count() for m in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for a in range(self.n):
            for b in bits(self.adj[a] >> (a + 1) << (a + 1)):
                out.append((a, b))
        return out

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def count_between(self, xmask: int, ymask: int) -> int:
        """Edges (a,b) with a in X, b in Y; an edge inside X∩Y counts twice."""
        total = 0
        for a in bits(xmask):
            total += (self.adj[a] & ymask).bit_count()
        return total


# -- .h3 serialisation ------------------------------------------------------


def write_h3(H: Hypergraph3, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"{H.n} {H.m}\n")
        for a, b, c in H.triples.tolist():
            fh.write(f"{a} {b} {c}\n")


def read_h3(path: str) -> Hypergraph3:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("first line must be 'n m'")
        n, m = int(header[0]), int(header[1])
        triples = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 3 vertices")
            triples.append(tuple(int(p) for p in parts))
        if len(triples) != m:
            raise ValueError(f"header declares {m} edges, file has {len(triples)}")
    return from_edges(n, triples)
