"""Exact ground truth at small scale: tight-Hamiltonicity by bitmask DP,
permutation-level brute force, and exact bounded path counting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import kernels
from .errors import BudgetError
from .hypercore import Hypergraph3, TightPath, bits, verify_tight_cycle

__all__ = [
    "OracleLimits",
    "DEFAULT_LIMITS",
    "has_tight_hamilton",
    "extract_tight_hamilton",
    "exhaustive_hamilton",
    "count_paths_between",
]


@dataclass(frozen=True)
class OracleLimits:
    max_n_dp: int = 20
    max_n_exhaustive: int = 9
    max_inner: int = 6
    max_n_paths: int = 14

    def __post_init__(self):
        if self.max_n_exhaustive > self.max_n_dp:
            raise ValueError("exhaustive cap must not exceed the DP cap")


DEFAULT_LIMITS = OracleLimits()


def _nbr_flat(H: Hypergraph3) -> list[int]:
    n = H.n
    return [H.nbr_mask(u, v) if u != v else 0 for u in range(n) for v in range(n)]


def _dp_cycle(H: Hypergraph3, limits: OracleLimits) -> Optional[list[int]]:
    if H.n > limits.max_n_dp:
        raise BudgetError(f"DP budget exceeded (n={H.n} > {limits.max_n_dp})")
    if H.n < 4:
        return None
    # a tight cycle puts every vertex into three edges
    if H.n and min(int(x) for x in H._deg) < 3:
        return None
    return kernels.backend().tight_hamilton_cycle(H.n, _nbr_flat(H))


def has_tight_hamilton(H: Hypergraph3, limits: OracleLimits = DEFAULT_LIMITS) -> bool:
    """Exact decision by subset DP over (visited set, ordered end pair)."""
    return _dp_cycle(H, limits) is not None


def extract_tight_hamilton(
    H: Hypergraph3, limits: OracleLimits = DEFAULT_LIMITS
) -> Optional[TightPath]:
    """A tight Hamilton cycle when one exists, verified before return."""
    seq = _dp_cycle(H, limits)
    if seq is None:
        return None
    assert verify_tight_cycle(H, seq), "DP produced an uncertified cycle"
    return TightPath(tuple(seq), is_cycle=True)


def exhaustive_hamilton(H: Hypergraph3, limits: OracleLimits = DEFAULT_LIMITS) -> bool:
    """Permutation-level brute force with early pruning; independent of the DP."""
    if H.n > limits.max_n_exhaustive:
        raise BudgetError(
            f"exhaustive budget exceeded (n={H.n} > {limits.max_n_exhaustive})"
        )
    n = H.n
    if n < 4:
        return False

    rest = list(range(1, n))

    def extend(seq: list[int], remaining: set) -> bool:
        if len(seq) >= 3 and not H.has_edge(seq[-3], seq[-2], seq[-1]):
            return False
        if not remaining:
            return H.has_edge(seq[-2], seq[-1], seq[0]) and H.has_edge(
                seq[-1], seq[0], seq[1]
            )
        for v in sorted(remaining):
            seq.append(v)
            remaining.discard(v)
            if extend(seq, remaining):
                return True
            remaining.add(v)
            seq.pop()
        return False

    return extend([0], set(rest))


def count_paths_between(
    H: Hypergraph3,
    from_pair: tuple[int, int],
    to_pair: tuple[int, int],
    inner: int,
    limits: OracleLimits = DEFAULT_LIMITS,
) -> int:
    """Exact number of tight paths from from_pair to to_pair with exactly
    ``inner`` inner vertices, by pruned backtracking."""
    if inner > limits.max_inner:
        raise BudgetError(f"inner budget exceeded ({inner} > {limits.max_inner})")
    if H.n > limits.max_n_paths:
        raise BudgetError(f"path-count budget exceeded (n={H.n} > {limits.max_n_paths})")
    x, y = from_pair
    z, w = to_pair
    if len({x, y, z, w}) != 4:
        raise ValueError("endpoint vertices must be distinct")
    if inner < 0:
        raise ValueError("inner must be nonnegative")
    endmask = (1 << x) | (1 << y) | (1 << z) | (1 << w)
    full = H.vertex_mask()

    def rec(u: int, v: int, used: int, left: int) -> int:
        if left == 0:
            if (H.nbr_mask(u, v) >> z) & 1 and (H.nbr_mask(v, z) >> w) & 1:
                return 1
            return 0
        total = 0
        cand = H.nbr_mask(u, v) & full & ~used & ~endmask
        for t in bits(cand):
            total += rec(v, t, used | (1 << t), left - 1)
        return total

    return rec(x, y, (1 << x) | (1 << y), inner)
