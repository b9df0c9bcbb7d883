"""The absorption pipeline: bounded pair-to-pair connection, greedy almost
cover, absorbers, the absorbing path, and tight-Hamilton-cycle assembly.

Soundness is unconditional: every path or cycle any function returns has been
re-verified against the host hypergraph.  Completeness is heuristic; absence
is a normal outcome carrying per-stage diagnostics in the trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import ceil
from typing import Iterable, Optional, Sequence

import numpy as np

from .hypercore import (
    Hypergraph3,
    TightPath,
    bits,
    mask_of,
    verify_tight_cycle,
    verify_tight_path,
)
from .motifs import _cleaned_masks, find_c8_blowup, find_k333, is_connectable

__all__ = [
    "Absorber",
    "AbsorbingPath",
    "PipelineParams",
    "connect",
    "almost_cover",
    "find_absorber",
    "is_absorber",
    "build_absorbing_path",
    "absorb",
    "find_tight_hamilton",
]


# -- parameters ----------------------------------------------------------------


@dataclass
class PipelineParams:
    """Tunable thresholds and budgets for the assembly pipeline.

    The defaults are engineering choices for dense instances at desk scale;
    the reservoir fraction defaults to gamma^2 with a small-n floor so that
    connections are not starved on hosts with a few dozen vertices.
    """

    beta: float = 0.05
    gamma: float = 0.15
    reservoir_fraction: Optional[float] = None
    max_inner: int = 15
    retries: int = 5
    seed: int = 0
    mode: str = "ev"
    absorber_multiplier: int = 2
    absorber_count: Optional[int] = None
    min_eligibility: int = 3
    connect_budget: int = 30000
    absorber_tries: int = 40
    gadget_budget: int = 60000
    use_gadget: Optional[bool] = None
    cover_attempts: int = 12

    def __post_init__(self):
        if not 0 < self.beta < 1 or not 0 < self.gamma < 1:
            raise ValueError("beta and gamma must lie in (0, 1)")
        if self.max_inner < 1:
            raise ValueError("max_inner must be >= 1")
        if self.mode not in ("ev", "ee"):
            raise ValueError("mode must be 'ev' or 'ee'")

    def resolved_reservoir(self, n: int) -> float:
        if self.reservoir_fraction is not None:
            return self.reservoir_fraction
        target = self.gamma * self.gamma * n
        if target < 6.0:
            target = min(6.0, 0.2 * n)
        target = min(target, max(2.0, n - 27.0))
        return target / n if n else 0.0


# -- connection search -----------------------------------------------------------


def connect(
    H: Hypergraph3,
    from_pair: tuple[int, int],
    to_pair: tuple[int, int],
    allowed: Iterable[int],
    max_inner: int = 15,
    budget: int = 30000,
    seed: int = 0,
    lengths: Optional[Sequence[int]] = None,
    stats: Optional[dict] = None,
) -> Optional[TightPath]:
    """Tight path starting with from_pair and ending with to_pair whose inner
    vertices all come from ``allowed``.

    Bidirectional meet-in-the-middle: forward partial paths and backward
    partial suffixes are grown level by level and joined on a compatible
    middle pair.  Sound (result verified) but incomplete: None within budget
    does not certify absence.  ``lengths`` restricts the inner-vertex counts
    tried (default 1..max_inner, ascending).
    """
    x, y = from_pair
    z, w = to_pair
    if len({x, y, z, w}) != 4:
        raise ValueError("endpoint vertices must be four distinct vertices")
    endmask = mask_of((x, y, z, w))
    allowed_mask = mask_of(allowed) & ~endmask & H.vertex_mask()
    if lengths is None:
        lengths = range(1, max_inner + 1)
    lengths = [l for l in lengths if 0 <= l <= max_inner]
    if not lengths:
        return None
    rng = np.random.Generator(np.random.PCG64(seed))
    # tiny allowed pools (exact-length closings through a reservoir) need the
    # full state variety per pair; wide pools get capped for breadth control
    per_pair_cap = 24 if allowed_mask.bit_count() <= 20 else 4
    layer_cap = 4096
    expansions = 0

    # forward layers: pair -> list of (sequence, used mask); seq starts x, y
    fwd = [{(x, y): [((x, y), (1 << x) | (1 << y))]}]
    # backward layers: first pair of suffix -> (sequence, used); seq ends z, w
    bwd = [{(z, w): [((z, w), (1 << z) | (1 << w))]}]

    def extend(layers, forward: bool) -> bool:
        nonlocal expansions
        cur = layers[-1]
        new: dict = {}
        total = 0
        for key in sorted(cur):
            for seq, used in cur[key]:
                u, v = key
                cand = H.nbr_mask(u, v) & allowed_mask & ~used
                for t in bits(cand):
                    expansions += 1
                    if expansions > budget:
                        layers.append(new)
                        return False
                    if forward:
                        k2 = (v, t)
                        item = (seq + (t,), used | (1 << t))
                    else:
                        k2 = (t, u)
                        item = ((t,) + seq, used | (1 << t))
                    bucket = new.setdefault(k2, [])
                    if len(bucket) < per_pair_cap:
                        bucket.append(item)
                        total += 1
        if total > layer_cap:
            keys = sorted(new)
            keep = rng.permutation(len(keys))[:layer_cap]
            new = {keys[int(i)]: new[keys[int(i)]] for i in keep}
        layers.append(new)
        return True

    def join(fl: dict, bl: dict) -> Optional[tuple]:
        for (p1, p2), fstates in sorted(fl.items()):
            seam = H.nbr_mask(p1, p2)
            for (q1, q2), bstates in sorted(bl.items()):
                if not (seam >> q1) & 1:
                    continue
                if not (H.nbr_mask(p2, q1) >> q2) & 1:
                    continue
                for fseq, fused in fstates:
                    for bseq, bused in bstates:
                        if fused & bused:
                            continue
                        return fseq + bseq
        return None

    for l in lengths:
        f = (l + 1) // 2
        b = l - f
        ok = True
        while len(fwd) - 1 < f and ok:
            ok = extend(fwd, True)
        while len(bwd) - 1 < b and ok:
            ok = extend(bwd, False)
        if len(fwd) - 1 >= f and len(bwd) - 1 >= b:
            seq = join(fwd[f], bwd[b])
            if seq is not None:
                assert verify_tight_path(H, seq)
                if stats is not None:
                    stats.update({"expansions": expansions, "inner": l})
                return TightPath(tuple(seq))
        if not ok:
            break
    if stats is not None:
        stats.update({"expansions": expansions, "inner": None})
    return None


# -- almost cover -----------------------------------------------------------------


def almost_cover(
    H: Hypergraph3,
    beta: float,
    gamma: float,
    seed: int = 0,
    allowed: Optional[Iterable[int]] = None,
    attempts: int = 12,
) -> tuple[list[TightPath], set]:
    """Vertex-disjoint tight paths with connectable end pairs covering all but
    (ideally) gamma^2 * n of the allowed vertices.

    Paths are grown greedily inside the cleaned restriction to the still
    uncovered vertices; a returned uncovered set larger than gamma^2 * n is a
    heuristic shortfall, not an error.
    """
    n = H.n
    thr = beta * n
    min_len = max(4, ceil(thr))
    target = gamma * gamma * n
    uncovered = H.vertex_mask() if allowed is None else mask_of(allowed)
    rng = np.random.Generator(np.random.PCG64(seed))
    paths: list[TightPath] = []
    while uncovered.bit_count() >= max(target, min_len):
        masks = _cleaned_masks(H, thr, allowed_mask=uncovered)
        if not masks:
            break
        seq = _grow_path(H, masks, min_len, rng, attempts)
        if seq is None:
            break
        assert verify_tight_path(H, seq)
        paths.append(TightPath(tuple(seq)))
        uncovered &= ~mask_of(seq)
    return paths, set(bits(uncovered))


def _grow_path(H, masks, min_len, rng, attempts):
    n = H.n
    keys = sorted(masks)

    def key_of(a, b):
        return a * n + b if a < b else b * n + a

    for _ in range(attempts):
        key = keys[int(rng.integers(len(keys)))]
        u, v = divmod(key, n)
        wopts = list(bits(masks[key]))
        wpick = wopts[int(rng.integers(len(wopts)))]
        seq = [u, v, wpick]
        used = mask_of(seq)
        # extend right, then left, greedily by one-step lookahead
        grew = True
        while grew:
            grew = False
            cand = masks.get(key_of(seq[-2], seq[-1]), 0) & ~used
            if cand:
                t = max(
                    bits(cand),
                    key=lambda c: (masks.get(key_of(seq[-1], c), 0) & ~used).bit_count(),
                )
                seq.append(t)
                used |= 1 << t
                grew = True
            cand = masks.get(key_of(seq[1], seq[0]), 0) & ~used
            if cand:
                t = max(
                    bits(cand),
                    key=lambda c: (masks.get(key_of(c, seq[0]), 0) & ~used).bit_count(),
                )
                seq.insert(0, t)
                used |= 1 << t
                grew = True
        if len(seq) >= min_len:
            return seq
    return None


# -- absorbers -----------------------------------------------------------------------


@dataclass(frozen=True)
class Absorber:
    """A nine-vertex 3-partite core plus three four-vertex link paths; slot i
    can exchange its middle for any vertex in eligible[i]."""

    K: tuple  # (x1, x2, x3, y1, y2, y3, z1, z2, z3)
    links: tuple  # three (a, b, c, d) tuples
    eligible: tuple  # three bitmasks

    def all_vertices(self) -> tuple:
        return self.K + tuple(v for link in self.links for v in link)

    def k_path_full(self) -> list[int]:
        return list(self.K)

    def k_path_short(self) -> list[int]:
        x1, x2, x3 = self.K[0:3]
        z1, z2, z3 = self.K[6:9]
        return [x1, x2, x3, z1, z2, z3]

    def link_path(self, i: int, middle: Optional[int] = None) -> list[int]:
        a, b, c, d = self.links[i]
        m = self.K[3 + i] if middle is None else middle
        return [a, b, m, c, d]


def is_absorber(H: Hypergraph3, A: Absorber, T: Sequence[int]) -> bool:
    """Exact check: 21 distinct vertices, T of three distinct vertices outside
    A, and all defining orderings (the two core threadings plus both middle
    variants of each link path) tight in H."""
    vs = A.all_vertices()
    if len(set(vs)) != 21:
        return False
    t = tuple(T)
    if len(t) != 3 or len(set(t)) != 3 or set(t) & set(vs):
        return False
    if any(not 0 <= v < H.n for v in vs + t):
        return False
    if not verify_tight_path(H, A.k_path_full()):
        return False
    if not verify_tight_path(H, A.k_path_short()):
        return False
    for i in range(3):
        if not verify_tight_path(H, A.link_path(i)):
            return False
        if not verify_tight_path(H, A.link_path(i, middle=t[i])):
            return False
    return True


def find_absorber(
    H: Hypergraph3,
    forbidden: Iterable[int] = (),
    min_eligibility: int = 1,
    budget: int = 4000,
    seed: int = 0,
    k333_tries: int = 200,
) -> Optional[Absorber]:
    """Seed a 3-partite core avoiding ``forbidden``, then pick for each middle
    vertex a four-vertex path in its link maximising the eligibility set.
    Absence within budget is a normal outcome."""
    n = H.n
    fmask = mask_of(forbidden)
    rng = np.random.Generator(np.random.PCG64(seed))
    for attempt in range(6):
        K = find_k333(
            H, avoid=bits(fmask), tries=k333_tries, seed=int(rng.integers(2**31))
        )
        if K is None:
            return None
        used = mask_of(K)
        links = []
        eligibles = []
        ok = True
        for i in range(3):
            yv = K[3 + i]
            best = None
            avail = H.vertex_mask() & ~fmask & ~used
            adj = [0] * n
            for a, b in H.link_pairs(yv).tolist():
                if (avail >> a) & 1 and (avail >> b) & 1:
                    adj[a] |= 1 << b
                    adj[b] |= 1 << a
            edges = [
                (a, b)
                for a, b in H.link_pairs(yv).tolist()
                if (avail >> a) & 1 and (avail >> b) & 1
            ]
            rng.shuffle(edges)
            spent = 0
            for b_, c_ in edges:
                for bb, cc in ((b_, c_), (c_, b_)):
                    for a_ in bits(adj[bb] & ~(1 << cc)):
                        dmask = adj[cc] & ~(1 << a_) & ~(1 << bb)
                        for d_ in bits(dmask):
                            spent += 1
                            elig = (
                                H.nbr_mask(a_, bb)
                                & H.nbr_mask(bb, cc)
                                & H.nbr_mask(cc, d_)
                            )
                            score = elig.bit_count()
                            if best is None or score > best[0]:
                                best = (score, (a_, bb, cc, d_), elig)
                            if spent >= budget // 3:
                                break
                        if spent >= budget // 3:
                            break
                    if spent >= budget // 3:
                        break
                if spent >= budget // 3 or (best and best[0] >= n - 21):
                    break
            if best is None or best[0] < min_eligibility:
                ok = False
                break
            links.append(best[1])
            eligibles.append(best[2])
            used |= mask_of(best[1])
        if not ok:
            continue
        own = mask_of(K) | mask_of(v for link in links for v in link)
        eligibles = [e & ~own for e in eligibles]
        if any(e.bit_count() < min_eligibility for e in eligibles):
            continue
        A = Absorber(K=tuple(K), links=tuple(links), eligible=tuple(eligibles))
        probe = _eligible_probe(A)
        if probe is not None and is_absorber(H, A, probe):
            return A
        # no joint eligible triple to probe with; accept on path identities
        if probe is None and all(
            verify_tight_path(H, A.link_path(i)) for i in range(3)
        ) and verify_tight_path(H, A.k_path_full()) and verify_tight_path(
            H, A.k_path_short()
        ):
            return A
    return None


def _eligible_probe(A: Absorber) -> Optional[tuple]:
    """A disjoint triple from the eligibility sets, if one exists."""
    for v1 in list(bits(A.eligible[0]))[:4]:
        for v2 in list(bits(A.eligible[1] & ~(1 << v1)))[:4]:
            m3 = A.eligible[2] & ~(1 << v1) & ~(1 << v2)
            if m3:
                return (v1, v2, next(bits(m3)))
    return None


# -- absorbing path ---------------------------------------------------------------


@dataclass
class AbsorbingPath:
    """A tight path stitched from absorber sub-paths (plus an optional
    flexible blow-up gadget), with enough structure to rewrite it."""

    segments: list  # (kind, tag, vertex tuple); kind in conn|kshort|link|gadget
    absorbers: list
    gadget_classes: Optional[list] = None
    spare_capacity: int = 0

    @property
    def path(self) -> TightPath:
        return TightPath(self.vertex_sequence())

    def vertex_sequence(self) -> tuple:
        out: list[int] = []
        for _, _, verts in self.segments:
            out.extend(verts)
        return tuple(out)

    def vertex_mask(self) -> int:
        return mask_of(self.vertex_sequence())


def build_absorbing_path(
    H: Hypergraph3,
    R: Iterable[int],
    params: PipelineParams,
    seed: Optional[int] = None,
    trace: Optional[dict] = None,
) -> Optional[AbsorbingPath]:
    """Collect disjoint absorbers avoiding the reservoir R, optionally a
    flexible blow-up gadget, and stitch all sub-paths into one tight path with
    inner connection vertices outside R."""
    n = H.n
    rmask = mask_of(R)
    seed = params.seed if seed is None else seed
    rng = np.random.Generator(np.random.PCG64(seed))
    free = n - rmask.bit_count()
    want_gadget = params.use_gadget
    if want_gadget is None:
        # the parity fix sheds 8 or 16 gadget vertices into the leftover, so
        # the gadget only pays off with three or more absorbers beside it
        want_gadget = free >= 104
    reserve = 32 if want_gadget else 0
    if params.absorber_count is not None:
        t_target = params.absorber_count
    else:
        t_target = params.absorber_multiplier * ceil(
            params.gamma * params.gamma * n
        )
        t_target = max(1, min(t_target, (free - reserve - 3) // 22))
    absorbers: list[Absorber] = []
    forbidden = rmask
    while len(absorbers) < t_target:
        A = find_absorber(
            H,
            forbidden=bits(forbidden),
            min_eligibility=params.min_eligibility,
            seed=int(rng.integers(2**31)),
            k333_tries=params.absorber_tries * 10,
        )
        if A is None:
            break
        absorbers.append(A)
        forbidden |= mask_of(A.all_vertices())
    if not absorbers:
        if trace is not None:
            trace["fail_stage"] = "absorber_shortage"
        return None

    gadget_classes = None
    if want_gadget and n - forbidden.bit_count() >= 32:
        gadget_classes = find_c8_blowup(
            H,
            budget=params.gadget_budget,
            seed=int(rng.integers(2**31)),
            avoid=bits(forbidden),
        )

    pieces: list[tuple] = []  # (kind, tag, verts)
    for j, A in enumerate(absorbers):
        pieces.append(("kshort", j, tuple(A.k_path_short())))
        for i in range(3):
            pieces.append(("link", (j, i), tuple(A.link_path(i))))
    if gadget_classes is not None:
        from .motifs import blowup_path_ordering

        pieces.append(("gadget", None, tuple(blowup_path_ordering(gadget_classes))))

    pieces_mask = 0
    for _, _, verts in pieces:
        pieces_mask |= mask_of(verts)
    allowed_base = H.vertex_mask() & ~rmask & ~pieces_mask

    segments: list[tuple] = [pieces[0]]
    used_conn = 0
    for nxt in pieces[1:]:
        prev_end = segments[-1][2][-2:]
        attempt_orders = [nxt, (nxt[0], nxt[1], tuple(reversed(nxt[2])))]
        conn = None
        chosen = None
        for cand in attempt_orders:
            conn = connect(
                H,
                prev_end,
                cand[2][:2],
                bits(allowed_base & ~used_conn),
                max_inner=params.max_inner,
                budget=params.connect_budget,
                seed=int(rng.integers(2**31)),
                lengths=_internal_lengths(params),
            )
            if conn is not None:
                chosen = cand
                break
        if conn is None:
            if trace is not None:
                trace["fail_stage"] = "absorbing_connect"
            return None
        inner = conn.vertices[2:-2]
        used_conn |= mask_of(inner)
        if inner:
            segments.append(("conn", None, tuple(inner)))
        segments.append(chosen)

    ap = AbsorbingPath(
        segments=segments,
        absorbers=absorbers,
        gadget_classes=gadget_classes,
        spare_capacity=len(absorbers),
    )
    seq = ap.vertex_sequence()
    assert verify_tight_path(H, seq)
    ends_ok = bool(
        is_connectable(H, seq[1], seq[0], params.beta)
        and is_connectable(H, seq[-2], seq[-1], params.beta)
    )
    if trace is not None:
        trace.update(
            {
                "absorbers": len(absorbers),
                "gadget": gadget_classes is not None,
                "length": len(seq),
                "connectable_ends": ends_ok,
            }
        )
    if not ends_ok:
        if trace is not None:
            trace["fail_stage"] = "ends_not_connectable"
        return None
    return ap


def _internal_lengths(params: PipelineParams) -> list[int]:
    if params.mode == "ee":
        base = [5, 6, 7]
        rest = [l for l in range(0, params.max_inner + 1) if l not in base]
        return base + rest
    return list(range(0, params.max_inner + 1))


# -- absorption --------------------------------------------------------------------


def absorb(
    H: Hypergraph3,
    A: AbsorbingPath,
    U: Iterable[int],
    trace: Optional[dict] = None,
) -> Optional[TightPath]:
    """Rewrite the absorbing path so it additionally spans U (same ends).

    When |U| is not divisible by three the flexible gadget sheds 8 or 16
    vertices into U first; without a gadget that situation is a divisibility
    failure.  U is then split into triples and matched to unused absorbers on
    eligibility (all six slot assignments tried per pair)."""
    u = sorted(set(int(v) for v in U))
    pmask = A.vertex_mask()
    if any((pmask >> v) & 1 for v in u):
        raise ValueError("U must be disjoint from the absorbing path")
    if not u:
        return A.path
    drop_layers: tuple[int, ...] = ()
    if len(u) % 3 != 0:
        if A.gadget_classes is None:
            if trace is not None:
                trace["fail_stage"] = "divisibility"
            return None
        drop_layers = (1,) if (len(u) + 8) % 3 == 0 else (1, 2)

    from .motifs import blowup_path_ordering

    freed: list[int] = []
    if drop_layers:
        keep = blowup_path_ordering(A.gadget_classes, drop_layers)
        full = blowup_path_ordering(A.gadget_classes)
        freed = [v for v in full if v not in set(keep)]
        u = sorted(u + freed)
    triples = [tuple(u[i : i + 3]) for i in range(0, len(u), 3)]
    if len(triples) > len(A.absorbers):
        if trace is not None:
            trace["fail_stage"] = "capacity"
            trace["matched"] = 0
        return None

    def fit(tr: tuple, ab: Absorber):
        for perm in permutations(range(3)):
            if all((ab.eligible[i] >> tr[perm[i]]) & 1 for i in range(3)):
                return perm
        return None

    # maximum bipartite matching triple -> absorber (augmenting paths)
    match_of_abs: dict[int, int] = {}
    assign: dict[int, tuple] = {}

    def try_assign(ti: int, visited: set) -> bool:
        for j, ab in enumerate(A.absorbers):
            if j in visited:
                continue
            perm = fit(triples[ti], ab)
            if perm is None:
                continue
            visited.add(j)
            if j not in match_of_abs or try_assign(match_of_abs[j], visited):
                match_of_abs[j] = ti
                assign[ti] = (j, perm)
                return True
        return False

    matched = 0
    for ti in range(len(triples)):
        if try_assign(ti, set()):
            matched += 1
    if matched < len(triples):
        if trace is not None:
            trace["fail_stage"] = "matching"
            trace["matched"] = matched
        return None

    rewrites_k = {assign[ti][0] for ti in assign}
    new_segments = []
    for kind, tag, verts in A.segments:
        if kind == "kshort" and tag in rewrites_k:
            new_segments.append((kind, tag, tuple(A.absorbers[tag].k_path_full())))
        elif kind == "link" and tag[0] in rewrites_k:
            j, i = tag
            ti = match_of_abs[j]
            perm = assign[ti][1]
            middle = triples[ti][perm[i]]
            new_segments.append((kind, tag, tuple(A.absorbers[j].link_path(i, middle))))
        elif kind == "gadget" and drop_layers:
            new_segments.append(
                (kind, tag, tuple(blowup_path_ordering(A.gadget_classes, drop_layers)))
            )
        else:
            new_segments.append((kind, tag, verts))
    seq = tuple(v for _, _, verts in new_segments for v in verts)
    old = A.vertex_sequence()
    assert seq[:2] == old[:2] and seq[-2:] == old[-2:], "ends must be preserved"
    assert verify_tight_path(H, seq), "absorption produced an uncertified path"
    if trace is not None:
        trace["absorbed"] = len(triples) * 3 - len(freed)
        trace["gadget_removed"] = len(freed)
    return TightPath(seq)


# -- full pipeline -------------------------------------------------------------------


def find_tight_hamilton(
    H: Hypergraph3, params: Optional[PipelineParams] = None
) -> tuple[Optional[TightPath], dict]:
    """Reservoir sampling, absorbing path, almost cover, cyclic connection
    through the reservoir, parity fixing, absorption.  Returns the verified
    cycle (or None) plus a per-stage trace; retries with derived seeds."""
    if params is None:
        params = PipelineParams()
    n = H.n
    if n < 12:
        raise ValueError("pipeline requires n >= 12; use the exact oracle instead")
    trace: dict = {"attempts": [], "n": n}
    for attempt in range(max(params.retries, 1)):
        at: dict = {"attempt": attempt}
        trace["attempts"].append(at)
        cycle = _attempt(H, params, attempt, at)
        if cycle is not None:
            assert verify_tight_cycle(H, cycle.vertices)
            trace["success_attempt"] = attempt
            trace["cycle_length"] = len(cycle)
            return cycle, trace
    trace["success_attempt"] = None
    return None, trace


def _attempt(H, params, attempt, at) -> Optional[TightPath]:
    n = H.n
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((params.seed, attempt)))
    )
    frac = params.resolved_reservoir(n)
    rmask = 0
    for v in range(n):
        if rng.random() < frac:
            rmask |= 1 << v
    at["reservoir"] = rmask.bit_count()

    ap_trace: dict = {}
    ap = build_absorbing_path(
        H, bits(rmask), params, seed=int(rng.integers(2**31)), trace=ap_trace
    )
    at["absorbing"] = ap_trace
    if ap is None:
        at["fail_stage"] = ap_trace.get("fail_stage", "absorbing")
        return None

    cover_allowed = H.vertex_mask() & ~rmask & ~ap.vertex_mask()
    base_paths, base_uncovered = almost_cover(
        H,
        params.beta,
        params.gamma,
        seed=int(rng.integers(2**31)),
        allowed=bits(cover_allowed),
        attempts=params.cover_attempts,
    )
    at["cover"] = {"paths": len(base_paths), "uncovered": len(base_uncovered)}

    # stage 5's parity fix: first rely on the closing connection's free
    # length; when that cannot work, trim 1-2 vertices off a long covered
    # path end (new end pair must stay connectable) and retry.
    for trim in (0, 1, 2):
        paths = list(base_paths)
        uncovered = set(base_uncovered)
        if trim:
            j = _trimmable(H, paths, trim, params.beta)
            if j is None:
                continue
            kept = paths[j].vertices[:-trim]
            uncovered.update(paths[j].vertices[-trim:])
            paths[j] = TightPath(kept)
        cycle = _connect_and_absorb(H, params, rng, ap, paths, uncovered, rmask, at)
        if cycle is not None:
            at["trim"] = trim
            return cycle
    return None


def _trimmable(H, paths, trim, beta) -> Optional[int]:
    order = sorted(range(len(paths)), key=lambda j: -len(paths[j]))
    for j in order:
        if len(paths[j]) < 4 + trim:
            continue
        kept = paths[j].vertices[:-trim]
        if is_connectable(H, kept[-2], kept[-1], beta):
            return j
    return None


def _connect_and_absorb(H, params, rng, ap, paths, uncovered, rmask, at):
    pieces: list[TightPath] = [ap.path] + paths
    k = len(pieces)
    avail = rmask
    conns: list[Optional[tuple]] = [None] * k
    spare = ap.spare_capacity
    has_gadget = ap.gadget_classes is not None
    lengths_used = []
    for i in range(k):
        frm = pieces[i].end_pair
        to = pieces[(i + 1) % k].start_pair
        avail_count = avail.bit_count()
        remaining = k - i
        if i < k - 1:
            lengths = _spread_lengths(params, avail_count, remaining)
        else:
            lengths = _closing_lengths(
                params, avail_count, len(uncovered), spare, has_gadget
            )
            if lengths is None:
                at["fail_stage"] = "parity_planning"
                return None
        conn = connect(
            H,
            frm,
            to,
            bits(avail),
            max_inner=params.max_inner,
            budget=params.connect_budget,
            seed=int(rng.integers(2**31)),
            lengths=lengths,
        )
        if conn is None:
            at["fail_stage"] = f"connect_{i}"
            return None
        inner = conn.vertices[2:-2]
        lengths_used.append(len(inner))
        conns[i] = inner
        avail &= ~mask_of(inner)
    at["connections"] = lengths_used

    leftover = sorted(set(uncovered) | set(bits(avail)))
    at["leftover"] = len(leftover)
    if not _absorbable(len(leftover), spare, has_gadget):
        at["fail_stage"] = "parity" if len(leftover) % 3 else "capacity"
        return None

    absorb_trace: dict = {}
    new_ap_path = absorb(H, ap, leftover, trace=absorb_trace)
    at["absorb"] = absorb_trace
    if new_ap_path is None:
        at["fail_stage"] = absorb_trace.get("fail_stage", "absorb")
        return None

    seq: list[int] = list(new_ap_path.vertices)
    for i in range(k):
        seq.extend(conns[i])
        if i + 1 < k:
            seq.extend(pieces[i + 1].vertices)
    if not verify_tight_cycle(H, seq):
        at["fail_stage"] = "final_verify"
        return None
    return TightPath(tuple(seq), is_cycle=True)


def _spread_lengths(params, avail, remaining) -> list[int]:
    """Inner-length preference for non-closing connections: spend the
    reservoir evenly, keeping at least one vertex per remaining connection."""
    cap = min(params.max_inner, max(avail - (remaining - 1), 0))
    target = min(cap, max(1, avail // max(remaining, 1)))
    order = sorted(range(0, cap + 1), key=lambda l: (abs(l - target), l))
    if params.mode == "ee":
        ee = [l for l in (5, 6, 7) if l <= cap]
        order = ee + [l for l in order if l not in ee]
    return order


def _absorbable(leftover: int, spare: int, has_gadget: bool) -> bool:
    """Whether a leftover of this size fits the absorbers, counting the 8 or
    16 gadget vertices a parity fix would shed into it."""
    if leftover % 3 == 0:
        removal = 0
    elif not has_gadget:
        return False
    else:
        removal = 8 if (leftover + 8) % 3 == 0 else 16
    return (leftover + removal) // 3 <= spare


def _closing_lengths(params, avail, uncovered, spare, has_gadget) -> Optional[list[int]]:
    """Feasible inner lengths for the closing connection: the leftover
    (uncovered plus unused reservoir) must be absorbable."""
    out = [
        l
        for l in range(0, min(params.max_inner, avail) + 1)
        if _absorbable(uncovered + avail - l, spare, has_gadget)
    ]
    if not out:
        return None
    out.sort(reverse=True)  # consume as much reservoir as possible
    if params.mode == "ee":
        ee = [l for l in (5, 6, 7) if l in out]
        out = ee + [l for l in out if l not in ee]
    return out
