# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: subset DP for tight Hamilton cycles plus the exact
deviation enumerations.  Mirrors :mod:`tightcycles._pykernels`."""

from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memset

NAME = "compiled"

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

ctypedef unsigned long long u64
ctypedef unsigned int u32
ctypedef long long i64


def tight_hamilton_cycle(int n, nbr):
    """Find a tight Hamilton cycle (list of n vertices) or return None.

    ``nbr[u*n+v]`` is the neighbourhood bitmask of the ordered pair (u, v).
    """
    if n < 4:
        return None
    if n > 22:
        raise ValueError("compiled Hamilton kernel supports n <= 22")
    cdef int nsq = n * n
    cdef u32* adj = <u32*> malloc(nsq * sizeof(u32))
    if adj == NULL:
        raise MemoryError()
    cdef int i
    for i in range(nsq):
        adj[i] = <u32> nbr[i]
    cdef u64 nstates = (<u64>1 << n) * <u64>nsq
    cdef u64 nwords = (nstates + 63) >> 6
    cdef u64* dp = <u64*> malloc(nwords * sizeof(u64))
    if dp == NULL:
        free(adj)
        raise MemoryError()

    cdef u32 full = (<u32>1 << n) - 1
    cdef u32 seed, mask, mm, vv, ext, newmask
    cdef u64 idx, bit
    cdef int b, u, v, w
    cdef int cu = -1, cv = -1
    result = None
    try:
        for b in range(1, n):
            if adj[b] == 0:
                continue
            memset(dp, 0, nwords * sizeof(u64))
            seed = 1u | (<u32>1 << b)
            idx = (<u64>seed) * nsq + b
            dp[idx >> 6] |= (<u64>1) << (idx & 63)
            for mask in range(seed, full + 1u):
                if (mask & seed) != seed:
                    continue
                mm = mask
                while mm:
                    u = __builtin_ctzll(mm)
                    mm &= mm - 1
                    vv = mask ^ (<u32>1 << u)
                    while vv:
                        v = __builtin_ctzll(vv)
                        vv &= vv - 1
                        idx = (<u64>mask) * nsq + u * n + v
                        if not (dp[idx >> 6] >> (idx & 63)) & 1:
                            continue
                        ext = adj[u * n + v] & (~mask) & full
                        while ext:
                            w = __builtin_ctzll(ext)
                            ext &= ext - 1
                            newmask = mask | (<u32>1 << w)
                            idx = (<u64>newmask) * nsq + v * n + w
                            dp[idx >> 6] |= (<u64>1) << (idx & 63)
            cu = -1
            for u in range(n):
                for v in range(b + 1, n):
                    if u == v:
                        continue
                    idx = (<u64>full) * nsq + u * n + v
                    if not (dp[idx >> 6] >> (idx & 63)) & 1:
                        continue
                    if not (adj[u * n + v] & 1):
                        continue
                    if not (adj[v * n] >> b) & 1:
                        continue
                    cu = u
                    cv = v
                    break
                if cu >= 0:
                    break
            if cu >= 0:
                result = _extract(n, nsq, adj, dp, b, cu, cv, full)
                break
    finally:
        free(adj)
        free(dp)
    return result


cdef list _extract(int n, int nsq, u32* adj, u64* dp, int b, int u, int v, u32 full):
    cdef u32 seed = 1u | (<u32>1 << b)
    cdef u32 mask = full, mask2
    cdef u64 idx
    cdef int w
    cdef bint found
    rev = [v, u]
    while mask != seed:
        mask2 = mask ^ (<u32>1 << v)
        found = False
        for w in range(n):
            if w == u or not (mask2 >> w) & 1:
                continue
            if not (adj[w * n + u] >> v) & 1:
                continue
            idx = (<u64>mask2) * nsq + w * n + u
            if (dp[idx >> 6] >> (idx & 63)) & 1:
                rev.append(w)
                v = u
                u = w
                mask = mask2
                found = True
                break
        if not found:
            raise AssertionError("DP extraction lost the predecessor chain")
    rev.reverse()
    return rev


def ev_exact(int n, link_off, link_a, link_b, i64 p, i64 q):
    """Exact ev deviation numerator (denominator q) and minimising X mask."""
    if n > 26:
        raise ValueError("compiled ev kernel supports n <= 26")
    cdef int total = len(link_a)
    cdef int* loff = <int*> malloc((n + 1) * sizeof(int))
    cdef int* la = <int*> malloc(max(total, 1) * sizeof(int))
    cdef int* lb = <int*> malloc(max(total, 1) * sizeof(int))
    cdef int* cnt = <int*> calloc(n * n if n else 1, sizeof(int))
    cdef i64* hist = <i64*> calloc(n if n else 1, sizeof(i64))
    if loff == NULL or la == NULL or lb == NULL or cnt == NULL or hist == NULL:
        raise MemoryError()
    cdef int i, v, j, c, delta, k = 0, top = n - 2
    cdef u64 step, lim = (<u64>1) << n
    cdef u64 x = 0
    cdef i64 thr, s, best = 0
    cdef u64 best_mask = 0
    try:
        for i in range(n + 1):
            loff[i] = link_off[i]
        for i in range(total):
            la[i] = link_a[i]
            lb[i] = link_b[i]
        if n >= 2:
            hist[0] = <i64>n * (n - 1) // 2
        for step in range(1, lim):
            v = __builtin_ctzll(step)
            if (x >> v) & 1:
                delta = -1
                x ^= (<u64>1) << v
                k -= 1
            else:
                delta = 1
                x |= (<u64>1) << v
                k += 1
            for j in range(loff[v], loff[v + 1]):
                c = cnt[la[j] * n + lb[j]]
                hist[c] -= 1
                c += delta
                cnt[la[j] * n + lb[j]] = c
                hist[c] += 1
            thr = p * k
            s = 0
            c = 0
            while c <= top and c * q < thr:
                if hist[c]:
                    s += hist[c] * (c * q - thr)
                c += 1
            s *= 2
            if s < best:
                best = s
                best_mask = x
    finally:
        free(loff)
        free(la)
        free(lb)
        free(cnt)
        free(hist)
    return best, best_mask


def vvv_exact(int n, inc_off, inc_a, inc_b, i64 p, i64 q):
    """Exact vvv deviation numerator and minimising (X, Y) masks."""
    if n > 13:
        raise ValueError("compiled vvv kernel supports n <= 13")
    cdef int total = len(inc_a)
    cdef int* ioff = <int*> malloc((n + 1) * sizeof(int))
    cdef int* ia = <int*> malloc(max(total, 1) * sizeof(int))
    cdef int* ib = <int*> malloc(max(total, 1) * sizeof(int))
    cdef i64* margin = <i64*> calloc(n if n else 1, sizeof(i64))
    if ioff == NULL or ia == NULL or ib == NULL or margin == NULL:
        raise MemoryError()
    cdef int i, v, w, z, t, d, kx = 0, ky
    cdef u64 oi, jj, lim = (<u64>1) << n
    cdef u64 x = 0, y
    cdef i64 thr, s, mz, best = 0
    cdef u64 bx = 0, by = 0
    try:
        for i in range(n + 1):
            ioff[i] = inc_off[i]
        for i in range(total):
            ia[i] = inc_a[i]
            ib[i] = inc_b[i]
        for oi in range(lim):
            if oi:
                v = __builtin_ctzll(oi)
                if (x >> v) & 1:
                    x ^= (<u64>1) << v
                    kx -= 1
                else:
                    x |= (<u64>1) << v
                    kx += 1
            for z in range(n):
                margin[z] = 0
            y = 0
            ky = 0
            for jj in range(1, lim):
                w = __builtin_ctzll(jj)
                if (y >> w) & 1:
                    d = -1
                    y ^= (<u64>1) << w
                    ky -= 1
                else:
                    d = 1
                    y |= (<u64>1) << w
                    ky += 1
                for t in range(ioff[w], ioff[w + 1]):
                    if (x >> ia[t]) & 1:
                        margin[ib[t]] += d
                    if (x >> ib[t]) & 1:
                        margin[ia[t]] += d
                thr = p * kx * ky
                s = 0
                for z in range(n):
                    mz = margin[z] * q - thr
                    if mz < 0:
                        s += mz
                if s < best:
                    best = s
                    bx = x
                    by = y
    finally:
        free(ioff)
        free(ia)
        free(ib)
        free(margin)
    return best, bx, by


def ee_exact(int n, nbr, i64 p, i64 q):
    """Exact ee deviation numerator and minimising P mask (pair order of
    ``_pykernels.ee_pair_list``)."""
    cdef int kview = n * (n - 1)
    if kview > 30:
        raise ValueError("compiled ee kernel supports n*(n-1) <= 30")
    cdef u32* adj = <u32*> malloc(max(n * n, 1) * sizeof(u32))
    cdef i64* acount = <i64*> calloc(max(n * n, 1), sizeof(i64))
    cdef i64* bcount = <i64*> calloc(max(n * n, 1), sizeof(i64))
    cdef i64* contrib = <i64*> calloc(max(n * n, 1), sizeof(i64))
    cdef int* px = <int*> malloc(max(kview, 1) * sizeof(int))
    cdef int* py = <int*> malloc(max(kview, 1) * sizeof(int))
    if adj == NULL or acount == NULL or bcount == NULL or contrib == NULL \
            or px == NULL or py == NULL:
        raise MemoryError()
    cdef int i, j, x, y, z, pi, d, idx, bit
    cdef u64 step, lim = (<u64>1) << kview
    cdef u64 pmask = 0, best_pmask = 0
    cdef i64 s = 0, best = 0, val, c
    cdef u32 mask
    try:
        for i in range(n * n):
            adj[i] = <u32> nbr[i]
        j = 0
        for x in range(n):
            for y in range(n):
                if x != y:
                    px[j] = x
                    py[j] = y
                    j += 1
        for step in range(1, lim):
            pi = __builtin_ctzll(step)
            x = px[pi]
            y = py[pi]
            if (pmask >> pi) & 1:
                d = -1
                pmask ^= (<u64>1) << pi
            else:
                d = 1
                pmask |= (<u64>1) << pi
            mask = adj[x * n + y]
            for z in range(n):
                if z == x or z == y:
                    continue
                idx = y * n + z
                s -= contrib[idx]
                bit = <int> ((mask >> z) & 1u)
                acount[idx] += d * bit
                bcount[idx] += d
                val = acount[idx] * q - p * bcount[idx]
                c = val if val < 0 else 0
                contrib[idx] = c
                s += c
            if s < best:
                best = s
                best_pmask = pmask
    finally:
        free(adj)
        free(acount)
        free(bcount)
        free(contrib)
        free(px)
        free(py)
    return best, best_pmask
