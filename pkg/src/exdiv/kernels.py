"""Integer kernels behind the brute-force checks.

Each kernel has a numba implementation and a numpy one with identical
results (including which witness is returned).  ``backend=None`` picks the
process-wide default from :mod:`exdiv._backend`.

Boxes are enumerated with the *first* coordinate varying fastest.
"""
import numpy as np

from ._backend import BACKEND, HAVE_NUMBA, njit

# sentinel for "no proper decomposition exists"
NO_SPLIT = np.iinfo(np.int64).max

_CHUNK = 1 << 18


def _pick(backend):
    backend = backend or BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


# ---------------------------------------------------------------- min split


@njit(cache=True)
def _min_split_nb(gram, d, stop_below):
    s = d.shape[0]
    a = np.zeros(s, np.int64)
    ga = np.zeros(s, np.int64)
    gd = np.zeros(s, np.int64)
    for r in range(s):
        acc = 0
        for c in range(s):
            acc += gram[r, c] * d[c]
        gd[r] = acc
    total = 0
    for c in range(s):
        total += d[c]
    aa = 0
    ad = 0
    asum = 0
    best = NO_SPLIT
    best_a = np.zeros(s, np.int64)
    while True:
        i = 0
        while i < s and a[i] == d[i]:
            k = a[i]
            if k != 0:
                aa += -2 * k * ga[i] + k * k * gram[i, i]
                ad -= k * gd[i]
                for r in range(s):
                    ga[r] -= k * gram[r, i]
                asum -= k
                a[i] = 0
            i += 1
        if i == s:
            break
        aa += 2 * ga[i] + gram[i, i]
        ad += gd[i]
        for r in range(s):
            ga[r] += gram[r, i]
        a[i] += 1
        asum += 1
        if asum == total:
            continue
        val = ad - aa
        if val < best:
            best = val
            for r in range(s):
                best_a[r] = a[r]
            if best < stop_below:
                break
    return best, best_a


def _box_rows(dims, start, stop):
    """Rows ``start:stop`` of the box ``prod(range(n) for n in dims)``."""
    idx = np.arange(start, stop, dtype=np.int64)
    # unravel with the first coordinate fastest
    cols = np.unravel_index(idx, tuple(reversed(dims)))
    return np.stack(cols[::-1], axis=1).astype(np.int64)


def _min_split_np(gram, d, stop_below):
    s = d.shape[0]
    dims = tuple(int(x) + 1 for x in d)
    n = int(np.prod(dims))
    gd = gram @ d
    best = NO_SPLIT
    best_a = np.zeros(s, np.int64)
    # row 0 is A = 0 and row n-1 is A = D
    for start in range(1, n - 1, _CHUNK):
        stop = min(start + _CHUNK, n - 1)
        rows = _box_rows(dims, start, stop)
        vals = rows @ gd - np.einsum("ij,ij->i", rows @ gram, rows)
        if stop_below > np.iinfo(np.int64).min:
            hit = np.flatnonzero(vals < stop_below)
            if hit.size:
                pos = int(hit[0])
                if vals[pos] < best:
                    return int(vals[pos]), rows[pos].copy()
        pos = int(np.argmin(vals))
        if vals[pos] < best:
            best = int(vals[pos])
            best_a = rows[pos].copy()
    return best, best_a


def min_split(gram, d, stop_below=None, backend=None):
    """Minimum of ``A.(D-A)`` over effective ``0 < A < D``.

    Returns ``(value, A)``.  ``value`` is :data:`NO_SPLIT` when ``D`` has no
    proper decomposition.  With ``stop_below`` set the scan ends at the
    first ``A`` whose value is below it, and that ``A`` is returned.
    """
    gram = np.ascontiguousarray(gram, dtype=np.int64)
    d = np.ascontiguousarray(d, dtype=np.int64)
    stop = np.iinfo(np.int64).min if stop_below is None else int(stop_below)
    if _pick(backend) == "numba":
        best, a = _min_split_nb(gram, d, stop)
        return int(best), a
    return _min_split_np(gram, d, stop)


@njit(cache=True)
def _first_connected_nb(gram, rows, m):
    for j in range(rows.shape[0]):
        best, _ = _min_split_nb(gram, rows[j], m)
        if best >= m:
            return j
    return -1


def first_m_connected(gram, rows, m, backend=None):
    """Index of the first row that is ``m``-connected, or ``-1``.

    Rows with no proper decomposition count as connected.
    """
    gram = np.ascontiguousarray(gram, dtype=np.int64)
    rows = np.ascontiguousarray(rows, dtype=np.int64).reshape(-1, gram.shape[0])
    if _pick(backend) == "numba":
        return int(_first_connected_nb(gram, rows, int(m)))
    for j, row in enumerate(rows):
        best, _ = _min_split_np(gram, row, int(m))
        if best >= m:
            return j
    return -1


# ---------------------------------------------------------------- box forms


@njit(cache=True)
def _box_forms_nb(gram, kdeg, caps):
    s = caps.shape[0]
    n = 1
    for c in range(s):
        n *= caps[c] + 1
    rows = np.zeros((n, s), np.int64)
    selfs = np.zeros(n, np.int64)
    kdots = np.zeros(n, np.int64)
    a = np.zeros(s, np.int64)
    ga = np.zeros(s, np.int64)
    aa = 0
    ka = 0
    for j in range(1, n):
        i = 0
        while a[i] == caps[i]:
            k = a[i]
            aa += -2 * k * ga[i] + k * k * gram[i, i]
            ka -= k * kdeg[i]
            for r in range(s):
                ga[r] -= k * gram[r, i]
            a[i] = 0
            i += 1
        aa += 2 * ga[i] + gram[i, i]
        ka += kdeg[i]
        for r in range(s):
            ga[r] += gram[r, i]
        a[i] += 1
        for r in range(s):
            rows[j, r] = a[r]
        selfs[j] = aa
        kdots[j] = ka
    return rows, selfs, kdots


def _box_forms_np(gram, kdeg, caps):
    dims = tuple(int(c) + 1 for c in caps)
    rows = _box_rows(dims, 0, int(np.prod(dims)))
    selfs = np.einsum("ij,ij->i", rows @ gram, rows)
    return rows, selfs, rows @ kdeg


def box_forms(gram, kdeg, caps, backend=None):
    """Every vector ``0 <= v <= caps`` with its self-intersection and K-degree.

    Returns ``(rows, self_int, k_deg)``; row 0 is the zero vector.
    """
    gram = np.ascontiguousarray(gram, dtype=np.int64)
    kdeg = np.ascontiguousarray(kdeg, dtype=np.int64)
    caps = np.ascontiguousarray(caps, dtype=np.int64)
    if _pick(backend) == "numba":
        return _box_forms_nb(gram, kdeg, caps)
    return _box_forms_np(gram, kdeg, caps)
