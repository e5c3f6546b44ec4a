"""Hot loops with two interchangeable backends.

Every kernel exists as a numba-compiled function and as a numpy (or plain
Python) twin with the same signature and bit-identical output.  The backend
is chosen by the CYCTOMO_BACKEND environment variable ("numba" or "numpy");
numba is the default when it is importable.
"""

from __future__ import annotations

import os
import types

import numpy as np

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    numba = None

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn


def _initial_backend() -> str:
    want = os.environ.get("CYCTOMO_BACKEND", "").strip().lower()
    if want == "numpy":
        return "numpy"
    if want in ("", "numba"):
        return "numba" if HAVE_NUMBA else "numpy"
    raise ValueError(f"CYCTOMO_BACKEND must be 'numba' or 'numpy', not {want!r}")


BACKEND = _initial_backend()


def backend() -> str:
    return BACKEND


def set_backend(name: str) -> None:
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    BACKEND = name


# -- Galois invariance screen --------------------------------------------------
# For d = (k1,k2,k3,k4) put N = (1-x^k1)(1-x^k2), Q = (1-x^k3)(1-x^k4) in
# Z[x]/(x^m - 1).  f_m(d) is fixed by sigma_a iff N*sigma_a(Q) - sigma_a(N)*Q
# vanishes modulo Phi_m.


@njit(cache=True)
def _binom_prod_into(acc, m, e1, e2, e3, e4, sign):
    # acc += sign * (1-x^e1)(1-x^e2)(1-x^e3)(1-x^e4)
    for b in range(16):
        e = 0
        s = sign
        if b & 1:
            e += e1
            s = -s
        if b & 2:
            e += e2
            s = -s
        if b & 4:
            e += e3
            s = -s
        if b & 8:
            e += e4
            s = -s
        acc[e % m] += s


@njit(cache=True, nogil=True)
def _screen_numba(quads, m, red, autos):
    nq = quads.shape[0]
    phi = red.shape[1]
    out = np.ones(nq, dtype=np.bool_)
    acc = np.zeros(m, dtype=np.int64)
    for q in range(nq):
        k1 = quads[q, 0]
        k2 = quads[q, 1]
        k3 = quads[q, 2]
        k4 = quads[q, 3]
        for t in range(autos.shape[0]):
            a = autos[t]
            acc[:] = 0
            _binom_prod_into(acc, m, k1, k2, (a * k3) % m, (a * k4) % m, 1)
            _binom_prod_into(acc, m, (a * k1) % m, (a * k2) % m, k3, k4, -1)
            bad = False
            for i in range(phi):
                s = 0
                for j in range(m):
                    if acc[j] != 0:
                        s += acc[j] * red[j, i]
                if s != 0:
                    bad = True
                    break
            if bad:
                out[q] = False
                break
    return out


def _binom_prod_numpy(m, e1, e2, e3, e4, sign):
    nq = e1.shape[0]
    acc = np.zeros((nq, m), dtype=np.int64)
    rows = np.arange(nq)
    for b in range(16):
        e = np.zeros(nq, dtype=np.int64)
        s = sign
        for bit, ek in enumerate((e1, e2, e3, e4)):
            if b >> bit & 1:
                e = e + ek
                s = -s
        np.add.at(acc, (rows, e % m), s)
    return acc


def _screen_numpy(quads, m, red, autos):
    quads = np.asarray(quads, dtype=np.int64)
    out = np.ones(quads.shape[0], dtype=np.bool_)
    if quads.shape[0] == 0:
        return out
    k1, k2, k3, k4 = (quads[:, i] for i in range(4))
    for a in autos:
        a = int(a)
        acc = _binom_prod_numpy(m, k1, k2, (a * k3) % m, (a * k4) % m, 1)
        acc -= _binom_prod_numpy(m, (a * k1) % m, (a * k2) % m, k3, k4, 1)
        out &= ~np.any(acc @ red, axis=1)
    return out


def galois_screen(quads, m, red, autos):
    """Mask of quadruples whose f_m value is fixed by every sigma_a, a in autos."""
    quads = np.ascontiguousarray(quads, dtype=np.int64)
    autos = np.ascontiguousarray(autos, dtype=np.int64)
    red = np.ascontiguousarray(red, dtype=np.int64)
    if BACKEND == "numba":
        return _screen_numba(quads, m, red, autos)
    return _screen_numpy(quads, m, red, autos)


# -- batched f_m numerators ----------------------------------------------------
# 1/(1-w) = -(1/M) sum_{j<M} j w^j for w a primitive M-th root of unity, so
# M3*M4*f = N * S3 * S4 with S_k = sum j x^(j k) and an integer result.


@njit(cache=True, nogil=True)
def _fnum_numba(quads, m, red):
    nq = quads.shape[0]
    phi = red.shape[1]
    out = np.zeros((nq, phi), dtype=np.int64)
    dens = np.zeros(nq, dtype=np.int64)
    a = np.zeros(m, dtype=np.int64)
    b = np.zeros(m, dtype=np.int64)
    for q in range(nq):
        k1 = quads[q, 0]
        k2 = quads[q, 1]
        k3 = quads[q, 2]
        k4 = quads[q, 3]
        a[:] = 0
        a[0] += 1
        a[k1 % m] -= 1
        a[k2 % m] -= 1
        a[(k1 + k2) % m] += 1
        den = 1
        for kk in (k3, k4):
            g = m
            x = kk
            while x:
                g, x = x, g % x
            M = m // g
            den *= M
            b[:] = 0
            for i in range(m):
                if a[i] != 0:
                    for j in range(1, M):
                        b[(i + j * kk) % m] -= j * a[i]
            a[:] = b
        for i in range(phi):
            s = 0
            for j in range(m):
                if a[j] != 0:
                    s += a[j] * red[j, i]
            out[q, i] = s
        dens[q] = den
    return out, dens


def _fnum_numpy(quads, m, red):
    quads = np.asarray(quads, dtype=np.int64)
    nq = quads.shape[0]
    rows = np.arange(nq)
    a = np.zeros((nq, m), dtype=np.int64)
    k1, k2, k3, k4 = (quads[:, i] for i in range(4))
    np.add.at(a, (rows, np.zeros(nq, dtype=np.int64)), 1)
    np.add.at(a, (rows, k1 % m), -1)
    np.add.at(a, (rows, k2 % m), -1)
    np.add.at(a, (rows, (k1 + k2) % m), 1)
    dens = np.ones(nq, dtype=np.int64)
    idx = np.arange(m)
    for kk in (k3, k4):
        M = m // np.gcd(kk, m)
        dens *= M
        b = np.zeros_like(a)
        for j in range(1, int(M.max())):
            live = j < M
            if not live.any():
                break
            shift = (j * kk) % m
            src = (idx[None, :] - shift[:, None]) % m
            rolled = np.take_along_axis(a, src, axis=1)
            b -= np.where(live[:, None], j * rolled, 0)
        a = b
    return a @ red, dens


def f_numerators(quads, m, red):
    """Integer numerators and denominators of f_m for a batch of quadruples."""
    quads = np.ascontiguousarray(quads, dtype=np.int64)
    red = np.ascontiguousarray(red, dtype=np.int64)
    if BACKEND == "numba":
        return _fnum_numba(quads, m, red)
    return _fnum_numpy(quads, m, red)


# -- coefficient box scan ------------------------------------------------------
# status 1: certainly inside ball and window; 2: within tol of a boundary.


@njit(cache=True)
def _classify(c, phys, intl, off_p, off_i, r2, planes, tol):
    x = off_p[0]
    y = off_p[1]
    u = off_i[0]
    v = off_i[1]
    for j in range(c.shape[0]):
        x += c[j] * phys[0, j]
        y += c[j] * phys[1, j]
        u += c[j] * intl[0, j]
        v += c[j] * intl[1, j]
    d = r2 - (x * x + y * y)
    if d < -tol:
        return 0
    status = 1
    if d <= tol:
        status = 2
    for e in range(planes.shape[0]):
        s = planes[e, 0] * u + planes[e, 1] * v + planes[e, 2]
        if s < -tol:
            return 0
        if s <= tol:
            status = 2
    return status


@njit(cache=True)
def _box_scan_numba(lo, hi, phys, intl, off_p, off_i, r2, planes, tol):
    dim = lo.shape[0]
    total = 1
    for j in range(dim):
        total *= hi[j] - lo[j] + 1
    cap = 1024
    pts = np.empty((cap, dim), dtype=np.int64)
    st = np.empty(cap, dtype=np.int8)
    cnt = 0
    c = lo.copy()
    cf = np.empty(dim, dtype=np.float64)
    for _ in range(total):
        for j in range(dim):
            cf[j] = c[j]
        s = _classify(cf, phys, intl, off_p, off_i, r2, planes, tol)
        if s:
            if cnt == cap:
                cap *= 2
                p2 = np.empty((cap, dim), dtype=np.int64)
                p2[:cnt] = pts[:cnt]
                pts = p2
                s2 = np.empty(cap, dtype=np.int8)
                s2[:cnt] = st[:cnt]
                st = s2
            pts[cnt] = c
            st[cnt] = s
            cnt += 1
        j = dim - 1
        while j >= 0:
            c[j] += 1
            if c[j] <= hi[j]:
                break
            c[j] = lo[j]
            j -= 1
    return pts[:cnt].copy(), st[:cnt].copy()


def _box_scan_numpy(lo, hi, phys, intl, off_p, off_i, r2, planes, tol):
    dim = lo.shape[0]
    axes = [np.arange(lo[j], hi[j] + 1, dtype=np.int64) for j in range(dim)]
    pts_out, st_out = [], []
    # chunk over the leading axis to bound memory
    for first in axes[0]:
        grids = np.meshgrid(np.array([first]), *axes[1:], indexing="ij")
        c = np.stack([g.ravel() for g in grids], axis=1)
        cf = c.astype(np.float64)
        xy = cf @ phys.T + off_p
        uv = cf @ intl.T + off_i
        d = r2 - (xy * xy).sum(axis=1)
        keep = d >= -tol
        amb = d <= tol
        for e in range(planes.shape[0]):
            s = planes[e, 0] * uv[:, 0] + planes[e, 1] * uv[:, 1] + planes[e, 2]
            keep &= s >= -tol
            amb |= s <= tol
        st = np.where(amb, 2, 1).astype(np.int8)
        pts_out.append(c[keep])
        st_out.append(st[keep])
    if not pts_out:
        return np.empty((0, dim), dtype=np.int64), np.empty(0, dtype=np.int8)
    return np.concatenate(pts_out), np.concatenate(st_out)


def box_scan(lo, hi, phys, intl, off_p, off_i, r2, planes, tol):
    """Float prefilter of an integer coefficient box, in lexicographic order."""
    args = (
        np.ascontiguousarray(lo, dtype=np.int64),
        np.ascontiguousarray(hi, dtype=np.int64),
        np.ascontiguousarray(phys, dtype=np.float64),
        np.ascontiguousarray(intl, dtype=np.float64),
        np.ascontiguousarray(off_p, dtype=np.float64),
        np.ascontiguousarray(off_i, dtype=np.float64),
        float(r2),
        np.ascontiguousarray(planes, dtype=np.float64).reshape(-1, 3),
        float(tol),
    )
    if BACKEND == "numba":
        return _box_scan_numba(*args)
    return _box_scan_numpy(*args)


# -- convex subset enumeration -------------------------------------------------
# Reverse search: the parent of a nonempty convex set C is C minus its extreme
# vertex of largest index.  Each convex subset of the region is produced once.
# orient[a,b,c] is the orientation sign; between[a,b,c] says b lies on [a,c].


def _hull(mask, n, orient, between, lexorder, out):
    start = -1
    for t in range(n):
        i = lexorder[t]
        if (mask >> i) & 1:
            start = i
            break
    if start < 0:
        return 0
    cnt = 0
    cur = start
    while True:
        out[cnt] = cur
        cnt += 1
        q = -1
        for r in range(n):
            if r == cur or not ((mask >> r) & 1):
                continue
            if q < 0:
                q = r
                continue
            o = orient[cur, q, r]
            if o < 0 or (o == 0 and between[cur, q, r]):
                q = r
        if q < 0 or q == start or cnt > n:
            break
        cur = q
    return cnt


def _covers(hull, k, q, orient, between):
    if k == 1:
        return hull[0] == q
    if k == 2:
        return orient[hull[0], hull[1], q] == 0 and between[hull[0], q, hull[1]]
    for i in range(k):
        j = i + 1
        if j == k:
            j = 0
        if orient[hull[i], hull[j], q] < 0:
            return False
    return True


def _enum_convex(n, orient, between, lexorder, weights, limit):
    cap = 1024
    masks = np.zeros(cap, dtype=np.int64)
    hashes = np.zeros(cap, dtype=np.int64)
    cnt = 1  # the empty set
    stack_m = np.zeros(n * n + 2, dtype=np.int64)
    stack_h = np.zeros(n * n + 2, dtype=np.int64)
    sp = 1
    hull = np.zeros(n + 1, dtype=np.int64)
    one = np.int64(1)
    while sp > 0:
        sp -= 1
        cm = stack_m[sp]
        ch = stack_h[sp]
        for p in range(n):
            bit = one << np.int64(p)
            if cm & bit:
                continue
            nm = cm | bit
            k = _hull(nm, n, orient, between, lexorder, hull)
            vmax = -1
            for t in range(k):
                if hull[t] > vmax:
                    vmax = hull[t]
            if vmax != p:
                continue
            ok = True
            for q in range(n):
                if (nm >> q) & 1:
                    continue
                if _covers(hull, k, q, orient, between):
                    ok = False
                    break
            if not ok:
                continue
            nh = ch + weights[p]
            if cnt == cap:
                cap *= 2
                m2 = np.zeros(cap, dtype=np.int64)
                m2[:cnt] = masks[:cnt]
                masks = m2
                h2 = np.zeros(cap, dtype=np.int64)
                h2[:cnt] = hashes[:cnt]
                hashes = h2
            masks[cnt] = nm
            hashes[cnt] = nh
            cnt += 1
            if cnt > limit:
                return masks[:cnt], hashes[:cnt], False
            stack_m[sp] = nm
            stack_h[sp] = nh
            sp += 1
    return masks[:cnt], hashes[:cnt], True


if HAVE_NUMBA:
    # same code object, with the helpers resolved to their jitted versions
    _nb_globals = dict(globals(), _hull=njit(cache=True)(_hull), _covers=njit(cache=True)(_covers))
    _enum_convex_numba = njit(cache=True)(
        types.FunctionType(_enum_convex.__code__, _nb_globals, "_enum_convex_numba")
    )


def enumerate_convex(orient, between, lexorder, weights, limit=50_000_000):
    """All convex subsets of a point table as bitmasks, with additive hashes.

    Returns (masks, hashes, complete).  ``complete`` is False when ``limit``
    subsets were produced before the search finished.
    """
    orient = np.ascontiguousarray(orient, dtype=np.int8)
    between = np.ascontiguousarray(between, dtype=np.bool_)
    lexorder = np.ascontiguousarray(lexorder, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.int64)
    n = orient.shape[0]
    if n > 62:
        raise ValueError("at most 62 points fit a bitmask")
    if BACKEND == "numba":
        return _enum_convex_numba(n, orient, between, lexorder, weights, limit)
    return _enum_convex(n, orient, between, lexorder, weights, limit)
