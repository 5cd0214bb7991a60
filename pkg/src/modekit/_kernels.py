"""Compiled inner loops for extrema scanning and spline envelopes.

Everything here works on contiguous float64 / int64 arrays and never raises;
callers in :mod:`modekit.signal` validate inputs and translate status codes
into exceptions.
"""

import numpy as np
from numba import njit

MIRROR = 1
NO_EXTENSION = 0


@njit(cache=True, nogil=True)
def extrema(x):
    """Indices of interior maxima and minima, plateaus collapsed to midpoints."""
    n = x.size
    imax = np.empty(n, np.int64)
    imin = np.empty(n, np.int64)
    nmax = 0
    nmin = 0
    start = 0
    d_in = 0
    for i in range(1, n):
        if x[i] != x[i - 1]:
            d_out = 1 if x[i] > x[i - 1] else -1
            # the run touching sample 0 is never an extremum
            if start > 0:
                if d_in == 1 and d_out == -1:
                    imax[nmax] = (start + i - 1) // 2
                    nmax += 1
                elif d_in == -1 and d_out == 1:
                    imin[nmin] = (start + i - 1) // 2
                    nmin += 1
            d_in = d_out
            start = i
    return imax[:nmax], imin[:nmin]


@njit(cache=True, nogil=True)
def zero_crossings(x):
    count = 0
    last = 0
    for i in range(x.size):
        v = x[i]
        if v > 0.0:
            s = 1
        elif v < 0.0:
            s = -1
        else:
            continue
        if last != 0 and s != last:
            count += 1
        last = s
    return count


@njit(cache=True, nogil=True)
def extend_knots(idx, vals, n, policy):
    """Reflect the two outermost knots of each side across the signal ends."""
    k = idx.size
    if policy != MIRROR or k == 0:
        return idx.astype(np.float64), vals.copy()
    last = n - 1
    # knots sitting on an end would reflect onto themselves; skip them
    left = np.empty(2, np.int64)
    nl = 0
    for j in range(min(2, k)):
        if idx[j] > 0:
            left[nl] = j
            nl += 1
    right = np.empty(2, np.int64)
    nr = 0
    for j in range(min(2, k)):
        if idx[k - 1 - j] < last:
            right[nr] = k - 1 - j
            nr += 1
    m = k + nl + nr
    xs = np.empty(m, np.float64)
    ys = np.empty(m, np.float64)
    p = 0
    for q in range(nl - 1, -1, -1):
        xs[p] = -idx[left[q]]
        ys[p] = vals[left[q]]
        p += 1
    for j in range(k):
        xs[p] = idx[j]
        ys[p] = vals[j]
        p += 1
    for q in range(nr):
        xs[p] = 2 * last - idx[right[q]]
        ys[p] = vals[right[q]]
        p += 1
    return xs, ys


@njit(cache=True, nogil=True)
def natural_spline_eval(xs, ys, n):
    """Natural cubic spline through (xs, ys) sampled at 0..n-1.

    xs must be strictly increasing with at least two entries. Positions
    outside the knot range use the outermost segment's polynomial.
    """
    m = xs.size
    out = np.empty(n, np.float64)
    h = np.empty(m - 1, np.float64)
    for j in range(m - 1):
        h[j] = xs[j + 1] - xs[j]
    curv = np.zeros(m, np.float64)
    if m > 2:
        # Thomas algorithm on the interior second derivatives
        size = m - 2
        c = np.empty(size, np.float64)
        d = np.empty(size, np.float64)
        for j in range(size):
            diag = 2.0 * (h[j] + h[j + 1])
            rhs = 6.0 * ((ys[j + 2] - ys[j + 1]) / h[j + 1] - (ys[j + 1] - ys[j]) / h[j])
            if j > 0:
                diag -= h[j] * c[j - 1]
                rhs -= h[j] * d[j - 1]
            c[j] = h[j + 1] / diag
            d[j] = rhs / diag
        curv[size] = d[size - 1]
        for j in range(size - 2, -1, -1):
            curv[j + 1] = d[j] - c[j] * curv[j + 2]
    seg = 0
    for t in range(n):
        tf = float(t)
        while seg < m - 2 and tf > xs[seg + 1]:
            seg += 1
        hj = h[seg]
        a = xs[seg + 1] - tf
        b = tf - xs[seg]
        out[t] = ((curv[seg] * a * a * a + curv[seg + 1] * b * b * b) / (6.0 * hj)
                  + (ys[seg] / hj - curv[seg] * hj / 6.0) * a
                  + (ys[seg + 1] / hj - curv[seg + 1] * hj / 6.0) * b)
    return out


@njit(cache=True, nogil=True)
def envelopes(x):
    """Upper and lower mirror-extended spline envelopes of x.

    Returns (upper, lower, n_max, n_min). When either kind of extremum is
    missing the envelope arrays are empty and the caller must bail out.
    """
    n = x.size
    imax, imin = extrema(x)
    if imax.size == 0 or imin.size == 0:
        empty = np.empty(0, np.float64)
        return empty, empty, imax.size, imin.size
    xs, ys = extend_knots(imax, x[imax], n, MIRROR)
    upper = natural_spline_eval(xs, ys, n)
    xs, ys = extend_knots(imin, x[imin], n, MIRROR)
    lower = natural_spline_eval(xs, ys, n)
    return upper, lower, imax.size, imin.size


@njit(cache=True, nogil=True)
def significant_extrema(x, tol):
    """Count turning points whose swing on both sides exceeds ``tol``.

    With ``tol == 0`` this matches the strict extrema count on signals
    without plateaus; a positive ``tol`` ignores round-off ripple.
    """
    n = x.size
    direction = 0
    hi = x[0]
    lo = x[0]
    count = 0
    for i in range(1, n):
        v = x[i]
        if direction == 0:
            if v - lo > tol:
                direction = 1
                hi = v
            elif hi - v > tol:
                direction = -1
                lo = v
            else:
                hi = max(hi, v)
                lo = min(lo, v)
        elif direction == 1:
            if v > hi:
                hi = v
            elif hi - v > tol:
                count += 1
                direction = -1
                lo = v
        else:
            if v < lo:
                lo = v
            elif v - lo > tol:
                count += 1
                direction = 1
                hi = v
    return count
