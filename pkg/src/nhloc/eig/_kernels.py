"""Compiled kernels for the dense complex eigensolver.

Pipeline: diagonal balancing -> Householder Hessenberg reduction ->
implicit single-shift (Wilkinson) complex QR to Schur form -> eigenvectors
of the triangular factor by back/forward substitution.

Schur vectors are kept transposed (``zt[k]`` is column ``k`` of Z) so that
the rotation updates walk contiguous memory.
"""

import numpy as np
from numba import njit

EPS = np.finfo(np.float64).eps
SAFMIN = np.finfo(np.float64).tiny / EPS
RESCALE_AT = 1e100
# cap on a single balancing factor, keeps D and D^-1 far from overflow
BALANCE_LIMIT = 2.0 ** 300

# status codes returned by schur_qr
OK = 0
NO_CONVERGENCE = 1


@njit(cache=True)
def _cabs1(z):
    return abs(z.real) + abs(z.imag)


@njit(cache=True)
def balance(a):
    """Parlett-Reinsch scaling (radix 2) in place; returns the scale vector d.

    The balanced matrix is D^-1 A D.
    """
    n = a.shape[0]
    d = np.ones(n)
    radix = 2.0
    converged = False
    while not converged:
        converged = True
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += _cabs1(a[j, i])
                    r += _cabs1(a[i, j])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g and f < BALANCE_LIMIT:
                f *= radix
                c *= radix * radix
            g = r * radix
            while c >= g and f > 1.0 / BALANCE_LIMIT:
                f /= radix
                c /= radix * radix
            if (c + r) / f < 0.95 * s:
                converged = False
                d[i] *= f
                for j in range(n):
                    a[i, j] /= f
                for j in range(n):
                    a[j, i] *= f
    return d


@njit(cache=True)
def hessenberg(a):
    """Reduce ``a`` to upper Hessenberg form in place.

    Returns Q transposed (``qt[k]`` is column k of Q) with A = Q H Q^H.
    Columns whose sub-subdiagonal part is already zero are skipped, so
    tridiagonal input costs O(n^2).
    """
    n = a.shape[0]
    qt = np.eye(n, dtype=np.complex128)
    v = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        # scale by the largest entry so squares neither underflow nor overflow
        tail = 0.0
        for i in range(k + 2, n):
            tail = max(tail, _cabs1(a[i, k]))
        if tail == 0.0:
            continue
        scale = max(tail, _cabs1(a[k + 1, k]))
        m = n - k - 1
        xnorm = 0.0
        for i in range(m):
            v[i] = a[k + 1 + i, k] / scale
            xnorm += v[i].real ** 2 + v[i].imag ** 2
        xnorm = np.sqrt(xnorm)
        alpha = v[0]
        aa = abs(alpha)
        phase = alpha / aa if aa > 0.0 else 1.0 + 0.0j
        # v = x + phase*||x|| e1, reflector P = I - 2 v v^H / (v^H v)
        v[0] = alpha + phase * xnorm
        vnorm2 = 0.0
        for i in range(m):
            vnorm2 += v[i].real ** 2 + v[i].imag ** 2
        beta = 2.0 / vnorm2
        # left: A[k+1:, k:] -= beta v (v^H A)
        for j in range(k, n):
            s = 0.0j
            for i in range(m):
                s += v[i].conjugate() * a[k + 1 + i, j]
            s *= beta
            for i in range(m):
                a[k + 1 + i, j] -= v[i] * s
        # right: A[:, k+1:] -= beta (A v) v^H
        for i in range(n):
            s = 0.0j
            for j in range(m):
                s += a[i, k + 1 + j] * v[j]
            s *= beta
            for j in range(m):
                a[i, k + 1 + j] -= s * v[j].conjugate()
        # Q <- Q P ; qt rows are Q columns
        for r in range(n):
            s = 0.0j
            for j in range(m):
                s += qt[k + 1 + j, r] * v[j]
            s *= beta
            for j in range(m):
                qt[k + 1 + j, r] -= s * v[j].conjugate()
        for i in range(k + 2, n):
            a[i, k] = 0.0j
    return qt


@njit(cache=True)
def _rotation(x, y):
    """Return (c, s, r) with [[c, s], [-conj(s), c]] @ [x, y] = [r, 0]."""
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0.0j, x
    ax = abs(x)
    if ax == 0.0:
        return 0.0, 1.0 + 0.0j, y
    nrm = np.hypot(ax, ay)
    ph = x / ax
    c = ax / nrm
    s = ph * y.conjugate() / nrm
    return c, s, ph * nrm


@njit(cache=True)
def _wilkinson(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] closer to d."""
    p = 0.5 * (a - d)
    bc = b * c
    disc = np.sqrt(p * p + bc)
    if (p.real * disc.real + p.imag * disc.imag) < 0.0:
        disc = -disc
    den = p + disc
    if den == 0.0:
        return d
    return d - bc / den


@njit(cache=True, fastmath=True)
def _rotate_rows(xr, xi, k, j0, j1, c, sr, si):
    # rows (k, k+1) <- G rows, G = [[c, s], [-conj(s), c]]
    for j in range(j0, j1):
        ar = xr[k, j]
        ai = xi[k, j]
        br = xr[k + 1, j]
        bi = xi[k + 1, j]
        xr[k, j] = c * ar + sr * br - si * bi
        xi[k, j] = c * ai + sr * bi + si * br
        xr[k + 1, j] = c * br - sr * ar - si * ai
        xi[k + 1, j] = c * bi - sr * ai + si * ar


@njit(cache=True, fastmath=True)
def _rotate_cols(xr, xi, k, i0, i1, c, sr, si):
    # cols (k, k+1) <- cols G^H
    for i in range(i0, i1):
        ar = xr[i, k]
        ai = xi[i, k]
        br = xr[i, k + 1]
        bi = xi[i, k + 1]
        xr[i, k] = c * ar + sr * br + si * bi
        xi[i, k] = c * ai + sr * bi - si * br
        xr[i, k + 1] = c * br - sr * ar + si * ai
        xi[i, k + 1] = c * bi - sr * ai - si * ar


@njit(cache=True)
def schur_qr(hr, hi, zr, zi, maxit_factor):
    """Complex Schur form of an upper Hessenberg matrix, in place.

    The matrix is held as separate real/imaginary arrays (``hr``, ``hi``)
    so the rotation loops vectorize; ``zr + i zi`` is Z transposed and
    accumulates the transforms. Returns (status, index, w, sweeps); on
    failure ``index`` is the eigenvalue position that did not deflate
    within ``maxit_factor * n`` sweeps.
    """
    n = hr.shape[0]
    w = np.empty(n, dtype=np.complex128)
    maxit = maxit_factor * max(n, 1)
    ihi = n - 1
    its = 0
    sweeps = 0
    while ihi >= 0:
        l = ihi
        while l > 0:
            sub = abs(hr[l, l - 1]) + abs(hi[l, l - 1])
            tst = (abs(hr[l - 1, l - 1]) + abs(hi[l - 1, l - 1])
                   + abs(hr[l, l]) + abs(hi[l, l]))
            if tst == 0.0:
                if l - 2 >= 0:
                    tst += abs(hr[l - 1, l - 2])
                if l + 1 <= ihi:
                    tst += abs(hr[l + 1, l])
            if sub <= EPS * tst or sub <= SAFMIN:
                hr[l, l - 1] = 0.0
                hi[l, l - 1] = 0.0
                break
            l -= 1
        if l == ihi:
            w[ihi] = complex(hr[ihi, ihi], hi[ihi, ihi])
            ihi -= 1
            its = 0
            continue
        its += 1
        sweeps += 1
        if its > maxit:
            return NO_CONVERGENCE, ihi, w, sweeps
        if its % 10 == 0:
            # exceptional shift to break cycles
            if its % 20 == 0:
                mu = complex(hr[ihi, ihi] + 0.75 * (abs(hr[ihi, ihi - 1]) + abs(hi[ihi, ihi - 1])),
                             hi[ihi, ihi])
            else:
                mu = complex(hr[l, l] + 0.75 * (abs(hr[l + 1, l]) + abs(hi[l + 1, l])), hi[l, l])
        else:
            mu = _wilkinson(complex(hr[ihi - 1, ihi - 1], hi[ihi - 1, ihi - 1]),
                            complex(hr[ihi - 1, ihi], hi[ihi - 1, ihi]),
                            complex(hr[ihi, ihi - 1], hi[ihi, ihi - 1]),
                            complex(hr[ihi, ihi], hi[ihi, ihi]))
        x = complex(hr[l, l], hi[l, l]) - mu
        y = complex(hr[l + 1, l], hi[l + 1, l])
        for k in range(l, ihi):
            if k > l:
                x = complex(hr[k, k - 1], hi[k, k - 1])
                y = complex(hr[k + 1, k - 1], hi[k + 1, k - 1])
            c, s, r = _rotation(x, y)
            if k > l:
                hr[k, k - 1] = r.real
                hi[k, k - 1] = r.imag
                hr[k + 1, k - 1] = 0.0
                hi[k + 1, k - 1] = 0.0
            _rotate_rows(hr, hi, k, k, n, c, s.real, s.imag)
            _rotate_cols(hr, hi, k, 0, min(k + 2, ihi) + 1, c, s.real, s.imag)
            # Z^T rows transform with conj(s)
            _rotate_rows(zr, zi, k, 0, n, c, s.real, -s.imag)
    return OK, -1, w, sweeps


@njit(cache=True)
def _smin(t):
    n = t.shape[0]
    tnorm = 0.0
    for i in range(n):
        for j in range(i, n):
            tnorm = max(tnorm, _cabs1(t[i, j]))
    return max(EPS * tnorm, SAFMIN)


@njit(cache=True, fastmath=True)
def right_triangular_vectors(t):
    """Right eigenvectors of upper triangular ``t`` as columns.

    Returns (x, perturbed) where perturbed[k] marks a pivot replaced by
    the small-pivot floor during the solve.
    """
    n = t.shape[0]
    x = np.zeros((n, n), dtype=np.complex128)
    perturbed = np.zeros(n, dtype=np.bool_)
    smin = _smin(t)
    for k in range(n - 1, -1, -1):
        lam = t[k, k]
        x[k, k] = 1.0
        for j in range(k - 1, -1, -1):
            acc = 0.0j
            for m in range(j + 1, k + 1):
                acc += t[j, m] * x[m, k]
            piv = t[j, j] - lam
            if _cabs1(piv) < smin:
                piv = smin + 0.0j
                perturbed[k] = True
            val = -acc / piv
            x[j, k] = val
            if _cabs1(val) > RESCALE_AT:
                for m in range(j, k + 1):
                    x[m, k] /= RESCALE_AT
    return x, perturbed


@njit(cache=True, fastmath=True)
def left_triangular_vectors(t):
    """Left eigenvectors y_k of upper triangular ``t`` (y^H T = lambda y^H), as columns."""
    n = t.shape[0]
    y = np.zeros((n, n), dtype=np.complex128)
    perturbed = np.zeros(n, dtype=np.bool_)
    smin = _smin(t)
    for k in range(n):
        lamc = t[k, k].conjugate()
        y[k, k] = 1.0
        # (T^H - conj(lam)) y = 0, T^H lower triangular: forward substitution
        for j in range(k + 1, n):
            acc = 0.0j
            for m in range(k, j):
                acc += t[m, j].conjugate() * y[m, k]
            piv = t[j, j].conjugate() - lamc
            if _cabs1(piv) < smin:
                piv = smin + 0.0j
                perturbed[k] = True
            val = -acc / piv
            y[j, k] = val
            if _cabs1(val) > RESCALE_AT:
                for m in range(k, j + 1):
                    y[m, k] /= RESCALE_AT
    return y, perturbed


@njit(cache=True)
def schur_decompose(a, do_balance, maxit_factor):
    """Balance + Hessenberg + QR on a copy of ``a``.

    Returns (status, stuck_index, w, t, zt, d, sweeps) with
    D^-1 A D = Z T Z^H and ``zt`` = Z^T.
    """
    h = a.copy()
    n = h.shape[0]
    if do_balance:
        d = balance(h)
    else:
        d = np.ones(n)
    qt = hessenberg(h)
    hr = np.ascontiguousarray(h.real)
    hi = np.ascontiguousarray(h.imag)
    zr = np.ascontiguousarray(qt.real)
    zi = np.ascontiguousarray(qt.imag)
    status, idx, w, sweeps = schur_qr(hr, hi, zr, zi, maxit_factor)
    t = hr + 1j * hi
    zt = zr + 1j * zi
    return status, idx, w, t, zt, d, sweeps


@njit(cache=True)
def eig_small_batch(stack, maxit_factor):
    """Eigen-decompose a stack of small matrices.

    Returns (status, w, vr, vl) with unit-norm right and left vectors as
    columns; status[b] != 0 marks a failed matrix.
    """
    nb = stack.shape[0]
    n = stack.shape[1]
    w = np.empty((nb, n), dtype=np.complex128)
    vr = np.empty((nb, n, n), dtype=np.complex128)
    vl = np.empty((nb, n, n), dtype=np.complex128)
    status = np.zeros(nb, dtype=np.int64)
    for b in range(nb):
        st, idx, wb, t, zt, d, _ = schur_decompose(stack[b], True, maxit_factor)
        status[b] = st
        if st != OK:
            continue
        xr, _ = right_triangular_vectors(t)
        xl, _ = left_triangular_vectors(t)
        for k in range(n):
            w[b, k] = t[k, k]
            nr = 0.0
            nl = 0.0
            for i in range(n):
                sr = 0.0j
                sl = 0.0j
                for m in range(n):
                    sr += zt[m, i] * xr[m, k]
                    sl += zt[m, i] * xl[m, k]
                sr *= d[i]
                sl /= d[i]
                vr[b, i, k] = sr
                vl[b, i, k] = sl
                nr += sr.real ** 2 + sr.imag ** 2
                nl += sl.real ** 2 + sl.imag ** 2
            nr = np.sqrt(nr)
            nl = np.sqrt(nl)
            for i in range(n):
                vr[b, i, k] /= nr
                vl[b, i, k] /= nl
    return status, w, vr, vl
