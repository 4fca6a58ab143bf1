"""Dense eigendecomposition with paired left/right vectors."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import NonConvergenceError, ParameterError
from . import _kernels

RESIDUAL_TOLERANCE = 1e-8
MAXIT_FACTOR = 40
EP_EIGENVALUE_GAP = 1e-6
EP_OVERLAP = 0.99
FALLBACK_SHIFT = 1e-10
# real parts closer than this (relative to ||H||_F) count as tied when sorting
SORT_RESOLUTION = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by (real, imag) with unit-norm vectors as columns.

    ``residuals[k]`` is ||H r_k - lambda_k r_k||_2 and ``left_residuals[k]``
    is ||l_k^H H - lambda_k l_k^H||_2, both for unit vectors.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    residuals: np.ndarray
    left_residuals: np.ndarray
    ep_flags: np.ndarray
    matrix_norm: float
    sweeps: int = 0

    def __len__(self):
        return len(self.eigenvalues)

    def right(self, k):
        return self.right_vectors[:, k]

    def left(self, k):
        return self.left_vectors[:, k]

    def max_residual(self):
        return float(max(self.residuals.max(), self.left_residuals.max()))

    def certified(self, tolerance=RESIDUAL_TOLERANCE):
        return self.max_residual() <= tolerance * self.matrix_norm


@dataclass(frozen=True)
class LeftVectorMatch:
    """Independently computed left vectors aligned to a Spectrum's ordering."""

    vectors: np.ndarray
    ep_cluster: np.ndarray
    distance: np.ndarray


def canonical_order(w, norm):
    """Indices sorting eigenvalues by real part, then imaginary part.

    Real parts are snapped to a grid of SORT_RESOLUTION * norm first so that
    rounding noise does not decide the order of conjugate pairs.
    """
    q = SORT_RESOLUTION * max(norm, np.finfo(float).tiny)
    return np.lexsort((w.imag, np.round(w.real / q)))


def _as_array(matrix):
    a = getattr(matrix, "entries", matrix)
    a = np.array(a, dtype=np.complex128, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ParameterError("matrix dimension must be at least 2")
    if not np.all(np.isfinite(a)):
        raise ParameterError("matrix has non-finite entries")
    return a


def residual(matrix, lam, vector):
    """||H v - lam v||_2 / ||v||_2."""
    a = np.asarray(getattr(matrix, "entries", matrix), dtype=np.complex128)
    v = np.asarray(vector, dtype=np.complex128)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise ParameterError("residual of a zero vector is undefined")
    return float(np.linalg.norm(a @ v - lam * v) / nv)


def _column_residuals(a_sparse, vecs, lams):
    r = a_sparse @ vecs - vecs * lams[None, :]
    return np.linalg.norm(r, axis=0)


def _normalize_columns(v):
    return v / np.linalg.norm(v, axis=0)[None, :]


def _inverse_iteration(a, lam, start, norm):
    # one step of shifted inverse iteration, used when back-substitution is unreliable
    shift = lam + FALLBACK_SHIFT * max(norm, 1.0)
    m = a - shift * np.eye(a.shape[0])
    try:
        y = np.linalg.solve(m, start)
    except np.linalg.LinAlgError:
        return start
    ny = np.linalg.norm(y)
    if not np.isfinite(ny) or ny == 0.0:
        return start
    return y / ny


def _ep_flags(w, vr, norm):
    n = len(w)
    flags = np.zeros(n, dtype=bool)
    gap = EP_EIGENVALUE_GAP * norm
    diff = np.abs(w[:, None] - w[None, :])
    jj, kk = np.nonzero(np.triu(diff < gap, k=1))
    for j, k in zip(jj, kk):
        if abs(np.vdot(vr[:, j], vr[:, k])) > EP_OVERLAP:
            flags[j] = flags[k] = True
    return flags


def eig(matrix, balance=True, residual_tolerance=RESIDUAL_TOLERANCE,
        maxit_factor=MAXIT_FACTOR):
    """Full eigendecomposition of a dense complex matrix.

    Accepts a HamiltonianMatrix or any square array. Right vectors come from
    back-substitution on the Schur factor. For complex-symmetric input the
    left vectors are the conjugated right vectors; otherwise they come from
    forward substitution on the same Schur factor.

    Raises NonConvergenceError if some eigenvalue does not deflate within
    ``maxit_factor * N`` QR sweeps.
    """
    a = _as_array(matrix)
    n = a.shape[0]
    norm = float(np.linalg.norm(a))
    status, idx, w, t, zt, d, sweeps = _kernels.schur_decompose(a, balance, maxit_factor)
    if status != _kernels.OK:
        raise NonConvergenceError(int(idx), int(sweeps))
    z = zt.T
    xr, r_pert = _kernels.right_triangular_vectors(t)
    vr = _normalize_columns(d[:, None] * (z @ xr))

    symmetric = np.array_equal(a, a.T)
    if symmetric:
        vl = vr.conj()
        l_pert = r_pert
    else:
        xl, l_pert = _kernels.left_triangular_vectors(t)
        vl = _normalize_columns((z @ xl) / d[:, None])

    order = canonical_order(w, norm)
    w = w[order]
    vr = vr[:, order]
    vl = vl[:, order]
    r_pert = r_pert[order]
    l_pert = l_pert[order]

    a_sp = sp.csr_matrix(a)
    ah_sp = a_sp.conj().T.tocsr()
    res = _column_residuals(a_sp, vr, w)
    lres = _column_residuals(ah_sp, vl, w.conj())

    limit = residual_tolerance * norm
    for k in np.nonzero(r_pert & (res > limit))[0]:
        vr[:, k] = _inverse_iteration(a, w[k], vr[:, k], norm)
        if symmetric:
            vl[:, k] = vr[:, k].conj()
    if symmetric:
        lres = _column_residuals(ah_sp, vl, w.conj())
    else:
        for k in np.nonzero(l_pert & (lres > limit))[0]:
            vl[:, k] = _inverse_iteration(a.conj().T, np.conj(w[k]), vl[:, k], norm)
        lres = _column_residuals(ah_sp, vl, w.conj())
    res = _column_residuals(a_sp, vr, w)

    flags = _ep_flags(w, vr, norm)
    for arr in (w, vr, vl, res, lres, flags):
        arr.setflags(write=False)
    return Spectrum(w, vr, vl, res, lres, flags, norm, int(sweeps))


def eigvals(matrix, balance=True, maxit_factor=MAXIT_FACTOR):
    """Eigenvalues only, in the canonical (real, imag) order."""
    a = _as_array(matrix)
    status, idx, w, _, _, _, sweeps = _kernels.schur_decompose(a, balance, maxit_factor)
    if status != _kernels.OK:
        raise NonConvergenceError(int(idx), int(sweeps))
    return w[canonical_order(w, float(np.linalg.norm(a)))]


def left_vectors_generic(matrix, spectrum, match_tolerance=1e-8):
    """Left eigenvectors from a separate decomposition of H^H.

    Each eigenvalue lambda_k is matched to the eigenvalue of H^H closest to
    conj(lambda_k). When two or more candidates lie within
    ``match_tolerance * ||H||_F`` the state is flagged as part of an
    exceptional-point cluster rather than treated as an error.
    """
    a = _as_array(matrix)
    adj = eig(a.conj().T)
    mu = adj.eigenvalues.conj()
    tol = match_tolerance * max(spectrum.matrix_norm, np.finfo(float).tiny)
    n = len(spectrum)
    vecs = np.empty((n, n), dtype=np.complex128)
    cluster = np.zeros(n, dtype=bool)
    dist = np.empty(n)
    for k, lam in enumerate(spectrum.eigenvalues):
        gaps = np.abs(mu - lam)
        j = int(np.argmin(gaps))
        dist[k] = gaps[j]
        if np.count_nonzero(gaps <= tol) > 1:
            cluster[k] = True
        vecs[:, k] = adj.right_vectors[:, j]
    return LeftVectorMatch(vecs, cluster, dist)


def eig_small_batch(stack, maxit_factor=MAXIT_FACTOR):
    """Decompose a stack of small matrices (shape (B, n, n)) in one compiled loop.

    Returns (eigenvalues, right, left) with vectors as columns and unit
    2-norm; per-matrix ordering is the kernel's Schur order, not sorted.
    """
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    status, w, vr, vl = _kernels.eig_small_batch(stack, maxit_factor)
    bad = np.nonzero(status)[0]
    if len(bad):
        raise NonConvergenceError(-1, context={"batch_index": int(bad[0])})
    return w, vr, vl
