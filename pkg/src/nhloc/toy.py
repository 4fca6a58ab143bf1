"""Alternating A/B chain in momentum space: Bloch matrix, closed-form bands,
critical hopping and the sublattice order-parameter map."""

import math
from dataclasses import dataclass, replace

import numpy as np

from .eig import eig_small_batch
from .errors import ParameterError
from .ham import Hopping
from .table import Table

COS_FLOOR = 1e-12
EP_TOLERANCE = 1e-12
BOUNDARY_TOLERANCE = 1e-9

TOY_COLUMNS = ("k", "T", "theta", "branch", "re_E", "im_E", "sigma_z_abs",
               "rigidity", "region")


@dataclass(frozen=True)
class ToyParams:
    v_a: float = -1.0
    v_b: float = 1.0
    hopping: Hopping = Hopping(1.0, math.pi / 2)
    spacing_a: float = 1.0

    def __post_init__(self):
        if not self.v_b - self.v_a > 0:
            raise ParameterError(f"need delta_V = v_b - v_a > 0, got {self.v_b - self.v_a}")

    @property
    def delta_v(self):
        return self.v_b - self.v_a

    def with_hopping(self, magnitude=None, theta=None):
        h = self.hopping
        return replace(self, hopping=Hopping(
            h.magnitude if magnitude is None else magnitude,
            h.theta if theta is None else theta))


def bloch_matrix(params, k):
    """[[V_A, t(1+e^{-ika})], [t(1+e^{ika}), V_B]]."""
    t = params.hopping.t
    ka = k * params.spacing_a
    return np.array([[params.v_a, t * (1 + np.exp(-1j * ka))],
                     [t * (1 + np.exp(1j * ka)), params.v_b]], dtype=np.complex128)


def _discriminant(params, k):
    t = params.hopping.t
    c = np.cos(np.asarray(k) * params.spacing_a / 2.0)
    return params.delta_v ** 2 + 16.0 * t * t * c * c


def closed_energies(params, k):
    """(E_minus, E_plus) = (V_A + V_B -/+ sqrt(dV^2 + 16 t^2 cos^2(ka/2))) / 2.

    Uses the principal square root; broadcasting over array ``k`` is allowed.
    """
    root = np.sqrt(np.asarray(_discriminant(params, k), dtype=np.complex128))
    mean = params.v_a + params.v_b
    return 0.5 * (mean - root), 0.5 * (mean + root)


def closed_eigvec(params, k, branch):
    """Unit eigenvector of the ``branch`` (+1 or -1) band and an EP flag.

    Uses (2t(1+e^{-ika}), dV +/- S); where that vector degenerates (the lower
    band at the zone boundary) the equivalent form (-(dV -/+ ... ), 2t(1+e^{ika}))
    from the second row is used instead. At the exceptional point the single
    coalesced eigenvector is returned with the flag set.
    """
    if branch not in (1, -1):
        raise ParameterError("branch must be +1 or -1")
    t = params.hopping.t
    ka = k * params.spacing_a
    disc = complex(_discriminant(params, k))
    scale = params.delta_v ** 2 + 16.0 * abs(t) ** 2 * math.cos(ka / 2.0) ** 2
    is_ep = abs(disc) <= EP_TOLERANCE * max(scale, 1.0)
    root = 0.0 if is_ep else np.sqrt(disc)
    dv = params.delta_v
    first = np.array([2.0 * t * (1 + np.exp(-1j * ka)), dv + branch * root])
    second = np.array([-(dv - branch * root), 2.0 * t * (1 + np.exp(1j * ka))])
    vec = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
    return vec / np.linalg.norm(vec), bool(is_ep)


def critical_hopping(params, k):
    """dV / (4 |cos(ka/2)|), or INFINITY where the cosine vanishes."""
    c = abs(math.cos(k * params.spacing_a / 2.0))
    if c <= COS_FLOOR:
        return math.inf
    return params.delta_v / (4.0 * c)


def classify(params, k, magnitude, theta):
    """BLUE above the critical hopping at maximal non-Hermiticity, YELLOW below."""
    if abs(math.cos(theta)) > COS_FLOOR:
        return "YELLOW"
    tc = critical_hopping(params, k)
    if math.isinf(tc):
        return "YELLOW"
    if abs(magnitude - tc) <= BOUNDARY_TOLERANCE * max(tc, 1.0):
        return "BOUNDARY"
    return "BLUE" if magnitude > tc else "YELLOW"


def bloch_stack(params, ks, magnitudes, theta):
    """Bloch matrices for every (k, T) pair, k-major; shape (len(ks)*len(Ts), 2, 2)."""
    kk, tt = np.meshgrid(np.asarray(ks, float), np.asarray(magnitudes, float), indexing="ij")
    kk = kk.ravel()
    t = tt.ravel() * np.exp(1j * theta)
    ka = kk * params.spacing_a
    stack = np.empty((len(kk), 2, 2), dtype=np.complex128)
    stack[:, 0, 0] = params.v_a
    stack[:, 1, 1] = params.v_b
    stack[:, 0, 1] = t * (1 + np.exp(-1j * ka))
    stack[:, 1, 0] = t * (1 + np.exp(1j * ka))
    return kk, tt.ravel(), stack


def order_parameter_grid(params, k_grid, t_grid, theta=math.pi / 2):
    """|<sigma_z>| and phase rigidity of both bands on a (k, T) grid.

    Every Bloch matrix is diagonalized numerically; bands are labelled by
    the nearest closed-form energy. Rows are k-major, then T, then branch
    ("-" before "+").
    """
    kk, tt, stack = bloch_stack(params, k_grid, t_grid, theta)
    w, vr, vl = eig_small_batch(stack)
    p = np.abs(vr) ** 2
    sz = np.abs(p[:, 0, :] - p[:, 1, :])
    rig = np.abs(np.einsum("bik,bik->bk", vl.conj(), vr))

    t = tt * np.exp(1j * theta)
    c = np.cos(kk * params.spacing_a / 2.0)
    root = np.sqrt((params.delta_v ** 2 + 16.0 * t * t * c * c).astype(np.complex128))
    mean = params.v_a + params.v_b
    e_minus, e_plus = 0.5 * (mean - root), 0.5 * (mean + root)
    direct = np.abs(w[:, 1] - e_plus) + np.abs(w[:, 0] - e_minus)
    swapped = np.abs(w[:, 0] - e_plus) + np.abs(w[:, 1] - e_minus)
    plus = np.where(direct <= swapped, 1, 0)

    rows = []
    for b in range(len(kk)):
        region = classify(params, float(kk[b]), float(tt[b]), theta)
        for branch, j in (("-", 1 - plus[b]), ("+", plus[b])):
            rows.append((float(kk[b]), float(tt[b]), float(theta), branch,
                         float(w[b, j].real), float(w[b, j].imag),
                         float(sz[b, j]), float(rig[b, j]), region))
    return Table(TOY_COLUMNS, rows)


def default_grid(params, steps=201):
    """k a / pi in [0, 1] and T / dV in [0, 1], ``steps`` points each."""
    ks = np.linspace(0.0, math.pi / params.spacing_a, steps)
    ts = np.linspace(0.0, params.delta_v, steps)
    return ks, ts
