"""Localization diagnostics computed from eigenvectors.

Per-state quantities (IPR, sublattice polarization, localization length)
use the 2-norm-normalized right eigenvector. Phase rigidity is the only
quantity that pairs left and right vectors.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import ParameterError

NORM_SLACK = 1e-10
MIN_FIT_POINTS = 4


class Extreme(str, Enum):
    MAX_IPR = "max_ipr"
    MIN_IPR = "min_ipr"


@dataclass(frozen=True)
class ObservableRecord:
    state_index: int
    eigenvalue: complex
    ipr: float
    rigidity: float
    loc_length: float
    sigma_z_abs: Optional[float] = None


@dataclass(frozen=True)
class ScalingFit:
    sizes: tuple
    iprs: tuple
    d2: float
    fit_residual: float
    intercept: float = 0.0


def _normalized(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ParameterError("state vector is zero")
    if abs(nrm - 1.0) > NORM_SLACK:
        psi = psi / nrm
    return psi


def ipr(state):
    """sum_i |psi(i)|^4 of the normalized state."""
    p = np.abs(_normalized(state)) ** 2
    return float(np.sum(p * p))


def ipr_all(vectors):
    """IPR of every column of ``vectors``, identical to calling ipr() per column."""
    return np.array([ipr(vectors[:, k]) for k in range(vectors.shape[1])])


def mipr(spectrum):
    """Mean IPR over all right eigenvectors, summed in state order."""
    values = ipr_all(spectrum.right_vectors)
    total = 0.0
    for x in values:
        total += float(x)
    return total / len(values)


def phase_rigidity(left, right):
    """|<L|R>| with both vectors 2-norm normalized."""
    l = np.asarray(left, dtype=np.complex128)
    r = np.asarray(right, dtype=np.complex128)
    nl = np.linalg.norm(l)
    nr = np.linalg.norm(r)
    if nl == 0.0 or nr == 0.0:
        raise ParameterError("phase rigidity needs nonzero vectors")
    return float(abs(np.vdot(l, r)) / (nl * nr))


def rigidity_all(spectrum):
    l = spectrum.left_vectors
    r = spectrum.right_vectors
    num = np.abs(np.sum(l.conj() * r, axis=0))
    return num / (np.linalg.norm(l, axis=0) * np.linalg.norm(r, axis=0))


def sublattice_mask(n_sites):
    """True on A sites: odd sites in 1-based numbering."""
    mask = np.zeros(n_sites, dtype=bool)
    mask[0::2] = True
    return mask


def sigma_z_abs(state, sublattice=None):
    """|P_A - P_B| for the normalized state; A defaults to odd (1-based) sites."""
    p = np.abs(_normalized(state)) ** 2
    mask = sublattice_mask(len(p)) if sublattice is None else np.asarray(sublattice, dtype=bool)
    return float(abs(p[mask].sum() - p[~mask].sum()))


def localization_length(state):
    """sqrt(<x^2> - <x>^2) with positions 1..N in units of the lattice spacing."""
    p = np.abs(_normalized(state)) ** 2
    p = p / p.sum()
    x = np.arange(1, len(p) + 1, dtype=float)
    mean = float(np.dot(p, x))
    var = float(np.dot(p, (x - mean) ** 2))
    return float(np.sqrt(max(var, 0.0)))


def fractal_dimension(sizes, iprs):
    """Least-squares fit log(IPR) = c - D2 log(N)."""
    sizes = np.asarray(sizes, dtype=float)
    iprs = np.asarray(iprs, dtype=float)
    if sizes.shape != iprs.shape or sizes.ndim != 1:
        raise ParameterError("sizes and iprs must be equal-length sequences")
    if len(sizes) < MIN_FIT_POINTS:
        raise ParameterError(f"need at least {MIN_FIT_POINTS} sizes, got {len(sizes)}")
    if np.any(np.diff(sizes) <= 0):
        raise ParameterError("sizes must be strictly increasing")
    if np.any(iprs <= 0):
        raise ParameterError("iprs must be positive")
    x = np.log(sizes)
    y = np.log(iprs)
    xm = x.mean()
    ym = y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return ScalingFit(tuple(int(s) for s in sizes), tuple(float(v) for v in iprs),
                      -slope, rms, intercept)


def select_extreme_state(spectrum, mode=Extreme.MAX_IPR):
    """Index of the max/min IPR state; ties go to the lowest index."""
    values = ipr_all(spectrum.right_vectors)
    mode = Extreme(mode)
    if mode is Extreme.MAX_IPR:
        return int(np.argmax(values))
    return int(np.argmin(values))


def records(spectrum, with_sigma_z=False):
    """One ObservableRecord per state, in spectrum order."""
    iprs = ipr_all(spectrum.right_vectors)
    rig = rigidity_all(spectrum)
    out = []
    for k in range(len(spectrum)):
        psi = spectrum.right_vectors[:, k]
        out.append(ObservableRecord(
            state_index=k,
            eigenvalue=complex(spectrum.eigenvalues[k]),
            ipr=float(iprs[k]),
            rigidity=float(rig[k]),
            loc_length=localization_length(psi),
            sigma_z_abs=sigma_z_abs(psi) if with_sigma_z else None,
        ))
    return out
