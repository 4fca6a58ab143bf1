"""Sweeps, landscapes and plot-ready tables.

Every run goes through summarize(), which diagonalizes one chain and keeps
only per-state scalars plus the probability profiles of the two extreme
states. Summaries are memoized per process, so a landscape and a sweep over
the same points share their diagonalizations.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache, partial

import numpy as np

from .. import obs
from ..eig import eig
from ..errors import NonConvergenceError, ParameterError
from ..ham import Hopping, build
from ..table import Table

SUMMARY_CACHE_SIZE = 4096
PROFILE_FLOOR = 1e-13


class Quantity(str, Enum):
    LOG_IPR = "log_ipr"
    D2 = "d2"
    RIGIDITY = "rigidity"


@dataclass(frozen=True)
class ChainSummary:
    eigenvalues: np.ndarray
    iprs: np.ndarray
    rigidities: np.ndarray
    sigma_z: np.ndarray
    loc_lengths: np.ndarray
    matrix_norm: float
    max_residual: float
    max_state: int
    min_state: int
    max_profile: np.ndarray
    min_profile: np.ndarray
    wall_time: float

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def mipr(self):
        total = 0.0
        for x in self.iprs:
            total += float(x)
        return total / len(self.iprs)

    def extreme(self, mode):
        return self.max_state if obs.Extreme(mode) is obs.Extreme.MAX_IPR else self.min_state


def _summarize(chain, hopping):
    start = time.perf_counter()
    h = build(chain, hopping)
    try:
        spectrum = eig(h)
    except NonConvergenceError as exc:
        raise exc.with_context(n_sites=chain.n_sites, T=hopping.magnitude,
                               theta=hopping.theta, model=repr(chain.model)) from None
    vr = spectrum.right_vectors
    n = len(spectrum)
    iprs = obs.ipr_all(vr)
    probs = np.abs(vr) ** 2
    mask = obs.sublattice_mask(n)
    x = np.arange(1, n + 1, dtype=float)
    mean = x @ probs
    var = (x * x) @ probs - mean * mean
    imax = int(np.argmax(iprs))
    imin = int(np.argmin(iprs))
    out = ChainSummary(
        eigenvalues=spectrum.eigenvalues.copy(),
        iprs=iprs,
        rigidities=obs.rigidity_all(spectrum),
        sigma_z=np.abs(probs[mask].sum(axis=0) - probs[~mask].sum(axis=0)),
        loc_lengths=np.sqrt(np.maximum(var, 0.0)),
        matrix_norm=spectrum.matrix_norm,
        max_residual=spectrum.max_residual(),
        max_state=imax,
        min_state=imin,
        max_profile=probs[:, imax].copy(),
        min_profile=probs[:, imin].copy(),
        wall_time=time.perf_counter() - start,
    )
    for arr in (out.eigenvalues, out.iprs, out.rigidities, out.sigma_z, out.loc_lengths,
                out.max_profile, out.min_profile):
        arr.setflags(write=False)
    return out


summarize = lru_cache(maxsize=SUMMARY_CACHE_SIZE)(_summarize)


# sweep ---------------------------------------------------------------------

TASK_COLUMNS = ("task", "N", "T", "theta", "replica", "seed", "mipr", "max_ipr", "min_ipr",
                "rigidity_max", "rigidity_min", "xi_max", "max_residual", "wall_time")

SWEEP_COLUMNS = ("N", "T", "theta", "replicas", "mipr", "mipr_stderr", "max_ipr",
                 "max_ipr_stderr", "min_ipr", "rigidity_max", "xi_max", "wall_time")


def _run_task(grid, task):
    chain = grid.chain_for(task)
    s = summarize(chain, Hopping(task.magnitude, task.theta))
    return (task.index, task.size, task.magnitude, task.theta, task.replica,
            -1 if task.seed is None else int(task.seed),
            s.mipr, float(s.iprs[s.max_state]), float(s.iprs[s.min_state]),
            float(s.rigidities[s.max_state]), float(s.rigidities[s.min_state]),
            float(s.loc_lengths[s.max_state]), s.max_residual, s.wall_time)


def run_tasks(grid, workers=1):
    """One row per task, in task order whatever the number of workers."""
    tasks = grid.tasks()
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(partial(_run_task, grid), tasks))
    else:
        rows = [_run_task(grid, t) for t in tasks]
    return Table(TASK_COLUMNS, rows)


def _mean_stderr(values):
    v = np.asarray(values, dtype=float)
    m = float(v.mean())
    if len(v) < 2:
        return m, math.nan
    return m, float(v.std(ddof=1) / math.sqrt(len(v)))


def run_theta_sweep(grid, workers=1):
    """MIPR and extreme-state diagnostics per (N, T, theta), averaged over replicas.

    Standard errors are NaN for single-replica grids.
    """
    raw = run_tasks(grid, workers)
    out = Table(SWEEP_COLUMNS)
    r = grid.replicas
    for start in range(0, len(raw), r):
        block = raw.rows[start:start + r]
        rec = [dict(zip(TASK_COLUMNS, row)) for row in block]
        m, se = _mean_stderr([x["mipr"] for x in rec])
        mx, mxe = _mean_stderr([x["max_ipr"] for x in rec])
        out.append((rec[0]["N"], rec[0]["T"], rec[0]["theta"], r, m, se, mx, mxe,
                    float(np.mean([x["min_ipr"] for x in rec])),
                    float(np.mean([x["rigidity_max"] for x in rec])),
                    float(np.mean([x["xi_max"] for x in rec])),
                    float(sum(x["wall_time"] for x in rec))))
    return out


# landscape -----------------------------------------------------------------

LANDSCAPE_COLUMNS = ("T", "theta", "mode", "quantity", "value", "log_ipr", "d2",
                     "fit_residual", "rigidity", "state_re_E", "state_im_E")


def _is_fibonacci(n):
    a, b = 1, 2
    while a < n:
        a, b = b, a + b
    return a == n


def scaling_fit(chain, hopping, sizes, mode=obs.Extreme.MAX_IPR):
    """D2 fit of the extreme state, selected independently at each size."""
    iprs = []
    for n in sizes:
        s = summarize(chain.with_size(n), hopping)
        iprs.append(float(s.iprs[s.extreme(mode)]))
    return obs.fractal_dimension(sizes, iprs)


def _landscape_cell(grid, mode, magnitude, theta):
    hop = Hopping(magnitude, theta)
    sizes = sorted(grid.sizes)
    top = summarize(grid.model.with_size(sizes[-1]), hop)
    k = top.extreme(mode)
    if len(sizes) >= obs.MIN_FIT_POINTS:
        fit = scaling_fit(grid.model, hop, sizes, mode)
        d2, resid = fit.d2, fit.fit_residual
    else:
        d2, resid = math.nan, math.nan
    return (math.log(top.iprs[k]), d2, resid, float(top.rigidities[k]),
            float(top.eigenvalues[k].real), float(top.eigenvalues[k].imag))


def run_landscape(grid, mode=obs.Extreme.MAX_IPR, quantity=Quantity.D2, workers=1):
    """log(IPR) and rigidity at the largest size plus D2, per (T, theta) cell.

    ``value`` repeats whichever of the three ``quantity`` names.
    """
    mode = obs.Extreme(mode)
    quantity = Quantity(quantity)
    if quantity is Quantity.D2:
        fib = [n for n in grid.sizes if _is_fibonacci(n)]
        if len(fib) < obs.MIN_FIT_POINTS:
            raise ParameterError(f"D2 landscape needs >= {obs.MIN_FIT_POINTS} Fibonacci sizes, "
                                 f"got {list(grid.sizes)}")
    cells = [(t, th) for t in grid.t_values for th in grid.theta_values]
    fn = partial(_landscape_cell, grid, mode)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, *zip(*cells)))
    else:
        results = [fn(t, th) for t, th in cells]
    pick = {Quantity.LOG_IPR: 0, Quantity.D2: 1, Quantity.RIGIDITY: 3}[quantity]
    out = Table(LANDSCAPE_COLUMNS)
    for (t, th), r in zip(cells, results):
        out.append((float(t), float(th), mode.value, quantity.value, r[pick]) + tuple(r))
    return out


# per-state tables ------------------------------------------------------------

PLANE_COLUMNS = ("state", "re_E", "im_E", "ipr", "log_ipr", "sigma_z_abs", "rigidity", "xi")


def run_complex_plane(chain, hopping):
    """One row per eigenstate in spectrum order."""
    s = summarize(chain, hopping)
    out = Table(PLANE_COLUMNS)
    for k in range(len(s)):
        out.append((k, float(s.eigenvalues[k].real), float(s.eigenvalues[k].imag),
                    float(s.iprs[k]), math.log(s.iprs[k]), float(s.sigma_z[k]),
                    float(s.rigidities[k]), float(s.loc_lengths[k])))
    return out


# localization length -------------------------------------------------------

LOCLEN_COLUMNS = ("N", "T", "theta", "state", "xi", "ipr", "decay_slope", "re_E", "im_E")
PROFILE_COLUMNS = ("T", "theta", "site", "prob", "log_prob")


def decay_slope(profile, floor=PROFILE_FLOOR):
    """OLS slope of log|psi(i)|^2 against distance from the peak site.

    Only sites above ``floor`` times the peak enter the fit, which keeps
    rounding noise in the far tail out of it. Returns NaN with fewer than
    three usable sites.
    """
    p = np.asarray(profile, dtype=float)
    peak = int(np.argmax(p))
    keep = p > floor * p[peak]
    if np.count_nonzero(keep) < 3:
        return math.nan
    d = np.abs(np.arange(len(p)) - peak)[keep].astype(float)
    y = np.log(p[keep])
    dm = d.mean()
    den = np.sum((d - dm) ** 2)
    if den == 0.0:
        return math.nan
    return float(np.sum((d - dm) * (y - y.mean())) / den)


def run_localization_length(chain, t_values, theta_values, profiles=False):
    """xi of the max-IPR state per (T, theta); optionally the |psi|^2 profiles.

    Returns (table, profile_table or None).
    """
    out = Table(LOCLEN_COLUMNS)
    prof = Table(PROFILE_COLUMNS) if profiles else None
    for t in t_values:
        for th in theta_values:
            s = summarize(chain, Hopping(float(t), float(th)))
            k = s.max_state
            out.append((chain.n_sites, float(t), float(th), k, float(s.loc_lengths[k]),
                        float(s.iprs[k]), decay_slope(s.max_profile),
                        float(s.eigenvalues[k].real), float(s.eigenvalues[k].imag)))
            if prof is not None:
                for i, p in enumerate(s.max_profile, start=1):
                    prof.append((float(t), float(th), i, float(p),
                                 math.log(p) if p > 0 else -math.inf))
    return out, prof


def clear_cache():
    summarize.cache_clear()

