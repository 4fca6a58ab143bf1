"""Dense tight-binding Hamiltonian with a uniform complex hopping t = T e^{i theta}."""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmitError, ParameterError
from .lattice import Boundary, potentials


@dataclass(frozen=True)
class Hopping:
    magnitude: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.magnitude >= 0:
            raise ParameterError(f"hopping magnitude must be >= 0, got {self.magnitude}")
        if not math.isfinite(self.theta):
            raise ParameterError(f"theta must be finite, got {self.theta}")

    @property
    def t(self):
        return self.magnitude * cmath.exp(1j * self.theta)

    @property
    def non_hermiticity(self):
        """T sin(theta)."""
        return self.magnitude * math.sin(self.theta)


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray
    boundary: Boundary = Boundary.OPEN

    @property
    def dim(self):
        return self.entries.shape[0]

    def frobenius_norm(self):
        return float(np.linalg.norm(self.entries))

    def is_hermitian(self):
        return bool(np.array_equal(self.entries, self.entries.conj().T))


def build(chain, hopping):
    """H = sum_i V_i |i><i| + t sum_i (|i><i+1| + |i+1><i|), plus the wrap bond if PERIODIC."""
    v = potentials(chain)
    n = len(v)
    t = hopping.t
    h = np.zeros((n, n), dtype=np.complex128)
    h[np.arange(n), np.arange(n)] = v
    i = np.arange(n - 1)
    h[i, i + 1] = t
    h[i + 1, i] = t
    if chain.boundary == Boundary.PERIODIC:
        h[0, n - 1] = t
        h[n - 1, 0] = t
    h.setflags(write=False)
    return HamiltonianMatrix(h, chain.boundary)


def dump_csv(matrix, path):
    """Write one matrix row per line as re,im pairs: re(H[i,0]),im(H[i,0]),re(H[i,1]),...

    Values use 17 significant digits so the file round-trips exactly.
    """
    a = np.asarray(getattr(matrix, "entries", matrix))
    try:
        with open(path, "w", newline="") as fh:
            for row in a:
                fh.write(",".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
                fh.write("\n")
    except OSError as exc:
        raise EmitError(f"cannot write matrix dump to {path}: {exc}") from exc


def load_csv(path):
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    return rows[:, 0::2] + 1j * rows[:, 1::2]
