"""Sweep grids with a fixed task order."""

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ParameterError
from ..lattice import ChainSpec, RandomDisorderParams, replica_seed

DEFAULT_THETA_POINTS = 25
DEFAULT_REPLICAS = 20


def default_thetas(points=DEFAULT_THETA_POINTS):
    return tuple(float(x) for x in np.linspace(0.0, math.pi / 2, points))


@dataclass(frozen=True)
class Task:
    index: int
    size: int
    magnitude: float
    theta: float
    replica: int
    seed: Optional[int] = None


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian product over (size, T, theta, replica), iterated in that order.

    ``seeds`` fixes the disorder seed of each replica explicitly; otherwise
    replica r of a random model uses replica_seed(model seed, r).
    """

    model: ChainSpec
    theta_values: tuple = (0.0, math.pi / 2)
    t_values: tuple = (1.0,)
    sizes: tuple = (987,)
    replicas: int = 1
    seeds: Optional[tuple] = None

    def __post_init__(self):
        for name in ("theta_values", "t_values", "sizes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if self.seeds is not None:
            object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
            object.__setattr__(self, "replicas", len(self.seeds))
        if not (self.theta_values and self.t_values and self.sizes):
            raise ParameterError("sweep grid is empty")
        if self.replicas < 1:
            raise ParameterError(f"replicas must be >= 1, got {self.replicas}")

    @property
    def disordered(self):
        return isinstance(self.model.model, RandomDisorderParams)

    def replica_seeds(self):
        if not self.disordered:
            return (None,) * self.replicas
        if self.seeds is not None:
            return self.seeds
        base = self.model.model.seed
        return tuple(replica_seed(base, r) for r in range(self.replicas))

    def tasks(self):
        seeds = self.replica_seeds()
        prod = itertools.product(self.sizes, self.t_values, self.theta_values, range(self.replicas))
        return [Task(i, n, float(t), float(th), r, seeds[r])
                for i, (n, t, th, r) in enumerate(prod)]

    def chain_for(self, task):
        chain = self.model.with_size(task.size)
        if task.seed is not None:
            chain = chain.with_seed(task.seed)
        return chain

    def describe(self):
        """Plain-data summary for metadata sidecars."""
        return {
            "model": type(self.model.model).__name__,
            "model_params": {k: _plain(v) for k, v in vars(self.model.model).items()},
            "boundary": self.model.boundary.value,
            "theta_values": list(self.theta_values),
            "t_values": list(self.t_values),
            "sizes": list(self.sizes),
            "replicas": self.replicas,
            "seeds": [s for s in self.replica_seeds() if s is not None],
        }


def _plain(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v
