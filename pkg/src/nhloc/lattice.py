"""On-site potential sequences for the four chain families.

Sites are indexed 1..N when evaluating the Aubry-Andre-Fibonacci
potential. Random potentials use xoshiro256** seeded through splitmix64,
implemented here in pure Python so a seed yields the same sequence on every
platform.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import ParameterError, SizeLimitError

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
INFINITY = math.inf
MAX_WORD_LENGTH = 10_000_000
SIGN_TIE = 1e-12

FIBONACCI_LADDER = (89, 144, 233, 377, 610, 987)


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class AAFParams:
    """Aubry-Andre-Fibonacci potential; ``beta`` may be INFINITY."""

    lam: float = 1.0
    beta: float = 0.0
    phi: float = 0.0
    alpha: float = GOLDEN

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if not self.beta >= 0:
            raise ParameterError(f"beta must be >= 0, got {self.beta}")


@dataclass(frozen=True)
class FibonacciWordParams:
    """Two-letter substitution chain. ``order=None`` picks the shortest word
    covering the requested number of sites."""

    order: Optional[int] = None
    v_a: float = 1.0
    v_b: float = -1.0

    def __post_init__(self):
        if self.order is not None and self.order < 1:
            raise ParameterError(f"order must be >= 1, got {self.order}")


@dataclass(frozen=True)
class AlternatingParams:
    v_a: float = -1.0
    v_b: float = 1.0
    spacing_a: float = 1.0


@dataclass(frozen=True)
class RandomDisorderParams:
    center: float = -1.0
    halfwidth: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not self.halfwidth >= 0:
            raise ParameterError(f"halfwidth must be >= 0, got {self.halfwidth}")


Model = Union[AAFParams, FibonacciWordParams, AlternatingParams, RandomDisorderParams]


@dataclass(frozen=True)
class ChainSpec:
    model: Model
    n_sites: int
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ParameterError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    def with_size(self, n_sites):
        return replace(self, n_sites=n_sites)

    def with_seed(self, seed):
        if not isinstance(self.model, RandomDisorderParams):
            return self
        return replace(self, model=replace(self.model, seed=seed))

    def potentials(self):
        return potentials(self)


def fibonacci_number(order):
    """Length of the order-n word: 1, 2, 3, 5, 8, ..."""
    a, b = 1, 2
    for _ in range(order - 1):
        a, b = b, a + b
    return a


def order_for_size(n_sites):
    order = 1
    while fibonacci_number(order) < n_sites:
        order += 1
    return order


def fibonacci_word(order, max_length=MAX_WORD_LENGTH):
    """Apply A->AB, B->A (order-1) times to the seed "A"."""
    if order < 1:
        raise ParameterError(f"order must be >= 1, got {order}")
    length = fibonacci_number(order)
    if length > max_length:
        raise SizeLimitError(f"word of order {order} has {length} letters (cap {max_length})")
    # S_n = S_{n-1} S_{n-2} is the same word as the substitution output
    prev, cur = "A", "AB"
    if order == 1:
        return prev
    for _ in range(order - 2):
        prev, cur = cur, cur + prev
    return cur


def fibonacci_potentials(params, n_sites):
    order = params.order if params.order is not None else order_for_size(n_sites)
    word = fibonacci_word(order)
    if len(word) < n_sites:
        raise ParameterError(f"word of order {order} has only {len(word)} sites, need {n_sites}")
    letters = np.frombuffer(word[:n_sites].encode("ascii"), dtype=np.uint8)
    return np.where(letters == ord("A"), float(params.v_a), float(params.v_b))


def aaf_value(params, sites):
    """Potential at the given (possibly array-valued) site indices."""
    i = np.asarray(sites, dtype=float)
    arg = np.cos(2.0 * np.pi * params.alpha * i + params.phi) - np.cos(np.pi * params.alpha)
    if params.beta == 0.0:
        return -params.lam * arg
    if math.isinf(params.beta):
        sign = np.where(np.abs(arg) < SIGN_TIE, 1.0, np.sign(arg))
        return -params.lam * sign
    return -params.lam * np.tanh(params.beta * arg) / math.tanh(params.beta)


def aaf_potentials(params, n_sites):
    if n_sites < 2:
        raise ParameterError(f"n_sites must be >= 2, got {n_sites}")
    return aaf_value(params, np.arange(1, n_sites + 1))


def alternating_potentials(params, n_sites):
    if n_sites < 2:
        raise ParameterError(f"n_sites must be >= 2, got {n_sites}")
    v = np.full(n_sites, float(params.v_b))
    v[0::2] = params.v_a  # odd 1-based sites
    return v


_MASK64 = (1 << 64) - 1


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256:
    """xoshiro256** 1.0 (Blackman & Vigna), state filled by splitmix64."""

    def __init__(self, seed):
        sm = int(seed) & _MASK64
        s = []
        for _ in range(4):
            sm, out = _splitmix64(sm)
            s.append(out)
        self.s = s

    def next_u64(self):
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self):
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def replica_seed(base_seed, replica):
    """Independent 64-bit seed for replica ``replica`` of a disorder run."""
    state = (int(base_seed) + int(replica) * 0x9E3779B97F4A7C15) & _MASK64
    return _splitmix64(state)[1]


def random_potentials(params, n_sites):
    if n_sites < 2:
        raise ParameterError(f"n_sites must be >= 2, got {n_sites}")
    if not params.halfwidth >= 0:
        raise ParameterError(f"halfwidth must be >= 0, got {params.halfwidth}")
    rng = Xoshiro256(params.seed)
    lo = params.center - params.halfwidth
    width = 2.0 * params.halfwidth
    return np.array([lo + width * rng.uniform() for _ in range(n_sites)])


def potentials(chain):
    """On-site energies V_1..V_N for a ChainSpec."""
    m = chain.model
    n = chain.n_sites
    if isinstance(m, AAFParams):
        return aaf_potentials(m, n)
    if isinstance(m, FibonacciWordParams):
        return fibonacci_potentials(m, n)
    if isinstance(m, AlternatingParams):
        return alternating_potentials(m, n)
    if isinstance(m, RandomDisorderParams):
        return random_potentials(m, n)
    raise ParameterError(f"unknown chain model {type(m).__name__}")
