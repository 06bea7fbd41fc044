"""Deterministic random number generation.

Everything stochastic in this package runs on SplitMix64 (Steele, Lea &
Flood 2014): 64 bits of state, a public mixing function, and identical
output on every platform. Seeded runs reproduce bit for bit, and the
generator is small enough to port to another language in ten lines.

Stream layout contract (relied on by the vectorized simulator):

* a generator seeded with ``seed`` produces u64 outputs
  ``mix64(seed + k*GOLDEN)`` for k = 1, 2, ...;
* multi-episode runs give episode i (0-based) its own generator seeded
  with the (i+1)-th output of a master generator, i.e.
  ``mix64(master + (i+1)*GOLDEN)``;
* uniform doubles are ``(u64 >> 11) * 2**-53``, in [0, 1).

The closed forms above are what :func:`episode_seeds` and
:func:`step_uniforms` evaluate with numpy, so array simulations consume
exactly the draws a per-episode scalar loop would.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

_TO_DOUBLE = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Scalar SplitMix64 stream.

    Pure-Python integers with explicit masking: numpy uint64 scalars warn
    on overflow, Python ints do modular arithmetic exactly.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _TO_DOUBLE

    def below(self, n: int) -> int:
        """Uniform int in [0, n). Clamped against the u -> 1 float edge;
        modulo bias is ~n/2**53, irrelevant for the small n used here."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        return min(int(self.random() * n), n - 1)

    def normal(self, mean: float = 0.0, std: float = 1.0) -> float:
        """One Box-Muller normal deviate (two uniforms per call)."""
        u1 = 1.0 - self.random()  # (0, 1], keeps log finite
        u2 = self.random()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return mean + std * z

    def gamma(self, shape: float) -> float:
        """Marsaglia-Tsang gamma deviate, unit scale. Requires shape >= 1
        (the Beta posteriors sampled here keep both shapes >= 1)."""
        if shape < 1.0:
            raise ValueError("gamma() requires shape >= 1")
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = self.random()
            if u < 1.0 - 0.0331 * x * x * x * x:
                return d * v
            if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v

    def beta(self, a: float, b: float) -> float:
        """Beta(a, b) via two gammas; a, b >= 1."""
        x = self.gamma(a)
        y = self.gamma(b)
        return x / (x + y)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 array ops wrap silently, which is exactly what we want
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


def episode_seeds(master: int, count: int, offset: int = 0) -> np.ndarray:
    """Seeds for episodes offset..offset+count-1 under the stream layout
    contract (episode i uses the master stream's (i+1)-th output), so
    chunked runs reproduce unchunked ones."""
    ks = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    return _mix64_array((np.uint64(master & MASK64) + ks * np.uint64(GOLDEN)))


def step_uniforms(seeds: np.ndarray, step: int) -> np.ndarray:
    """The (step+1)-th uniform of each seed's stream, as one array.

    Equals SplitMix64(seed).random() called step+1 times and keeping the
    last value, evaluated in closed form.
    """
    state = seeds + np.uint64(((step + 1) * GOLDEN) & MASK64)
    return (_mix64_array(state) >> np.uint64(11)).astype(np.float64) * _TO_DOUBLE
