"""Splittable 64-bit PRNG used by the simulation step loop.

The engine draws from a splitmix64 stream so that the compiled kernel and
the pure-Python step path consume bit-identical uniforms, and so that run
``i`` of an ensemble can simply use ``base_seed + i`` as its stream key.
"""

from __future__ import annotations

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state, returning (new_state, 64-bit output)."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return state, z ^ (z >> 31)


class SplitMix64:
    """Minimal random source: uniform doubles in [0, 1) from a 64-bit seed.

    Streams for nearby seeds are statistically independent, which is the
    intended way to derive per-run generators in an ensemble.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def random(self) -> float:
        self.state, z = splitmix64_next(self.state)
        return (z >> 11) * _INV_2_53

    def getstate(self) -> int:
        return self.state
