"""Self-similar nested lattice codebooks over a scaled integer lattice.

The fine lattice is ``alpha * Z^N`` and the coarse lattice is ``q`` times
it, for a prime nesting ratio q.  The codebook is the set of fine points
inside the coarse Voronoi region ``V = [-q*alpha/2, q*alpha/2)^N`` (half
open; at a quantization tie the residue lands on the negative endpoint).
Each codebook point is identified by its canonical coordinate vector in
``[0, q)^N``, and coordinate-wise reduction mod q is an isomorphism onto
GF(q)^N for the mod-coarse addition.

The sum of two Voronoi-region vectors is recoverable from its mod-coarse
residue plus one wrap bit per coordinate; ``represent_sum`` packs those
bits into an integer T in [1, 2^N] (coordinate 0 least significant) and
``reconstruct_sum`` inverts it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import is_prime

__all__ = [
    "NestedLatticePair",
    "SumRepresentation",
    "quantize_coarse",
    "mod_coarse",
    "in_fundamental_region",
    "codebook_point",
    "enumerate_coords",
    "coords_to_field",
    "lattice_add",
    "lattice_sub",
    "represent_sum",
    "reconstruct_sum",
    "decode_fine_mod_coarse",
    "codebook_rate",
    "rate_condition_ok",
    "average_codebook_power",
    "alpha_for_power",
]


@dataclass(frozen=True)
class NestedLatticePair:
    """Fine lattice alpha*Z^N nested in the coarse lattice q*alpha*Z^N."""

    N: int
    q: int
    alpha: float = 1.0
    d1: tuple[float, ...] | None = None
    d2: tuple[float, ...] | None = None
    d3: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("dimension must be >= 1")
        if not is_prime(self.q):
            raise ValueError(f"nesting ratio q={self.q} must be prime")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        for name in ("d1", "d2", "d3"):
            d = getattr(self, name)
            if d is None:
                d = (0.0,) * self.N
            d = tuple(float(x) for x in d)
            if len(d) != self.N:
                raise ValueError(f"dither {name} must have length {self.N}")
            object.__setattr__(self, name, d)
            if not np.array_equal(mod_coarse(self, np.array(d)), np.array(d)):
                raise ValueError(f"dither {name} lies outside the Voronoi region")

    @property
    def coarse_step(self) -> float:
        return self.q * self.alpha

    def dither(self, index: int | None) -> np.ndarray:
        """Dither vector by index 1/2/3; 0 or None means zero."""
        if index in (None, 0):
            return np.zeros(self.N)
        if index in (1, 2, 3):
            return np.array(getattr(self, f"d{index}"))
        raise ValueError(f"dither index must be one of None,0,1,2,3, got {index}")


def _check_len(pair: NestedLatticePair, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (pair.N,):
        raise ValueError(f"vector must have shape ({pair.N},), got {x.shape}")
    return x


def quantize_coarse(pair: NestedLatticePair, x: np.ndarray) -> np.ndarray:
    """Nearest coarse lattice point, coordinate-wise.

    Tie at the cell boundary resolves so that the residue x - Q(x) falls in
    [-q*alpha/2, q*alpha/2).
    """
    x = _check_len(pair, x)
    step = pair.coarse_step
    return np.floor(x / step + 0.5) * step


def mod_coarse(pair: NestedLatticePair, x: np.ndarray) -> np.ndarray:
    """Residue x - Q(x), lying in the fundamental region."""
    x = _check_len(pair, x)
    return x - quantize_coarse(pair, x)


def in_fundamental_region(pair: NestedLatticePair, x: np.ndarray) -> bool:
    x = _check_len(pair, x)
    half = pair.coarse_step / 2
    return bool(np.all(x >= -half) and np.all(x < half))


def _check_coords(pair: NestedLatticePair, c) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64)
    if c.shape != (pair.N,):
        raise ValueError(f"coords must have shape ({pair.N},), got {c.shape}")
    if np.any(c < 0) or np.any(c >= pair.q):
        raise ValueError(f"coords must be canonical in [0, {pair.q})")
    return c


def codebook_point(
    pair: NestedLatticePair, c, dither: int | None = None
) -> np.ndarray:
    """Transmitted point for canonical coords c: (alpha*c + d) mod coarse."""
    c = _check_coords(pair, c)
    return mod_coarse(pair, pair.alpha * c + pair.dither(dither))


def enumerate_coords(pair: NestedLatticePair):
    """All q^N canonical coordinate vectors in lexicographic order."""
    idx = np.arange(pair.q**pair.N)
    for k in idx:
        yield index_to_coords(pair, int(k))


def index_to_coords(pair: NestedLatticePair, k: int) -> np.ndarray:
    """Mixed-radix decoding: coordinate 0 is the least significant digit."""
    c = np.zeros(pair.N, dtype=np.int64)
    for i in range(pair.N):
        c[i] = k % pair.q
        k //= pair.q
    return c


def coords_to_index(pair: NestedLatticePair, c) -> int:
    c = _check_coords(pair, c)
    k = 0
    for digit in reversed(c):
        k = k * pair.q + int(digit)
    return k


def coords_to_field(pair: NestedLatticePair, c) -> np.ndarray:
    """Per-coordinate reduction mod q: the isomorphism onto GF(q)^N."""
    c = np.asarray(c, dtype=np.int64)
    if c.shape != (pair.N,):
        raise ValueError(f"coords must have shape ({pair.N},)")
    return c % pair.q


def lattice_add(pair: NestedLatticePair, a, b) -> np.ndarray:
    """Coords of (point(a) + point(b)) mod coarse, for undithered points."""
    a = _check_coords(pair, a)
    b = _check_coords(pair, b)
    return (a + b) % pair.q


def lattice_sub(pair: NestedLatticePair, a, b) -> np.ndarray:
    a = _check_coords(pair, a)
    b = _check_coords(pair, b)
    return (a - b) % pair.q


@dataclass(frozen=True)
class SumRepresentation:
    """Mod-coarse residue of a two-term sum plus its packed wrap bits."""

    sum_mod: tuple[float, ...]
    T: int


def represent_sum(pair: NestedLatticePair, u1, u2) -> SumRepresentation:
    """Represent u1 + u2 (both in the Voronoi region) as (residue, T)."""
    u1 = _check_len(pair, u1)
    u2 = _check_len(pair, u2)
    if not in_fundamental_region(pair, u1) or not in_fundamental_region(pair, u2):
        raise ValueError("inputs must lie in the fundamental region")
    s = u1 + u2
    step = pair.coarse_step
    wraps = np.floor(s / step + 0.5).astype(np.int64)  # each in {-1, 0, 1}
    sum_mod = s - wraps * step
    bits = (wraps != 0).astype(np.int64)
    t = 1 + int(np.sum(bits << np.arange(pair.N)))
    return SumRepresentation(tuple(float(v) for v in sum_mod), t)


def reconstruct_sum(pair: NestedLatticePair, rep: SumRepresentation) -> np.ndarray:
    """Invert represent_sum exactly."""
    if not 1 <= rep.T <= 2**pair.N:
        raise ValueError(f"T must be in [1, {2**pair.N}]")
    bits = ((rep.T - 1) >> np.arange(pair.N)) & 1
    sum_mod = np.array(rep.sum_mod, dtype=float)
    step = pair.coarse_step
    # conditional on the residue, only one unwrapped sum per wrap bit is
    # feasible: negative residues wrapped down, nonnegative ones wrapped up
    shift = np.where(sum_mod < 0, step, -step)
    return sum_mod + bits * shift


def decode_fine_mod_coarse(
    pair: NestedLatticePair, y, dither_offset=None
) -> np.ndarray:
    """Nearest-fine-point decoding to canonical coords.

    Subtracts the known dither offset, scales by 1/alpha, rounds each
    coordinate to the nearest integer (ties toward -inf), reduces mod q.
    """
    y = _check_len(pair, y)
    if dither_offset is None:
        dither_offset = np.zeros(pair.N)
    z = (y - np.asarray(dither_offset, dtype=float)) / pair.alpha
    rounded = np.ceil(z - 0.5).astype(np.int64)
    return rounded % pair.q


def codebook_rate(pair: NestedLatticePair) -> float:
    """Bits per channel use: (1/N) log2 of the codebook size q^N."""
    return math.log2(pair.q)


def rate_condition_ok(pair: NestedLatticePair, power: float) -> bool:
    """Reliable-decoding rate condition: R0 < 0.5*log2(0.5 + P), strict."""
    if power <= 0:
        raise ValueError("power must be positive")
    return codebook_rate(pair) < 0.5 * math.log2(0.5 + power)


def average_codebook_power(
    pair: NestedLatticePair, dither: int | None = None
) -> float:
    """Mean squared norm per channel use over the full codebook.

    Coordinates are independent, so the q^N-point average reduces to a
    per-coordinate average over q residues.
    """
    d = pair.dither(dither)
    total = 0.0
    for j in range(pair.N):
        vals = [
            _mod_scalar(pair.alpha * c + float(d[j]), pair.coarse_step)
            for c in range(pair.q)
        ]
        total += sum(v * v for v in vals) / pair.q
    return float(total / pair.N)


def _mod_scalar(x: float, step: float) -> float:
    return x - math.floor(x / step + 0.5) * step


def alpha_for_power(q: int, target_power: float) -> float:
    """Scale making the zero-dither codebook meet an average power target."""
    if target_power < 0:
        raise ValueError("power target must be nonnegative")
    base = average_codebook_power(NestedLatticePair(N=1, q=q, alpha=1.0))
    return math.sqrt(target_power / base)
