"""Seeded generation of comparable spectrum pairs with a prescribed equality set.

All randomness flows through :class:`SplitMix64`, a 64-bit generator whose
output is fully specified by a few lines of integer arithmetic, so fixtures
can be regenerated bit for bit in other languages. Uniform doubles take the
top 53 bits of each output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Tuple, Union

import numpy as np

from .errors import InvalidTransfer, PatternInfeasible, UniformInput
from .majorization import majorize
from .spectra import DEFAULT_EQ_TOL, SchmidtVector, TolLike, make_schmidt

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO_M53 = 2.0 ** -53


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 (Steele, Lea and Flood 2014).

    ``state`` advances by the golden gamma before each output. Because the
    n-th output depends only on ``seed + n * gamma``, blocks of outputs can be
    produced with vectorized numpy arithmetic and still match the scalar
    stream exactly.
    """

    def __init__(self, seed: int = 0):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix(self.state)

    def random(self) -> float:
        """Uniform double in ``[0, 1)``."""
        return (self.next_u64() >> 11) * _TWO_M53

    def block_u64(self, count: int) -> np.ndarray:
        start = np.uint64(self.state)
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = start + steps * np.uint64(GOLDEN_GAMMA)
        self.state = (self.state + count * GOLDEN_GAMMA) & MASK64
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def uniform_block(self, shape) -> np.ndarray:
        count = int(np.prod(shape))
        u = (self.block_u64(count) >> np.uint64(11)).astype(np.float64) * _TWO_M53
        return u.reshape(shape)


SeedLike = Union[int, SplitMix64]


def as_rng(seed: SeedLike) -> SplitMix64:
    return seed if isinstance(seed, SplitMix64) else SplitMix64(seed)


def sorted_simplex_block(rng: SplitMix64, count: int, k: int) -> np.ndarray:
    """``count`` uniform points of the probability simplex, each row sorted non-increasingly."""
    u = rng.uniform_block((count, k))
    e = -np.log1p(-u)
    e /= e.sum(axis=1, keepdims=True)
    return -np.sort(-e, axis=1)


def random_descending(n: int, seed: SeedLike = 0, tol: TolLike = None) -> SchmidtVector:
    """Random interior point of the ordered simplex, without zeros or ties."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    if n == 1:
        return make_schmidt([1.0], tol)
    rng = as_rng(seed)
    while True:
        row = sorted_simplex_block(rng, 1, n)[0]
        if row[-1] > 0.0 and np.all(np.diff(row) < 0.0):
            return make_schmidt(row, tol)


def mix_toward_uniform(phi: SchmidtVector, t: float) -> SchmidtVector:
    """Blend ``phi`` with the uniform vector; the result is strictly majorized by ``phi``."""
    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie in (0, 1), got {t!r}")
    arr = phi.array
    if arr[0] - arr[-1] <= phi.tol:
        raise UniformInput("a uniform spectrum majorizes nothing strictly")
    return make_schmidt((1.0 - t) * arr + t / arr.size, phi.tol)


def robin_hood(v: SchmidtVector, i: int, j: int, amount: float) -> SchmidtVector:
    """Move ``amount`` of weight from entry ``i`` to entry ``j`` (1-based, ``i < j``).

    Raises:
        InvalidTransfer: indices out of order or range, or ``amount`` outside
            ``[0, (v_i - v_j) / 2]``.
    """
    n = v.dim
    if not (1 <= i < j <= n):
        raise InvalidTransfer(f"need 1 <= i < j <= {n}, got i={i}, j={j}")
    cap = (v[i - 1] - v[j - 1]) / 2.0
    if amount < 0.0 or amount > cap + v.tol:
        raise InvalidTransfer(f"amount {amount!r} outside [0, {cap!r}]")
    vals = list(v.values)
    vals[i - 1] -= amount
    vals[j - 1] += amount
    return make_schmidt(vals, v.tol)


@dataclass(frozen=True)
class PatternSpec:
    n: int
    delta: Tuple[int, ...] = ()
    strictness_margin: float = 0.01
    seed: int = 0
    max_retries: int = 2000
    tol: float = field(default=DEFAULT_EQ_TOL)

    def __post_init__(self):
        object.__setattr__(self, "delta", tuple(sorted(set(int(m) for m in self.delta))))
        if self.n < 1:
            raise ValueError("n must be positive")
        if any(m < 1 or m > self.n - 1 for m in self.delta):
            raise ValueError(f"delta must be a subset of 1..{self.n - 1}")
        if not self.strictness_margin > 0.0 or self.n * self.strictness_margin >= 1.0:
            raise ValueError("need 0 < margin and n * margin < 1")


def _segment_mix(phi: np.ndarray, bounds: Iterable[int], weights: Iterable[float]) -> np.ndarray:
    psi = phi.copy()
    edges = list(bounds)
    for (lo, hi), t in zip(zip(edges, edges[1:]), weights):
        seg = phi[lo:hi]
        psi[lo:hi] = (1.0 - t) * seg + t * seg.mean()
    return psi


def pair_with_pattern(spec: PatternSpec) -> Tuple[SchmidtVector, SchmidtVector]:
    """Draw ``(psi, phi)`` with ``psi ≺ phi`` and equality set exactly ``spec.delta``.

    ``phi`` is a random strictly decreasing vector. The indices in ``delta``
    cut it into segments; inside each segment ``psi`` blends ``phi`` toward
    the segment mean. Segment totals are preserved, so prefix sums agree at
    the cut points, and every prefix strictly inside a segment of length >= 2
    drops. Draws whose gaps fall below the margin are rejected.

    Raises:
        PatternInfeasible: ``delta`` covers every index (forces ``psi == phi``)
            or the retry budget ran out.
    """
    n, delta = spec.n, spec.delta
    if len(delta) == n - 1:
        raise PatternInfeasible("an equality at every index forces psi == phi")
    rng = SplitMix64(spec.seed)
    bounds = [0, *delta, n]
    want = set(delta)
    for _ in range(spec.max_retries):
        phi = random_descending(n, rng, spec.tol)
        weights = [0.25 + 0.5 * rng.random() for _ in range(len(bounds) - 1)]
        if not delta:
            psi = mix_toward_uniform(phi, weights[0])
        else:
            psi = make_schmidt(_segment_mix(phi.array, bounds, weights), spec.tol)
        report = majorize(psi, phi, spec.tol)
        if not report.holds or set(report.equality_indices) != want:
            continue
        gaps = np.cumsum(phi.array)[:-1] - np.cumsum(psi.array)[:-1]
        free = [m - 1 for m in range(1, n) if m not in want]
        if free and gaps[free].min() < spec.strictness_margin:
            continue
        return psi, phi
    raise PatternInfeasible(
        f"no pair with delta={list(delta)} and margin {spec.strictness_margin} "
        f"after {spec.max_retries} draws"
    )


def parse_pattern(text: str) -> Tuple[int, ...]:
    """``"strict"`` or ``"delta:2,3,5"`` to an index tuple."""
    text = text.strip()
    if text == "strict":
        return ()
    if text.startswith("delta:"):
        body = text[len("delta:"):].strip()
        return tuple(int(x) for x in body.split(",") if x.strip()) if body else ()
    raise ValueError(f"unknown pattern {text!r}; use 'strict' or 'delta:<i,j,...>'")

