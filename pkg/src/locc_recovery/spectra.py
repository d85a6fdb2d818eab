"""Schmidt spectra: construction, entropy of entanglement and tensor products.

A spectrum is stored as the probability vector of squared Schmidt
coefficients, sorted non-increasingly. Amplitudes never appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import EmptySpectrum, NegativeEntry, NotNormalized

DEFAULT_EQ_TOL = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Absolute threshold below which two reals (prefix sums) count as equal.

    It should sit well below the smallest spectral gap the caller wants to
    resolve; this is not checked.
    """

    eq_tol: float = DEFAULT_EQ_TOL

    def __post_init__(self):
        if not (self.eq_tol >= 0.0):
            raise ValueError(f"eq_tol must be nonnegative, got {self.eq_tol!r}")


TolLike = Union[Tolerance, float, None]


def as_tol(tol: TolLike) -> float:
    if tol is None:
        return DEFAULT_EQ_TOL
    if isinstance(tol, Tolerance):
        return tol.eq_tol
    return Tolerance(float(tol)).eq_tol


@dataclass(frozen=True)
class SchmidtVector:
    """Sorted (non-increasing) probability vector of Schmidt weights."""

    values: tuple
    tol: float = DEFAULT_EQ_TOL

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def padded(self, n: int) -> "SchmidtVector":
        """Append zeros up to dimension ``n``. Never applied implicitly."""
        if n < self.dim:
            raise ValueError(f"cannot pad dimension {self.dim} down to {n}")
        return SchmidtVector(self.values + (0.0,) * (n - self.dim), self.tol)


def make_schmidt(raw: Union[Iterable[float], SchmidtVector], tol: TolLike = None) -> SchmidtVector:
    """Validate and sort raw Schmidt weights.

    Entries in ``[-tol, 0)`` are clamped to zero. The sort is stable so the
    result is reproducible bit for bit, and feeding the output back in
    returns an identical vector.

    Raises:
        EmptySpectrum: ``raw`` has no entries.
        NegativeEntry: an entry is below ``-tol``.
        NotNormalized: the entries do not sum to one within ``tol``.
    """
    eps = as_tol(tol)
    if isinstance(raw, SchmidtVector):
        raw = raw.values
    vals = [float(x) for x in raw]
    if not vals:
        raise EmptySpectrum("a Schmidt spectrum needs at least one entry")
    for i, x in enumerate(vals):
        if not math.isfinite(x):
            raise NegativeEntry(f"entry {i + 1} is not finite: {x!r}")
        if x < -eps:
            raise NegativeEntry(f"entry {i + 1} is negative: {x!r}")
    total = math.fsum(vals)
    if abs(total - 1.0) > eps:
        raise NotNormalized(f"entries sum to {total!r}, not 1 (tol {eps:g})")
    clamped = [x if x > 0.0 else 0.0 for x in vals]
    return SchmidtVector(tuple(sorted(clamped, reverse=True)), eps)


def _from_sorted_array(arr: np.ndarray, tol: float) -> SchmidtVector:
    return SchmidtVector(tuple(float(x) for x in arr), tol)


def uniform(n: int, tol: TolLike = None) -> SchmidtVector:
    return SchmidtVector((1.0 / n,) * n, as_tol(tol))


def entropy(v: Union[SchmidtVector, Sequence[float]]) -> float:
    """Entropy of entanglement in nats, with ``0 ln 0 = 0``."""
    arr = np.asarray(v.values if isinstance(v, SchmidtVector) else v, dtype=float)
    return entropy_array(arr)


def entropy_array(arr: np.ndarray) -> float:
    pos = arr[arr > 0.0]
    return float(max(0.0, -np.sum(pos * np.log(pos))))


def tensor_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All pairwise products ``a_i b_j`` sorted non-increasingly."""
    prod = np.outer(a, b).ravel()
    return -np.sort(-prod, kind="stable")


def tensor_spectrum(a: SchmidtVector, b: SchmidtVector) -> SchmidtVector:
    """Schmidt spectrum of the product state ``|a> (x) |b>``."""
    return _from_sorted_array(tensor_array(a.array, b.array), a.tol + b.tol)


def tensor_rows(a: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Row-wise :func:`tensor_array` of ``a`` with every row of ``rows``."""
    prod = (rows[:, :, None] * a[None, None, :]).reshape(rows.shape[0], -1)
    return -np.sort(-prod, axis=1)
