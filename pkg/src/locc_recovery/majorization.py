"""Majorization of Schmidt spectra and classification of equality patterns.

Indices follow the usual 1-based convention: ``m`` in the equality set means
the first ``m`` entries of both vectors have the same total.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch
from .spectra import SchmidtVector, TolLike, as_tol


@dataclass(frozen=True)
class MajorizationReport:
    holds: bool
    first_violation: Optional[int]
    equality_indices: tuple
    strict_all: bool
    eta: int


class PairKind(str, enum.Enum):
    INCOMPARABLE = "Incomparable"
    IDENTICAL = "Identical"
    STRICT_ALL = "StrictAll"
    ISOLATED_INTERIOR = "IsolatedInterior"
    TRAILING_EQUALITY = "TrailingEquality"
    GENERAL_BLOCKS = "GeneralBlocks"


@dataclass(frozen=True)
class PairClass:
    kind: PairKind
    delta: tuple = ()
    eta: int = 0


def prefix_sums(v: SchmidtVector) -> list:
    return [float(x) for x in np.cumsum(v.array)]


def longest_run(indices: Sequence[int]) -> int:
    """Length of the longest run of consecutive integers in ``indices``."""
    best = run = 0
    prev = None
    for m in sorted(indices):
        run = run + 1 if prev is not None and m == prev + 1 else 1
        best = max(best, run)
        prev = m
    return best


def compare_prefix_arrays(pa: np.ndarray, pb: np.ndarray, eps: float) -> MajorizationReport:
    """Build a report from the nontrivial prefix sums (``m = 1..n-1``) of both sides."""
    diff = pb - pa
    bad = np.flatnonzero(diff < -eps)
    if bad.size:
        return MajorizationReport(False, int(bad[0]) + 1, (), False, 0)
    delta = tuple(int(i) + 1 for i in np.flatnonzero(np.abs(diff) <= eps))
    return MajorizationReport(True, None, delta, not delta, longest_run(delta))


def majorize_arrays(a: np.ndarray, b: np.ndarray, eps: float) -> MajorizationReport:
    """Same as :func:`majorize` on sorted numpy arrays; no validation."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    return compare_prefix_arrays(np.cumsum(a)[:-1], np.cumsum(b)[:-1], eps)


def majorize(a: SchmidtVector, b: SchmidtVector, tol: TolLike = None) -> MajorizationReport:
    """Decide ``a ≺ b``: every prefix sum of ``a`` is at most that of ``b``.

    Zero padding is never applied here; call :meth:`SchmidtVector.padded`
    first when the dimensions differ.

    Raises:
        DimensionMismatch: the vectors have different lengths.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    return majorize_arrays(a.array, b.array, as_tol(tol))


def classify_report(report: MajorizationReport, n: int) -> PairClass:
    if not report.holds:
        return PairClass(PairKind.INCOMPARABLE)
    delta, eta = report.equality_indices, report.eta
    ds = set(delta)
    if len(delta) == n - 1:
        kind = PairKind.IDENTICAL
    elif not delta:
        kind = PairKind.STRICT_ALL
    elif n - 1 in ds:
        kind = PairKind.TRAILING_EQUALITY
    elif 1 not in ds and eta == 1:
        kind = PairKind.ISOLATED_INTERIOR
    else:
        kind = PairKind.GENERAL_BLOCKS
    return PairClass(kind, delta, eta)


def classify_pair(a: SchmidtVector, b: SchmidtVector, tol: TolLike = None) -> PairClass:
    """Sort an ordered pair into the class that decides which construction applies."""
    return classify_report(majorize(a, b, tol), a.dim)


def majorizes_rows(a_rows: np.ndarray, b_rows: np.ndarray, eps: float) -> np.ndarray:
    """Row-wise ``holds`` flag of ``a_rows[i] ≺ b_rows[i]`` for sorted rows."""
    pa = np.cumsum(a_rows, axis=1)[:, :-1]
    pb = np.cumsum(b_rows, axis=1)[:, :-1]
    return np.all(pa <= pb + eps, axis=1)
