"""Brute-force searches over auxiliary pairs, independent of the constructions.

These scans corroborate the constructive results and the impossibility
bounds empirically. A scan that finds nothing is evidence ("0 feasible out of
N tested"), not a proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import BudgetExceeded, NotConvertibleError
from .genpairs import SplitMix64, sorted_simplex_block
from .majorization import majorize, majorizes_rows
from .spectra import DEFAULT_EQ_TOL, SchmidtVector, make_schmidt, tensor_rows

_CHUNK = 8192


@dataclass(frozen=True)
class GridSpec:
    resolution: float = 1e-3
    max_points: int = 10_000_000
    seed: int = 0
    tol: float = DEFAULT_EQ_TOL

    def __post_init__(self):
        if not self.resolution > 0.0:
            raise ValueError("resolution must be positive")
        if self.max_points < 1:
            raise ValueError("max_points must be positive")


@dataclass(frozen=True)
class ScanBest:
    chi: SchmidtVector
    omega: SchmidtVector
    recovered: float


@dataclass(frozen=True)
class KRow:
    k: int
    best_recovered: float
    feasible_count: int
    points_tested: int


@dataclass(frozen=True)
class ScanResult:
    best: Optional[ScanBest]
    feasible_count: int
    points_tested: int
    per_k: Tuple[KRow, ...] = ()
    not_convertible: bool = False


def _row_entropy(rows: np.ndarray) -> np.ndarray:
    safe = np.where(rows > 0.0, rows, 1.0)
    return -np.sum(rows * np.log(safe), axis=1)


def _require_comparable(psi: SchmidtVector, phi: SchmidtVector, tol: float) -> None:
    if not majorize(psi, phi, tol).holds:
        raise NotConvertibleError("psi is not majorized by phi")


def grid_values(resolution: float) -> np.ndarray:
    """Grid points ``1/2 + i*resolution`` strictly inside ``(1/2, 1)``."""
    count = int(np.ceil(0.5 / resolution - 1e-9)) - 1
    return 0.5 + resolution * np.arange(1, count + 1)


def grid_search_2x2(psi: SchmidtVector, phi: SchmidtVector, grid: GridSpec = GridSpec()) -> ScanResult:
    """Test every ``chi = (p, 1-p)``, ``omega = (q, 1-q)`` with ``1/2 < q < p < 1`` on the grid.

    Raises:
        BudgetExceeded: the grid has more pairs than ``grid.max_points``.
        NotConvertibleError: ``psi`` is not majorized by ``phi``.
    """
    _require_comparable(psi, phi, grid.tol)
    vals = grid_values(grid.resolution)
    m = vals.size
    total = m * (m - 1) // 2
    if total > grid.max_points:
        raise BudgetExceeded(f"{total} grid pairs exceed the budget of {grid.max_points}")
    two = np.stack([vals, 1.0 - vals], axis=1)
    left = np.cumsum(tensor_rows(psi.array, two), axis=1)[:, :-1]
    right = np.cumsum(tensor_rows(phi.array, two), axis=1)[:, :-1]
    h = _row_entropy(two)
    tol = grid.tol
    count = 0
    best_val, best_pq = -np.inf, None
    for start in range(0, m, 64):
        stop = min(m, start + 64)
        ok = np.all(left[start:stop, None, :] <= right[None, :, :] + tol, axis=2)
        # rows index p, columns index q; keep q < p
        ok &= np.arange(m)[None, :] < np.arange(start, stop)[:, None]
        gain = h[None, :] - h[start:stop, None]
        ok &= gain > tol
        count += int(ok.sum())
        if ok.any():
            masked = np.where(ok, gain, -np.inf)
            flat = int(np.argmax(masked))
            val = masked.flat[flat]
            if val > best_val:
                best_val = float(val)
                best_pq = (start + flat // m, flat % m)
    best = None
    if best_pq is not None:
        p, q = vals[best_pq[0]], vals[best_pq[1]]
        best = ScanBest(
            make_schmidt([p, 1.0 - p], tol), make_schmidt([q, 1.0 - q], tol), best_val
        )
    return ScanResult(best, count, total)


def random_search_kxk(
    psi: SchmidtVector,
    phi: SchmidtVector,
    k: int,
    grid: GridSpec = GridSpec(),
    samples: int = 100_000,
) -> ScanResult:
    """Sample ``chi`` uniformly from the ordered ``k``-simplex and derive ``omega`` by one Robin-Hood transfer.

    The donor/receiver pair is uniform over ``i < j``; the amount is
    log-uniform over six decades below half their gap, so small transfers
    (where feasibility usually lives) are well represented. Deterministic for
    a given ``grid.seed``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    _require_comparable(psi, phi, grid.tol)
    if samples > grid.max_points:
        raise BudgetExceeded(f"{samples} samples exceed the budget of {grid.max_points}")
    rng = SplitMix64(grid.seed)
    pairs = np.array([(i, j) for i in range(k) for j in range(i + 1, k)])
    a, b, tol = psi.array, phi.array, grid.tol
    count = done = 0
    best_val, best = -np.inf, None
    while done < samples:
        size = min(_CHUNK, samples - done)
        chi = sorted_simplex_block(rng, size, k)
        u = rng.uniform_block((size, 2))
        pick = pairs[np.minimum((u[:, 0] * len(pairs)).astype(int), len(pairs) - 1)]
        rows = np.arange(size)
        cap = 0.5 * (chi[rows, pick[:, 0]] - chi[rows, pick[:, 1]])
        amount = cap * 10.0 ** (-6.0 * u[:, 1])
        omega = chi.copy()
        omega[rows, pick[:, 0]] -= amount
        omega[rows, pick[:, 1]] += amount
        omega = -np.sort(-omega, axis=1)
        gain = _row_entropy(omega) - _row_entropy(chi)
        ok = (gain > tol) & majorizes_rows(tensor_rows(a, chi), tensor_rows(b, omega), tol)
        count += int(ok.sum())
        if ok.any():
            masked = np.where(ok, gain, -np.inf)
            i = int(np.argmax(masked))
            if masked[i] > best_val:
                best_val = float(masked[i])
                best = (chi[i].copy(), omega[i].copy())
        done += size
    result_best = None
    if best is not None:
        result_best = ScanBest(make_schmidt(best[0], tol), make_schmidt(best[1], tol), best_val)
    return ScanResult(result_best, count, samples)


def max_recovery_scan(
    psi: SchmidtVector,
    phi: SchmidtVector,
    k_max: int,
    grid: GridSpec = GridSpec(),
    samples: int = 100_000,
) -> ScanResult:
    """Best recovery found for each auxiliary dimension ``2..k_max``.

    ``k = 2`` uses the exhaustive grid, larger ``k`` the random search seeded
    with ``grid.seed + k``. A pair found at ``k`` stays feasible at ``k + 1``
    after appending a zero to both states, so the reported best is carried
    forward and the table is non-decreasing in ``k``. Exploratory only.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    ks = range(2, k_max + 1)
    if not majorize(psi, phi, grid.tol).holds:
        rows = tuple(KRow(k, 0.0, 0, 0) for k in ks)
        return ScanResult(None, 0, 0, rows, not_convertible=True)
    m = grid_values(grid.resolution).size
    budget = m * (m - 1) // 2 + samples * (k_max - 2)
    if budget > grid.max_points:
        raise BudgetExceeded(f"scan needs {budget} evaluations, budget is {grid.max_points}")
    rows = []
    carried: Optional[ScanBest] = None
    feasible = tested = 0
    for k in ks:
        if k == 2:
            res = grid_search_2x2(psi, phi, grid)
        else:
            sub = GridSpec(grid.resolution, grid.max_points, grid.seed + k, grid.tol)
            res = random_search_kxk(psi, phi, k, sub, samples)
        feasible += res.feasible_count
        tested += res.points_tested
        if carried is not None:
            carried = ScanBest(
                carried.chi.padded(k), carried.omega.padded(k), carried.recovered
            )
        if res.best is not None and (carried is None or res.best.recovered > carried.recovered):
            carried = res.best
        best_val = carried.recovered if carried is not None else 0.0
        rows.append(KRow(k, best_val, res.feasible_count, res.points_tested))
    return ScanResult(carried, feasible, tested, tuple(rows))
