import math

import numpy as np
import pytest

from locc_recovery import (
    BudgetExceeded,
    GridSpec,
    NotConvertibleError,
    grid_search_2x2,
    make_schmidt,
    max_recovery_scan,
    random_search_kxk,
    recover_3x3_delta1,
    verify_recovery,
)
from locc_recovery.oracle import grid_values

PSI = make_schmidt([0.4, 0.3, 0.2, 0.1])
PHI = make_schmidt([0.5, 0.3, 0.2, 0.0])
D1_PSI = make_schmidt([0.4, 0.25, 0.2, 0.15])
D1_PHI = make_schmidt([0.4, 0.3, 0.2, 0.1])
BOTH_PSI = make_schmidt([0.4, 0.35, 0.15, 0.1])
BOTH_PHI = make_schmidt([0.4, 0.4, 0.1, 0.1])


def h(*p):
    return -math.fsum(x * math.log(x) for x in p if x > 0)


def test_grid_values():
    vals = grid_values(1e-3)
    assert vals.size == 499
    assert vals[0] == pytest.approx(0.501) and vals[-1] == pytest.approx(0.999)
    assert grid_values(0.25).tolist() == [0.75]


def test_grid_example_pair():
    res = grid_search_2x2(PSI, PHI)
    assert res.feasible_count > 0
    assert res.points_tested == 499 * 498 // 2
    assert res.best.recovered >= h(0.73, 0.27) - h(0.8, 0.2) - 1e-12
    cert = verify_recovery(PSI, PHI, res.best.chi, res.best.omega)
    assert cert.recovered == pytest.approx(res.best.recovered, abs=1e-12)
    assert res.best.recovered <= cert.loss


def test_grid_counts_match_direct_check():
    grid = GridSpec(resolution=0.02)
    res = grid_search_2x2(PSI, PHI, grid)
    vals = grid_values(0.02)
    count = 0
    for p in vals:
        for q in vals[vals < p]:
            try:
                verify_recovery(PSI, PHI, make_schmidt([p, 1 - p]), make_schmidt([q, 1 - q]))
                count += 1
            except Exception:
                pass
    assert res.feasible_count == count


def test_grid_finds_nothing_when_largest_weights_agree():
    assert grid_search_2x2(D1_PSI, D1_PHI).feasible_count == 0
    same = grid_search_2x2(PSI, PSI)
    assert same.feasible_count == 0 and same.best is None


def test_grid_errors():
    with pytest.raises(BudgetExceeded):
        grid_search_2x2(PSI, PHI, GridSpec(resolution=1e-4, max_points=1000))
    with pytest.raises(NotConvertibleError):
        grid_search_2x2(PHI, PSI)
    with pytest.raises(ValueError):
        GridSpec(resolution=0.0)


def test_random_search_both_ends_finds_nothing():
    res = random_search_kxk(BOTH_PSI, BOTH_PHI, 3, GridSpec(seed=1), samples=100_000)
    assert res.feasible_count == 0 and res.points_tested == 100_000


def test_random_search_agrees_with_constructions():
    res = random_search_kxk(D1_PSI, D1_PHI, 3, GridSpec(seed=2), samples=20_000)
    assert res.feasible_count > 0
    assert recover_3x3_delta1(D1_PSI, D1_PHI).certificate.k == 3
    verify_recovery(D1_PSI, D1_PHI, res.best.chi, res.best.omega)
    two = random_search_kxk(PSI, PHI, 2, GridSpec(seed=3), samples=20_000)
    assert two.feasible_count > 0 and grid_search_2x2(PSI, PHI).feasible_count > 0


def test_random_search_is_deterministic():
    a = random_search_kxk(D1_PSI, D1_PHI, 3, GridSpec(seed=5), samples=5000)
    b = random_search_kxk(D1_PSI, D1_PHI, 3, GridSpec(seed=5), samples=5000)
    assert a == b
    with pytest.raises(ValueError):
        random_search_kxk(PSI, PHI, 1)


def test_max_recovery_scan_example():
    res = max_recovery_scan(PSI, PHI, 4, GridSpec(), samples=20_000)
    vals = [row.best_recovered for row in res.per_k]
    assert [row.k for row in res.per_k] == [2, 3, 4]
    assert vals[0] >= h(0.73, 0.27) - h(0.8, 0.2) - 1e-12
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    loss = h(0.4, 0.3, 0.2, 0.1) - h(0.5, 0.3, 0.2)
    assert all(v <= loss + 1e-10 for v in vals)
    assert res.best.chi.dim == 4
    verify_recovery(PSI, PHI, res.best.chi, res.best.omega)


def test_max_recovery_scan_incomparable():
    res = max_recovery_scan(PHI, PSI, 3)
    assert res.not_convertible and res.best is None
    assert all(r.best_recovered == 0 and r.feasible_count == 0 for r in res.per_k)


def test_scan_budget():
    with pytest.raises(BudgetExceeded):
        max_recovery_scan(PSI, PHI, 3, GridSpec(max_points=200_000), samples=100_000)


def test_zero_padding_keeps_feasibility():
    res = grid_search_2x2(PSI, PHI, GridSpec(resolution=0.01))
    chi, omega = res.best.chi, res.best.omega
    for k in range(3, 6):
        verify_recovery(PSI, PHI, chi.padded(k), omega.padded(k))
    assert np.all(chi.padded(5).array[2:] == 0.0)
