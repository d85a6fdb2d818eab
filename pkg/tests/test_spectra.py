import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locc_recovery import (
    EmptySpectrum,
    NegativeEntry,
    NotNormalized,
    SchmidtVector,
    Tolerance,
    entropy,
    make_schmidt,
    tensor_spectrum,
    uniform,
)


def shannon(values):
    return -math.fsum(x * math.log(x) for x in values if x > 0)


@st.composite
def spectra(draw, min_dim=1, max_dim=8):
    n = draw(st.integers(min_dim, max_dim))
    raw = draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n))
    raw = [x + 1e-3 for x in raw]
    total = math.fsum(raw)
    return make_schmidt([x / total for x in raw], 1e-9)


def test_make_schmidt_sorts():
    assert make_schmidt([0.2, 0.5, 0.3]).values == (0.5, 0.3, 0.2)
    assert make_schmidt([0.4, 0.3, 0.2, 0.1]).values == (0.4, 0.3, 0.2, 0.1)


def test_make_schmidt_errors():
    with pytest.raises(NotNormalized):
        make_schmidt([0.5, 0.6])
    with pytest.raises(NegativeEntry):
        make_schmidt([1.1, -0.1])
    with pytest.raises(EmptySpectrum):
        make_schmidt([])
    with pytest.raises(NegativeEntry):
        make_schmidt([float("nan"), 1.0])


def test_negative_dust_is_clamped():
    v = make_schmidt([0.5, 0.5 + 1e-13, -1e-13])
    assert v.values[-1] == 0.0
    assert all(x >= 0.0 for x in v)


def test_tolerance_rejects_negative():
    with pytest.raises(ValueError):
        Tolerance(-1.0)
    assert make_schmidt([0.5, 0.5], Tolerance(1e-6)).tol == 1e-6


def test_entropy_values():
    assert entropy(make_schmidt([1.0])) == 0.0
    assert entropy(make_schmidt([0.4, 0.3, 0.2, 0.1])) == pytest.approx(1.27985, abs=1e-4)
    assert entropy(make_schmidt([0.8, 0.2])) == pytest.approx(0.50040, abs=1e-4)
    assert entropy(make_schmidt([0.5, 0.5])) == pytest.approx(math.log(2), abs=1e-15)
    # 0 ln 0 = 0
    assert entropy(make_schmidt([0.5, 0.5, 0.0])) == pytest.approx(math.log(2), abs=1e-15)


def test_tensor_examples():
    psi = make_schmidt([0.4, 0.3, 0.2, 0.1])
    chi = make_schmidt([0.8, 0.2])
    got = tensor_spectrum(psi, chi).values
    assert got == pytest.approx((0.32, 0.24, 0.16, 0.08, 0.08, 0.06, 0.04, 0.02), abs=1e-15)
    phi = make_schmidt([0.5, 0.3, 0.2, 0.0])
    got = tensor_spectrum(phi, chi).values
    assert got == pytest.approx((0.40, 0.24, 0.16, 0.10, 0.06, 0.04, 0.0, 0.0), abs=1e-15)
    assert tensor_spectrum(psi, make_schmidt([1.0])).values == psi.values


def test_padded_appends_zeros_only():
    v = make_schmidt([0.7, 0.3])
    assert v.padded(4).values == (0.7, 0.3, 0.0, 0.0)
    with pytest.raises(ValueError):
        v.padded(1)


@settings(max_examples=200, deadline=None)
@given(spectra())
def test_make_schmidt_idempotent(v):
    again = make_schmidt(list(v.values), v.tol)
    assert again == v
    assert all(a >= b for a, b in zip(v.values, v.values[1:]))


@settings(max_examples=200, deadline=None)
@given(spectra())
def test_entropy_matches_direct_sum_and_bounds(v):
    e = entropy(v)
    assert e == pytest.approx(shannon(v.values), abs=1e-12)
    assert -1e-15 <= e <= math.log(v.dim) + 1e-12


@settings(max_examples=200, deadline=None)
@given(spectra(max_dim=5), spectra(max_dim=5))
def test_tensor_matches_enumeration(a, b):
    want = sorted((x * y for x, y in itertools.product(a.values, b.values)), reverse=True)
    got = tensor_spectrum(a, b)
    assert got.values == pytest.approx(want, abs=1e-15)
    assert math.fsum(got.values) == pytest.approx(1.0, abs=1e-9)
    # entropy is additive over products
    assert entropy(got) == pytest.approx(entropy(a) + entropy(b), abs=1e-10)


def test_uniform_has_max_entropy():
    for n in range(1, 8):
        assert entropy(uniform(n)) == pytest.approx(math.log(n), abs=1e-12)
    assert isinstance(uniform(3), SchmidtVector)
    assert np.allclose(uniform(4).array, 0.25)
