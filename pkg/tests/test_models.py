"""Model builders against independent enumeration oracles."""

import numpy as np
import pytest

from lltlab import (BaseLattice1D, CwModel, RegimeViolation, SupportOverflow,
                    ZeroVariance, cw_covariance, cw_magnetization_pmf,
                    fair_coin, iid_sum_pmf, moments, standardized_iid_sum)
from oracles import (cw_pmf_as_dict, enumerate_cw, enumerate_iid_sum,
                     symmetric_binomial_masses)


def bernoulli():
    return BaseLattice1D(offset=0.0, span=1.0, masses=np.array([0.5, 0.5]))


def test_moments_examples():
    assert moments(fair_coin()) == pytest.approx((0.0, 1.0), abs=1e-15)
    assert moments(bernoulli()) == pytest.approx((0.5, 0.25), abs=1e-15)
    with pytest.raises(ZeroVariance):
        moments(BaseLattice1D(offset=0.0, span=1.0, masses=np.array([1.0])))


def test_iid_sum_examples():
    base = fair_coin()
    one = iid_sum_pmf(base, 1)
    np.testing.assert_allclose(one.axis_coords(0), [-1.0, 1.0])
    np.testing.assert_allclose(one.masses, [0.5, 0.5])

    two = iid_sum_pmf(base, 2)
    np.testing.assert_allclose(two.axis_coords(0), [-2.0, 0.0, 2.0])
    np.testing.assert_allclose(two.masses, [0.25, 0.5, 0.25], atol=1e-15)

    four = iid_sum_pmf(base, 4)
    assert four.point_mass([0.0]) == pytest.approx(0.375, abs=1e-15)


def test_iid_sum_matches_enumeration():
    rng = np.random.default_rng(123)
    for _ in range(5):
        k = int(rng.integers(2, 5))
        masses = rng.random(k)
        masses /= masses.sum()
        base = BaseLattice1D(offset=float(rng.uniform(-1, 1)),
                             span=float(rng.uniform(0.2, 2.0)),
                             masses=masses,
                             index_lo=int(rng.integers(-3, 3)))
        for n in (1, 2, 3, 6):
            pmf = iid_sum_pmf(base, n)
            oracle = enumerate_iid_sum(base, n)
            for key, prob in oracle.items():
                assert pmf.mass_at_index([key]) == pytest.approx(prob, abs=1e-12)
            assert pmf.masses.sum() == pytest.approx(1.0, abs=1e-13)


def test_iid_sum_support_cap():
    with pytest.raises(SupportOverflow):
        iid_sum_pmf(fair_coin(), 100, support_cap=50)


def test_standardized_sum_grid_and_masses():
    base = fair_coin()
    four = standardized_iid_sum(base, 4)
    # step w/(sigma sqrt n) = 2/sqrt(4); extremes at +/- sqrt(n)
    np.testing.assert_allclose(four.axis_coords(0), [-2.0, -1.0, 0.0, 1.0, 2.0])
    assert four.point_mass([0.0]) == pytest.approx(0.375, abs=1e-15)
    for n in (2, 9, 64):
        pmf = standardized_iid_sum(base, n)
        assert pmf.grid.step[0] == pytest.approx(2.0 / np.sqrt(n), rel=1e-14)

    b1 = standardized_iid_sum(bernoulli(), 1)
    np.testing.assert_allclose(b1.axis_coords(0), [-1.0, 1.0])
    np.testing.assert_allclose(b1.masses, [0.5, 0.5])


def test_standardized_sum_nonzero_mean_offset_from_data():
    base = BaseLattice1D(offset=0.0, span=1.0,
                         masses=np.array([0.2, 0.5, 0.3]))
    mean, var = moments(base)
    n = 5
    pmf = standardized_iid_sum(base, n)
    # smallest support point is (0 - n*mean) / (sigma sqrt n)
    lo = (0.0 - n * mean) / np.sqrt(var * n)
    assert pmf.support_lower()[0] == pytest.approx(lo, rel=1e-12)
    assert abs(float(np.dot(pmf.masses, pmf.axis_coords(0)))) < 1e-12


# ---------------------------------------------------------------------------
# Curie-Weiss
# ---------------------------------------------------------------------------
def test_cw_examples_small():
    # beta = 0 decouples: two fair coins
    m0 = CwModel(sizes=[2], beta=0.0)
    pmf0 = cw_magnetization_pmf(m0)
    assert pmf0.point_mass([0.0]) == pytest.approx(0.5, abs=1e-15)
    # beta = ln 2: weights e^b, 1, 1, e^b over the four configurations
    mb = CwModel(sizes=[2], beta=np.log(2.0))
    pmfb = cw_magnetization_pmf(mb)
    assert pmfb.point_mass([0.0]) == pytest.approx(1.0 / 3.0, abs=1e-14)


def test_cw_grid_matches_rescaled_magnetizations():
    model = CwModel(sizes=[3, 5], beta=0.4)
    pmf = cw_magnetization_pmf(model)
    assert pmf.shape == (4, 6)
    np.testing.assert_allclose(pmf.axis_coords(0),
                               (2 * np.arange(4) - 3) / np.sqrt(3), rtol=1e-14)
    np.testing.assert_allclose(pmf.grid.step, [2 / np.sqrt(3), 2 / np.sqrt(5)],
                               rtol=1e-14)


@pytest.mark.parametrize("sizes,beta", [
    ([5], 0.0), ([5], 0.7), ([3, 4], 0.3), ([2, 2, 3], 0.7), ([1, 6], 0.95),
])
def test_cw_matches_spin_enumeration(sizes, beta):
    model = CwModel(sizes=sizes, beta=beta)
    pmf = cw_magnetization_pmf(model)
    J = np.full((len(sizes), len(sizes)), beta)
    oracle = enumerate_cw(sizes, J)
    got = cw_pmf_as_dict(pmf, sizes)
    assert set(got) == set(oracle)
    for key, prob in oracle.items():
        assert got[key] == pytest.approx(prob, abs=1e-12)


def test_cw_heterogeneous_matches_spin_enumeration():
    J = np.array([[0.6, 0.2], [0.2, 0.6]])
    model = CwModel(sizes=[4, 3], J=J)
    pmf = cw_magnetization_pmf(model)
    oracle = enumerate_cw([4, 3], J)
    got = cw_pmf_as_dict(pmf, [4, 3])
    for key, prob in oracle.items():
        assert got[key] == pytest.approx(prob, abs=1e-12)


def test_cw_beta_zero_is_product_of_binomials():
    sizes = [180, 200]
    pmf = cw_magnetization_pmf(CwModel(sizes=sizes, beta=0.0))
    want = np.outer(symmetric_binomial_masses(sizes[0]),
                    symmetric_binomial_masses(sizes[1]))
    assert np.max(np.abs(pmf.masses - want)) < 1e-12


def test_cw_symmetry():
    pmf = cw_magnetization_pmf(CwModel(sizes=[6, 4], beta=0.5))
    flipped = pmf.masses[::-1, ::-1]
    assert np.max(np.abs(pmf.masses - flipped)) < 1e-14


def test_cw_regime_checks():
    with pytest.raises(RegimeViolation):
        cw_magnetization_pmf(CwModel(sizes=[4], beta=1.0))
    # bypass flag allows exploring beyond the high-temperature regime
    pmf = cw_magnetization_pmf(CwModel(sizes=[4], beta=1.0), check_regime=False)
    assert pmf.total_mass == pytest.approx(1.0, abs=1e-14)
    # heterogeneous: J^-1 - diag(alpha) must be positive definite
    bad = CwModel(sizes=[5, 5], J=np.array([[4.0, 0.0], [0.0, 4.0]]))
    with pytest.raises(RegimeViolation):
        cw_magnetization_pmf(bad)
    with pytest.raises(SupportOverflow):
        cw_magnetization_pmf(CwModel(sizes=[400, 400], beta=0.0),
                             support_cap=1000)


def test_cw_covariance_examples():
    assert np.allclose(cw_covariance(CwModel(sizes=[4, 4], beta=0.0)),
                       np.eye(2), atol=1e-15)
    hom = cw_covariance(CwModel(sizes=[8, 8], beta=0.5))
    assert np.max(np.abs(hom - [[1.5, 0.5], [0.5, 1.5]])) < 1e-12
    het = cw_covariance(CwModel(sizes=[8, 8],
                                J=np.array([[0.5, 0.0], [0.0, 0.5]])))
    assert np.max(np.abs(het - np.diag([4.0 / 3.0, 4.0 / 3.0]))) < 1e-12


def test_cw_covariance_symmetric_positive_definite():
    rng = np.random.default_rng(17)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        sizes = rng.integers(2, 30, size=d)
        beta = float(rng.uniform(0.0, 0.99))
        cov = cw_covariance(CwModel(sizes=sizes, beta=beta))
        assert np.max(np.abs(cov - cov.T)) < 1e-14
        assert np.min(np.linalg.eigvalsh(cov)) > 0.0
