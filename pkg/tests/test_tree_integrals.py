import numpy as np
import pytest

from scl_moments.partitions import PairPartition, catalan, enumerate_nc_pair_partitions
from scl_moments.tree_integrals import (
    all_leaf_orders,
    j_alpha,
    j_alpha_bruteforce,
    j_alpha_eliminate,
    moment_table,
    scl_verdict,
    theoretical_moment,
)
from scl_moments.weights import band, constant, is_phi_constant, periodic_band, phi0, piecewise_constant

PI1 = PairPartition.from_blocks([(1, 2), (3, 4)])
PI2 = PairPartition.from_blocks([(1, 4), (2, 3)])
CROSSING = PairPartition.from_blocks([(1, 3), (2, 4)])

BUILTINS = [constant(1.0), constant(0.6), band(0.25), band(0.7), periodic_band(0.3),
            piecewise_constant([0, 0.2, 0.5, 1], [1.0, 0.5, 0.2])]


def band_int_phi_sq(rho):
    return 4 * rho ** 2 - 10 * rho ** 3 / 3


def test_band_phi_square_oracle():
    # 2-D Riemann sum of phi^2 with phi from the three-case formula
    n = 200_000
    x = (np.arange(n) + 0.5) / n
    rho = 0.25
    phi = np.where(x < rho, x + rho, np.where(x < 1 - rho, 2 * rho, 1 + rho - x))
    assert np.mean(phi ** 2) == pytest.approx(band_int_phi_sq(rho), abs=1e-8)
    assert band_int_phi_sq(rho) == pytest.approx(0.197917, abs=1e-6)


def test_j_alpha_examples():
    for k in (2, 4, 6):
        for pi in enumerate_nc_pair_partitions(k):
            assert j_alpha(pi, constant(1.0), 256) == pytest.approx(1.0, abs=1e-12)
            assert j_alpha(pi, periodic_band(0.3), 256) == pytest.approx(0.6 ** (k // 2), abs=1e-12)
    expected = band_int_phi_sq(0.25)
    assert j_alpha(PI1, band(0.25)) == pytest.approx(expected, abs=2e-3)
    assert j_alpha(PI2, band(0.25)) == pytest.approx(expected, abs=2e-3)
    assert j_alpha(PI1, band(0.25)) == pytest.approx(j_alpha(PI2, band(0.25)), abs=1e-12)


def test_j_alpha_rejects_crossing():
    with pytest.raises(ValueError):
        j_alpha(CROSSING, constant(1.0), 64)
    with pytest.raises(ValueError):
        j_alpha_bruteforce(CROSSING, constant(1.0), 16)


def test_bruteforce_examples_and_guards():
    assert j_alpha_bruteforce(PairPartition((1, 0)), constant(1.0), 32) == pytest.approx(1.0)
    assert j_alpha_bruteforce(PI2, periodic_band(0.3), 64) == pytest.approx(0.36, abs=5e-3)
    with pytest.raises(ValueError):
        j_alpha_bruteforce(enumerate_nc_pair_partitions(8)[0], constant(1.0), 16)
    with pytest.raises(ValueError):
        j_alpha_bruteforce(PI1, constant(1.0), 128)


@pytest.mark.parametrize("w", BUILTINS, ids=lambda w: w.label())
def test_oracle_equivalence(w):
    for k in (2, 4, 6):
        for pi in enumerate_nc_pair_partitions(k):
            assert abs(j_alpha(pi, w, 64) - j_alpha_bruteforce(pi, w, 64)) <= 5e-3


@pytest.mark.parametrize("w", [constant(0.8), periodic_band(0.15), periodic_band(0.45)],
                         ids=lambda w: w.label())
def test_constant_phi_collapse(w):
    assert is_phi_constant(w, 1e-9, 512).constant_verdict
    p0 = phi0(w, 512)
    for k in (2, 4, 6, 8, 10):
        for pi in enumerate_nc_pair_partitions(k):
            assert abs(j_alpha(pi, w, 512) - p0 ** (k // 2)) <= k * 1e-6


@pytest.mark.parametrize("w", BUILTINS, ids=lambda w: w.label())
def test_normalized_fourth_moment_at_least_catalan(w):
    assert theoretical_moment(4, w, 512, normalized=True) >= 2 - 1e-9


@pytest.mark.parametrize("w", [band(0.25), piecewise_constant([0, 0.3, 1], [1, 0.4])],
                         ids=lambda w: w.label())
def test_leaf_order_independence(w):
    for k in (6, 8):
        for pi in enumerate_nc_pair_partitions(k):
            ref = j_alpha(pi, w, 256)
            for order in all_leaf_orders(pi, limit=20):
                assert abs(j_alpha_eliminate(pi, w, 256, order) - ref) <= 1e-12
            for root in range(k // 2 + 1):
                assert abs(j_alpha(pi, w, 256, root=root) - ref) <= 1e-12


def test_theoretical_moment_examples():
    assert theoretical_moment(4, constant(1.0)) == pytest.approx(2.0, abs=1e-12)
    assert theoretical_moment(4, periodic_band(0.25), normalized=True) == pytest.approx(2.0, abs=1e-9)
    rho = 0.25
    analytic = 2 * band_int_phi_sq(rho) / (2 * rho - rho ** 2) ** 2
    assert analytic == pytest.approx(2.0680, abs=1e-4)
    assert theoretical_moment(4, band(rho), normalized=True) == pytest.approx(analytic, abs=1e-3)
    assert theoretical_moment(5, band(0.3)) == 0.0
    with pytest.raises(ValueError):
        theoretical_moment(18, constant(1.0))


def test_moment_table_rows():
    table = moment_table(8, constant(1.0), 128)
    rows = list(table.rows())
    assert [r[0] for r in rows] == list(range(1, 9))
    for k, mu, cat, gap in rows:
        assert cat == (catalan(k // 2) if k % 2 == 0 else 0)
        assert abs(gap) < 1e-12
    normed = moment_table(4, band(0.3), 512, normalized=True)
    assert normed.entries[2] == pytest.approx(1.0, abs=1e-12)


def test_scl_verdicts():
    v = scl_verdict(periodic_band(0.3))
    assert v.verdict and abs(v.moment_gap) < 1e-9
    v = scl_verdict(band(0.25))
    assert not v.verdict and v.moment_gap == pytest.approx(0.068, abs=2e-3)
    v = scl_verdict(constant(1.0))
    assert v.verdict and v.moment_gap == pytest.approx(0.0, abs=1e-12)
