"""Acceptance criteria at their stated tolerances.

Each test is one criterion; the terminal summary prints a PASS/FAIL line per criterion.
"""
import time

import numpy as np
import pytest

from scl_moments.ensembles import parse_ensemble
from scl_moments.partitions import (
    adopted_graph,
    build_adopted_sequence,
    catalan,
    enumerate_nc_pair_partitions,
    verify_adopted,
)
from scl_moments.relations import block_relation, condition_counts, growth_report, wigner_relation
from scl_moments.spectra import empirical_moments, jacobi_eigenvalues, trace_power_moment, variance_decay
from scl_moments.tree_integrals import j_alpha, j_alpha_bruteforce, scl_verdict, theoretical_moment
from scl_moments.weights import BUILTIN_WEIGHTS, band, constant, periodic_band, piecewise_constant

GRID = 2048


def _moment_window(rep):
    means = {r.k: r.mean for r in rep.rows}
    assert 0.95 <= means[2] <= 1.05, means
    assert 1.9 <= means[4] <= 2.1, means
    assert 4.7 <= means[6] <= 5.3, means
    assert abs(means[3]) <= 0.1 and abs(means[5]) <= 0.1, means
    for k in (1, 3, 5):
        r = rep.row(k)
        assert abs(r.mean) <= 3 * r.stderr + 1e-12, (k, r.mean, r.stderr)


def test_criterion_01_combinatorics():
    """non-crossing pair partitions: Catalan counts, verified adopted trees"""
    start = time.perf_counter()
    for k in (2, 4, 6, 8, 10, 12):
        parts = enumerate_nc_pair_partitions(k)
        assert len(parts) == catalan(k // 2) == [1, 2, 5, 14, 42, 132][k // 2 - 1]
        for pi in parts:
            assert verify_adopted(pi, build_adopted_sequence(pi))
            g = adopted_graph(pi)
            assert g.node_count == k // 2 + 1 and g.is_tree()
    assert time.perf_counter() - start < 1.0


def test_criterion_02_wigner_theory():
    """constant weight: theoretical moments equal Catalan numbers"""
    start = time.perf_counter()
    w = constant(1.0)
    cache: dict = {}
    for k in range(1, 13):
        expected = catalan(k // 2) if k % 2 == 0 else 0
        assert abs(theoretical_moment(k, w, GRID, cache=cache) - expected) <= 1e-9
    assert time.perf_counter() - start < 5.0


@pytest.mark.parametrize("rho", [0.1, 0.25, 0.4])
def test_criterion_03_periodic_band_theory(rho):
    """periodic band: J equals (2 rho)^(k/2), normalized moments equal Catalan"""
    w = periodic_band(rho)
    cache: dict = {}
    for k in (2, 4, 6, 8):
        for pi in enumerate_nc_pair_partitions(k):
            assert abs(j_alpha(pi, w, GRID, cache=cache) - (2 * rho) ** (k // 2)) <= 1e-4
        assert abs(theoretical_moment(k, w, GRID, normalized=True) - catalan(k // 2)) <= 1e-3


def test_criterion_04_band_scl_failure():
    """band(0.25): normalized fourth moment matches the analytic 2.0680 and exceeds 2.05"""
    rho = 0.25
    analytic = 2 * (4 * rho ** 2 - 10 * rho ** 3 / 3) / (2 * rho - rho ** 2) ** 2
    mu4 = theoretical_moment(4, band(rho), GRID, normalized=True)
    assert abs(analytic - 2.0680) <= 5e-5
    assert abs(mu4 - 2.0680) <= 0.01
    assert mu4 > 2.05


def test_criterion_05_oracle_equivalence():
    """message passing agrees with brute-force nested sums at grid 64"""
    start = time.perf_counter()
    weights = {
        "constant": constant(1.0),
        "band": band(0.25),
        "periodic_band": periodic_band(0.25),
        "piecewise": piecewise_constant((0.0, 0.3, 0.6, 1.0), (1.0, 0.5, 0.2)),
    }
    assert set(BUILTIN_WEIGHTS) <= set(weights)
    for name, w in weights.items():
        for k in (2, 4, 6):
            for pi in enumerate_nc_pair_partitions(k):
                fast = j_alpha(pi, w, 64)
                slow = j_alpha_bruteforce(pi, w, 64)
                assert abs(fast - slow) <= 5e-3, (name, str(pi), fast, slow)
    assert time.perf_counter() - start < 30.0


def test_criterion_06_monte_carlo_wigner():
    """Wigner N=512, 32 trials: moments 1, 2, 5 and vanishing odd moments"""
    start = time.perf_counter()
    _moment_window(empirical_moments(parse_ensemble("wigner", n=512, seed=2024), 6, 32))
    assert time.perf_counter() - start < 120.0


def test_criterion_07_block_matrices():
    """block-minus matrix of total size 512: same moment windows as Wigner"""
    _moment_window(empirical_moments(parse_ensemble("block-minus", n=512, seed=2024), 6, 32))


def test_criterion_08_slow_band():
    """slow band beta=0.7, N=1024: mean fourth moment within [1.85, 2.15]"""
    spec = parse_ensemble("slow:0.7", n=1024, seed=2024)
    assert spec.band_width == 128
    mean4 = empirical_moments(spec, 4, 32).row(4).mean
    assert 1.85 <= mean4 <= 2.15, f"mean Y^(4) = {mean4:.4f}"


def test_criterion_09_variance_decay():
    """variance of the fourth trace moment decays at least like N^-0.8 and b_N^-0.8"""
    start = time.perf_counter()
    wig = variance_decay(lambda n: parse_ensemble("wigner", n=n, seed=7), [64, 128, 256, 512], 4, 64)
    assert wig.slope <= -0.8, wig
    slow = variance_decay(lambda n: parse_ensemble("slow:0.7", n=n, seed=7),
                          [128, 256, 512, 1024], 4, 64)
    assert slow.axis == "b_N"
    assert slow.slope <= -0.8, slow
    assert time.perf_counter() - start < 600.0


def test_criterion_10_relation_audit():
    """dependence counts for Wigner and block relations"""
    ns = [32, 64, 128]
    wig = growth_report(wigner_relation, ns)
    for row in wig.rows:
        assert row.report.c3_count == 0
        assert row.report.c2_max == 1
    assert wig.c1_decreasing
    blk = growth_report(lambda n: block_relation(n, minus=True), ns)
    for n, row in zip(ns, blk.rows):
        assert row.report.c1_max <= 6 * (2 * n)
        assert row.report.c2_max <= 2
    assert blk.monotone_decreasing
    plain = condition_counts(block_relation(32))
    assert plain.c1_max <= 6 * 64 and plain.c2_max <= 2


def test_criterion_11_eigensolver_oracles():
    """Jacobi eigenvalues reproduce traces and trace powers on 50 random matrices"""
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(2, 129))
        A = rng.normal(size=(n, n))
        A = (A + A.T) / np.sqrt(2 * n)
        lam = jacobi_eigenvalues(A).eigenvalues
        tr = np.trace(A)
        assert abs(lam.sum() - tr) <= 1e-10 * max(abs(tr), np.abs(lam).sum())
        for k in range(2, 9):
            exact = n * trace_power_moment(A, k)
            # odd traces can cancel to ~0, so scale by the absolute power sum
            scale = max(abs(exact), np.sum(np.abs(lam) ** k))
            assert abs(np.sum(lam ** k) - exact) <= 1e-6 * scale


def test_criterion_12_scl_verdicts():
    """semicircle verdict: true for constant and periodic weights, false for bands"""
    assert scl_verdict(constant(1.0), 1e-3).verdict
    for rho in (0.1, 0.25, 0.4):
        assert scl_verdict(periodic_band(rho), 1e-3).verdict
    for rho in (0.05, 0.1, 0.25, 0.5, 0.75, 0.95):
        res = scl_verdict(band(rho), 1e-3)
        assert not res.verdict
        assert res.moment_gap > 0
