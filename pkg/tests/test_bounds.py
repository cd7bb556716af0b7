"""
Unit tests for the analytical CF and distortion bounds.
Tests: constants, closed forms against naive evaluation, monotonicity, argument checks.
"""
from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
import pytest

repo_root = Path(__file__).resolve().parents[1]
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))

import src.ofdm.bounds as bounds_module
from src.ofdm.bounds import (
    BalanceQuery,
    BoundQuery,
    aom_metric,
    aom_scaling_bound,
    aom_scaling_schedule,
    aom_scaling_terms,
    balance_bound_bpsk,
    balance_bound_general,
    ccdf_bound_function,
    ck,
    clamp_display,
    crossing_count_bound,
    crossing_count_bound_min,
    default_mu_grid,
    log_thm1,
    log_thm2,
    log_union_chernoff,
    thm1_bound,
    thm1_value,
    thm2_bound,
    thm2_value,
    thm3_bound,
    thm3_bound_min,
    union_chernoff_bound,
    union_chernoff_bpsk,
)
from src.ofdm.codes import CodeSpec, distance_distribution, enumerate_symbols, weight_distribution
from src.ofdm.signal_core import Lattice
from src.ofdm.special import RhoSearch

SMALL_K = (3, 4, 6, 8)


def _naive_f_star_star(rho, x, n, oversampling, k_range):
    return min(2 * oversampling * n * k * math.exp(-rho * math.sqrt(n) * x / ck(k)) for k in k_range)


def _naive_thm1(rho, x, n, oversampling, k_range, counts, m1):
    f_star = _naive_f_star_star(rho, x, n, oversampling, k_range) * math.sqrt(math.cosh(rho * n**0.75))
    inner = sum(w * math.cosh(rho * n**0.25 * (n - 2 * k)) for k, w in enumerate(counts)) / m1
    return math.sqrt(f_star * inner)


def _naive_thm2(rho, x, n, oversampling, k_range, counts, m1):
    inner = sum(w * math.cosh(rho * (n - 2 * k)) for k, w in enumerate(counts)) / m1
    return _naive_f_star_star(rho, x, n, oversampling, k_range) * inner


class TestConstants:
    """C_K and display clamping."""

    def test_ck_values(self):
        """C_K matches its closed form at K = 3 and K = 4."""
        assert ck(3) == pytest.approx(2.0, abs=1e-12)
        assert ck(4) == pytest.approx(math.sqrt(2.0), abs=1e-12)
        assert ck(64) > 1.0

    def test_ck_rejects_small_k(self):
        """C_K is undefined below three projections."""
        with pytest.raises(ValueError, match="K ≥ 3"):
            ck(2)

    def test_clamp_display(self):
        """Bounds above one are shown as one."""
        assert clamp_display(5.0) == 1.0
        assert clamp_display(0.25) == 0.25


class TestUnionChernoff:
    """Union bound with the exact BPSK moment generating function."""

    def test_matches_naive_product(self):
        """Lattice sum agrees with a direct cosh product."""
        n, oversampling, k, rho, x = 5, 2, 4, 0.7, 1.3
        phases = Lattice(n=n, oversampling=oversampling, k=k).phase_matrix()
        naive = sum(
            math.exp(-rho * x / ck(k)) * math.prod(math.cosh(rho * c / math.sqrt(n)) for c in row) for row in phases
        )
        assert union_chernoff_bpsk(x, n, oversampling, k, rho) == pytest.approx(naive, rel=1e-12)

    def test_chunk_size_does_not_change_value(self, monkeypatch):
        """Row-chunked lattice sums agree with a single block."""
        whole = log_union_chernoff(1.7, 12, 3, 5, 0.9)
        monkeypatch.setattr(bounds_module, "PHASE_CHUNK_ELEMENTS", 7)
        assert log_union_chernoff(1.7, 12, 3, 5, 0.9) == pytest.approx(whole, rel=1e-13)

    def test_at_zero_threshold_at_least_lattice_size(self):
        """At x = 0 each lattice point contributes at least one."""
        for rho in (1e-3, 0.5, 3.0):
            assert union_chernoff_bpsk(0.0, 6, 2, 5, rho) >= 6 * 2 * 5 * (1 - 1e-12)
        assert union_chernoff_bound(0.0, 6, 1, SMALL_K) >= 6 * 3

    def test_rejects_nonpositive_rho(self):
        """rho must be positive."""
        with pytest.raises(ValueError):
            union_chernoff_bpsk(1.0, 4, 1, 3, 0.0)

    def test_optimized_not_above_any_fixed_point(self):
        """Optimized bound is the minimum over (K, rho)."""
        best = union_chernoff_bound(2.0, 8, 1, SMALL_K)
        for k in SMALL_K:
            for rho in (0.1, 1.0, 4.0):
                assert best <= union_chernoff_bpsk(2.0, 8, 1, k, rho) * (1 + 1e-12)

    def test_decreasing_in_threshold(self):
        """Bound falls as the threshold rises."""
        values = [union_chernoff_bound(x, 8, 1, SMALL_K) for x in (1.0, 2.0, 3.0)]
        assert values[0] > values[1] > values[2]


class TestDistributionBounds:
    """Distance- and weight-distribution bounds."""

    @pytest.fixture
    def uncoded12(self):
        spec = CodeSpec.uncoded(12)
        return spec, distance_distribution(enumerate_symbols(spec)), weight_distribution(spec)

    @pytest.mark.parametrize("n", [4, 16, 32])
    @pytest.mark.parametrize("rho", [0.01, 0.3, 1.0])
    def test_thm1_matches_naive(self, n, rho):
        """Distance bound agrees with a naive double sum."""
        dist = weight_distribution(CodeSpec.uncoded(n))
        query = BoundQuery(
            x=2.0, n=n, oversampling=2, k_range=SMALL_K, distribution=_as_distance(dist)
        )
        naive = _naive_thm1(rho, 2.0, n, 2, SMALL_K, dist.counts, dist.m1)
        assert thm1_value(rho, query) == pytest.approx(naive, rel=1e-9)

    @pytest.mark.parametrize("n", [4, 16, 32])
    @pytest.mark.parametrize("rho", [0.01, 0.3, 1.0])
    def test_thm2_matches_naive(self, n, rho):
        """Weight bound agrees with a naive sum."""
        dist = weight_distribution(CodeSpec.uncoded(n))
        query = BoundQuery(x=2.0, n=n, oversampling=2, k_range=SMALL_K, distribution=dist)
        naive = _naive_thm2(rho, 2.0, n, 2, SMALL_K, dist.counts, dist.m1)
        assert thm2_value(rho, query) == pytest.approx(naive, rel=1e-9)

    def test_large_n_finite(self):
        """N = 4096 stays finite over the whole rho interval."""
        weight = weight_distribution(CodeSpec.uncoded(4096))
        q1 = BoundQuery(x=4.0, n=4096, k_range=SMALL_K, distribution=_as_distance(weight))
        q2 = BoundQuery(x=4.0, n=4096, k_range=SMALL_K, distribution=weight)
        for rho in (1e-4, 1e-2, 1.0, 1e2):
            assert math.isfinite(log_thm1(rho, q1))
            assert math.isfinite(log_thm2(rho, q2))
        assert thm2_value(1e2, q2) == math.inf
        assert math.isfinite(thm1_bound(q1))
        assert math.isfinite(thm2_bound(q2))

    def test_flavor_checked(self, uncoded12):
        """Each bound refuses the other distribution flavor."""
        _, distance, weight = uncoded12
        with pytest.raises(ValueError, match="distance"):
            thm1_bound(BoundQuery(x=1.0, n=12, distribution=weight))
        with pytest.raises(ValueError, match="weight"):
            thm2_bound(BoundQuery(x=1.0, n=12, distribution=distance))

    def test_missing_distribution(self):
        """Distance bound needs a distribution."""
        with pytest.raises(ValueError):
            thm1_bound(BoundQuery(x=1.0, n=4))

    def test_length_mismatch(self, uncoded12):
        """Distribution length must be N + 1."""
        _, distance, _ = uncoded12
        with pytest.raises(ValueError, match="does not match"):
            BoundQuery(x=1.0, n=10, distribution=distance)

    def test_bound_not_above_fixed_rho(self, uncoded12):
        """Optimized bounds never exceed a fixed-rho value."""
        _, distance, weight = uncoded12
        q1 = BoundQuery(x=2.5, n=12, k_range=SMALL_K, distribution=distance)
        q2 = BoundQuery(x=2.5, n=12, k_range=SMALL_K, distribution=weight)
        for rho in (0.05, 0.2, 1.0):
            assert thm1_bound(q1) <= thm1_value(rho, q1) * (1 + 1e-9)
            assert thm2_bound(q2) <= thm2_value(rho, q2) * (1 + 1e-9)

    def test_query_rejects_bad_input(self):
        """Negative x, small K and negative C_w are rejected."""
        with pytest.raises(ValueError):
            BoundQuery(x=-1.0, n=4)
        with pytest.raises(ValueError, match="K ≥ 3"):
            BoundQuery(x=1.0, n=4, k_range=(2, 3))
        with pytest.raises(ValueError):
            BoundQuery(x=1.0, n=4, c_w=-0.5)


def _as_distance(dist):
    """Linear codes have identical distance and weight distributions."""
    return type(dist)(counts=dist.counts, m1=dist.m1, flavor="distance", log_counts=dist.log_counts)


class TestThm3:
    """Closed-form Gaussian-tail bound."""

    def test_linear_formula(self):
        """Linear-code Gaussian tail matches its closed form."""
        value = thm3_bound(2.0, 16, 4, 4, 0.0, linear=True)
        assert value == pytest.approx(2 * 4 * 4 * 16 * math.exp(-4.0 / (2 * 2.0)))

    def test_nonlinear_formula_and_proof_variant(self):
        """Nonlinear form matches its closed form and the proof variant is smaller."""
        default = thm3_bound(3.0, 16, 1, 3, 1.0, linear=False)
        variant = thm3_bound(3.0, 16, 1, 3, 1.0, linear=False, proof_variant=True)
        assert default == pytest.approx(2 * 2 * 3 * 16 * math.exp(-9.0 / (2 * 4 * 4)))
        assert variant == pytest.approx(2 * 2 * 3 * 16 * math.exp(-9.0 / (4 * 4)))
        assert variant < default

    def test_decreasing_in_x(self):
        """Gaussian-tail bound falls as x rises."""
        values = [thm3_bound_min(x, 64, 4, c_w=0.0, linear=True) for x in (1.0, 2.0, 3.0, 4.0)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_min_over_k(self):
        """Minimum over K is at most each single-K value."""
        assert thm3_bound_min(3.0, 64, 4, SMALL_K) == min(thm3_bound(3.0, 64, 4, k, 0.0, True) for k in SMALL_K)

    def test_rejects_negative_threshold(self):
        """Negative thresholds are rejected."""
        with pytest.raises(ValueError):
            thm3_bound(-1.0, 4, 1, 3, 0.0, linear=True)


class TestCrossingCount:
    """Markov bound on the level-crossing count."""

    def test_formula(self):
        """Expected crossings match the closed form."""
        lam, x, n, k, rho = 1.5, 2.0, 8, 4, 0.2
        c = ck(k)
        first = n * k * math.exp(rho**2 * n / 2 - rho * lam * math.sqrt(n) / c)
        second = n * (n - 1) * k**2 * math.exp(rho**2 * n - 2 * rho * lam * math.sqrt(n) / c)
        assert crossing_count_bound(lam, x, n, k, rho) == pytest.approx((first + second) / x**2, rel=1e-12)

    def test_single_subcarrier(self):
        """N = 1 leaves only the single-sample term."""
        value = crossing_count_bound(1.0, 1.0, 1, 3, 0.5)
        assert value == pytest.approx(3 * math.exp(0.125 - 0.25))

    def test_minimized(self):
        """Minimized crossing bound is at most a fixed (K, rho) value."""
        best = crossing_count_bound_min(2.0, 3.0, 16, SMALL_K, RhoSearch())
        assert best <= crossing_count_bound(2.0, 3.0, 16, 4, 0.1) * (1 + 1e-12)

    def test_rejects_nonpositive_x(self):
        """Level must be positive."""
        with pytest.raises(ValueError):
            crossing_count_bound(1.0, 0.0, 4, 3, 0.1)


class TestBalancing:
    """Balancing bounds for distortion-metric tails."""

    @staticmethod
    def _exact_ccdf(n):
        from src.ofdm.metrics import ccdf_function
        from src.ofdm.signal_core import peak_magnitudes

        return ccdf_function(peak_magnitudes(enumerate_symbols(CodeSpec.uncoded(n)), 1))

    def test_mu_grid(self):
        """Default mu grid starts above lam and ends at sqrt N or 2 lam."""
        grid = default_mu_grid(1.5, 16)
        assert grid.size == 64
        assert grid.min() > 1.5
        assert grid.max() == pytest.approx(4.0)
        above = default_mu_grid(5.0, 16)
        assert above.min() > 5.0 and above.max() == pytest.approx(10.0)

    def test_query_validation(self):
        """Balance queries reject bad grids and a zero level."""
        with pytest.raises(ValueError, match="empty"):
            BalanceQuery(lam=1.0, x=0.1, mu_grid=np.array([]), ccdf=lambda v: 0.0, h=aom_metric(4))
        with pytest.raises(ValueError, match="exceed"):
            BalanceQuery(lam=1.0, x=0.1, mu_grid=np.array([0.5, 2.0]), ccdf=lambda v: 0.0, h=aom_metric(4))
        with pytest.raises(ValueError):
            BalanceQuery(lam=1.0, x=0.0, mu_grid=np.array([2.0]), ccdf=lambda v: 0.0, h=aom_metric(4))

    def test_formulas_on_small_grid(self):
        """Both balancing bounds match a direct minimum over two mu values."""
        ccdf = lambda v: math.exp(-v)  # noqa: E731
        h = aom_metric(4)
        q = BalanceQuery(lam=1.0, x=0.5, mu_grid=np.array([1.5, 2.0]), ccdf=ccdf, h=h)
        b = math.exp(-1.0)
        bpsk = min(math.exp(-mu) + (b + b * b) * h(mu - 1.0) ** 2 / 0.25 for mu in (1.5, 2.0))
        general = min(math.exp(-mu) + b * h(mu - 1.0) / 0.5 for mu in (1.5, 2.0))
        assert balance_bound_bpsk(q) == pytest.approx(bpsk)
        assert balance_bound_general(q) == pytest.approx(general)

    def test_zero_when_level_above_sqrt_n(self):
        """Clipping above sqrt N gives a zero bound."""
        n = 8
        lam = math.sqrt(n) + 0.1
        q = BalanceQuery(lam=lam, x=0.01, mu_grid=default_mu_grid(lam, n), ccdf=self._exact_ccdf(n), h=aom_metric(n))
        assert balance_bound_bpsk(q) == 0.0
        assert balance_bound_general(q) == 0.0

    def test_large_x_tends_to_ccdf_infimum(self):
        """Huge x leaves the smallest CCDF value on the grid."""
        n, lam = 8, 1.5
        ccdf = self._exact_ccdf(n)
        grid = default_mu_grid(lam, n)
        q = BalanceQuery(lam=lam, x=1e9, mu_grid=grid, ccdf=ccdf, h=aom_metric(n))
        floor = min(ccdf(mu) for mu in grid)
        assert balance_bound_general(q) == pytest.approx(floor, abs=1e-8)
        assert balance_bound_bpsk(q) == pytest.approx(floor, abs=1e-8)

    def test_ccdf_bound_selectors(self):
        """Each CCDF selector returns the matching bound; unknown names raise."""
        linear = ccdf_bound_function("thm3-linear", 16, 0.0, SMALL_K)
        assert linear(2.0) == thm3_bound_min(2.0, 16, 1, SMALL_K, 0.0, linear=True)
        nonlinear = ccdf_bound_function("thm3-nonlinear", 16, 0.5, SMALL_K)
        assert nonlinear(2.0) == thm3_bound_min(2.0, 16, 1, SMALL_K, 0.5, linear=False)
        union = ccdf_bound_function("union-chernoff", 6, k_range=(3, 4))
        assert union(1.5) == pytest.approx(union_chernoff_bound(1.5, 6, 1, (3, 4)))
        with pytest.raises(ValueError, match="unknown"):
            ccdf_bound_function("thm9", 16)


class TestAomScaling:
    """The log log N clip-level schedule."""

    def test_schedule_values(self):
        """lam_N and mu_N follow the log log N schedule."""
        lam, mu = aom_scaling_schedule(64, 0.1)
        assert lam == pytest.approx(math.sqrt(1.1 * math.log(math.log(64))))
        assert mu == pytest.approx(math.sqrt(1.1 * math.log(64)))

    def test_schedule_needs_n_at_least_three(self):
        """Schedule is undefined below N = 3."""
        with pytest.raises(ValueError, match="N ≥ 3"):
            aom_scaling_schedule(2, 0.1)

    def test_larger_margin_gives_smaller_bound(self):
        """A wider epsilon lowers the scaling bound."""
        grid = np.linspace(2.0, 16.0, 50)
        loose = aom_scaling_bound(256, 0.01, 0.1, 4, mu_grid=grid)
        tight = aom_scaling_bound(256, 0.01, 1.0, 4, mu_grid=grid)
        assert tight < loose

    def test_large_x_leaves_first_term(self):
        """Large AOM level leaves only the CCDF term."""
        n, k = 1024, 8
        lam, _ = aom_scaling_schedule(n, 0.1)
        grid = np.linspace(lam + 0.1, 3.0, 40)
        first, _ = aom_scaling_terms(n, 1e12, lam, grid, k)
        assert aom_scaling_bound(n, 1e12, 0.1, k, mu_grid=grid) == pytest.approx(float(first.min()), rel=1e-6)

    def test_matches_scalar_recomputation(self):
        """Vectorized terms agree with a scalar recomputation."""
        n, x, eps, k = 256, 0.05, 0.1, 5
        lam, mu_n = aom_scaling_schedule(n, eps)
        c2 = ck(k) ** 2
        grid = np.union1d(default_mu_grid(lam, n), [mu_n])
        expected = min(
            n * k * math.exp(-(mu**2) / (2 * c2)) + n * k * math.exp(-(lam**2) / (2 * c2)) * (mu - lam) ** 2 / (n * x)
            for mu in grid
        )
        assert aom_scaling_bound(n, x, eps, k) == pytest.approx(expected, rel=1e-12)

    def test_grid_without_admissible_mu(self):
        """A grid with no mu above lam_N is rejected."""
        with pytest.raises(ValueError):
            aom_scaling_bound(64, 0.01, 0.1, 4, mu_grid=np.array([0.5]))
