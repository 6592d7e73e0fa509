"""Tests for query/qubit accounting, thresholds, and the B_M variant."""

import math

import numpy as np
import pytest

from hlgrad.resources import (
    C_MAX,
    adaptive_queries,
    bm_variant,
    delta_schedule,
    grover_threshold,
    hamiltonian_sim_Q,
    log_weighted_shot_sum,
    qubit_counts,
    sigma,
)


def series_term(t, Q):
    return math.log(4) + Q * (math.log(t) - math.log(2)) - math.lgamma(Q + 1)


class TestHamiltonianSimQ:
    def test_minimality_against_direct_evaluation(self):
        # independent oracle: direct log-space scan around the returned value
        for t in (0.5, 3.0, 714.8731029233345, 4000.0):
            Q = hamiltonian_sim_Q(t)
            assert series_term(t, Q) <= -17 * math.log(2)
            if Q > 1:
                assert series_term(t, Q - 1) > -17 * math.log(2)

    def test_nondecreasing_in_t(self):
        qs = [hamiltonian_sim_Q(t) for t in (1, 5, 25, 125, 625, 3125)]
        assert qs == sorted(qs)

    def test_explicit_upper_bound(self):
        for t in (1, 10, 100, 1000, 10000):
            assert hamiltonian_sim_Q(t) < 1.5 * t + 126

    def test_invalid(self):
        with pytest.raises(ValueError):
            hamiltonian_sim_Q(0)


class TestAdaptiveQueries:
    def test_closed_form_identity(self):
        for M, q_max in [(30, 4), (8, 10), (100, 2)]:
            direct, closed = log_weighted_shot_sum(M, C_MAX, q_max)
            assert abs(direct - closed) / abs(closed) < 1e-9

    def test_heisenberg_flatness(self):
        vals = [2.0**-k * adaptive_queries(30, 2, 2.0**-k).total for k in range(2, 11)]
        assert max(vals) / min(vals) < 2.0

    def test_doubling(self):
        for k in (4, 6, 8):
            r = adaptive_queries(30, 2, 2.0 ** -(k + 1)).total / adaptive_queries(30, 2, 2.0**-k).total
            assert 1.8 <= r <= 2.2

    def test_ledger_consistency(self):
        led = adaptive_queries(30, 2, 2**-6)
        assert led.total == sum(row["queries"] for row in led.per_q)
        assert len(led.per_q) == 7  # q = 0..6
        for row in led.per_q:
            assert row["Q"] < 1.5 * row["t"] + 126
            assert row["shots"] == math.ceil(9 * math.log(30 / (C_MAX / 8 ** (6 - row["q"]))))

    def test_grover_route_rows(self):
        led = adaptive_queries(30, 2, 2**-6, method="Grover")
        s = math.ceil(math.sqrt(2 * 31 * math.log(2 * 2 / 2**-14)))
        assert led.per_q[0]["t"] == 2**5 * s
        assert led.retry_factor == pytest.approx(1 / 0.462)
        assert led.total > led.total_no_retry

    def test_q0_evolution_time(self):
        led = adaptive_queries(30, 2, 2**-4)
        assert led.per_q[0]["t"] == pytest.approx(2**5 * math.sqrt(2 * 30 * math.log(2**12)))
        assert led.per_q[0]["t"] == pytest.approx(714.873, abs=1e-3)


class TestQubitCounts:
    def test_examples(self):
        assert qubit_counts(30, 2, 1, "HS") == 106
        assert qubit_counts(30, 2, 1, "Grover") == 105
        assert qubit_counts(30, 2, 1, "BaselineApprox", eps_add=2**-10) == 15 * 30

    def test_adaptive_independent_of_precision(self):
        # the adaptive counts carry no eps argument at all; exactness check
        assert qubit_counts(64, 8, 2, "HS") == 3 * 64 + 6 + 3 + 2 + 9

    def test_power_of_two_required(self):
        with pytest.raises(ValueError):
            qubit_counts(30, 3, 1, "HS")


class TestSigma:
    def test_value_and_flag(self):
        s, ok = sigma(30, 2, 2**-10)
        assert s == math.ceil(math.sqrt(60 * math.log(2**12)))
        assert ok is True

    def test_sqrt_scaling(self):
        for M in (1000, 4000):
            r = sigma(4 * M, 2)[0] / sigma(M, 2)[0]
            assert 1.9 <= r <= 2.1

    def test_validity_regime(self):
        # sigma < M needs roughly M > 2 ln d + 24
        M, d = 30, 2
        assert M > 2 * math.log(d) + 24
        assert sigma(M, d)[1]
        assert not sigma(4, 2)[1]


class TestGroverThreshold:
    def test_n_squared_converges_near_5(self):
        for N in (2**6, 2**8, 2**10):
            rep = grover_threshold(N * N, 2**N)
            assert abs(rep.q_star - 5) <= 1

    def test_exponential_linear_in_N(self):
        ns = np.arange(8, 65, 4)
        qs = np.array([grover_threshold(2**int(n), 2**int(n)).q_star for n in ns])
        slope, intercept = np.polyfit(ns, qs, 1)
        pred = slope * ns + intercept
        r2 = 1 - np.sum((qs - pred) ** 2) / np.sum((qs - qs.mean()) ** 2)
        assert r2 >= 0.99

    def test_log_domain_branch(self):
        rep = grover_threshold(2**2048, 2**2048)
        assert rep.sigma_p == -1
        assert rep.q_star == pytest.approx(511.4, abs=0.5)

    def test_eps_star_grows_with_d_at_fixed_M(self):
        # sigma' ~ ln^(1/2) while the denominator grows as ln^(3/2), so the
        # threshold q* falls (eps* rises) as d grows at fixed M, widening the
        # Grover window.
        stars = [grover_threshold(64, 2**n).eps_star for n in (1, 4, 8, 16)]
        assert stars == sorted(stars)
        qstars = [grover_threshold(64, 2**n).q_star for n in (1, 4, 8, 16)]
        assert qstars == sorted(qstars, reverse=True)

    def test_availability_interval(self):
        rep = grover_threshold(30, 2, eps=2**-10)
        assert rep.q_max == 10
        assert rep.grover_q_range is not None
        lo, hi = rep.grover_q_range
        assert lo == math.ceil(rep.q_star) and hi == 10
        tight = grover_threshold(30, 2, eps=0.5)
        assert tight.grover_q_range is None

    def test_qmax_gap_trend(self):
        # eps = c_mse/sqrt(M): the availability window widens with N and M
        gaps = []
        for N in (2**4, 2**6, 2**8):
            M = N * N
            rep = grover_threshold(M, 2**N, eps=0.5 / math.sqrt(M))
            gaps.append(rep.q_max - rep.q_star)
        assert gaps == sorted(gaps)
        assert all(g > 0 for g in gaps)


class TestBmVariant:
    def test_recovers_base_accounting(self):
        for eps in (2**-4, 2**-7):
            bm = bm_variant(30, 2, 30.0, 4, eps)
            assert bm["T_adapt_BM"] == adaptive_queries(30, 2, eps).total

    def test_constant_bm_scaling(self):
        # B_M = 1: queries ~ eps^-1 log M (up to sqrt(log d) and constants)
        t1 = bm_variant(100, 2, 1.0, 4, 2**-5)["T_adapt_BM"]
        t2 = bm_variant(10_000, 2, 1.0, 4, 2**-5)["T_adapt_BM"]
        # log M doubles from M=100 to M=10^4; allow slack for the additive shots ceiling
        assert t2 / t1 < 3.0

    def test_cond2_matches_rough_bound(self):
        # cond2 flips on when 2^(q+1) sqrt(2 (B_M + 4^-q-1) ln(2d/delta'))
        # reaches O(M^(3/4)): the flip point scales as M^(3/4) across decades
        d, B = 2, 1.0
        ratios = []
        for M in (10**3, 10**4, 10**5, 10**6):
            qs = [bm_variant(M, d, B, q, 2**-5)["cond2"] for q in range(0, 40)]
            assert qs == sorted(qs)  # monotone False -> True
            flip = qs.index(True)
            lhs = 2.0 ** (flip + 1) * math.sqrt(
                2 * (B + 4.0 ** (-flip - 1)) * math.log(2 * d / 2**-14)
            )
            ratios.append(lhs / M**0.75)
        assert max(ratios) / min(ratios) < 4.0

    def test_invalid_bm(self):
        with pytest.raises(ValueError):
            bm_variant(30, 2, 31.0, 4, 2**-5)
        with pytest.raises(ValueError):
            bm_variant(30, 2, 0.0, 4, 2**-5)


class TestDeltaSchedule:
    def test_shape(self):
        ds = delta_schedule(C_MAX, 4)
        assert ds[-1] == C_MAX and ds[0] == C_MAX / 8**4
        assert all(b / a == pytest.approx(8.0) for a, b in zip(ds, ds[1:]))

    def test_c_range(self):
        with pytest.raises(ValueError):
            delta_schedule(0.1, 4)  # above 3/(8 (1+pi)^2)
