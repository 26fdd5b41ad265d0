"""Acceptance gate: the nine package-level criteria, one verdict line each.

Run ``pytest -s tests/test_acceptance.py`` to see the PASS/FAIL lines as they
are produced; each line carries the measured statistic and the wall time of
the timed criteria.  Tolerances are pinned here, not imported, so a change in
package defaults cannot silently weaken the gate.
"""
import math
import sys
import warnings
from time import perf_counter

import numpy as np
import pytest
import scipy.linalg
import scipy.stats

import oracles
from hurstbayes.factorization import q_coefficient_check, r_coefficient_decay
from hurstbayes.fgn import replicate_rng, sample_fgn
from hurstbayes.harness import (run_concentration, run_determinant,
                                run_inverse_entries, run_moment_suite,
                                run_slln)
from hurstbayes.posterior import log_posterior, solve_alpha_n
from hurstbayes.symbols import autocov_seq, f_ratio_derivatives
from hurstbayes.toeplitz import build_system, quad_form


def _verdict(num: int, ok: bool, label: str, elapsed: float = None) -> None:
    timing = "" if elapsed is None else f" [{elapsed:.1f}s]"
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}{timing} {label}"
    print(line, flush=True)
    sys.stdout.flush()
    assert ok, line


def test_criterion_1_moment_identities():
    t0 = perf_counter()
    rep = run_moment_suite(dims=(2, 3, 4), n_max=4, trials=20)
    elapsed = perf_counter() - t0
    worst = max(r.statistic for r in rep.records)
    ok = rep.passed() and worst <= 1e-10 and elapsed < 10.0
    _verdict(1, ok, f"moment identities, 20 instances, worst rel {worst:.2e}",
             elapsed)


def test_criterion_2_quadratic_form_slln():
    t0 = perf_counter()
    conv = run_slln(0.2, -0.1, n_list=(512, 2048, 8192), seeds=10)
    hits = sum(r.passed for r in conv.records if r.n == 8192)
    div = run_slln(-0.4, 0.3, n_list=(512, 2048, 8192), seeds=10,
                   allow_divergent=True)
    growth = [r for r in div.records if r.provenance.startswith("growth")]
    grow_hits = sum(r.passed for r in growth)
    elapsed = perf_counter() - t0
    ok = (conv.passed() and hits >= 8
          and len(growth) == 10 and grow_hits >= 8
          and elapsed < 300.0)
    _verdict(2, ok, f"slln {hits}/10 within 10% at n=8192; "
             f"divergent growth {grow_hits}/10", elapsed)


def test_criterion_3_determinant_exponent():
    t0 = perf_counter()
    rep = run_determinant(0.9, n_list=(512, 1024, 2048, 4096, 8192))
    elapsed = perf_counter() - t0
    slope = next(r for r in rep.records if "exponent" in r.provenance)
    assert slope.target == pytest.approx((1.0 - 1.8) ** 2 / 4.0)  # 0.16
    ok = (abs(slope.statistic - slope.target) <= 0.10 * slope.target
          and rep.passed() and elapsed < 120.0)
    _verdict(3, ok, f"determinant growth exponent {slope.statistic:.5f} "
             f"vs {slope.target:.2f}", elapsed)


def test_criterion_4_posterior_concentration():
    t0 = perf_counter()
    notes = []
    ok = True
    for h in (0.3, 0.7):
        rep = run_concentration(h, n_list=(4096,), n_paths=20)
        mean_map = next(r for r in rep.records
                        if r.provenance.startswith("Monte Carlo"))
        sd_rec = next(r for r in rep.records if "posterior sd" in r.provenance)
        ok = ok and abs(mean_map.statistic - h) <= 0.05 and sd_rec.passed
        notes.append(f"h={h}: mean MAP {mean_map.statistic:.4f}")
        deriv = f_ratio_derivatives(h - 0.5, h).d1
        if deriv > 0.0:
            # left bias is only asserted where the ratio derivative predicts
            # it, and for the determinant-free exponent peak: the exact MAP
            # loses the one-sided shift to the determinant term
            frac = next(r for r in rep.records if "fraction" in r.provenance)
            ok = ok and frac.passed
            notes.append(f"left-bias majority {frac.statistic:.2f}")
    elapsed = perf_counter() - t0
    _verdict(4, ok, "; ".join(notes), elapsed)


def test_criterion_5_alpha_n_expansion():
    t0 = perf_counter()
    h = 0.7
    deriv = f_ratio_derivatives(h - 0.5, h).d1
    summaries = {n: solve_alpha_n(n, h) for n in (10**3, 10**4, 10**5, 10**6)}
    big = summaries[10**6]
    ratio = (big.alpha_n - h) * 4.0 * math.log(10**6) ** 2 / (-deriv)
    bound_ok = all(abs(s.alpha_n - h) <= s.m_const / math.log(n) ** 2
                   for n, s in summaries.items())
    elapsed = perf_counter() - t0
    ok = abs(ratio - 1.0) <= 0.25 and bound_ok and elapsed < 10.0
    _verdict(5, ok, f"(alpha_n - h) 4 log^2 n / (-F') = {ratio:.4f}; "
             f"decade bound {'holds' if bound_ok else 'fails'}", elapsed)


def test_criterion_6_factorization():
    t0 = perf_counter()
    worst_identity, worst_q_excess, worst_r_gap = 0.0, -math.inf, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for a in (0.25, -0.25):
            rep = q_coefficient_check(a)
            worst_identity = max(worst_identity, rep.identity_error)
            worst_q_excess = max(worst_q_excess,
                                 rep.residual_slope - rep.slope_target)
            fit = r_coefficient_decay(a)
            worst_r_gap = max(worst_r_gap, abs(fit.slope - fit.target))
    elapsed = perf_counter() - t0
    ok = (worst_identity <= 1e-6 and worst_q_excess <= 0.2
          and worst_r_gap <= 0.3 and elapsed < 60.0)
    _verdict(6, ok, f"identity {worst_identity:.2e}; q-slope excess "
             f"{worst_q_excess:+.3f}; r-slope gap {worst_r_gap:.3f}", elapsed)


def test_criterion_7_inverse_entries():
    t0 = perf_counter()
    fracs = []
    for a in (0.3, -0.3):
        rep = run_inverse_entries(a, n=512, n_samples=200)
        assert len(rep.records) == 200
        fracs.append(sum(r.passed for r in rep.records) / 200.0)
    elapsed = perf_counter() - t0
    ok = all(f >= 0.95 for f in fracs) and elapsed < 60.0
    _verdict(7, ok, f"entry/kernel ratios in [0.1, 10]: "
             f"{fracs[0]:.3f} and {fracs[1]:.3f} of samples", elapsed)


def test_criterion_8_small_n_oracles():
    n = 16
    y = sample_fgn(0.6, n, seed=3).increments
    nodes = np.linspace(0.05, 0.95, 64)
    grid = log_posterior(y, nodes)
    worst_node = 0.0
    for u, got in zip(grid.nodes, grid.log_density):
        cov = float(n) ** (-2.0 * u) * scipy.linalg.toeplitz(
            autocov_seq(u, n).gammas)
        want = (oracles.gaussian_log_likelihood(y, cov)
                + 0.5 * n * math.log(2.0 * math.pi))
        worst_node = max(worst_node, abs(got - want))

    worst_lev = 0.0
    rng = np.random.default_rng(8)
    for tenth in range(1, 10):
        hv = tenth / 10.0
        for m in (16, 64, 128):
            gam = autocov_seq(hv, m).gammas
            z = rng.standard_normal(m)
            system = build_system(gam)
            logdet_o, quad_o = oracles.dense_logdet_quad(gam, z)
            worst_lev = max(worst_lev, abs(system.logdet - logdet_o),
                            abs(quad_form(system, z) - quad_o) / abs(quad_o))
    ok = worst_node <= 1e-8 and worst_lev <= 1e-8
    _verdict(8, ok, f"posterior vs dense Gaussian {worst_node:.2e}; "
             f"Levinson vs dense Cholesky {worst_lev:.2e}")


def test_criterion_9_simulation_fidelity():
    n, n_paths, lags = 1024, 200, 9
    worst_z = 0.0
    for h in (0.25, 0.75):
        gammas = autocov_seq(h, lags).gammas
        cells = np.empty((n_paths, lags))
        for p in range(n_paths):
            x = sample_fgn(h, n, spacing=1.0, rng=replicate_rng(701, p)).increments
            for k in range(lags):
                cells[p, k] = np.mean(x[:n - k] * x[k:])
        mean_c = cells.mean(axis=0)
        se = cells.std(axis=0, ddof=1) / math.sqrt(n_paths)
        worst_z = max(worst_z, np.max(np.abs(mean_c - gammas) / se))

    x = sample_fgn(0.5, n, spacing=1.0, seed=19).increments
    ks = scipy.stats.kstest(x, "norm").statistic
    ks_crit = 1.63 / math.sqrt(n)  # 1% critical value
    ok = worst_z <= 3.0 and ks <= ks_crit
    _verdict(9, ok, f"worst autocovariance z-score {worst_z:.2f} (lags 0..8); "
             f"KS at h=1/2: {ks:.4f} <= {ks_crit:.4f}")
