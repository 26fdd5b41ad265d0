"""Batch verification experiments with machine-readable reports.

Each experiment draws exact Gaussian samples where randomness is needed,
computes the statistic the limit theory pins down (normalized quadratic
forms, log-determinant growth, posterior concentration, factorization
residuals, inverse-entry envelopes, moment identities), and packages the
outcome as an :class:`ExperimentReport` whose records each carry the target
value, the tolerance, and a provenance string naming the oracle behind the
target.  Pass/fail policy lives in the single ``THRESHOLDS`` table.

Reports are bitwise reproducible from (experiment name, master seed,
parameters): every random cell seeds its own generator through
``replicate_rng(master_seed, cell_index)``, so neither execution order nor
thread scheduling can change a number.  ``wall_time`` is the one field
exempt from reproducibility.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from ._quadrature import adaptive_simpson
from .factorization import (q_coefficient_check, r_coefficient_decay,
                            w_asymptotics)
from .fgn import replicate_rng, sample_fgn
from .moments import (MAX_ORDER, QuadFormInstance, psi_composition_representation,
                      psi_direct, theta_isserlis_oracle, theta_recursion,
                      trace_powers)
from .posterior import (GRID_MAX, GRID_MIN, map_estimate, posterior_grid,
                        posterior_moments, solve_alpha_n)
from .symbols import (SinaiTruncation, _hurst_value, _symbol_value,
                      autocov_seq, f_ratio_derivatives, f_ratio_integral,
                      lattice_sum_regular, norming_constant)
from .toeplitz import (InverseKernelSpec, build_system,
                       inverse_kernel_prediction, quad_form)

__all__ = [
    "THRESHOLDS", "DEFAULT_MASTER_SEED", "ExperimentRecord", "ExperimentReport",
    "run_slln", "run_determinant", "run_concentration",
    "run_factorization_suite", "run_inverse_entries", "run_moment_suite",
    "exponent_peak",
    "write_report_json", "read_report_json", "write_report_csv",
    "szego_constant", "scaled_thresholds",
]

DEFAULT_MASTER_SEED = 1899

# Single source of pass/fail policy; experiments read, never hard-code.
THRESHOLDS = {
    "slln_rel_tol": 0.10,            # |stat/limit - 1| per convergent cell
    "slln_pass_fraction": 0.8,       # fraction of seeds required at n_max
    "det_slope_rel_tol": 0.10,       # slope vs (1-2h)^2/4, large exponents
    "det_slope_rel_tol_small": 0.50, # small exponents fit noisier
    "det_slope_small_cutoff": 0.10,  # boundary between the two regimes
    "det_slope_abs_floor": 0.04,     # absolute scale near-zero targets
    "conc_mean_map_tol": 0.05,       # |mean(MAP) - h| absolute
    "conc_sd_band": 3.0,             # posterior sd within this factor
    "fact_identity_tol": 1e-6,       # max |q qbar g - 1| on the grid
    "fact_r_slope_tol": 0.3,         # r-hat decay exponent, absolute
    "fact_w_rel_tol": 0.01,          # w-hat constant vs 1/Gamma(-alpha)
    "inverse_ratio_lo": 0.1,         # entry/envelope ratio band
    "inverse_ratio_hi": 10.0,
    "inverse_pass_fraction": 0.95,
    "moment_rel_tol": 1e-10,         # identity agreement per instance
}


@contextmanager
def scaled_thresholds(scale: float):
    """Temporarily multiply every ``*_tol`` entry (bands and fractions stay
    put); experiments read the table at call time, so this scopes cleanly."""
    if not (scale > 0.0 and math.isfinite(scale)):
        raise ValueError("tolerance scale must be positive finite")
    saved = dict(THRESHOLDS)
    try:
        for key in THRESHOLDS:
            if key.endswith("_tol"):
                THRESHOLDS[key] = saved[key] * scale
        yield
    finally:
        THRESHOLDS.clear()
        THRESHOLDS.update(saved)


@dataclass(frozen=True)
class ExperimentRecord:
    """One measured cell: statistic vs target under a tolerance.

    ``provenance`` names the oracle or closed form the target came from, so
    a report is interpretable without the code.  Informational records use
    an infinite tolerance and always pass.
    """
    n: int
    seed: Optional[int]
    statistic: float
    target: float
    tol: float
    passed: bool
    provenance: str

    def __post_init__(self):
        # plain Python scalars keep JSON serialization and equality honest
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed",
                           None if self.seed is None else int(self.seed))
        object.__setattr__(self, "statistic", float(self.statistic))
        object.__setattr__(self, "target", float(self.target))
        object.__setattr__(self, "tol", float(self.tol))
        object.__setattr__(self, "passed", bool(self.passed))


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    params: dict
    records: tuple
    verdict: str
    wall_time: float

    def __post_init__(self):
        if self.verdict not in ("pass", "fail", "skip"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        object.__setattr__(self, "records", tuple(self.records))

    def passed(self) -> bool:
        return self.verdict == "pass"


def _clean(value):
    # keep params JSON-native so serialization round-trips to equality
    if isinstance(value, (tuple, list)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    return value


def _report(name: str, params: dict, records, verdict: bool | str,
            t0: float) -> ExperimentReport:
    if not isinstance(verdict, str):
        verdict = "pass" if verdict else "fail"
    return ExperimentReport(name, _clean(params), tuple(records), verdict,
                            time.time() - t0)


def _map_cells(fn, cells, threads: Optional[int]):
    """Apply fn over cells, optionally on a thread pool; order preserved."""
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, cells))
    return [fn(c) for c in cells]


INFO = math.inf  # tolerance marker for purely informational records


# ---------------------------------------------------------------------------
# quadratic-form law of large numbers

def _chol_sampler(hv: float, n: int):
    """Exact lower-triangular factor of the n x n covariance for Hurst hv."""
    cov = scipy.linalg.toeplitz(autocov_seq(hv, n).gammas)
    return scipy.linalg.cholesky(cov, lower=True, overwrite_a=True,
                                 check_finite=False)


def run_slln(alpha, beta, n_list: Sequence[int] = (512, 2048, 8192),
             seeds: Union[int, Sequence[int]] = 10,
             master_seed: int = DEFAULT_MASTER_SEED,
             allow_divergent: bool = False,
             threads: Optional[int] = None) -> ExperimentReport:
    """Almost-sure limit of n^{-1} <xi, T_n(g_alpha)^{-1} xi>, xi ~ N(0, T_n(g_beta)).

    The limit is the ratio integral (2 pi)^{-1} int g_beta / g_alpha, finite
    exactly when alpha - beta > -1/2.  Outside that range the statistic
    diverges; pass ``allow_divergent=True`` to record the growth instead
    (each seed must increase from the smallest to the largest n).  Verdict:
    the required fraction of seeds lands within tolerance at the largest n.

    Sampling uses a dense Cholesky factor of the exact covariance, computed
    once per n and shared across seeds.
    """
    t0 = time.time()
    a, b = _symbol_value(alpha), _symbol_value(beta)
    n_list = [int(n) for n in n_list]
    if not n_list or any(x >= y for x, y in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be non-empty and strictly ascending")
    if max(n_list) > 8192:
        raise ValueError("dense sampling is capped at n = 8192")
    seed_list = list(range(seeds)) if isinstance(seeds, int) else [int(s) for s in seeds]
    divergent = (a - b) <= -0.5
    if divergent and not allow_divergent:
        raise ValueError(
            f"ratio integral diverges for alpha - beta = {a - b}; "
            "pass allow_divergent=True to record growth instead")
    params = {"alpha": a, "beta": b, "n_list": n_list, "seeds": seed_list,
              "master_seed": master_seed, "divergent": divergent}

    if divergent:
        limit, prov = INFO, ("normalized quadratic form n^{-1} <xi, T_n(g_a)^{-1} xi>; "
                             "no finite limit (divergent case, raw value)")
    else:
        limit = f_ratio_integral(alpha, beta)
        prov = ("limit (2 pi)^{-1} int g_beta/g_alpha via adaptive quadrature "
                "of the closed-form densities")
    rel = THRESHOLDS["slln_rel_tol"]

    records = []
    stats = {}  # (n, seed) -> statistic
    for n in n_list:
        factor = _chol_sampler(b + 0.5, n)
        system = build_system(autocov_seq(a + 0.5, n))

        def cell(seed, n=n, factor=factor, system=system):
            rng = replicate_rng(master_seed, seed * 100_000 + n)
            xi = factor @ rng.standard_normal(n)
            return float(np.dot(xi, system.solve(xi)) / n)

        for seed, stat in zip(seed_list, _map_cells(cell, seed_list, threads)):
            stats[(n, seed)] = stat
            if divergent:
                records.append(ExperimentRecord(n, seed, stat, INFO, INFO,
                                                True, prov))
            else:
                ok = abs(stat / limit - 1.0) <= rel
                records.append(ExperimentRecord(n, seed, stat, limit, rel,
                                                ok, prov))
        del factor

    need = THRESHOLDS["slln_pass_fraction"]
    if divergent:
        grow_prov = ("growth check: statistic at the largest n must exceed "
                     "the smallest n when the ratio integral diverges")
        hits = 0
        for seed in seed_list:
            ratio = stats[(n_list[-1], seed)] / stats[(n_list[0], seed)]
            ok = ratio > 1.0
            hits += ok
            records.append(ExperimentRecord(n_list[-1], seed, ratio, INFO,
                                            0.0, ok, grow_prov))
        verdict = hits >= need * len(seed_list)
    else:
        hits = sum(r.passed for r in records if r.n == n_list[-1])
        verdict = hits >= need * len(seed_list)
    return _report("slln", params, records, verdict, t0)


# ---------------------------------------------------------------------------
# Toeplitz determinant growth

def szego_constant(h, trunc: Optional[SinaiTruncation] = None) -> float:
    """log G(h) = (2 pi)^{-1} int log f_h.

    The log-singular and constant pieces integrate in closed form; the
    remaining smooth factor goes through adaptive quadrature.
    """
    hv = _hurst_value(h)
    trunc = trunc if trunc is not None else SinaiTruncation()
    s = 2.0 * hv + 1.0
    c = norming_constant(hv, trunc)

    def smooth_log(t):
        t = np.asarray(t, dtype=float)
        half = np.where(t == 0.0, 1.0, np.sin(t / 2.0) / np.where(t == 0.0, 1.0, t / 2.0))
        corr = t ** s * lattice_sum_regular(t, s, trunc)
        return np.log(half * half * (1.0 + corr))

    tail = adaptive_simpson(smooth_log, 0.0, math.pi, tol=1e-11) / math.pi
    return math.log(c) + (2.0 - s) * (math.log(math.pi) - 1.0) + tail


def _slope_tolerance(target: float) -> float:
    # relative band for sizable exponents, absolute floor near zero
    scale = max(abs(target), THRESHOLDS["det_slope_abs_floor"])
    rel = (THRESHOLDS["det_slope_rel_tol"]
           if abs(target) >= THRESHOLDS["det_slope_small_cutoff"]
           else THRESHOLDS["det_slope_rel_tol_small"])
    return rel * scale


def run_determinant(h, n_list: Sequence[int] = (512, 1024, 2048, 4096, 8192)
                    ) -> ExperimentReport:
    """Anomalous log-determinant growth: s_n = logdet T_n(f_h) - n log G(h)
    should grow like ((1-2h)^2/4) log(1+n) plus a constant.

    Per-n records hold s_n against the fitted line (informational); the
    verdict rides on the fitted slope versus the closed-form exponent.
    """
    t0 = time.time()
    hv = _hurst_value(h)
    n_list = [int(n) for n in n_list]
    if not n_list or any(x >= y for x, y in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be non-empty and strictly ascending")
    if max(n_list) > 8192:
        raise ValueError("n_list is capped at 8192")
    params = {"h": hv, "n_list": n_list}
    log_g = szego_constant(hv)

    s_vals = []
    gam = autocov_seq(hv, max(n_list))
    for n in n_list:
        system = build_system(gam, n)
        s_vals.append(system.logdet - n * log_g)
    x = np.log1p(np.asarray(n_list, dtype=float))
    slope, intercept = np.polyfit(x, np.asarray(s_vals), 1)
    target = (1.0 - 2.0 * hv) ** 2 / 4.0
    tol = _slope_tolerance(target)

    records = []
    line_prov = "logdet minus n log G(h) vs fitted line in log(1+n)"
    for n, s_n, xi in zip(n_list, s_vals, x):
        records.append(ExperimentRecord(n, None, float(s_n),
                                        float(slope * xi + intercept),
                                        INFO, True, line_prov))
    slope_ok = abs(slope - target) <= tol
    records.append(ExperimentRecord(
        max(n_list), None, float(slope), target, tol, slope_ok,
        "fitted growth exponent vs (1-2h)^2/4"))
    records.append(ExperimentRecord(
        max(n_list), None, float(intercept), INFO, INFO, True,
        "fitted intercept (empirical log constant); informational"))
    return _report("determinant", params, records, slope_ok, t0)


# ---------------------------------------------------------------------------
# posterior concentration

def exponent_peak(y: np.ndarray, hv: float, n: int, deriv: float) -> float:
    """Maximizer of the determinant-free exponent n u log n - n^{2u} Q_n / 2.

    This is the object whose root expansion gives alpha_n; it sits left of
    the truth when F'(h) > 0.  The scan window covers the predicted shift
    plus several standard deviations of the peak fluctuation.
    """
    ln_n = math.log(n)
    half = max(0.05, 6.0 / (math.sqrt(n) * ln_n) + abs(deriv) / (2.0 * ln_n ** 2))
    nodes = np.linspace(max(GRID_MIN, hv - half), min(GRID_MAX, hv + half), 81)
    vals = np.empty(nodes.size)
    for i, u in enumerate(nodes):
        q = quad_form(build_system(autocov_seq(u, n)), y)
        vals[i] = n * u * ln_n - 0.5 * math.exp(2.0 * u * ln_n + math.log(q))
    idx = int(np.argmax(vals))
    if idx == 0 or idx == nodes.size - 1:
        return float(nodes[idx])
    x, f = nodes[idx - 1:idx + 2], vals[idx - 1:idx + 2]
    d1 = (f[1] - f[0]) / (x[1] - x[0])
    d2 = (f[2] - f[1]) / (x[2] - x[1])
    dd = (d2 - d1) / (x[2] - x[0])
    if dd >= 0.0:
        return float(x[1])
    vertex = 0.5 * (x[0] + x[1]) - d1 / (2.0 * dd)
    return float(min(max(vertex, x[0]), x[2]))


def run_concentration(h_hat, n_list: Sequence[int] = (1024, 4096),
                      n_paths: int = 20,
                      master_seed: int = DEFAULT_MASTER_SEED,
                      threads: Optional[int] = None) -> ExperimentReport:
    """Monte Carlo posterior concentration at the true Hurst value.

    Per n: mean MAP across paths vs the truth, mean posterior sd vs the
    predicted 1/(sqrt(c_n n) log n), and the bias direction of the
    determinant-free exponent peak vs the sign -F'(h) predicts.

    Two mode objects are tracked deliberately.  The exact-posterior MAP is
    nearly unbiased: the determinant term shifts the mode by
    (log G)'(h)/(4 c_n log^2 n) and (log G)' = -F' identically, cancelling
    the -F'(h)/(4 log^2 n) shift of the exponent surrogate at leading
    order.  The predicted one-sided bias therefore belongs to the
    determinant-free peak, which the direction check uses; the exact MAP
    bias is recorded informationally against a zero target.
    """
    t0 = time.time()
    hv = _hurst_value(h_hat)
    if n_paths < 10:
        raise ValueError("need at least 10 paths for stable averages")
    n_list = [int(n) for n in n_list]
    params = {"h_hat": hv, "n_list": n_list, "n_paths": n_paths,
              "master_seed": master_seed}
    deriv = f_ratio_derivatives(hv - 0.5, hv).d1

    records = []
    all_ok = True
    for n in n_list:
        def cell(path, n=n):
            y = sample_fgn(hv, n, rng=replicate_rng(master_seed,
                                                    path * 100_000 + n))
            grid = posterior_grid(y.increments)
            mean, var = posterior_moments(grid)
            peak = exponent_peak(y.increments, hv, n, deriv)
            return map_estimate(grid), mean, math.sqrt(var), peak

        results = _map_cells(cell, range(n_paths), threads)
        maps = np.array([r[0] for r in results])
        sds = np.array([r[2] for r in results])
        peaks = np.array([r[3] for r in results])
        for path, (m, mean, sd, peak) in enumerate(results):
            records.append(ExperimentRecord(
                n, path, m, hv, INFO, True, "per-path MAP; informational"))

        summary = solve_alpha_n(n, hv)
        ln_n = math.log(n)
        mean_map = float(np.mean(maps))
        map_ok = abs(mean_map - hv) <= THRESHOLDS["conc_mean_map_tol"]
        records.append(ExperimentRecord(
            n, None, mean_map, hv, THRESHOLDS["conc_mean_map_tol"], map_ok,
            "Monte Carlo mean of MAP vs true Hurst value"))

        sd_stat = float(np.mean(sds))
        band = THRESHOLDS["conc_sd_band"]
        sd_ok = (summary.predicted_sd / band <= sd_stat
                 <= summary.predicted_sd * band)
        records.append(ExperimentRecord(
            n, None, sd_stat, summary.predicted_sd, band, sd_ok,
            "mean posterior sd vs 1/(sqrt(c_n n) log n) within a factor band"))

        records.append(ExperimentRecord(
            n, None, mean_map - hv, 0.0, INFO, True,
            "mean exact-MAP bias; (log G)' = -F' cancels the exponent shift, "
            "so the target is zero; informational"))
        bias_target = -deriv / (4.0 * ln_n ** 2)
        records.append(ExperimentRecord(
            n, None, float(np.mean(peaks)) - hv, bias_target, INFO, True,
            "mean determinant-free peak bias vs -F'(h)/(4 log^2 n); "
            "informational"))
        ok_here = map_ok and sd_ok
        if abs(deriv) > 1e-8:
            frac = float(np.mean(np.sign(peaks - hv) == -np.sign(deriv)))
            frac_ok = frac > 0.5
            records.append(ExperimentRecord(
                n, None, frac, 0.5, 0.0, frac_ok,
                "fraction of determinant-free peaks on the side -F'(h) "
                "predicts (> 1/2)"))
            ok_here = ok_here and frac_ok
        all_ok = all_ok and ok_here
    return _report("concentration", params, records, all_ok, t0)


# ---------------------------------------------------------------------------
# factorization, inverse entries, moments

def run_factorization_suite(alphas: Sequence[float] = (0.2, -0.2, 0.3, -0.3),
                            k_max: int = 10_000) -> ExperimentReport:
    """Whitening-coefficient checks per singularity exponent: identity on the
    grid, q-hat residual decay, r-hat decay, and the w-hat tail constant."""
    t0 = time.time()
    alphas = [_symbol_value(a) for a in alphas]
    params = {"alphas": alphas, "k_max": k_max}
    records = []
    for a in alphas:
        rep = q_coefficient_check(a, k_max=k_max)
        records.append(ExperimentRecord(
            k_max, None, rep.identity_error, 0.0,
            THRESHOLDS["fact_identity_tol"],
            rep.identity_error <= THRESHOLDS["fact_identity_tol"],
            f"max |q conj(q) g - 1| on the sample grid, alpha={a}"))
        records.append(ExperimentRecord(
            k_max, None, rep.residual_slope, rep.slope_target, 0.2,
            rep.passed and not rep.failed_floor,
            f"q-hat residual decay exponent vs -(2+alpha), alpha={a}"))
        fit = r_coefficient_decay(a)
        records.append(ExperimentRecord(
            k_max, None, fit.slope, fit.target,
            THRESHOLDS["fact_r_slope_tol"],
            abs(fit.slope - fit.target) <= THRESHOLDS["fact_r_slope_tol"],
            f"r-hat decay exponent vs -(3+2 alpha), alpha={a}"))
        wrep = w_asymptotics(a)
        w_ok = abs(wrep.measured / wrep.classical - 1.0) <= THRESHOLDS["fact_w_rel_tol"]
        records.append(ExperimentRecord(
            k_max, None, wrep.measured, wrep.classical,
            THRESHOLDS["fact_w_rel_tol"], w_ok,
            f"k^(1+alpha) w-hat(k) tail constant vs 1/Gamma(-alpha), alpha={a}"))
    return _report("factorization", params, records,
                   all(r.passed for r in records), t0)


def _stratified_pairs(n: int, n_samples: int, rng) -> list:
    """Index pairs stratified by separation |i - j| on a dyadic ladder."""
    edges = [0, 1]
    while edges[-1] < n - 1:
        edges.append(min(edges[-1] * 2 if edges[-1] > 0 else 2, n - 1))
    strata = [(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    per = max(1, n_samples // len(strata))
    pairs = []
    for lo, hi in strata:
        for _ in range(per):
            d = int(rng.integers(lo, hi + 1))
            i = int(rng.integers(0, n - d))
            pairs.append((i, i + d))
    while len(pairs) < n_samples:
        d = int(rng.integers(0, n))
        i = int(rng.integers(0, n - d))
        pairs.append((i, i + d))
    return pairs[:n_samples]


def run_inverse_entries(alpha, n: int = 512, n_samples: int = 200,
                        master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentReport:
    """Inverse entries of T_n(g_{-alpha}) against the reflection-envelope
    prediction (``alpha`` is the kernel exponent, matrix Hurst 1/2 - alpha).

    Samples index pairs stratified by separation, compares each dense-inverse
    entry to the envelope kernel, and passes when the required fraction of
    absolute ratios stays inside the band.  alpha = 0 has no kernel (constant
    symbol) and is reported as a skip.
    """
    t0 = time.time()
    a = _symbol_value(alpha)
    params = {"alpha": a, "n": n, "n_samples": n_samples,
              "master_seed": master_seed}
    if a == 0.0:
        params["note"] = "kernel undefined at alpha = 0 (constant symbol)"
        return _report("inverse_entries", params, (), "skip", t0)
    spec = InverseKernelSpec(a, n)
    dense = scipy.linalg.inv(scipy.linalg.toeplitz(autocov_seq(spec.hurst, n).gammas))
    rng = replicate_rng(master_seed, n)
    lo, hi = THRESHOLDS["inverse_ratio_lo"], THRESHOLDS["inverse_ratio_hi"]
    records = []
    prov = "dense-inverse entry over reflection-envelope prediction"
    for idx, (i, j) in enumerate(_stratified_pairs(n, n_samples, rng)):
        # kernel prediction indexes entries from 1, the dense array from 0
        ratio = abs(dense[i, j]) / inverse_kernel_prediction(spec, i + 1, j + 1)
        ok = lo <= ratio <= hi
        records.append(ExperimentRecord(n, idx, float(ratio), 1.0, hi, ok,
                                        prov + f", pair ({i},{j})"))
    frac = sum(r.passed for r in records) / len(records)
    verdict = frac >= THRESHOLDS["inverse_pass_fraction"]
    return _report("inverse_entries", params, records, verdict, t0)


def _random_instance(d: int, rng) -> QuadFormInstance:
    b = rng.standard_normal((d, d))
    c = b @ b.T + d * np.eye(d)
    a = rng.standard_normal((d, d))
    return QuadFormInstance(0.5 * (a + a.T), c)


def run_moment_suite(dims: Sequence[int] = (2, 3, 4), n_max: int = 4,
                     trials: int = 20,
                     master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentReport:
    """Moment identities on random instances: the trace recursion against the
    pairing oracle, and the direct centered moments against the composition
    representation."""
    t0 = time.time()
    if n_max > MAX_ORDER:
        raise ValueError(f"n_max is capped at {MAX_ORDER}")
    dims = [int(d) for d in dims]
    params = {"dims": dims, "n_max": n_max, "trials": trials,
              "master_seed": master_seed}
    tol = THRESHOLDS["moment_rel_tol"]
    records = []
    for trial in range(trials):
        rng = replicate_rng(master_seed, trial)
        d = dims[trial % len(dims)]
        inst = _random_instance(d, rng)
        r = trace_powers(inst, n_max)
        theta = theta_recursion(r, n_max)
        worst = 0.0
        for order in range(1, min(n_max, 5) + 1):
            oracle = theta_isserlis_oracle(inst, order)
            worst = max(worst, abs(theta[order] - oracle) / max(1.0, abs(oracle)))
        psi = psi_direct(theta, r[0], n_max)
        psi2 = psi_composition_representation(r, n_max)
        for order in range(2, n_max + 1):
            worst = max(worst, abs(psi[order - 1] - psi2[order - 1])
                        / max(1.0, abs(psi[order - 1])))
        records.append(ExperimentRecord(
            d, trial, worst, 0.0, tol, worst <= tol,
            "max relative gap: recursion vs pairing oracle vs composition form"))
    return _report("moments", params, records,
                   all(r.passed for r in records), t0)


# ---------------------------------------------------------------------------
# serialization

def _record_to_dict(r: ExperimentRecord) -> dict:
    return {"n": r.n, "seed": r.seed, "statistic": r.statistic,
            "target": r.target, "tol": r.tol, "pass": r.passed,
            "provenance": r.provenance}


def write_report_json(report: ExperimentReport,
                      stream: Union[str, IO[str]]) -> None:
    doc = {"name": report.name, "params": report.params,
           "records": [_record_to_dict(r) for r in report.records],
           "verdict": report.verdict, "wall_time": report.wall_time}
    if isinstance(stream, str):
        with open(stream, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(doc, stream, indent=2)
        stream.write("\n")


def read_report_json(stream: Union[str, IO[str]]) -> ExperimentReport:
    if isinstance(stream, str):
        with open(stream) as fh:
            doc = json.load(fh)
    else:
        doc = json.load(stream)
    records = tuple(
        ExperimentRecord(r["n"], r["seed"], r["statistic"], r["target"],
                         r["tol"], r["pass"], r["provenance"])
        for r in doc["records"])
    return ExperimentReport(doc["name"], doc["params"], records,
                            doc["verdict"], doc["wall_time"])


def write_report_csv(report: ExperimentReport,
                     stream: Union[str, IO[str]]) -> None:
    """Per-record table; floats written with repr for lossless reading."""
    def emit(fh):
        writer = csv.writer(fh)
        writer.writerow(["n", "seed", "statistic", "target", "tol", "pass",
                         "provenance"])
        for r in report.records:
            writer.writerow([r.n, "" if r.seed is None else r.seed,
                             repr(r.statistic), repr(r.target), repr(r.tol),
                             int(r.passed), r.provenance])
    if isinstance(stream, str):
        with open(stream, "w", newline="") as fh:
            emit(fh)
    else:
        emit(stream)
