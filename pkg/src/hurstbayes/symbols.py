"""Spectral symbols of fractional Gaussian noise and their ratio integrals.

Unit-variance fractional Gaussian noise with Hurst parameter ``h`` has
autocovariance ``gamma(j) = (|j+1|**(2h) - 2|j|**(2h) + |j-1|**(2h)) / 2`` and
spectral density on the torus

    f_h(t) = C_h * |e^{it} - 1|**2 * sum_k |t - 2 pi k|**(-(2h+1)),

normalised here so that f_h integrates to ``gamma(0) = 1`` against the
normalised measure ``dt / (2 pi)``.  The centred parameter ``alpha = h - 1/2``
indexes the same family as ``g_alpha = f_{1/2 + alpha}``; near the origin
``g_alpha(t)`` behaves like ``|t|**(-2 alpha)``, a zero for ``h < 1/2`` and an
integrable pole for ``h > 1/2``.

Evaluation separates the k = 0 lattice term from the rest:

    f_h(t) = C_h * |t|**(1-2h) * sinc(t/2)**2 * (1 + |t|**(2h+1) * S_reg(t))

with ``S_reg`` the regular (k != 0) part of the lattice sum.  This form has no
cancellation or overflow down to denormal ``t``, which matters because the
graded quadrature rules probe far below 1e-20.  ``S_reg`` itself is summed to
``k_max`` with an Euler-Maclaurin tail correction, keeping the slowly
converging sums for small ``h`` at full double accuracy.  Quadrature against
the density is only ever a cross-check; Toeplitz covariances always use the
closed-form autocovariance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import polygamma

from ._quadrature import adaptive_simpson

__all__ = [
    "HurstParam", "SymbolParam", "SinaiTruncation", "AutocovSeq",
    "DEFAULT_TRUNCATION", "sinai_density", "autocov", "autocov_seq",
    "norming_constant", "f_ratio_integral", "f_ratio_derivatives",
    "FRatioDerivatives",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HurstParam:
    """Hurst parameter, strictly inside (0, 1)."""
    h: float

    def __post_init__(self):
        h = float(self.h)
        if not (math.isfinite(h) and 0.0 < h < 1.0):
            raise ValueError(f"Hurst parameter must lie in (0, 1), got {self.h!r}")
        object.__setattr__(self, "h", h)

    @property
    def symbol(self) -> "SymbolParam":
        return SymbolParam(self.h - 0.5)


@dataclass(frozen=True)
class SymbolParam:
    """Centred symbol parameter ``alpha = h - 1/2`` in (-1/2, 1/2)."""
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (math.isfinite(a) and -0.5 < a < 0.5):
            raise ValueError(f"symbol parameter must lie in (-1/2, 1/2), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def alpha_plus(self) -> float:
        return max(self.alpha, 0.0)

    @property
    def alpha_minus(self) -> float:
        return max(-self.alpha, 0.0)

    @property
    def hurst(self) -> HurstParam:
        return HurstParam(self.alpha + 0.5)


@dataclass(frozen=True)
class SinaiTruncation:
    """Truncation policy for the lattice sum: direct terms up to ``k_max``,
    Euler-Maclaurin tail with ``tail_order`` correction terms (1..3)."""
    k_max: int = 256
    tail_order: int = 3

    def __post_init__(self):
        if int(self.k_max) < 16:
            raise ValueError("k_max below 16 loses the tail-correction accuracy model")
        if int(self.tail_order) not in (1, 2, 3):
            raise ValueError("tail_order must be 1, 2 or 3")
        object.__setattr__(self, "k_max", int(self.k_max))
        object.__setattr__(self, "tail_order", int(self.tail_order))


DEFAULT_TRUNCATION = SinaiTruncation()


def _hurst_value(h) -> float:
    if isinstance(h, HurstParam):
        return h.h
    return HurstParam(float(h)).h


def _symbol_value(a) -> float:
    if isinstance(a, SymbolParam):
        return a.alpha
    if isinstance(a, HurstParam):
        raise TypeError("expected a centred symbol parameter, got a Hurst parameter")
    return SymbolParam(float(a)).alpha


def _tail_integral(v, s, w):
    # int_v^inf x**(-s) log(x)**w dx, for s > 1, w in {0, 1, 2}
    e = s - 1.0
    if w == 0:
        return v ** (-e) / e
    lv = np.log(v)
    if w == 1:
        return v ** (-e) * (lv / e + 1.0 / e ** 2)
    return v ** (-e) * (lv * lv / e + 2.0 * lv / e ** 2 + 2.0 / e ** 3)


def _term(v, s, w):
    if w == 0:
        return v ** (-s)
    if w == 1:
        return v ** (-s) * np.log(v)
    return v ** (-s) * np.log(v) ** 2


def _term_deriv(v, s, w):
    # d/dv of v**(-s) * log(v)**w
    if w == 0:
        return -s * v ** (-s - 1.0)
    lv = np.log(v)
    if w == 1:
        return v ** (-s - 1.0) * (1.0 - s * lv)
    return v ** (-s - 1.0) * lv * (2.0 - s * lv)


def lattice_sum_regular(t, s: float, trunc: SinaiTruncation = DEFAULT_TRUNCATION,
                        log_weight: int = 0):
    """``sum_{k != 0} |t - 2 pi k|**(-s) * log(|t - 2 pi k|)**log_weight`` for
    t in [-pi, pi], via direct summation to ``k_max`` plus an Euler-Maclaurin
    tail.  Vectorised over ``t``; the k axis is chunked to bound temporaries.
    """
    t = np.asarray(t, dtype=float)
    w = int(log_weight)
    out = np.zeros(t.shape)
    k_max = trunc.k_max
    chunk = max(1, min(k_max, (1 << 22) // max(t.size, 1)))
    for start in range(1, k_max + 1, chunk):
        k = np.arange(start, min(start + chunk, k_max + 1), dtype=float)
        kk = _TWO_PI * k
        if t.ndim:
            vm = kk - t[..., None]
            vp = kk + t[..., None]
            out = out + _term(vm, s, w).sum(axis=-1) + _term(vp, s, w).sum(axis=-1)
        else:
            out = out + _term(kk - t, s, w).sum() + _term(kk + t, s, w).sum()
    # Euler-Maclaurin tail starting at m0 = k_max + 1:
    #   sum_{m >= m0} phi(m) = int_{m0}^inf phi + phi(m0)/2 - phi'(m0)/12 + ...
    m0 = _TWO_PI * (k_max + 1.0)
    vm, vp = m0 - t, m0 + t
    tail = (_tail_integral(vm, s, w) + _tail_integral(vp, s, w)) / _TWO_PI
    if trunc.tail_order >= 2:
        tail = tail + 0.5 * (_term(vm, s, w) + _term(vp, s, w))
    if trunc.tail_order >= 3:
        tail = tail - _TWO_PI / 12.0 * (_term_deriv(vm, s, w) + _term_deriv(vp, s, w))
    return out + tail


def lattice_sum(t, s: float, trunc: SinaiTruncation = DEFAULT_TRUNCATION,
                log_weight: int = 0):
    """Full lattice sum including the k = 0 term (which is singular at t = 0)."""
    t = np.asarray(t, dtype=float)
    return _term(np.abs(t), s, int(log_weight)) + lattice_sum_regular(t, s, trunc, log_weight)


def _half_sinc_sq(t):
    # (sin(t/2) / (t/2))**2, exact 1 at t = 0
    return np.sinc(np.asarray(t, dtype=float) / _TWO_PI) ** 2


def _density_core(t, s: float, trunc: SinaiTruncation):
    """``|e^{it}-1|^2 * lattice_sum(t)`` in the cancellation-free form
    ``|t|**(2-s) * sinc(t/2)**2 * (1 + |t|**s * S_reg(t))``; valid on
    [-pi, pi], with the correct limits at t = 0 for s <= 2."""
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    with np.errstate(over="ignore"):
        correction = at ** s * lattice_sum_regular(t, s, trunc)
    return at ** (2.0 - s) * _half_sinc_sq(t) * (1.0 + correction)


@lru_cache(maxsize=512)
def _norming_quadrature(h: float, k_max: int, tail_order: int) -> float:
    # C_h normalises (1/2pi) int f_h = 1; by symmetry integrate on (0, pi).
    # The integrand behaves like t**(2-s) at 0 (barely integrable as h -> 1),
    # so substitute t = v**p with p large enough that the v-integrand opens
    # like v**2; the lone power of v is assembled directly, which keeps the
    # evaluation finite down to v = 0.
    trunc = SinaiTruncation(k_max, tail_order)
    s = 2.0 * h + 1.0
    p = max(2, int(math.ceil(3.0 / (3.0 - s))))
    expo = p * (3.0 - s) - 1.0

    def integrand(v):
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        pos = v > 0.0
        vp = v[pos]
        with np.errstate(under="ignore"):
            t = vp ** p
        correction = t ** s * lattice_sum_regular(t, s, trunc)
        out[pos] = p * vp ** expo * _half_sinc_sq(t) * (1.0 + correction)
        return out

    upper = math.pi ** (1.0 / p)
    integral = adaptive_simpson(integrand, 0.0, upper, tol=1e-12) / math.pi
    if not (math.isfinite(integral) and integral > 0.0):
        raise ArithmeticError(f"normalisation quadrature failed for h={h}")
    return 1.0 / integral


def norming_constant(h, trunc: SinaiTruncation = DEFAULT_TRUNCATION) -> float:
    """Constant C_h making the density integrate to 1 over the torus."""
    hv = _hurst_value(h)
    return _norming_quadrature(hv, trunc.k_max, trunc.tail_order)


def _norming_closed(h: float) -> float:
    # Unfolding the lattice sum over the whole line and using
    # int_0^inf (1 - cos u) u**(-1-2h) du = -Gamma(-2h) cos(pi h) gives this
    # closed form for the same normalisation; kept private as a cross-check
    # and for analytic derivatives of the ratio integrals.
    return math.sin(math.pi * h) * math.gamma(2.0 * h + 1.0)


def _log_norming_deriv(h: float, order: int) -> float:
    # d/dh log C_h for the closed form sin(pi h) * Gamma(2h + 1)
    if order == 1:
        return math.pi / math.tan(math.pi * h) + 2.0 * float(polygamma(0, 2.0 * h + 1.0))
    return (-math.pi ** 2 / math.sin(math.pi * h) ** 2
            + 4.0 * float(polygamma(1, 2.0 * h + 1.0)))


def sinai_density(h, lam, trunc: SinaiTruncation = DEFAULT_TRUNCATION):
    """Spectral density f_h(lam) for lam in [-pi, pi].

    At lam = 0 the density is 0 for h < 1/2, equals C_h for h = 1/2, and is a
    pole for h > 1/2 (raises).  Vectorised over ``lam``.
    """
    hv = _hurst_value(h)
    lam_in = np.asarray(lam, dtype=float)
    scalar = lam_in.ndim == 0
    lam_a = np.atleast_1d(lam_in)
    if not np.all(np.isfinite(lam_a)):
        raise ValueError("frequency must be finite")
    if np.any(np.abs(lam_a) > math.pi * (1.0 + 1e-12)):
        raise ValueError("frequency outside [-pi, pi]")
    if hv > 0.5 and np.any(lam_a == 0.0):
        raise ValueError("density has a singular point at 0 for h > 1/2")
    c = norming_constant(hv, trunc)
    vals = c * _density_core(lam_a, 2.0 * hv + 1.0, trunc)
    return float(vals[0]) if scalar else vals.reshape(lam_in.shape)


def autocov(h, lag):
    """Closed-form autocovariance at integer lag(s); gamma(0) = 1."""
    hv = _hurst_value(h)
    j = np.abs(np.asarray(lag, dtype=float))
    th = 2.0 * hv
    g = 0.5 * ((j + 1.0) ** th - 2.0 * j ** th + np.abs(j - 1.0) ** th)
    return float(g) if g.ndim == 0 else g


@dataclass(frozen=True)
class AutocovSeq:
    """Autocovariances gamma(0..n-1) of one symbol; gamma(0) = 1."""
    h: float
    gammas: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.ndim != 1 or g.size < 1:
            raise ValueError("need a 1-d autocovariance sequence")
        if abs(g[0] - 1.0) > 1e-12:
            raise ValueError("autocovariance must be normalised to gamma(0) = 1")
        object.__setattr__(self, "gammas", g)

    @property
    def n(self) -> int:
        return self.gammas.size


def autocov_seq(h, n: int) -> AutocovSeq:
    hv = _hurst_value(h)
    if n < 1:
        raise ValueError("need at least one lag")
    return AutocovSeq(hv, autocov(hv, np.arange(n)))


class FRatioDerivatives(NamedTuple):
    value: float
    d1: float
    d2: float


def _substitution_power(diff: float) -> int:
    # integrand ~ t**(2*diff) at 0; after t = s**p the exponent becomes
    # p*(1 + 2*diff) - 1, pushed to >= 2 for a comfortably smooth integrand
    e0 = 1.0 + 2.0 * diff
    return max(1, int(math.ceil(3.0 / e0)))


def _ratio_factors(t, sa: float, sb: float, trunc: SinaiTruncation):
    # g_b(t) / g_a(t) = (C_b / C_a) * |t|**(sa - sb) * (1 + T_b) / (1 + T_a)
    # with T_x = |t|**(s_x) * S_reg_x(t); the |t| power is folded into the
    # substitution by the caller, only the bounded factor is computed here.
    at = np.abs(t)
    with np.errstate(over="ignore", under="ignore"):
        tb = at ** sb * lattice_sum_regular(t, sb, trunc)
        ta = at ** sa * lattice_sum_regular(t, sa, trunc)
    return (1.0 + tb) / (1.0 + ta)


def f_ratio_integral(alpha, beta, tol: float = 1e-8,
                     trunc: SinaiTruncation = DEFAULT_TRUNCATION) -> float:
    """Normalised torus integral of ``g_beta / g_alpha``.

    Finite exactly when ``alpha - beta > -1/2``; equals 1 when the parameters
    coincide.  The arc factor |e^{it}-1|^2 cancels in the ratio, so only the
    lattice sums and norming constants enter.  The endpoint behaviour
    |t|**(2(alpha-beta)) is regularised by a power substitution t = s**p
    before adaptive Simpson integration.
    """
    a = _symbol_value(alpha)
    b = _symbol_value(beta)
    if a - b <= -0.5:
        raise ValueError("ratio integral diverges: need alpha - beta > -1/2")
    if a == b:
        return 1.0
    ha, hb = a + 0.5, b + 0.5
    sa, sb = 2.0 * ha + 1.0, 2.0 * hb + 1.0
    c_ratio = norming_constant(hb, trunc) / norming_constant(ha, trunc)
    p = _substitution_power(a - b)
    # substituted integrand p * s**(p*(1 + 2(a-b)) - 1) * bounded ratio factor
    expo = p * (1.0 + 2.0 * (a - b)) - 1.0

    def integrand(sv):
        sv = np.asarray(sv, dtype=float)
        out = np.zeros_like(sv)
        pos = sv > 0.0
        spos = sv[pos]
        with np.errstate(under="ignore"):
            t = spos ** p
        out[pos] = p * spos ** expo * _ratio_factors(t, sa, sb, trunc)
        return out

    upper = math.pi ** (1.0 / p)
    inner = adaptive_simpson(integrand, 0.0, upper, tol=tol * math.pi / max(c_ratio, 1.0))
    return c_ratio * inner / math.pi


def f_ratio_derivatives(alpha, h_hat, tol: float = 1e-8,
                        trunc: SinaiTruncation = DEFAULT_TRUNCATION) -> FRatioDerivatives:
    """Value and first two alpha-derivatives of ``F(alpha) = fint g_bhat / g_alpha``
    with ``bhat = h_hat - 1/2`` held fixed.

    Differentiation happens under the integral sign: with u = d/dalpha log
    g_alpha the derivatives are -fint (g/g) u and fint (g/g) (u^2 - u'); u
    combines the log-derivative of the norming constant with log-weighted
    lattice sums.  The margin requirement alpha - bhat > -1/2 + 1e-3 keeps the
    differentiated integrals uniformly convergent.
    """
    a = _symbol_value(alpha)
    bh = _hurst_value(h_hat) - 0.5
    if a - bh <= -0.5 + 1e-3:
        raise ValueError("need alpha - (h_hat - 1/2) > -1/2 + 1e-3 for stable derivatives")
    ha, hb = a + 0.5, bh + 0.5
    sa, sb = 2.0 * ha + 1.0, 2.0 * hb + 1.0
    c_ratio = norming_constant(hb, trunc) / norming_constant(ha, trunc)
    dc1 = _log_norming_deriv(ha, 1)
    dc2 = _log_norming_deriv(ha, 2)
    p = _substitution_power(a - bh)
    expo = p * (1.0 + 2.0 * (a - bh)) - 1.0
    upper = math.pi ** (1.0 / p)
    inner_tol = tol * math.pi / max(c_ratio, 1.0)

    def parts(sv):
        sv = np.asarray(sv, dtype=float)
        pos = sv > 0.0
        spos = sv[pos]
        with np.errstate(under="ignore", over="ignore"):
            t = spos ** p
            at = np.abs(t)
            ratio = p * spos ** expo * _ratio_factors(t, sa, sb, trunc)
            # log-derivatives of the k = 0 separated lattice sum:
            #   S = |t|**(-sa) * (1 + T0),  T0 = |t|**sa * S_reg
            #   dS/dh / S  = -2 (log|t| + |t|**sa * L1) / (1 + T0)
            #   d2S/dh2 /S =  4 (log^2|t| + |t|**sa * L2) / (1 + T0)
            log_t = p * np.log(spos)
            pw = at ** sa
            t0 = pw * lattice_sum_regular(t, sa, trunc, 0)
            l1 = pw * lattice_sum_regular(t, sa, trunc, 1)
            l2 = pw * lattice_sum_regular(t, sa, trunc, 2)
        ds = -2.0 * (log_t + l1) / (1.0 + t0)
        d2s = 4.0 * (log_t ** 2 + l2) / (1.0 + t0)
        u = dc1 + ds
        du = dc2 + d2s - ds * ds
        return pos, ratio, u, du

    def f0(sv):
        pos, ratio, _, _ = parts(sv)
        out = np.zeros(np.shape(sv))
        out[pos] = ratio
        return out

    def f1(sv):
        pos, ratio, u, _ = parts(sv)
        out = np.zeros(np.shape(sv))
        out[pos] = -ratio * u
        return out

    def f2(sv):
        pos, ratio, u, du = parts(sv)
        out = np.zeros(np.shape(sv))
        out[pos] = ratio * (u * u - du)
        return out

    scale = c_ratio / math.pi
    value = scale * adaptive_simpson(f0, 0.0, upper, tol=inner_tol)
    d1 = scale * adaptive_simpson(f1, 0.0, upper, tol=inner_tol)
    d2 = scale * adaptive_simpson(f2, 0.0, upper, tol=inner_tol)
    if a == bh:
        value = 1.0
    return FRatioDerivatives(value, d1, d2)
