"""Moments of Gaussian quadratic forms <xi, A xi> with xi ~ N(0, C).

Three independent routes are implemented and cross-checked in the tests:

* a trace-power recursion for the raw moments Theta(n) = E<xi, A xi>^n,
* direct Wick pairing enumeration (the oracle, exponential cost),
* a composition-indexed closed form for the centred moments Psi(N),
  summing words R_{k_1} ... R_{k_m} over compositions of N with no part 1.

Everything is indexed by the traces R_j = Tr((A C)^j).  Falling factorials
and the composition coefficients are computed in exact integer arithmetic
(Python ints do not overflow), then converted to float; at the supported
depth N <= 12 the float conversion is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from string import ascii_letters

import numpy as np
import scipy.linalg

__all__ = [
    "QuadFormInstance", "MomentTable", "trace_powers", "theta_recursion",
    "theta_isserlis_oracle", "psi_direct", "psi_composition_representation",
    "compositions_no_ones", "composition_coefficient", "moment_bound_constant",
    "moment_table",
]

MAX_ORDER = 12


@dataclass(frozen=True)
class QuadFormInstance:
    """Pair (A, C): symmetric weight matrix and SPD covariance."""
    a: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("weight matrix must be square")
        if c.shape != a.shape:
            raise ValueError("covariance shape must match the weight matrix")
        a = 0.5 * (a + a.T)
        c = 0.5 * (c + c.T)
        try:
            scipy.linalg.cholesky(c)
        except np.linalg.LinAlgError as exc:
            raise ValueError("covariance must be positive definite") from exc
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.a.shape[0]


def _check_order(n_max: int):
    if not (1 <= n_max <= MAX_ORDER):
        raise ValueError(f"moment order must lie in 1..{MAX_ORDER}")


def trace_powers(inst: QuadFormInstance, n_max: int) -> np.ndarray:
    """Traces R_j = Tr((A C)^j) for j = 1..n_max (index 0 holds R_1)."""
    _check_order(n_max)
    m = inst.a @ inst.c
    out = np.empty(n_max)
    p = np.eye(inst.dim)
    for j in range(n_max):
        p = p @ m
        out[j] = np.trace(p)
    return out


def _falling(n: int, k: int) -> int:
    # (n)_k = n (n-1) ... (n-k+1), exact
    return math.prod(range(n - k + 1, n + 1))


def theta_recursion(r: np.ndarray, n_max: int) -> np.ndarray:
    """Raw moments Theta(0..n_max) from the traces via
    Theta(n) = sum_j 2^{j-1} (n-1)_{j-1} R_j Theta(n-j)."""
    _check_order(n_max)
    r = np.asarray(r, dtype=float)
    if r.size < n_max:
        raise ValueError("need traces up to order n_max")
    theta = np.empty(n_max + 1)
    theta[0] = 1.0
    for n in range(1, n_max + 1):
        acc = 0.0
        for j in range(1, n + 1):
            acc += (2.0 ** (j - 1)) * float(_falling(n - 1, j - 1)) * r[j - 1] * theta[n - j]
        theta[n] = acc
    return theta


def _pairings(slots):
    if not slots:
        yield ()
        return
    first = slots[0]
    for idx in range(1, len(slots)):
        partner = slots[idx]
        rest = slots[1:idx] + slots[idx + 1:]
        for tail in _pairings(rest):
            yield ((first, partner),) + tail


def theta_isserlis_oracle(inst: QuadFormInstance, n: int) -> float:
    """E<xi, A xi>^n by direct Wick pairing of the 2n Gaussian factors.

    Cost is (2n-1)!! tensor contractions, so n <= 5 is enforced; this is the
    reference the recursion is validated against.
    """
    if not (0 <= n <= 5):
        raise ValueError("pairing oracle supports n <= 5 only")
    if n == 0:
        return 1.0
    letters = ascii_letters[:2 * n]
    a_subs = [letters[2 * t] + letters[2 * t + 1] for t in range(n)]
    total = 0.0
    for matching in _pairings(tuple(range(2 * n))):
        c_subs = [letters[p] + letters[q] for p, q in matching]
        sub = ",".join(a_subs + c_subs) + "->"
        operands = [inst.a] * n + [inst.c] * n
        total += float(np.einsum(sub, *operands, optimize=True))
    return total


def psi_direct(theta: np.ndarray, r1: float, n_max: int) -> np.ndarray:
    """Centred moments Psi(1..n_max) = E(<xi,Axi> - R_1)^N by binomial
    inversion of the raw moments."""
    _check_order(n_max)
    theta = np.asarray(theta, dtype=float)
    if theta.size < n_max + 1:
        raise ValueError("need raw moments up to order n_max")
    psi = np.empty(n_max)
    for big_n in range(1, n_max + 1):
        acc = 0.0
        for k in range(big_n + 1):
            acc += (math.comb(big_n, k) * (-1.0) ** (big_n - k)
                    * theta[k] * r1 ** (big_n - k))
        psi[big_n - 1] = acc
    return psi


def compositions_no_ones(m: int, total: int):
    """Compositions of ``total`` into ``m`` ordered parts, every part >= 2."""
    if m < 1 or total < 2 * m:
        return
    if m == 1:
        yield (total,)
        return
    # place m-1 internal cut points in the reduced problem total - m (parts >= 1)
    for head in range(2, total - 2 * (m - 1) + 1):
        for tail in compositions_no_ones(m - 1, total - head):
            yield (head,) + tail


def composition_coefficient(k: tuple[int, ...]) -> float:
    """Weight c(k) of the word R_{k_1}..R_{k_m} in the centred-moment
    expansion: (N-1)! / prod_{j=2}^m (N - s_{j-1}) with partial sums s_j."""
    total = sum(k)
    denom = 1
    s = 0
    for part in k[:-1]:
        s += part
        denom *= total - s
    return math.factorial(total - 1) / denom


def psi_composition_representation(r: np.ndarray, n_max: int) -> np.ndarray:
    """Centred moments Psi(1..n_max) summed over compositions with no part 1:
    Psi(N) = sum_m 2^{N-m} sum_{k} R^k c(k)."""
    _check_order(n_max)
    r = np.asarray(r, dtype=float)
    if r.size < n_max:
        raise ValueError("need traces up to order n_max")
    psi = np.zeros(n_max)
    for big_n in range(1, n_max + 1):
        acc = 0.0
        for m in range(1, big_n // 2 + 1):
            scale = 2.0 ** (big_n - m)
            for k in compositions_no_ones(m, big_n):
                word = math.prod(r[part - 1] for part in k)
                acc += scale * word * composition_coefficient(k)
        psi[big_n - 1] = acc
    return psi


def moment_bound_constant(big_n: int) -> float:
    """Constant K(N) with |Psi(N)| <= K(N) * ||C^{1/2} A C^{1/2}||_F^N,
    obtained from the composition representation with every |R^k| bounded by
    the Frobenius power (computed, not assumed)."""
    _check_order(big_n)
    acc = 0.0
    for m in range(1, big_n // 2 + 1):
        scale = 2.0 ** (big_n - m)
        for k in compositions_no_ones(m, big_n):
            acc += scale * composition_coefficient(k)
    return acc


@dataclass(frozen=True)
class MomentTable:
    """Traces, raw moments, and centred moments of one instance."""
    r: np.ndarray
    theta: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        if self.theta.size != self.r.size + 1 or self.psi.size != self.r.size:
            raise ValueError("inconsistent table lengths")
        if abs(self.theta[0] - 1.0) > 0.0:
            raise ValueError("Theta(0) must be 1")
        if abs(self.psi[0]) > 1e-9 * max(1.0, abs(self.r[0])):
            raise ValueError("Psi(1) must vanish")


def moment_table(inst: QuadFormInstance, n_max: int) -> MomentTable:
    r = trace_powers(inst, n_max)
    theta = theta_recursion(r, n_max)
    psi = psi_direct(theta, float(r[0]), n_max)
    return MomentTable(r, theta, psi)
