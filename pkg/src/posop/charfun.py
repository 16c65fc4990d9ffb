"""Characteristic functions ``L(e^{ist}; x)`` of the operator families.

Two independent routes are provided.  :func:`charfun_closed` evaluates the
closed (or short finite) formulas; :func:`charfun_series` sums
``weight_j(x) * exp(i s node_j)`` over the truncated weight table and serves
as the brute-force oracle for the discrete families.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, UnsupportedFamilyError
from .numerics import (DEFAULT_POLICY, TruncationPolicy, expm1_over,
                       expm1i, fsum_complex, pow1p, rising_factorial_c, sinc)
from .operators import FunctionHandle, as_function
from .weights import WeightFamily, check_x, log_weights, validate, weight_table

TAGS = ("baskakov", "kantorovich_v", "discrete_d", "q_a", "szasz", "v0_limit", "gamma",
        "weierstrass", "jl_exp", "lr", "bernstein_schnabl", "lototsky", "mkz", "bbh",
        "mixed_bernstein")

SERIES_TAGS = ("baskakov", "kantorovich_v", "discrete_d", "q_a", "szasz", "v0_limit", "jl_exp",
               "lr", "lototsky", "mkz", "bbh", "mixed_bernstein")


@dataclass(frozen=True)
class CharfunSpec:
    """Family tag plus parameters.  ``n`` doubles as ``m`` for the limit families."""

    tag: str
    n: float = 1
    c: float = 0.0
    k: int = 0
    rho: float = 1.0
    a: float = 0.0
    p: float = 0.0
    mu: float = 1.0
    b: float = 1.0
    lam: Optional[FunctionHandle] = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise DomainError(f"unknown characteristic-function family {self.tag!r}")
        if self.tag == "lototsky" and self.lam is None:
            raise DomainError("lototsky needs a lambda function")

    def weight_family(self) -> WeightFamily:
        """Weights whose nodes carry the law (kantorovich_v: before the uniform part)."""
        tag = self.tag
        if tag in ("baskakov", "kantorovich_v"):
            return WeightFamily.baskakov(self.c)
        if tag in ("szasz", "v0_limit"):
            return WeightFamily.szasz()
        if tag == "discrete_d":
            return WeightFamily.discrete_d(self.c, self.k, self.rho)
        if tag == "q_a":
            return WeightFamily.q_a(self.a)
        if tag == "jl_exp":
            return WeightFamily.jl_exp(self.p)
        if tag in ("lr", "mkz", "bbh", "mixed_bernstein"):
            return WeightFamily(tag)
        raise UnsupportedFamilyError(f"{tag} has no discrete weights")

    def weight_order(self) -> float:
        """Order passed to the weights (``n + kc`` for kantorovich_v)."""
        if self.tag == "kantorovich_v":
            return self.n + self.k * self.c
        return self.n


def _check(spec: CharfunSpec, x: float) -> None:
    tag = spec.tag
    if tag in ("gamma",):
        if not spec.mu > 0:
            raise DomainError("Gamma order must be positive")
        if x < 0:
            raise DomainError("Gamma operator needs x >= 0")
        return
    if tag == "weierstrass":
        if not spec.a > 0:
            raise DomainError("Weierstrass variance must be positive")
        return
    if tag == "bernstein_schnabl":
        if spec.n < 1 or int(spec.n) != spec.n or not spec.b > 0:
            raise DomainError("bernstein_schnabl needs integer n >= 1 and b > 0")
        return
    if tag == "lototsky":
        if spec.n < 1 or int(spec.n) != spec.n:
            raise DomainError("lototsky needs an integer order")
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"x={x} outside [0, 1]")
        return
    fam = spec.weight_family()
    if tag == "kantorovich_v":
        if spec.c < 0 and -spec.n / spec.c - spec.k < 0:
            raise DomainError("kantorovich_v with c < 0 needs k <= -n/c")
        validate(WeightFamily.baskakov(spec.c), spec.n)
    validate(fam, spec.weight_order())
    if tag == "mkz" and x == 1.0:
        return
    if tag == "mixed_bernstein" and x == 1.0:
        return
    check_x(fam, spec.n, x)


def _baskakov_core(c: float, n: float, expo: float, sigma: float, x: float) -> complex:
    # (1 - c x (e^{i sigma} - 1))^{expo}, or exp(n x (e^{i sigma}-1)) for c = 0
    if c == 0.0:
        return cmath.exp(n * x * expm1i(sigma))
    return pow1p(-c * x * expm1i(sigma), expo)


def _bbh_sum(n: int, s: float, x: float) -> complex:
    # independent of the weights module: exact binomial coefficients
    q = x / (1.0 + x)
    total_re, total_im = [], []
    for j in range(n + 1):
        if n <= 1000:
            w = math.comb(n, j) * q**j * (1.0 - q) ** (n - j)
        else:
            w = math.exp(math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
                         + (j * math.log(q) if j else 0.0) + (n - j) * math.log1p(-q))
        theta = s * j / (n - j + 1)
        total_re.append(w * math.cos(theta))
        total_im.append(w * math.sin(theta))
    return complex(math.fsum(total_re), math.fsum(total_im))


def _mixed_closed(n: int, s: float, x: float) -> complex:
    if x == 1.0 and n % 2 == 1:
        return cmath.exp(1j * s * (n - 1) / n)
    e1 = expm1i(s / n)
    plus = pow1p(x * e1, n)
    minus = pow1p(-x * (2.0 + e1), n)
    if n % 2 == 1 and x > 0.5:
        norm = -math.expm1(n * math.log(2.0 * x - 1.0))
    else:
        norm = 1.0 + (1.0 - 2.0 * x) ** n
    return (plus + minus) / norm


def _lr_closed(m: float, s: float, x: float) -> complex:
    y = m * x
    z = y * cmath.exp(1j * s / m)
    if y < 20.0:
        return cmath.cosh(z) / math.cosh(y)
    # cosh z / cosh y = e^{z-y} (1 + e^{-2z}) / (1 + e^{-2y})
    return cmath.exp(z - y) * (1 + cmath.exp(-2 * z)) / (1 + math.exp(-2 * y))


def _lototsky_closed(n: int, lam: float, s: float, x: float) -> complex:
    theta = s * x / n
    u = x * expm1i(s / n) * cmath.exp(-1j * theta) + expm1i(-theta)
    return cmath.exp(1j * s * x) * pow1p(lam * u, n)


def kantorovich_b_charfun(c: float, k: int, n: float, s: float, x: float) -> complex:
    """Unnormalised k-th order Kantorovich charfun (image of 1 is ``n^{c,k}/n^k``)."""
    if c == 0.0:
        return expm1_over(1j * s / n) ** k * cmath.exp(n * x * expm1i(s / n))
    lead = rising_factorial_c(n, c, k) / n**k
    return lead * expm1_over(1j * s / n) ** k * pow1p(-c * x * expm1i(s / n), -n / c - k)


def charfun_closed(spec: CharfunSpec, s: float, x: float) -> complex:
    """Closed-form characteristic function at frequency ``s`` and point ``x``."""
    tag = spec.tag
    if tag == "mkz":
        raise UnsupportedFamilyError("mkz has no closed characteristic function; use charfun_series")
    _check(spec, x)
    if s == 0:
        return 1 + 0j
    n = spec.n
    if tag == "baskakov":
        return _baskakov_core(spec.c, n, -n / spec.c if spec.c else 0.0, s / n, x)
    if tag == "szasz":
        return cmath.exp(n * x * expm1i(s / n))
    if tag == "kantorovich_v":
        c, k = spec.c, spec.k
        expo = -n / c - k if c else 0.0
        return expm1_over(1j * s / n) ** k * _baskakov_core(c, n, expo, s / n, x)
    if tag == "v0_limit":
        return expm1_over(1j * s / n) ** spec.k * cmath.exp(n * x * expm1i(s / n))
    if tag == "discrete_d":
        c, k, rho = spec.c, spec.k, spec.rho
        denom = n * rho - k * c
        shift = cmath.exp(1j * s * k * (rho + 1.0) / (2.0 * denom))
        if c == 0.0:
            return shift * cmath.exp(n * x * expm1i(s / n))
        return shift * pow1p(-c * x * expm1i(s * rho / denom), -n / c - k)
    if tag == "q_a":
        e1 = expm1i(s / n)
        return pow1p(-x * e1, -n) * cmath.exp(spec.a * x / (1.0 + x) * e1)
    if tag == "jl_exp":
        return cmath.exp((n * x + spec.p) * expm1i(s / n))
    if tag == "lr":
        return _lr_closed(n, s, x)
    if tag == "gamma":
        return pow1p(-1j * s * x / spec.mu, -spec.mu)
    if tag == "weierstrass":
        return cmath.exp(complex(-0.5 * spec.a * s * s, s * x))
    if tag == "bernstein_schnabl":
        return cmath.exp(1j * s * x) * sinc(s * spec.b) ** int(n)
    if tag == "lototsky":
        lam = as_function(spec.lam, "unit")(x)
        return _lototsky_closed(int(n), lam, s, x)
    if tag == "bbh":
        return _bbh_sum(int(round(n)), s, x)
    if tag == "mixed_bernstein":
        return _mixed_closed(int(round(n)), s, x)
    raise UnsupportedFamilyError(tag)


def _uniform_factor(sigma: float, k: int) -> complex:
    # E exp(i sigma U), U ~ U[0,1], written as e^{i sigma/2} sin(sigma/2)/(sigma/2)
    return (cmath.exp(0.5j * sigma) * sinc(0.5 * sigma)) ** k


def _table_sum(nodes: np.ndarray, weights: np.ndarray, s: float) -> complex:
    return fsum_complex(weights * np.exp(1j * (s * nodes)))


def charfun_series(spec: CharfunSpec, s: float, x: float,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """``sum_j weight_j(x) exp(i s node_j)`` over the truncated weight table."""
    tag = spec.tag
    if tag not in SERIES_TAGS:
        raise UnsupportedFamilyError(f"{tag} is not a discrete family")
    _check(spec, x)
    n = spec.n
    if tag == "mkz" and x == 1.0:
        return cmath.exp(1j * s)
    if tag == "mixed_bernstein" and x == 1.0 and int(round(n)) % 2 == 1:
        nn = int(round(n))
        return cmath.exp(1j * s * (nn - 1) / nn)
    if tag == "lototsky":
        return _lototsky_series(int(n), spec.lam, s, x)
    if tag in ("kantorovich_v", "v0_limit"):
        table = weight_table(spec.weight_family(), spec.weight_order(), x, policy)
        # sampling points j/n, not the discrete_d nodes
        return _uniform_factor(s / n, spec.k) * _table_sum(table.index / n, table.weight, s)
    table = weight_table(spec.weight_family(), n, x, policy)
    return _table_sum(table.node, table.weight, s)


def _lototsky_series(n: int, lam, s: float, x: float) -> complex:
    l = as_function(lam, "unit")(x)
    if not -1e-15 <= l <= 1.0 + 1e-15:
        raise DomainError(f"lambda(x)={l} outside [0, 1]")
    l = min(max(l, 0.0), 1.0)
    bern = WeightFamily.bernstein()
    outer = np.exp(log_weights(bern, n, np.arange(n + 1), l))
    parts = []
    for r in np.flatnonzero(outer > 0):
        r = int(r)
        if r == 0:
            parts.append(outer[0] * cmath.exp(1j * s * x))
            continue
        k = np.arange(r + 1)
        w = np.exp(log_weights(bern, r, k, x))
        t = k / n + (1.0 - r / n) * x
        parts.extend(outer[r] * w * np.exp(1j * s * t))
    return fsum_complex(parts)
