"""Stable scalar building blocks used by every operator family.

Complex values are plain Python ``complex`` numbers throughout the package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, NonConvergenceError, QuadratureError

#: Number of consecutive small terms required by the series stopping rule.
TAIL_RUN = 8

#: Below this modulus ``expm1_over`` switches to its cubic Taylor polynomial.
EXPM1_OVER_SMALL = 1e-6

IRWIN_HALL_MAX_N = 25


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rule parameters for infinite series."""

    rel_tail_tol: float = 1e-16
    max_terms: int = 10**7

    def __post_init__(self):
        if not 0.0 < self.rel_tail_tol < 1.0:
            raise DomainError(f"rel_tail_tol must lie in (0, 1), got {self.rel_tail_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`adaptive_integrate`."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 500

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_POLICY = TruncationPolicy()
DEFAULT_QUAD = QuadratureSpec()


# ---------------------------------------------------------------------------
# rising factorials


def _check_rising(a: float, c: float, j: int) -> None:
    if j < 0 or int(j) != j:
        raise DomainError(f"j must be a non-negative integer, got {j}")
    if j == 0:
        return
    # factors a + c*l are monotone in l, so the two ends decide positivity
    if a <= 0 or a + c * (j - 1) <= 0:
        raise DomainError(f"rising factorial factor a + c*l <= 0 for a={a}, c={c}, j={j}")


def rising_factorial_c(a: float, c: float, j: int) -> float:
    """Return ``a (a+c) (a+2c) ... (a+(j-1)c)``; the empty product is 1."""
    _check_rising(a, c, j)
    out = 1.0
    for l in range(int(j)):
        out *= a + c * l
    return out


def log_rising_factorial_c(a: float, c: float, j: int) -> float:
    """Natural log of :func:`rising_factorial_c`, safe for large ``j``."""
    _check_rising(a, c, j)
    j = int(j)
    if j == 0:
        return 0.0
    if c == 0.0:
        return j * math.log(a)
    if j <= 2000:
        return math.fsum(math.log(a + c * l) for l in range(j))
    if c > 0:
        r = a / c
        return j * math.log(c) + math.lgamma(r + j) - math.lgamma(r)
    r = a / -c
    return j * math.log(-c) + math.lgamma(r + 1) - math.lgamma(r - j + 1)


# ---------------------------------------------------------------------------
# complex helpers


def _is_integer(w: float) -> bool:
    return float(w).is_integer()


def complex_principal_pow(z: complex, w: float) -> complex:
    """Principal power ``exp(w Log z)``.

    Integer exponents accept any non-zero base (small ones are evaluated by
    repeated multiplication).  A non-integer exponent with ``Re z <= 0`` is
    refused instead of silently picking a branch.
    """
    z = complex(z)
    w = float(w)
    if _is_integer(w):
        if z == 0:
            if w > 0:
                return 0j
            raise DomainError("zero base with non-positive exponent")
        k = int(w)
        if abs(k) <= 64:
            out = 1 + 0j
            base = z
            e = abs(k)
            while e:
                if e & 1:
                    out *= base
                base *= base
                e >>= 1
            return out if k >= 0 else 1 / out
        return cmath.exp(w * cmath.log(z))
    if z.real <= 0:
        raise DomainError(f"non-integer power {w} of base with Re(z) <= 0: {z}")
    return cmath.exp(w * cmath.log(z))


def clog1p(u: complex) -> complex:
    """Principal ``Log(1 + u)`` without cancellation for small ``u``."""
    u = complex(u)
    re = 0.5 * math.log1p(2.0 * u.real + (u.real * u.real + u.imag * u.imag))
    return complex(re, math.atan2(u.imag, 1.0 + u.real))


def pow1p(u: complex, w: float) -> complex:
    """``(1 + u) ** w`` on the principal branch, accurate when ``u`` is small.

    Used for bases of the form ``1 - c x (e^{i s/n} - 1)`` raised to large
    exponents.  Same branch policy as :func:`complex_principal_pow`.
    """
    u = complex(u)
    if u == -1:
        return complex_principal_pow(0j, w)
    if 1.0 + u.real <= 0 and not _is_integer(w):
        raise DomainError(f"non-integer power {w} of base with Re(z) <= 0: {1 + u}")
    return cmath.exp(float(w) * clog1p(u))


def cexpm1(w: complex) -> complex:
    """``e^w - 1`` accurate for small ``|w|``."""
    w = complex(w)
    a, b = w.real, w.imag
    em1 = math.expm1(a)
    sh = math.sin(0.5 * b)
    re = em1 * math.cos(b) - 2.0 * sh * sh
    im = (em1 + 1.0) * math.sin(b)
    return complex(re, im)


def expm1i(theta: float) -> complex:
    """``e^{i theta} - 1``."""
    sh = math.sin(0.5 * theta)
    return complex(-2.0 * sh * sh, math.sin(theta))


def expm1_over(w: complex) -> complex:
    """``(e^w - 1) / w`` with the removable singularity filled in."""
    w = complex(w)
    if w == 0:
        return 1 + 0j
    if abs(w) < EXPM1_OVER_SMALL:
        return 1 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0))
    return cexpm1(w) / w


def sinc(v: float) -> float:
    """``sin(v)/v`` with value 1 at 0 (unnormalised, unlike ``np.sinc``)."""
    if abs(v) < 1e-4:
        v2 = v * v
        return 1.0 - v2 / 6.0 + v2 * v2 / 120.0
    return math.sin(v) / v


# ---------------------------------------------------------------------------
# compensated summation


class CompensatedSum:
    """Running Neumaier sum of real numbers."""

    __slots__ = ("total", "comp")

    def __init__(self):
        self.total = 0.0
        self.comp = 0.0

    def add(self, v: float) -> None:
        t = self.total + v
        if abs(self.total) >= abs(v):
            self.comp += (self.total - t) + v
        else:
            self.comp += (v - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.comp


def fsum_complex(values) -> complex:
    """Correctly rounded sum of a sequence (or array) of complex numbers."""
    arr = np.asarray(values, dtype=complex)
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def tail_stop_index(weights: np.ndarray, tol: float, start: int = 0,
                    run: int = TAIL_RUN) -> Optional[int]:
    """Index of the last term to keep under the tail stopping rule.

    ``weights`` are non-negative dominating magnitudes.  The rule fires at the
    first ``J >= start`` where ``weights[i] <= tol * S_i`` holds for ``run``
    consecutive indices ``i = J .. J+run-1``; ``S_i`` is the partial sum.
    Returns ``None`` when the rule does not fire inside the array.
    """
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        return None
    small = w <= tol * np.abs(np.cumsum(w))
    small[: max(start, 0)] = False
    if small.size < run:
        return None
    windows = np.lib.stride_tricks.sliding_window_view(small, run).all(axis=1)
    hits = np.flatnonzero(windows)
    if hits.size == 0:
        return None
    return int(hits[0]) + run - 1


def sum_series(term: Callable[[int], complex], policy: TruncationPolicy = DEFAULT_POLICY,
               *, weight: Optional[Callable[[int], float]] = None, mode: int = 0,
               last: Optional[int] = None) -> complex:
    """Sum ``term(0) + term(1) + ...`` with compensated accumulation.

    Parameters
    ----------
    term
        Maps an index to a (complex) summand.
    policy
        Tail tolerance and term budget.
    weight
        Optional non-negative magnitude dominating ``|term(j)|``.  When given,
        the tail test compares it against the running sum of weights, which
        stays robust when the terms themselves cancel.
    mode
        The tail test is only engaged from this index on; pass the mode of
        the dominating weights so that rising tails are never cut.
    last
        Finite support: sum exactly ``j = 0 .. last`` and ignore the tail rule.
    """
    re, im = CompensatedSum(), CompensatedSum()
    wsum = CompensatedSum()
    streak = 0
    j = 0
    while True:
        if last is not None and j > last:
            return complex(re.value, im.value)
        if j >= policy.max_terms:
            raise NonConvergenceError(
                f"series did not meet rel_tail_tol={policy.rel_tail_tol} within {policy.max_terms} terms")
        t = complex(term(j))
        re.add(t.real)
        im.add(t.imag)
        if last is None:
            if weight is None:
                mag, ref = abs(t), abs(complex(re.value, im.value))
            else:
                mag = float(weight(j))
                wsum.add(mag)
                ref = wsum.value
            if j >= mode and mag <= policy.rel_tail_tol * ref:
                streak += 1
                if streak == TAIL_RUN:
                    return complex(re.value, im.value)
            else:
                streak = 0
        j += 1


# ---------------------------------------------------------------------------
# quadrature


def adaptive_integrate(g: Callable[[float], float], lo: float, hi: float,
                       spec: QuadratureSpec = DEFAULT_QUAD,
                       points: Optional[Sequence[float]] = None) -> float:
    """Integrate ``g`` over the finite interval ``[lo, hi]``.

    Globally adaptive bisection with a nested Gauss-Kronrod pair (QUADPACK).
    ``points`` lists interior break points such as kinks of the integrand.
    Raises :class:`QuadratureError` if the error estimate exceeds
    ``max(abs_tol, rel_tol * |result|)``.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("adaptive_integrate needs finite endpoints")
    if lo == hi:
        return 0.0
    if points is not None:
        points = [p for p in points if min(lo, hi) < p < max(lo, hi)] or None
    out = integrate.quad(g, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                         limit=spec.max_subdivisions, points=points, full_output=1)
    value, err = out[0], out[1]
    if not math.isfinite(value) or err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        msg = out[3] if len(out) > 3 else ""
        raise QuadratureError(f"integral on [{lo}, {hi}] = {value} with error estimate {err}. {msg}".strip())
    return float(value)


# ---------------------------------------------------------------------------
# Irwin-Hall


def irwin_hall_density(n: int, s: float) -> float:
    """Density at ``s`` of the sum of ``n`` independent U[0, 1] variables."""
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n}")
    if n > IRWIN_HALL_MAX_N:
        raise DomainError(f"alternating sum unstable for n={n} > {IRWIN_HALL_MAX_N}; use Monte Carlo")
    n = int(n)
    if s < 0 or s > n:
        return 0.0
    if n == 1:
        return 1.0
    # the density is symmetric about n/2; the short side has fewer terms
    if s > 0.5 * n:
        s = n - s
    terms = [(-1) ** k * math.comb(n, k) * (s - k) ** (n - 1) for k in range(int(math.floor(s)) + 1)]
    return max(math.fsum(terms) / math.factorial(n - 1), 0.0)
