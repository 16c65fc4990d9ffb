"""Weights and sampling nodes of the discrete operator families.

Every family is described by a :class:`WeightFamily`; the order parameter
``n`` (``m`` for the limit families) is passed separately.  Weights are
computed in the log domain and exponentiated.

The mixed Bernstein family averages the Bernstein operator with its
reflected twin ``sum C(n,j) (-x)^j (1-x)^{n-j} f(j/n)``.  Adding the two
weight sequences gives ``C(n,j) x^j (1-x)^{n-j} (1 + (-1)^j)``, so odd
indices vanish and even indices carry ``2 C(n,j) x^j (1-x)^{n-j}`` divided
by the normaliser ``1 + (1-2x)^n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import gammaln, logsumexp, xlog1py, xlogy

from .errors import DomainError, NonConvergenceError
from .numerics import DEFAULT_POLICY, TruncationPolicy, tail_stop_index

TAGS = ("baskakov", "mkz", "bbh", "q_a", "jl_exp", "lr", "discrete_d", "mixed_bernstein")

_INT_TOL = 1e-9


@dataclass(frozen=True)
class WeightFamily:
    """A discrete operator family; parameters not used by ``tag`` stay at defaults."""

    tag: str
    c: float = 0.0
    a: float = 0.0
    p: float = 0.0
    k: int = 0
    rho: float = 1.0

    def __post_init__(self):
        if self.tag not in TAGS:
            raise DomainError(f"unknown weight family {self.tag!r}")
        if self.tag == "q_a" and self.a < 0:
            raise DomainError("q_a needs a >= 0")
        if self.tag == "jl_exp" and self.p < 0:
            raise DomainError("jl_exp needs p >= 0")
        if self.tag == "discrete_d":
            if self.k < 0 or int(self.k) != self.k:
                raise DomainError("discrete_d needs an integer k >= 0")
            if self.rho <= 0:
                raise DomainError("discrete_d needs rho > 0")

    # convenience constructors
    @classmethod
    def baskakov(cls, c: float) -> "WeightFamily":
        return cls("baskakov", c=float(c))

    @classmethod
    def szasz(cls) -> "WeightFamily":
        return cls("baskakov", c=0.0)

    @classmethod
    def bernstein(cls) -> "WeightFamily":
        return cls("baskakov", c=-1.0)

    @classmethod
    def discrete_d(cls, c: float, k: int, rho: float) -> "WeightFamily":
        return cls("discrete_d", c=float(c), k=int(k), rho=float(rho))

    @classmethod
    def q_a(cls, a: float) -> "WeightFamily":
        return cls("q_a", a=float(a))

    @classmethod
    def jl_exp(cls, p: float) -> "WeightFamily":
        return cls("jl_exp", p=float(p))


def _integer(v: float) -> Optional[int]:
    r = round(v)
    if r >= 1 and abs(v - r) <= _INT_TOL * max(1.0, abs(v)):
        return int(r)
    return None


def baskakov_order(fam: WeightFamily, n: float) -> float:
    """Order of the underlying Baskakov weights (``n + kc`` for discrete_d)."""
    if fam.tag == "discrete_d":
        return n + fam.k * fam.c
    return n


def validate(fam: WeightFamily, n: float) -> None:
    """Raise :class:`DomainError` unless ``(fam, n)`` is admissible."""
    if not (n > 0 and math.isfinite(n)):
        raise DomainError(f"order must be positive, got {n}")
    tag = fam.tag
    if tag in ("baskakov", "discrete_d"):
        if tag == "discrete_d" and not n * fam.rho > fam.k * fam.c:
            raise DomainError(f"discrete_d needs n*rho > k*c (n={n}, rho={fam.rho}, k={fam.k}, c={fam.c})")
        order = baskakov_order(fam, n)
        if fam.c < 0:
            if _integer(-order / fam.c) is None:
                raise DomainError(f"c < 0 needs -(order)/c to be a positive integer, got {-order / fam.c}")
        elif order <= 0:
            raise DomainError(f"order must be positive, got {order}")
    if tag in ("bbh", "mixed_bernstein") and _integer(n) is None:
        raise DomainError(f"{tag} needs an integer order, got {n}")


def support(fam: WeightFamily, n: float) -> Optional[int]:
    """Largest index carrying weight, or ``None`` for infinite support."""
    validate(fam, n)
    if fam.tag in ("baskakov", "discrete_d") and fam.c < 0:
        return _integer(-baskakov_order(fam, n) / fam.c)
    if fam.tag in ("bbh", "mixed_bernstein"):
        return _integer(n)
    return None


def domain(fam: WeightFamily, n: float) -> tuple[float, float]:
    """Closed hull of the admissible ``x`` values."""
    if fam.tag in ("baskakov", "discrete_d") and fam.c < 0:
        return 0.0, -1.0 / fam.c
    if fam.tag in ("mkz", "mixed_bernstein"):
        return 0.0, 1.0
    return 0.0, math.inf


def check_x(fam: WeightFamily, n: float, x: float) -> None:
    lo, hi = domain(fam, n)
    if not (lo <= x <= hi) or math.isnan(x):
        raise DomainError(f"x={x} outside [{lo}, {hi}] for family {fam.tag}")
    if fam.tag == "mkz" and x == 1.0:
        raise DomainError("mkz weights are undefined at x=1 (boundary convention lives in operators)")
    if fam.tag == "mixed_bernstein" and x == 1.0 and int(round(n)) % 2 == 1:
        raise DomainError("mixed_bernstein weights are undefined at x=1 for odd n")


def _log_binom(N: float, j: np.ndarray) -> np.ndarray:
    return gammaln(N + 1) - gammaln(j + 1) - gammaln(N - j + 1)


def _log_q_inner(n: float, a: float, j: np.ndarray) -> np.ndarray:
    # log of sum_i C(k,i) n^{1,i} a^{k-i} / k!  =  log sum_i (n)_i/i! * a^{k-i}/(k-i)!
    kmax = int(j.max()) if j.size else 0
    i = np.arange(kmax + 1, dtype=float)
    log_r = gammaln(n + i) - gammaln(n) - gammaln(i + 1)
    if a == 0.0:
        return log_r[j.astype(int)]
    log_e = i * math.log(a) - gammaln(i + 1)
    out = np.empty(j.shape, dtype=float)
    for idx, kk in enumerate(j.astype(int)):
        out[idx] = logsumexp(log_r[: kk + 1] + log_e[kk::-1])
    return out


def _mixed_log_norm(n: int, x: float) -> float:
    # log(1 + (1-2x)^n), careful near x=1 with odd n
    if n % 2 == 1 and x > 0.5:
        return math.log(-math.expm1(n * math.log(2.0 * x - 1.0)))
    return math.log1p((1.0 - 2.0 * x) ** n)


def log_weights(fam: WeightFamily, n: float, j, x: float) -> np.ndarray:
    """Vectorised log weights; ``-inf`` marks zero weight (no domain checks)."""
    j = np.asarray(j, dtype=float)
    tag = fam.tag
    if tag in ("baskakov", "discrete_d"):
        c = fam.c
        nn = baskakov_order(fam, n)
        if c == 0.0:
            lam = nn * x
            return xlogy(j, lam) - lam - gammaln(j + 1)
        if c > 0:
            r = nn / c
            return (j * math.log(c) + gammaln(r + j) - gammaln(r) - gammaln(j + 1)
                    + xlogy(j, x) - (r + j) * math.log1p(c * x))
        N = _integer(-nn / c)
        q = -c * x
        out = np.full(j.shape, -np.inf)
        ok = j <= N
        jj = j[ok]
        out[ok] = _log_binom(N, jj) + xlogy(jj, q) + xlog1py(N - jj, -q)
        return out
    if tag == "mkz":
        return gammaln(n + j + 1) - gammaln(j + 1) - gammaln(n + 1) + xlogy(j, x) + (n + 1) * math.log1p(-x)
    if tag == "bbh":
        N = int(round(n))
        out = np.full(j.shape, -np.inf)
        ok = j <= N
        jj = j[ok]
        out[ok] = _log_binom(N, jj) + xlogy(jj, x) - N * math.log1p(x)
        return out
    if tag == "q_a":
        a = fam.a
        return -a * x / (1.0 + x) + _log_q_inner(n, a, j) + xlogy(j, x) - (n + j) * math.log1p(x)
    if tag == "jl_exp":
        lam = n * x + fam.p
        return xlogy(j, lam) - lam - gammaln(j + 1)
    if tag == "lr":
        y = n * x
        logcosh = y + math.log1p(math.exp(-2.0 * y)) - math.log(2.0)
        return xlogy(2 * j, y) - gammaln(2 * j + 1) - logcosh
    if tag == "mixed_bernstein":
        N = int(round(n))
        out = np.full(j.shape, -np.inf)
        ok = (j <= N) & (j % 2 == 0)
        jj = j[ok]
        out[ok] = (math.log(2.0) + _log_binom(N, jj) + xlogy(jj, x) + xlog1py(N - jj, -x)
                   - _mixed_log_norm(N, x))
        return out
    raise DomainError(f"unknown family {tag!r}")


def weight(fam: WeightFamily, n: float, j: int, x: float) -> float:
    """Weight of index ``j`` at ``x``."""
    validate(fam, n)
    check_x(fam, n, x)
    if j < 0 or int(j) != j:
        raise DomainError(f"index must be a non-negative integer, got {j}")
    top = support(fam, n)
    if top is not None and j > top:
        raise DomainError(f"index {j} beyond finite support {top}")
    return float(np.exp(log_weights(fam, n, np.array([j]), x))[0])


def nodes(fam: WeightFamily, n: float, j) -> np.ndarray:
    """Vectorised sampling abscissae."""
    j = np.asarray(j, dtype=float)
    tag = fam.tag
    if tag == "mkz":
        return j / (n + j)
    if tag == "bbh":
        return j / (n - j + 1)
    if tag == "lr":
        return 2.0 * j / n
    if tag == "discrete_d":
        k, rho, c = fam.k, fam.rho, fam.c
        return ((2 * j + k) * rho + k) / (2.0 * (n * rho - k * c))
    return j / n


def node(fam: WeightFamily, n: float, j: int) -> float:
    """Abscissa at which ``f`` is sampled for index ``j``."""
    validate(fam, n)
    if j < 0 or int(j) != j:
        raise DomainError(f"index must be a non-negative integer, got {j}")
    top = support(fam, n)
    if top is not None and j > top:
        raise DomainError(f"index {j} beyond finite support {top}")
    return float(nodes(fam, n, np.array([j]))[0])


def mean_index(fam: WeightFamily, n: float, x: float) -> float:
    """Rough location of the weight mass, used to size the first chunk."""
    tag = fam.tag
    if tag in ("baskakov", "discrete_d"):
        return baskakov_order(fam, n) * x
    if tag == "mkz":
        return (n + 1) * x / (1.0 - x)
    if tag == "q_a":
        return n * x + fam.a * x / (1.0 + x)
    if tag == "jl_exp":
        return n * x + fam.p
    if tag == "lr":
        return 0.5 * n * x
    return n * x


class WeightTable(NamedTuple):
    index: np.ndarray
    node: np.ndarray
    weight: np.ndarray


@lru_cache(maxsize=512)
def weight_table(fam: WeightFamily, n: float, x: float,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> WeightTable:
    """All weights that matter at ``x``.

    Finite families return their whole support.  Infinite families are cut
    by the tail rule of :func:`posop.numerics.tail_stop_index`, engaged only
    past the mode of the weights.  Arrays are read-only (the result is cached).
    """
    validate(fam, n)
    check_x(fam, n, x)
    top = support(fam, n)
    if top is not None:
        j = np.arange(top + 1, dtype=float)
        w = np.exp(log_weights(fam, n, j, x))
    else:
        length = int(min(policy.max_terms, 2 * mean_index(fam, n, x) + 64))
        while True:
            j = np.arange(length, dtype=float)
            w = np.exp(log_weights(fam, n, j, x))
            mode = int(np.argmax(w))
            stop = tail_stop_index(w, policy.rel_tail_tol, start=mode)
            if stop is not None:
                j, w = j[: stop + 1], w[: stop + 1]
                break
            if length >= policy.max_terms:
                raise NonConvergenceError(
                    f"{fam.tag} weights at x={x}, n={n} not truncated within {policy.max_terms} terms")
            length = min(2 * length, policy.max_terms)
    t = nodes(fam, n, j)
    for arr in (j, t, w):
        arr.setflags(write=False)
    return WeightTable(j.astype(int), t, w)
