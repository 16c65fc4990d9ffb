"""Application of every operator family to a bounded continuous function."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import DomainError, GuardError
from .numerics import (DEFAULT_POLICY, DEFAULT_QUAD, IRWIN_HALL_MAX_N, QuadratureSpec,
                       TruncationPolicy, adaptive_integrate, irwin_hall_density)
from .weights import WeightFamily, log_weights, validate, weight_table

GUARD_BOUND = 1e12

DOMAINS = ("halfline", "unit", "real")

MC_BLOCK_VALUES = 2**22


@dataclass(frozen=True)
class FunctionHandle:
    """A real function with a declared domain and a boundedness guard.

    ``vectorized`` promises that ``fn`` maps numpy arrays elementwise, which
    lets series and Monte Carlo evaluations skip the Python loop.
    """

    fn: Callable
    domain: str = "halfline"
    vectorized: bool = False
    bound: float = GUARD_BOUND
    label: str = field(default="f", compare=False)

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise DomainError(f"unknown function domain {self.domain!r}")

    def _guard(self, v: np.ndarray) -> np.ndarray:
        bad = ~np.isfinite(v) | (np.abs(v) > self.bound)
        if np.any(bad):
            first = np.asarray(v)[bad].flat[0]
            raise GuardError(f"{self.label} returned {first}; |f| must stay finite and <= {self.bound:g}")
        return v

    def __call__(self, t: float) -> float:
        with np.errstate(all="ignore"):
            v = np.asarray(self.fn(t), dtype=float)
        return float(self._guard(v))

    def many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        with np.errstate(all="ignore"):
            if self.vectorized:
                v = np.asarray(self.fn(ts), dtype=float)
                if v.shape != ts.shape:
                    v = np.broadcast_to(v, ts.shape).astype(float)
            else:
                v = np.fromiter((self.fn(float(t)) for t in ts.ravel()), dtype=float,
                                count=ts.size).reshape(ts.shape)
        return self._guard(v)

    def compose(self, inner: Callable, domain: Optional[str] = None, label: Optional[str] = None) -> "FunctionHandle":
        """``t -> self(inner(t))``; ``inner`` must accept numpy arrays."""
        outer = self

        def fn(t):
            if np.ndim(t) == 0:
                return outer(float(inner(t)))
            return outer.many(inner(np.asarray(t, dtype=float)))

        return FunctionHandle(fn, domain or self.domain, vectorized=True, bound=self.bound,
                              label=label or f"{self.label}(g(t))")


def as_function(f, domain: str = "halfline") -> FunctionHandle:
    if isinstance(f, FunctionHandle):
        return f
    if not callable(f):
        raise DomainError("probe function must be callable")
    return FunctionHandle(f, domain)


def constant(value: float, domain: str = "real") -> FunctionHandle:
    return FunctionHandle(lambda t: np.full(np.shape(t), float(value)), domain, vectorized=True,
                          label=repr(float(value)))


# ---------------------------------------------------------------------------
# discrete families


def apply_discrete(fam: WeightFamily, n: float, f, x: float,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``sum_j weight_j(x) f(node_j)`` under the truncation policy.

    Boundary conventions: mkz at ``x=1`` returns ``f(1)``; mixed_bernstein at
    ``x=1`` with odd ``n`` returns ``f((n-1)/n)``, the limit from the left.
    The sum is divided by the computed weight mass, which absorbs the
    truncated tail and rounding (a correction of order 1e-16).
    """
    f = as_function(f)
    validate(fam, n)
    if fam.tag == "mkz" and x == 1.0:
        return f(1.0)
    if fam.tag == "mixed_bernstein" and x == 1.0 and int(round(n)) % 2 == 1:
        nn = int(round(n))
        return f((nn - 1) / nn)
    table = weight_table(fam, n, x, policy)
    keep = table.weight > 0
    w = table.weight[keep]
    vals = f.many(table.node[keep])
    return math.fsum(w * vals) / math.fsum(w)


# ---------------------------------------------------------------------------
# integral operators


def gamma_upper(mu: float) -> float:
    """Upper truncation point, in units of ``x``, of the Gamma integral."""
    return mu + 40.0 + 12.0 * math.sqrt(mu)


def apply_gamma(mu: float, f, x: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Gamma operator of real order ``mu``.

    ``x^{-mu}/Gamma(mu) * int_0^inf f(t/mu) t^{mu-1} e^{-t/x} dt``, with
    ``f(0)`` at ``x=0``.  The integration variable is rescaled to ``t/x`` and
    cut at ``mu + 40 + 12 sqrt(mu)``.
    """
    f = as_function(f)
    if not mu > 0:
        raise DomainError(f"Gamma order must be positive, got {mu}")
    if x < 0:
        raise DomainError(f"Gamma operator needs x >= 0, got {x}")
    if x == 0:
        return f(0.0)
    upper = gamma_upper(mu)
    lg = math.lgamma(mu)
    if mu >= 1.0:
        def g(tau):
            if tau == 0.0:
                return f(0.0) if mu == 1.0 else 0.0
            return f(x * tau / mu) * math.exp((mu - 1.0) * math.log(tau) - tau - lg)
        return adaptive_integrate(g, 0.0, upper, quad, points=[mu - 1.0] if mu > 1.0 else None)
    # tau = v^(1/mu) removes the endpoint singularity of tau^(mu-1)
    inv = 1.0 / mu
    lg1 = math.lgamma(mu + 1.0)

    def h(v):
        tau = v**inv
        return f(x * tau / mu) * math.exp(-tau - lg1)
    return adaptive_integrate(h, 0.0, upper**mu, quad)


WEIERSTRASS_RADIUS = 12.0


def apply_weierstrass(a: float, f, x: float, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Gaussian smoothing with variance ``a`` (truncated at 12 standard deviations)."""
    f = as_function(f, "real")
    if not a > 0:
        raise DomainError(f"Weierstrass variance must be positive, got {a}")
    sd = math.sqrt(a)
    norm = 1.0 / math.sqrt(2.0 * math.pi)

    def g(z):
        return f(x + sd * z) * norm * math.exp(-0.5 * z * z)
    return adaptive_integrate(g, -WEIERSTRASS_RADIUS, WEIERSTRASS_RADIUS, quad, points=[0.0])


def apply_lototsky(n: int, lam, f, x: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Lototsky-Schnabl operator.

    Mixes Bernstein operators of every order ``r <= n`` applied to
    ``f(r t/n + (1 - r/n) x)`` with binomial weights in ``lam(x)``.  The
    ``r=0`` inner operator is taken to return the constant ``f(x)``.
    """
    f = as_function(f, "unit")
    lam = as_function(lam, "unit")
    if n < 1 or int(n) != n:
        raise DomainError(f"Lototsky order must be a positive integer, got {n}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    n = int(n)
    l = lam(x)
    if not -1e-15 <= l <= 1.0 + 1e-15:
        raise DomainError(f"lambda(x)={l} outside [0, 1]")
    l = min(max(l, 0.0), 1.0)
    bern = WeightFamily.bernstein()
    outer = np.exp(log_weights(bern, n, np.arange(n + 1), l))
    parts = []
    for r in np.flatnonzero(outer > 0):
        r = int(r)
        if r == 0:
            parts.append(outer[0] * f(x))
            continue
        k = np.arange(r + 1)
        w = np.exp(log_weights(bern, r, k, x))
        keep = w > 0
        vals = f.many(k[keep] / n + (1.0 - r / n) * x)
        parts.extend(outer[r] * w[keep] * vals)
    return math.fsum(parts)


class Estimate(NamedTuple):
    value: float
    stderr: float
    method: str


def bernstein_schnabl_estimate(n: int, h: float, f, x: float, quad: QuadratureSpec = DEFAULT_QUAD,
                               mc_samples: int = 100_000, seed: int = 0,
                               force_mc: bool = False) -> Estimate:
    """Expected ``f`` of the mean of ``n`` independent uniforms on ``[x-h, x+h]``.

    ``n <= 25`` integrates against the Irwin-Hall density (``stderr`` 0).
    Larger ``n`` (or ``force_mc``) uses Monte Carlo; samples are drawn in
    blocks seeded by ``(seed, block)`` so the result only depends on
    ``seed`` and ``mc_samples``.
    """
    f = as_function(f, "real")
    if n < 1 or int(n) != n:
        raise DomainError(f"Bernstein-Schnabl order must be a positive integer, got {n}")
    if not h > 0:
        raise DomainError(f"half-width must be positive, got {h}")
    n = int(n)
    if n <= IRWIN_HALL_MAX_N and not force_mc:
        scale = 2.0 * h / n

        def g(s):
            return f(x - h + scale * s) * irwin_hall_density(n, s)
        val = adaptive_integrate(g, 0.0, float(n), quad, points=list(range(1, n)))
        return Estimate(val, 0.0, "irwin-hall")
    if mc_samples < 2:
        raise DomainError("mc_samples must be >= 2")
    if seed < 0:
        raise DomainError("seed must be non-negative")
    rows = max(1, MC_BLOCK_VALUES // n)
    sums, sq = [], []
    done, block = 0, 0
    while done < mc_samples:
        size = min(rows, mc_samples - done)
        rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
        means = x - h + 2.0 * h * rng.random((size, n)).mean(axis=1)
        v = f.many(means)
        sums.append(math.fsum(v))
        sq.append(math.fsum(v * v))
        done += size
        block += 1
    mean = math.fsum(sums) / mc_samples
    var = max(math.fsum(sq) / mc_samples - mean * mean, 0.0) * mc_samples / (mc_samples - 1)
    return Estimate(mean, math.sqrt(var / mc_samples), "monte-carlo")


def apply_bernstein_schnabl(n: int, h: float, f, x: float, quad: QuadratureSpec = DEFAULT_QUAD,
                            mc_samples: int = 100_000, seed: int = 0) -> float:
    return bernstein_schnabl_estimate(n, h, f, x, quad, mc_samples, seed).value


# ---------------------------------------------------------------------------
# uniform entry point


@dataclass(frozen=True)
class OperatorSpec:
    """One concrete operator: a discrete family with its order, or an integral/composite kind."""

    kind: str
    family: Optional[WeightFamily] = None
    n: float = 1
    mu: float = 1.0
    a: float = 1.0
    h: float = 1.0
    lam: Optional[FunctionHandle] = None

    @classmethod
    def discrete(cls, family: WeightFamily, n: float) -> "OperatorSpec":
        validate(family, n)
        return cls("discrete", family=family, n=n)

    @classmethod
    def szasz(cls, m: float) -> "OperatorSpec":
        return cls.discrete(WeightFamily.szasz(), m)

    @classmethod
    def jl_limit(cls, m: float, p: float) -> "OperatorSpec":
        return cls.discrete(WeightFamily.jl_exp(p), m)

    @classmethod
    def lr_limit(cls, m: float) -> "OperatorSpec":
        return cls.discrete(WeightFamily("lr"), m)

    @classmethod
    def gamma(cls, mu: float) -> "OperatorSpec":
        if not mu > 0:
            raise DomainError("Gamma order must be positive")
        return cls("gamma", mu=mu)

    @classmethod
    def weierstrass(cls, a: float) -> "OperatorSpec":
        if not a > 0:
            raise DomainError("Weierstrass variance must be positive")
        return cls("weierstrass", a=a)

    @classmethod
    def lototsky(cls, n: int, lam) -> "OperatorSpec":
        return cls("lototsky", n=n, lam=as_function(lam, "unit"))

    @classmethod
    def bernstein_schnabl(cls, n: int, h: float) -> "OperatorSpec":
        return cls("bernstein_schnabl", n=n, h=h)


def apply(spec: OperatorSpec, f, x: float, policy: TruncationPolicy = DEFAULT_POLICY,
          quad: QuadratureSpec = DEFAULT_QUAD, mc_samples: int = 100_000, seed: int = 0) -> float:
    """Dispatch to the ``apply_*`` routine matching ``spec.kind``."""
    if spec.kind == "discrete":
        return apply_discrete(spec.family, spec.n, f, x, policy)
    if spec.kind == "gamma":
        return apply_gamma(spec.mu, f, x, quad)
    if spec.kind == "weierstrass":
        return apply_weierstrass(spec.a, f, x, quad)
    if spec.kind == "lototsky":
        return apply_lototsky(int(spec.n), spec.lam, f, x, policy)
    if spec.kind == "bernstein_schnabl":
        return apply_bernstein_schnabl(int(spec.n), spec.h, f, x, quad, mc_samples, seed)
    raise DomainError(f"unknown operator kind {spec.kind!r}")
