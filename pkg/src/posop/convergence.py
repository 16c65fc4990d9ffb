"""Executable limit theorems.

Each catalog entry pairs a transformed operator sequence (indexed by ``n``)
with its limit operator.  Probes are either a frequency ``s`` (the
characteristic-function route, always available) or a bounded function
(``general_f`` experiments only).  :func:`run_experiment` measures the error
over a grid of ``n`` and fits an empirical convergence order.

For ``charfun_only`` experiments the general-function statement follows
from the frequency-domain convergence through Levy's continuity theorem,
which is why only frequency probes are accepted there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .charfun import CharfunSpec, charfun_closed, charfun_series
from .errors import DomainError, FitError, ModeError
from .numerics import (DEFAULT_POLICY, DEFAULT_QUAD, QuadratureSpec, TruncationPolicy, expm1i,
                       fsum_complex, pow1p, sinc)
from .operators import (FunctionHandle, apply_discrete, apply_gamma, apply_lototsky,
                        apply_weierstrass, as_function, bernstein_schnabl_estimate)
from .weights import WeightFamily, weight_table

Probe = Union[float, FunctionHandle, Callable]

LAMBDAS = {
    "one": FunctionHandle(lambda t: np.ones_like(np.asarray(t, dtype=float)), "unit", True, label="1"),
    "linear": FunctionHandle(lambda t: 1.0 - np.asarray(t, dtype=float), "unit", True, label="1-t"),
    "cosine": FunctionHandle(lambda t: 0.5 * (1.0 + np.cos(np.pi * np.asarray(t, dtype=float))), "unit", True,
                             label="(1+cos(pi t))/2"),
}

EXACT_TOL = 1e-12


@dataclass(frozen=True)
class ExperimentSpec:
    """One limit theorem with concrete parameters.

    ``a`` is the constant of the ``Q^a`` operators; ``a_w`` the variance of
    the Weierstrass limit (E11, E12).
    """

    id: str
    m: int = 1
    c: float = 0.0
    k: int = 0
    rho: float = 1.0
    a: float = 0.0
    p: float = 0.0
    u: float = 0.5
    lam: Optional[FunctionHandle] = None
    a_w: float = 1.0

    def __post_init__(self):
        if self.id not in CATALOG:
            raise DomainError(f"unknown experiment {self.id!r}")
        if self.m < 1 or int(self.m) != self.m:
            raise DomainError("m must be a positive integer")
        if self.k < 0 or int(self.k) != self.k:
            raise DomainError("k must be a non-negative integer")
        if self.id == "E10" and not self.c > 0:
            raise DomainError("E10 needs c > 0")
        if self.id == "E11" and not 0.0 < self.u < 1.0:
            raise DomainError("E11 needs 0 < u < 1")
        if self.id in ("E11", "E12") and not self.a_w > 0:
            raise DomainError("Weierstrass variance a_w must be positive")
        if self.id == "E9" and self.lam is None:
            raise DomainError("E9 needs a lambda function")
        if self.id == "E5" and self.a < 0:
            raise DomainError("E5 needs a >= 0")
        if self.id == "E13" and self.p < 0:
            raise DomainError("E13 needs p >= 0")

    @property
    def mode(self) -> str:
        if self.id == "E3" or (self.id == "E10" and self.k >= 1):
            return "charfun_only"
        return "general_f"

    @property
    def index_role(self) -> str:
        return CATALOG[self.id].index_role


class _Table(NamedTuple):
    nodes: np.ndarray
    weights: np.ndarray
    factor: Callable[[float], complex]


def _one(_s: float) -> complex:
    return 1 + 0j


def _uniform(sigma_per_s: float, k: int) -> Callable[[float], complex]:
    def factor(s: float) -> complex:
        sig = s * sigma_per_s
        return (cmath.exp(0.5j * sig) * sinc(0.5 * sig)) ** k
    return factor


# ---------------------------------------------------------------------------
# per-experiment pieces


def _szasz_limit(e: ExperimentSpec, s: float, x: float) -> complex:
    return charfun_closed(CharfunSpec("szasz", n=e.m), s, x)


def _szasz_apply(e, f, x, policy, quad):
    return apply_discrete(WeightFamily.szasz(), e.m, f, x, policy)


def _poisson_table(fam: WeightFamily, order: float, arg: float, scale: float, policy) -> _Table:
    t = weight_table(fam, order, arg, policy)
    return _Table(t.node * scale, t.weight, _one)


def _closed_e6(e, n, s, x, theta):
    N = e.m * n
    X = x / n
    return pow1p(X * expm1i(theta) / (1.0 + X), N)


def _closed_e7(e, n, s, x, theta):
    N = e.m * n
    X = x / n
    if not X < 1:
        raise DomainError(f"x/n={X} must be < 1 for the MKZ source")
    return pow1p(-X * expm1i(theta) / (1.0 - X), -(N + 1))


def _e11_beta(e: ExperimentSpec, n: int) -> float:
    b = math.sqrt(e.a_w / n)
    return b / math.sqrt(e.u * (1.0 - e.u))


@dataclass(frozen=True)
class CatalogRow:
    title: str
    limit: str
    required: tuple
    example: str
    lhs_closed: Callable
    lhs_table: Optional[Callable]
    limit_closed: Callable
    limit_apply: Optional[Callable]
    index_role: str = "n_scales_operator"
    lhs_apply: Optional[Callable] = None


def _row_e1():
    return CatalogRow(
        "Bernstein B_{mn}(f(nt); x/n)", "Szasz-Mirakjan B_m^[0]", ("m",),
        "--m 1 --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("baskakov", n=e.m * n, c=-1.0), s * n, x / n),
        lambda e, n, x, pol: _poisson_table(WeightFamily.bernstein(), e.m * n, x / n, n, pol),
        _szasz_limit, _szasz_apply)


def _row_e2():
    return CatalogRow(
        "Baskakov-type B^[c]_{mn}(f(nt); x/n)", "Szasz-Mirakjan B_m^[0]", ("m", "c"),
        "--m 1 --c 1 --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("baskakov", n=e.m * n, c=e.c), s * n, x / n),
        lambda e, n, x, pol: _poisson_table(WeightFamily.baskakov(e.c), e.m * n, x / n, n, pol),
        _szasz_limit, _szasz_apply)


def _row_e3():
    def table(e, n, x, pol):
        N = e.m * n
        t = weight_table(WeightFamily.baskakov(e.c), N + e.k * e.c, x / n, pol)
        return _Table(t.index / N * n, t.weight, _uniform(n / N, e.k))
    return CatalogRow(
        "Kantorovich V^[c](k)_{mn}(f(nt); x/n)", "V_m^[0](k)", ("m", "c", "k"),
        "--m 1 --c 1 --k 1 --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("kantorovich_v", n=e.m * n, c=e.c, k=e.k), s * n, x / n),
        table,
        lambda e, s, x: charfun_closed(CharfunSpec("v0_limit", n=e.m, k=e.k), s, x),
        None)


def _row_e4():
    def limit_apply(e, f, x, pol, quad):
        return apply_discrete(WeightFamily.discrete_d(0.0, e.k, e.rho), e.m, f, x, pol)
    return CatalogRow(
        "discrete D^[c](k)_{mn,rho}(f(nt); x/n)", "D^[0](k)_{m,rho}", ("m", "c", "k", "rho"),
        "--m 1 --c 1 --k 1 --rho 2 --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(
            CharfunSpec("discrete_d", n=e.m * n, c=e.c, k=e.k, rho=e.rho), s * n, x / n),
        lambda e, n, x, pol: _poisson_table(WeightFamily.discrete_d(e.c, e.k, e.rho), e.m * n, x / n, n, pol),
        lambda e, s, x: charfun_closed(CharfunSpec("discrete_d", n=e.m, c=0.0, k=e.k, rho=e.rho), s, x),
        limit_apply)


def _row_e5():
    return CatalogRow(
        "Q^a_{mn}(f(nt); x/n)", "Szasz-Mirakjan B_m^[0]", ("m", "a"),
        "--m 1 --a 2 --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("q_a", n=e.m * n, a=e.a), s * n, x / n),
        lambda e, n, x, pol: _poisson_table(WeightFamily.q_a(e.a), e.m * n, x / n, n, pol),
        _szasz_limit, _szasz_apply)


def _bbh_table(e, n, x, pol, transform):
    t = weight_table(WeightFamily("bbh"), e.m * n, x / n, pol)
    return _Table(transform(t.node), t.weight, _one)


def _row_e6a():
    return CatalogRow(
        "Bleimann-Butzer-Hahn H_{mn}(f(nt/(1+t)); x/n)", "Szasz-Mirakjan B_m^[0]", ("m",),
        "--m 1 --x 1 --s 1",
        lambda e, n, s, x: _closed_e6(e, n, s, x, s * n / (e.m * n + 1)),
        lambda e, n, x, pol: _bbh_table(e, n, x, pol, lambda t: n * t / (1.0 + t)),
        _szasz_limit, _szasz_apply)


def _row_e6b():
    return CatalogRow(
        "Bleimann-Butzer-Hahn H_{mn}(f((mn+1)t/(m(1+t))); x/n)", "Szasz-Mirakjan B_m^[0]", ("m",),
        "--m 1 --x 1 --s 1",
        lambda e, n, s, x: _closed_e6(e, n, s, x, s / e.m),
        lambda e, n, x, pol: _bbh_table(e, n, x, pol, lambda t: (e.m * n + 1) * t / (e.m * (1.0 + t))),
        _szasz_limit, _szasz_apply)


def _mkz_table(order, arg, pol, transform):
    t = weight_table(WeightFamily("mkz"), order, arg, pol)
    return _Table(transform(t.node), t.weight, _one)


def _row_e7a():
    return CatalogRow(
        "Meyer-Koenig-Zeller M_{mn}(f(nt/(1-t)); x/n)", "Szasz-Mirakjan B_m^[0]", ("m",),
        "--m 1 --x 1 --s 1",
        lambda e, n, s, x: _closed_e7(e, n, s, x, s / e.m),
        lambda e, n, x, pol: _mkz_table(e.m * n, x / n, pol, lambda t: n * t / (1.0 - t)),
        _szasz_limit, _szasz_apply)


def _row_e7b():
    return CatalogRow(
        "Meyer-Koenig-Zeller M_{mn}(f((mn+1)t/(m(1-t))); x/n)", "Szasz-Mirakjan B_m^[0]", ("m",),
        "--m 1 --x 1 --s 1",
        lambda e, n, s, x: _closed_e7(e, n, s, x, s * (e.m * n + 1) / (e.m * e.m * n)),
        lambda e, n, x, pol: _mkz_table(e.m * n, x / n, pol,
                                        lambda t: (e.m * n + 1) * t / (e.m * (1.0 - t))),
        _szasz_limit, _szasz_apply)


def _row_e8():
    def closed(e, n, s, x):
        return pow1p(-n * x * expm1i(s / (e.m * n)), -(e.m + 1))

    def limit_apply(e, f, x, pol, quad):
        return apply_gamma(e.m + 1, f, (e.m + 1) * x / e.m, quad)
    return CatalogRow(
        "Meyer-Koenig-Zeller M_m(f(t/(n(1-t))); nx/(1+nx))", "Gamma G_{m+1}(f; (m+1)x/m)", ("m",),
        "--m 1 --x 1 --s 1",
        closed,
        lambda e, n, x, pol: _mkz_table(e.m, n * x / (1.0 + n * x), pol, lambda t: t / (n * (1.0 - t))),
        lambda e, s, x: charfun_closed(CharfunSpec("gamma", mu=e.m + 1), s, (e.m + 1) * x / e.m),
        limit_apply, index_role="n_scales_argument")


def _row_e9():
    def lhs_apply(e, n, f, x, pol, quad, seed, mc):
        return apply_lototsky(e.m * n, e.lam, f.compose(lambda t: n * t), x / n, pol)
    return CatalogRow(
        "Lototsky-Schnabl A_{mn,lambda}(f(nt); x/n)", "Szasz-Mirakjan B_m^[0]", ("m", "lambda"),
        "--m 1 --lambda 1-t --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("lototsky", n=e.m * n, lam=e.lam), s * n, x / n),
        None, _szasz_limit, _szasz_apply, lhs_apply=lhs_apply)


def _row_e10():
    def table(e, n, x, pol):
        t = weight_table(WeightFamily.baskakov(e.c), e.m + e.k * e.c, n * x, pol)
        return _Table(t.index / e.m / n, t.weight, _uniform(1.0 / (e.m * n), e.k))

    def limit_apply(e, f, x, pol, quad):
        return apply_gamma(e.m / e.c + e.k, f, (e.m + e.c * e.k) * x / e.m, quad)
    return CatalogRow(
        "Kantorovich V^[c](k)_m(f(t/n); nx), c > 0", "Gamma G_{m/c+k}(f; (m+ck)x/m)", ("m", "c", "k"),
        "--m 1 --c 1 --k 0 --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("kantorovich_v", n=e.m, c=e.c, k=e.k), s / n, n * x),
        table,
        lambda e, s, x: charfun_closed(CharfunSpec("gamma", mu=e.m / e.c + e.k), s,
                                       (e.m + e.c * e.k) * x / e.m),
        limit_apply, index_role="n_scales_argument")


def _row_e11():
    def closed(e, n, s, x):
        beta = _e11_beta(e, n)
        return cmath.exp(1j * s * (x - beta * e.u * n)) * pow1p(e.u * expm1i(s * beta), n)

    def table(e, n, x, pol):
        t = weight_table(WeightFamily.bernstein(), n, e.u, pol)
        beta = _e11_beta(e, n)
        return _Table(x + beta * (t.index - n * e.u), t.weight, _one)
    return CatalogRow(
        "Bernstein B_n(f(x + n b_n (t-u)/sqrt(u(1-u))); u), b_n = sqrt(a/n)", "Weierstrass W_a",
        ("u", "a"), "--u 0.5 --a 1 --x 0 --s 1",
        closed, table,
        lambda e, s, x: charfun_closed(CharfunSpec("weierstrass", a=e.a_w), s, x),
        lambda e, f, x, pol, quad: apply_weierstrass(e.a_w, f, x, quad))


def _row_e12():
    def lhs_apply(e, n, f, x, pol, quad, seed, mc):
        return bernstein_schnabl_estimate(n, math.sqrt(e.a_w * n), f, x, quad, mc, seed).value
    return CatalogRow(
        "Bernstein-Schnabl S_{n,b_n}, b_n = sqrt(a/n)", "Weierstrass W_{a/3}", ("a",),
        "--a 3 --x 0 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("bernstein_schnabl", n=n, b=math.sqrt(e.a_w / n)), s, x),
        None,
        lambda e, s, x: charfun_closed(CharfunSpec("weierstrass", a=e.a_w / 3.0), s, x),
        lambda e, f, x, pol, quad: apply_weierstrass(e.a_w / 3.0, f, x, quad),
        lhs_apply=lhs_apply)


def _row_e13():
    return CatalogRow(
        "Baskakov B^[1]_{mn}(f(nt); (x+p/m)/n)", "Jakimovski-Leviatan Psi_{m,p}", ("m", "p"),
        "--m 2 --p 1 --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("baskakov", n=e.m * n, c=1.0), s * n, (x + e.p / e.m) / n),
        lambda e, n, x, pol: _poisson_table(WeightFamily.baskakov(1.0), e.m * n, (x + e.p / e.m) / n, n, pol),
        lambda e, s, x: charfun_closed(CharfunSpec("jl_exp", n=e.m, p=e.p), s, x),
        lambda e, f, x, pol, quad: apply_discrete(WeightFamily.jl_exp(e.p), e.m, f, x, pol))


def _row_e14():
    return CatalogRow(
        "mixed Bernstein L_{mn}(f(nt); x/n)", "Lesniewicz-Rempulska L_m^*", ("m",),
        "--m 1 --x 1 --s 1",
        lambda e, n, s, x: charfun_closed(CharfunSpec("mixed_bernstein", n=e.m * n), s * n, x / n),
        lambda e, n, x, pol: _poisson_table(WeightFamily("mixed_bernstein"), e.m * n, x / n, n, pol),
        lambda e, s, x: charfun_closed(CharfunSpec("lr", n=e.m), s, x),
        lambda e, f, x, pol, quad: apply_discrete(WeightFamily("lr"), e.m, f, x, pol))


CATALOG = {
    "E1": _row_e1(), "E2": _row_e2(), "E3": _row_e3(), "E4": _row_e4(), "E5": _row_e5(),
    "E6a": _row_e6a(), "E6b": _row_e6b(), "E7a": _row_e7a(), "E7b": _row_e7b(), "E8": _row_e8(),
    "E9": _row_e9(), "E10": _row_e10(), "E11": _row_e11(), "E12": _row_e12(), "E13": _row_e13(),
    "E14": _row_e14(),
}


# ---------------------------------------------------------------------------
# evaluation


def _is_frequency(probe) -> bool:
    return isinstance(probe, (int, float, np.floating, np.integer)) and not isinstance(probe, bool)


def lhs_value(exp: ExperimentSpec, n: int, probe: Probe, x: float,
              policy: TruncationPolicy = DEFAULT_POLICY, quad: QuadratureSpec = DEFAULT_QUAD,
              route: str = "closed", seed: int = 0, mc_samples: int = 100_000):
    """Transformed operator at index ``n``.

    A frequency probe returns a complex value.  ``route="closed"`` uses the
    closed transformed characteristic function, ``route="series"`` sums the
    source family's weight table after the transform (the cross-check).
    A function probe returns a real value.
    """
    row = CATALOG[exp.id]
    if n < 1 or int(n) != n:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    if _is_frequency(probe):
        s = float(probe)
        if route == "closed":
            return row.lhs_closed(exp, n, s, x)
        if route != "series":
            raise DomainError(f"unknown route {route!r}")
        if exp.id == "E9":
            return charfun_series(CharfunSpec("lototsky", n=exp.m * n, lam=exp.lam), s * n, x / n, policy)
        if row.lhs_table is None:
            raise ModeError(f"{exp.id} has no discrete source for the series route")
        t = row.lhs_table(exp, n, x, policy)
        return t.factor(s) * fsum_complex(t.weights * np.exp(1j * (s * t.nodes)))
    if exp.mode == "charfun_only":
        raise ModeError(f"{exp.id} with these parameters accepts frequency probes only")
    f = as_function(probe)
    if row.lhs_apply is not None:
        return row.lhs_apply(exp, n, f, x, policy, quad, seed, mc_samples)
    t = row.lhs_table(exp, n, x, policy)
    keep = t.weights > 0
    w = t.weights[keep]
    return math.fsum(w * f.many(t.nodes[keep])) / math.fsum(w)


def limit_value(exp: ExperimentSpec, probe: Probe, x: float,
                policy: TruncationPolicy = DEFAULT_POLICY, quad: QuadratureSpec = DEFAULT_QUAD):
    """Limit operator applied to the probe."""
    row = CATALOG[exp.id]
    if _is_frequency(probe):
        return row.limit_closed(exp, float(probe), x)
    if exp.mode == "charfun_only" or row.limit_apply is None:
        raise ModeError(f"{exp.id} with these parameters accepts frequency probes only")
    return row.limit_apply(exp, as_function(probe), x, policy, quad)


class Record(NamedTuple):
    n: int
    value: Union[complex, float]
    error: float


@dataclass
class ConvergenceReport:
    experiment: str
    records: list
    fitted_order: Optional[float]
    fit_r2: Optional[float]
    final_error: float
    fit_constant: Optional[float] = None
    notes: list = field(default_factory=list)


def fit_order(ns: Sequence[float], errors: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares fit ``log err = log C - order * log n``.

    Returns ``(order, r2, C)``; zero errors must be removed by the caller.
    """
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errors, dtype=float)
    if ns.size < 2 or np.any(errs <= 0):
        raise FitError("need at least two positive errors to fit an order")
    lx, ly = np.log(ns), np.log(errs)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(-slope), r2, float(math.exp(intercept))


def run_experiment(exp: ExperimentSpec, n_list: Sequence[int], probe: Probe, x: float,
                   policy: TruncationPolicy = DEFAULT_POLICY, quad: QuadratureSpec = DEFAULT_QUAD,
                   seed: int = 0, mc_samples: int = 100_000) -> ConvergenceReport:
    """Evaluate the transformed sequence on ``n_list`` and fit the error decay."""
    ns = [int(n) for n in n_list]
    if len(ns) < 4:
        raise DomainError("run_experiment needs at least four values of n")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("n_list must be strictly ascending")
    target = limit_value(exp, probe, x, policy, quad)
    records = []
    for n in ns:
        v = lhs_value(exp, n, probe, x, policy, quad, seed=seed, mc_samples=mc_samples)
        records.append(Record(n, v, abs(v - target)))
    errs = [r.error for r in records]
    notes = []
    order = r2 = const = None
    if max(errs) <= EXACT_TOL:
        notes.append(f"all errors <= {EXACT_TOL:g}; fit skipped")
    else:
        usable = [(r.n, r.error) for r in records if r.error > 0]
        dropped = len(records) - len(usable)
        if dropped:
            notes.append(f"dropped {dropped} zero-error point(s) from the fit")
        try:
            order, r2, const = fit_order([u[0] for u in usable], [u[1] for u in usable])
        except FitError as exc:
            notes.append(f"fit skipped: {exc}")
    if exp.mode == "charfun_only":
        notes.append("frequency-only experiment: convergence for bounded f follows by Levy continuity")
    return ConvergenceReport(exp.id, records, order, r2, errs[-1], const, notes)


def levy_scan(exp: ExperimentSpec, n: int, s_grid: Sequence[float], x: float) -> list[tuple[float, float]]:
    """``(s, |lhs(s) - limit(s)|)`` for every frequency in the grid."""
    return [(float(s), abs(lhs_value(exp, n, float(s), x) - limit_value(exp, float(s), x)))
            for s in s_grid]
