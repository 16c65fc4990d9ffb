"""Residuals of the scaling identities satisfied by the limit operators.

Node-homogeneous discrete limits ``T_m(f; x) = sum_k phi_{m,k}(x) f(a_k/m)``
obey ``T_{m nu}(f(nu t); x/nu) = T_m(f; x)``, equivalently
``phi_{m,k}(x) = phi_{1,k}(m x)``.  Integral limits with kernel ``K_m`` obey
``Z_m(f(t/nu); nu x) = Z_m(f; x)``, equivalently
``K_m(nu t, nu x) = K_m(t, x) / nu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, NumericFailure
from .numerics import DEFAULT_POLICY, DEFAULT_QUAD, QuadratureSpec, TruncationPolicy
from .operators import OperatorSpec, apply_discrete, apply_gamma, as_function
from .weights import WeightFamily, weight

PHI_TOL = 1e-14
SCALING_TOL = 1e-11
INTEGRAL_TOL = 1e-8
KERNEL_REL_TOL = 1e-12


@dataclass(frozen=True)
class LawResidual:
    residual: float
    tolerance_used: float
    inputs: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return self.residual <= self.tolerance_used


def _node_homogeneous(fam: WeightFamily) -> None:
    if not ((fam.tag == "baskakov" and fam.c == 0.0) or fam.tag in ("jl_exp", "lr")):
        raise DomainError(f"{fam.tag} is not a node-homogeneous limit family (szasz, jl_exp, lr)")


def discrete_scaling_residual(fam: WeightFamily, m: int, nu: int, f, x: float,
                              policy: TruncationPolicy = DEFAULT_POLICY) -> LawResidual:
    """``|T_{m nu}(f(nu t); x/nu) - T_m(f; x)|``."""
    _node_homogeneous(fam)
    if m < 1 or nu < 1 or int(m) != m or int(nu) != nu:
        raise DomainError("m and nu must be positive integers")
    if x < 0:
        raise DomainError("x must be non-negative")
    f = as_function(f)
    scaled = f.compose(lambda t: nu * t)
    lhs = apply_discrete(fam, m * nu, scaled, x / nu, policy)
    rhs = apply_discrete(fam, m, f, x, policy)
    return LawResidual(abs(lhs - rhs), SCALING_TOL,
                       {"family": fam.tag, "m": m, "nu": nu, "x": x, "lhs": lhs, "rhs": rhs})


def phi_residual(fam: WeightFamily, m: int, k: int, x: float) -> LawResidual:
    """``|phi_{m,k}(x) - phi_{1,k}(m x)|`` at the weight level."""
    _node_homogeneous(fam)
    if x < 0:
        raise DomainError("x must be non-negative")
    lhs = weight(fam, m, k, x)
    rhs = weight(fam, 1, k, m * x)
    return LawResidual(abs(lhs - rhs), PHI_TOL, {"family": fam.tag, "m": m, "k": k, "x": x})


def integral_scaling_residual(op: OperatorSpec, nu: float, f, x: float,
                              quad: QuadratureSpec = DEFAULT_QUAD) -> LawResidual:
    """``|Z(f(t/nu); nu x) - Z(f; x)|`` for a Gamma operator ``Z``."""
    if op.kind != "gamma":
        raise DomainError("integral scaling law is implemented for the Gamma operator")
    if not (nu > 0 and x > 0):
        raise DomainError("nu and x must be positive")
    f = as_function(f)
    scaled = f.compose(lambda t: t / nu)
    lhs = apply_gamma(op.mu, scaled, nu * x, quad)
    rhs = apply_gamma(op.mu, f, x, quad)
    return LawResidual(abs(lhs - rhs), INTEGRAL_TOL, {"mu": op.mu, "nu": nu, "x": x, "lhs": lhs, "rhs": rhs})


def gamma_kernel(m: int, t: float, x: float) -> float:
    """``x^{-m} m^m t^{m-1} e^{-m t/x} / (m-1)!``."""
    if m < 1 or int(m) != m or not (t > 0 and x > 0):
        raise DomainError("gamma kernel needs integer m >= 1 and positive t, x")
    r = t / x
    log_k = (m - 1) * math.log(r) - math.log(x) + m * math.log(m) - math.lgamma(m) - m * r
    if log_k > 700:
        raise NumericFailure(f"gamma kernel overflows at m={m}, t={t}, x={x}")
    return math.exp(log_k)


def kernel_homogeneity_residual(m: int, nu: float, t: float, x: float) -> LawResidual:
    """``|K_m(nu t, nu x) - K_m(t, x)/nu|``; tolerance is relative to ``K_m(t, x)``."""
    if not (nu > 0 and t > 0 and x > 0):
        raise DomainError("nu, t and x must be positive")
    base = gamma_kernel(m, t, x)
    scaled = gamma_kernel(m, nu * t, nu * x)
    return LawResidual(abs(scaled - base / nu), KERNEL_REL_TOL * base,
                       {"m": m, "nu": nu, "t": t, "x": x, "kernel": base})
