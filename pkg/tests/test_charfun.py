import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posop.charfun import CharfunSpec, charfun_closed, charfun_series, kantorovich_b_charfun
from posop.convergence import LAMBDAS
from posop.errors import DomainError, UnsupportedFamilyError
from posop.numerics import rising_factorial_c
from posop.operators import FunctionHandle, apply_bernstein_schnabl, apply_gamma, apply_weierstrass


def test_closed_examples():
    assert charfun_closed(CharfunSpec("szasz", n=1), math.pi, 1.0) == pytest.approx(math.exp(-2), abs=1e-15)
    assert charfun_closed(CharfunSpec("gamma", mu=1.0), 1.0, 1.0) == pytest.approx(0.5 + 0.5j, abs=1e-15)
    for x in (0.0, 0.4, 3.0):
        assert charfun_closed(CharfunSpec("kantorovich_v", n=3, c=1.0, k=2), 0.0, x) == 1 + 0j
    assert charfun_closed(CharfunSpec("weierstrass", a=2.0), 1.0, 0.0) == pytest.approx(math.exp(-1), abs=1e-15)


def test_series_examples():
    assert abs(charfun_series(CharfunSpec("baskakov", n=1, c=1.0), math.pi, 1.0) - 1 / 3) <= 1e-12
    assert charfun_series(CharfunSpec("baskakov", n=2, c=-1.0), 0.0, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert abs(charfun_series(CharfunSpec("lr", n=1), math.pi, 1.0) - 1) <= 1e-12


def test_mkz_has_no_closed_form():
    with pytest.raises(UnsupportedFamilyError):
        charfun_closed(CharfunSpec("mkz", n=3), 1.0, 0.5)
    with pytest.raises(UnsupportedFamilyError):
        charfun_series(CharfunSpec("gamma", mu=2.0), 1.0, 0.5)


CLOSED_DISCRETE = [
    (CharfunSpec("baskakov", n=5, c=-1.0), 1.0),
    (CharfunSpec("baskakov", n=5, c=-0.5), 2.0),
    (CharfunSpec("baskakov", n=5, c=0.0), 4.0),
    (CharfunSpec("baskakov", n=5, c=1.0), 4.0),
    (CharfunSpec("baskakov", n=5, c=2.0), 4.0),
    (CharfunSpec("kantorovich_v", n=5, c=1.0, k=2), 4.0),
    (CharfunSpec("discrete_d", n=5, c=1.0, k=1, rho=2.0), 4.0),
    (CharfunSpec("q_a", n=5, a=2.0), 4.0),
    (CharfunSpec("jl_exp", n=5, p=1.0), 4.0),
    (CharfunSpec("lr", n=5), 4.0),
    (CharfunSpec("bbh", n=5), 4.0),
    (CharfunSpec("mixed_bernstein", n=5), 1.0),
    (CharfunSpec("lototsky", n=5, lam=LAMBDAS["cosine"]), 1.0),
    (CharfunSpec("v0_limit", n=3, k=2), 4.0),
]
IDS = [f"{s.tag}{s.c:+g}" for s, _ in CLOSED_DISCRETE]


@pytest.mark.parametrize("spec,xmax", CLOSED_DISCRETE, ids=IDS)
@settings(max_examples=25, deadline=None)
@given(s=st.floats(-5, 5), frac=st.floats(0, 1))
def test_closed_matches_series(spec, xmax, s, frac):
    x = frac * xmax
    assert abs(charfun_closed(spec, s, x) - charfun_series(spec, s, x)) <= 1e-10


@pytest.mark.parametrize("spec,xmax", CLOSED_DISCRETE, ids=IDS)
@settings(max_examples=25, deadline=None)
@given(s=st.floats(-20, 20), frac=st.floats(0, 1))
def test_hermitian_modulus_and_origin(spec, xmax, s, frac):
    x = frac * xmax
    for route in (charfun_closed, charfun_series):
        v, w = route(spec, s, x), route(spec, -s, x)
        assert abs(w - v.conjugate()) <= 1e-13
        assert abs(v) <= 1 + 1e-12
    assert charfun_closed(spec, 0.0, x) == 1 + 0j


def test_integral_families_modulus_and_symmetry():
    for spec in (CharfunSpec("gamma", mu=0.7), CharfunSpec("weierstrass", a=1.3),
                 CharfunSpec("bernstein_schnabl", n=4, b=0.4)):
        for s in (0.3, 2.0, 9.0):
            v = charfun_closed(spec, s, 0.8)
            assert abs(charfun_closed(spec, -s, 0.8) - v.conjugate()) <= 1e-13
            assert abs(v) <= 1 + 1e-12


@given(st.integers(1, 20), st.floats(0.1, 3), st.integers(1, 4), st.floats(-6, 6), st.floats(0, 5))
def test_kantorovich_normalisation_relation(n, c, k, s, x):
    normalised = charfun_closed(CharfunSpec("kantorovich_v", n=n, c=c, k=k), s, x)
    raw = kantorovich_b_charfun(c, k, n, s, x)
    factor = n**k / rising_factorial_c(n, c, k)
    assert abs(factor * raw - normalised) <= 1e-14 * max(1.0, abs(normalised))


@mpmath.workdps(40)
def _discrete_d_mp(c, n, k, rho, s, x):
    c, s, x = mpmath.mpf(c), mpmath.mpf(s), mpmath.mpf(x)
    den = n * rho - k * c
    shift = mpmath.exp(1j * s * k * (rho + 1) / (2 * den))
    if c == 0:
        return complex(shift * mpmath.exp(n * x * mpmath.expm1(1j * s / n)))
    return complex(shift * mpmath.power(1 - c * x * mpmath.expm1(1j * s * rho / den), -n / c - k))


def test_discrete_d_small_c_accuracy_and_continuity():
    for s in (-3.0, 0.5, 4.0):
        ref = charfun_closed(CharfunSpec("discrete_d", n=6, c=0.0, k=2, rho=1.5), s, 0.9)
        for c in (1e-8, -1e-9, 1e-10, 1e-12):
            v = charfun_closed(CharfunSpec("discrete_d", n=6, c=c, k=2, rho=1.5), s, 0.9)
            assert abs(v - _discrete_d_mp(c, 6, 2, 1.5, s, 0.9)) <= 1e-13
            # the family itself moves linearly in c, with slope of order one
            assert abs(v - ref) <= 2.0 * abs(c) + 1e-13
        v = charfun_closed(CharfunSpec("discrete_d", n=6, c=1e-11, k=2, rho=1.5), s, 0.9)
        assert abs(v - ref) <= 1e-10


def _integral_charfun(apply_fn, s):
    re = apply_fn(FunctionHandle(lambda t: np.cos(s * np.asarray(t)), "real", True))
    im = apply_fn(FunctionHandle(lambda t: np.sin(s * np.asarray(t)), "real", True))
    return complex(re, im)


@pytest.mark.parametrize("mu", [0.5, 1.0, 3.0, 8.5])
def test_gamma_closed_against_quadrature(mu):
    for s in (-2.0, 0.7, 3.0):
        for x in (0.5, 2.0):
            quad = _integral_charfun(lambda f: apply_gamma(mu, f, x), s)
            assert abs(charfun_closed(CharfunSpec("gamma", mu=mu), s, x) - quad) <= 1e-9


def test_weierstrass_and_schnabl_closed_against_quadrature():
    for s in (-1.5, 0.9, 4.0):
        quad = _integral_charfun(lambda f: apply_weierstrass(0.8, f, 0.3), s)
        assert abs(charfun_closed(CharfunSpec("weierstrass", a=0.8), s, 0.3) - quad) <= 1e-9
        n, h = 5, 1.2
        quad = _integral_charfun(lambda f: apply_bernstein_schnabl(n, h, f, 0.3), s)
        assert abs(charfun_closed(CharfunSpec("bernstein_schnabl", n=n, b=h / n), s, 0.3) - quad) <= 1e-9


def test_lr_stable_for_large_argument():
    v = charfun_closed(CharfunSpec("lr", n=10), 1.0, 50.0)
    y = 500.0
    ref = cmath.exp(y * (cmath.exp(0.1j) - 1))  # dominant branch of cosh ratio
    assert abs(v - ref) <= 1e-12
    assert math.isfinite(abs(v))


def test_mixed_bernstein_boundary():
    assert charfun_closed(CharfunSpec("mixed_bernstein", n=5), 2.0, 1.0) == pytest.approx(cmath.exp(1.6j))
    assert charfun_series(CharfunSpec("mixed_bernstein", n=5), 2.0, 1.0) == pytest.approx(cmath.exp(1.6j))
    assert abs(charfun_closed(CharfunSpec("mixed_bernstein", n=5), 2.0, 1 - 1e-9) - cmath.exp(1.6j)) < 1e-6


def test_mkz_series_at_boundary_and_interior():
    assert charfun_series(CharfunSpec("mkz", n=3), 1.3, 1.0) == pytest.approx(cmath.exp(1.3j))
    # finite check against a direct sum with exact binomials
    n, x, s = 3, 0.4, 1.1
    ref = math.fsum(math.comb(n + j, j) * x**j * (1 - x) ** (n + 1) * math.cos(s * j / (n + j)) for j in range(400))
    assert charfun_series(CharfunSpec("mkz", n=n), s, x).real == pytest.approx(ref, abs=1e-14)


def test_spec_validation():
    with pytest.raises(DomainError):
        CharfunSpec("nope")
    with pytest.raises(DomainError):
        CharfunSpec("lototsky", n=3)
    with pytest.raises(DomainError):
        charfun_closed(CharfunSpec("baskakov", n=3, c=-1.0), 1.0, 1.5)
    with pytest.raises(DomainError):
        charfun_closed(CharfunSpec("gamma", mu=-1.0), 1.0, 1.0)
