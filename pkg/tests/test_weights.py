import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from posop.errors import DomainError
from posop.weights import WeightFamily, check_x, node, nodes, support, validate, weight, weight_table

mpmath.mp.dps = 30

SZASZ = WeightFamily.szasz()
BERN = WeightFamily.bernstein()


def test_weight_examples():
    assert weight(SZASZ, 3, 0, 0.0) == 1.0
    assert weight(BERN, 2, 1, 0.5) == pytest.approx(0.5, rel=1e-15)
    assert weight(WeightFamily.baskakov(1.0), 1, 1, 1.0) == pytest.approx(0.25, rel=1e-15)
    assert weight(WeightFamily("lr"), 1, 0, 1.0) == pytest.approx(1 / math.cosh(1), rel=1e-15)


def test_node_examples():
    assert node(WeightFamily("bbh"), 5, 5) == 5.0
    assert node(WeightFamily("mkz"), 3, 0) == 0.0
    assert node(WeightFamily.discrete_d(0.0, 0, 1.0), 4, 2) == 0.5


def test_support_examples():
    assert support(BERN, 7) == 7
    assert support(WeightFamily.baskakov(1.0), 7) is None
    assert support(WeightFamily.baskakov(-0.5), 3) == 6
    assert support(WeightFamily("bbh"), 4) == 4


def _oracle_pmf(fam, n, j, x):
    c = fam.c
    if fam.tag == "baskakov":
        if c == 0:
            return stats.poisson.pmf(j, n * x)
        if c < 0:
            return stats.binom.pmf(j, round(-n / c), -c * x)
        return stats.nbinom.pmf(j, n / c, 1 / (1 + c * x))
    if fam.tag == "mkz":
        return stats.nbinom.pmf(j, n + 1, 1 - x)
    if fam.tag == "bbh":
        return stats.binom.pmf(j, n, x / (1 + x))
    if fam.tag == "jl_exp":
        return stats.poisson.pmf(j, n * x + fam.p)
    raise AssertionError(fam)


@pytest.mark.parametrize("fam,xs", [
    (WeightFamily.baskakov(-1.0), [0.0, 0.2, 0.5, 0.9, 1.0]),
    (WeightFamily.baskakov(-0.5), [0.0, 0.3, 1.1, 2.0]),
    (SZASZ, [0.0, 0.3, 2.0, 7.5]),
    (WeightFamily.baskakov(1.0), [0.1, 1.0, 3.0]),
    (WeightFamily.baskakov(2.0), [0.1, 1.0, 3.0]),
    (WeightFamily("mkz"), [0.1, 0.5, 0.9]),
    (WeightFamily("bbh"), [0.2, 1.0, 4.0]),
    (WeightFamily.jl_exp(1.5), [0.0, 0.4, 2.0]),
])
@pytest.mark.parametrize("n", [1, 6, 40])
def test_weights_match_scipy_distributions(fam, xs, n):
    for x in xs:
        top = support(fam, n)
        j = np.arange((top if top is not None else 60) + 1)
        got = np.array([weight(fam, n, int(k), x) for k in j])
        ref = _oracle_pmf(fam, n, j, x)
        np.testing.assert_allclose(got, ref, rtol=1e-11, atol=1e-300)


def test_lr_weights_against_direct_formula():
    fam = WeightFamily("lr")
    for m in (1, 3, 10):
        for x in (0.2, 1.0, 5.0):
            for k in range(0, 30, 3):
                y = mpmath.mpf(m) * x
                ref = float(y ** (2 * k) / mpmath.factorial(2 * k) / mpmath.cosh(y))
                assert weight(fam, m, k, x) == pytest.approx(ref, rel=1e-12)
            assert node(fam, m, 4) == pytest.approx(8 / m)


def _q_a_direct(a, n, k, x):
    a, x = mpmath.mpf(a), mpmath.mpf(x)
    inner = sum(mpmath.binomial(k, i) * mpmath.rf(n, i) * a ** (k - i) for i in range(k + 1))
    return float(mpmath.exp(-a * x / (1 + x)) * x**k / ((1 + x) ** (n + k) * mpmath.factorial(k)) * inner)


@pytest.mark.parametrize("a", [0.5, 2.0, 7.0])
def test_q_a_weights_against_direct_sum(a):
    fam = WeightFamily.q_a(a)
    for n in (1, 5, 12):
        for x in (0.3, 1.0, 4.0):
            for k in (0, 1, 4, 15, 40):
                assert weight(fam, n, k, x) == pytest.approx(_q_a_direct(a, n, k, x), rel=1e-11)


@given(st.integers(1, 50), st.integers(0, 80), st.floats(0.01, 10))
def test_q_a_zero_equals_baskakov_one(n, k, x):
    a = weight(WeightFamily.q_a(0.0), n, k, x)
    b = weight(WeightFamily.baskakov(1.0), n, k, x)
    assert a == pytest.approx(b, rel=1e-13, abs=1e-300)


def test_discrete_d_uses_shifted_baskakov_weights():
    for c, k, rho in [(1.0, 1, 2.0), (-1.0, 1, 1.0), (0.5, 2, 3.0)]:
        fam = WeightFamily.discrete_d(c, k, rho)
        n = 6
        order = n + k * c
        ref_fam = WeightFamily.baskakov(c)
        x = 0.3
        for j in range(5):
            assert weight(fam, n, j, x) == pytest.approx(weight(ref_fam, order, j, x), rel=1e-14)
            expected_node = ((2 * j + k) * rho + k) / (2 * (n * rho - k * c))
            assert node(fam, n, j) == pytest.approx(expected_node, rel=1e-15)


@given(st.integers(1, 30), st.floats(0.0, 1.0))
def test_mixed_bernstein_odd_weights_vanish(n, x):
    if x == 1.0 and n % 2 == 1:
        return
    fam = WeightFamily("mixed_bernstein")
    for j in range(1, n + 1, 2):
        assert weight(fam, n, j, x) == 0.0


def test_mixed_bernstein_against_averaged_binomials():
    fam = WeightFamily("mixed_bernstein")
    for n in (2, 5, 8):
        for x in (0.1, 0.5, 0.8):
            norm = 1 + (1 - 2 * x) ** n
            for j in range(0, n + 1, 2):
                ref = 2 * math.comb(n, j) * x**j * (1 - x) ** (n - j) / norm
                assert weight(fam, n, j, x) == pytest.approx(ref, rel=1e-12)


@given(st.integers(1, 30), st.integers(0, 60), st.floats(0.0, 5.0))
def test_szasz_factorisation_exact(m, j, x):
    assert weight(SZASZ, m, j, x) == weight(SZASZ, 1, j, m * x)


FAMILIES = [
    (WeightFamily.baskakov(-1.0), 1.0),
    (WeightFamily.baskakov(-0.5), 2.0),
    (SZASZ, 6.0),
    (WeightFamily.baskakov(1.0), 6.0),
    (WeightFamily.baskakov(2.0), 6.0),
    (WeightFamily("mkz"), 0.95),
    (WeightFamily("bbh"), 6.0),
    (WeightFamily.q_a(2.0), 6.0),
    (WeightFamily.jl_exp(1.0), 6.0),
    (WeightFamily("lr"), 6.0),
    (WeightFamily.discrete_d(1.0, 1, 2.0), 6.0),
    (WeightFamily.discrete_d(-1.0, 1, 1.0), 1.0),
    (WeightFamily("mixed_bernstein"), 0.99),
]


@pytest.mark.parametrize("fam,xmax", FAMILIES, ids=[f"{f.tag}{f.c:+g}" for f, _ in FAMILIES])
@given(n=st.integers(1, 60), frac=st.floats(0.0, 1.0))
def test_normalisation_and_positivity(fam, xmax, n, frac):
    try:
        validate(fam, n)
    except DomainError:
        return
    x = frac * xmax
    table = weight_table(fam, n, x)
    assert np.all(table.weight >= 0)
    assert math.fsum(table.weight) == pytest.approx(1.0, abs=1e-12)


def test_normalisation_large_argument():
    for fam in (SZASZ, WeightFamily.baskakov(2.0), WeightFamily.q_a(5.0)):
        assert math.fsum(weight_table(fam, 40, 50.0).weight) == pytest.approx(1.0, abs=1e-11)


def test_weight_table_is_read_only_and_cached():
    t1 = weight_table(SZASZ, 5, 0.7)
    t2 = weight_table(SZASZ, 5, 0.7)
    assert t1 is t2
    with pytest.raises(ValueError):
        t1.weight[0] = 0.0


def test_domain_errors():
    with pytest.raises(DomainError):
        validate(WeightFamily.baskakov(-0.3), 1)
    with pytest.raises(DomainError):
        validate(WeightFamily.discrete_d(2.0, 3, 1.0), 5)
    with pytest.raises(DomainError):
        validate(WeightFamily("bbh"), 2.5)
    with pytest.raises(DomainError):
        check_x(BERN, 3, 1.5)
    with pytest.raises(DomainError):
        check_x(WeightFamily("mkz"), 3, 1.0)
    with pytest.raises(DomainError):
        check_x(WeightFamily("mixed_bernstein"), 3, 1.0)
    check_x(WeightFamily("mixed_bernstein"), 4, 1.0)
    with pytest.raises(DomainError):
        weight(BERN, 3, 4, 0.5)
    with pytest.raises(DomainError):
        WeightFamily("nope")


def test_vectorised_nodes():
    np.testing.assert_allclose(nodes(WeightFamily("mkz"), 4, np.arange(3)), [0, 1 / 5, 2 / 6])
