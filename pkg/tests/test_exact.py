import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from wallkit.exact import (
    QF,
    CyclotomicField,
    Undecided,
    cyclotomic,
    exact_cos_pi_over,
    inertia,
    interval_inertia,
    real_cyclotomic_minpoly,
)

@pytest.fixture(autouse=True)
def _precision():
    with mpmath.workdps(60):
        yield


small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def qf_value(x: QF) -> mpmath.mpf:
    total = mpmath.mpf(0)
    for i, a in enumerate(x.c):
        r = 1
        for bit, p in enumerate((2, 3, 5)):
            if i >> bit & 1:
                r *= p
        total += mpmath.mpf(a.numerator) / a.denominator * mpmath.sqrt(r)
    return total


@settings(max_examples=100, deadline=None)
@given(st.lists(small, min_size=8, max_size=8), st.lists(small, min_size=8, max_size=8))
def test_qf_arithmetic_matches_high_precision(a, b):
    x, y = QF(a), QF(b)
    assert abs(qf_value(x + y) - (qf_value(x) + qf_value(y))) < 1e-40
    assert abs(qf_value(x * y) - qf_value(x) * qf_value(y)) < 1e-40
    if not x.is_zero():
        assert abs(qf_value(x.inverse()) * qf_value(x) - 1) < 1e-40
    v = qf_value(x)
    if abs(v) > 1e-45:
        assert x.sign() == (1 if v > 0 else -1)
    elif x.is_zero():
        assert x.sign() == 0


def test_qf_sign_of_cancelling_surds():
    # sqrt2 + sqrt3 - sqrt(5 + 2 sqrt6) = 0 is not representable directly, but
    # (sqrt2 + sqrt3)^2 - 5 - 2 sqrt6 is, and vanishes
    s = QF.sqrt(2) + QF.sqrt(3)
    assert (s * s - 5 - QF([0, 0, 0, 2])).is_zero()
    assert (QF.sqrt(2) * QF.sqrt(2) - 2).is_zero()
    assert (QF.sqrt(5) - Fraction(2236, 1000)).sign() == 1
    assert (QF.sqrt(5) - Fraction(2237, 1000)).sign() == -1


def test_cos_table():
    for m in range(1, 7):
        assert abs(float(exact_cos_pi_over(m)) - math.cos(math.pi / m)) < 1e-12
    assert exact_cos_pi_over(7) is None


KNOWN_CYCLOTOMIC = {
    1: [-1, 1], 2: [1, 1], 3: [1, 1, 1], 4: [1, 0, 1], 5: [1, 1, 1, 1, 1],
    6: [1, -1, 1], 8: [1, 0, 0, 0, 1], 12: [1, 0, -1, 0, 1],
}


def test_cyclotomic_known_values():
    for n, coeffs in KNOWN_CYCLOTOMIC.items():
        assert cyclotomic(n) == coeffs


@pytest.mark.parametrize("n", range(1, 40))
def test_cyclotomic_roots(n):
    p = cyclotomic(n)
    assert len(p) - 1 == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
    for k in range(1, n + 1):
        if math.gcd(k, n) == 1:
            z = cmath.exp(2j * math.pi * k / n)
            assert abs(sum(c * z ** i for i, c in enumerate(p))) < 1e-8


@pytest.mark.parametrize("n", range(3, 40))
def test_real_cyclotomic_minpoly_roots(n):
    p = real_cyclotomic_minpoly(n)
    phi = sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
    assert len(p) - 1 == phi // 2 and p[-1] == 1
    for k in range(1, n):
        if math.gcd(k, n) == 1:
            x = 2 * math.cos(2 * math.pi * k / n)
            assert abs(sum(c * x ** i for i, c in enumerate(p))) < 1e-7


def test_minpoly_of_seventh_root():
    # 2 cos(pi / 7) is a root of x^3 - x^2 - 2x + 1
    assert real_cyclotomic_minpoly(14) == [1, -2, -1, 1]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([7, 8, 9, 12, 14, 21]),
       st.lists(small, min_size=1, max_size=6), st.lists(small, min_size=1, max_size=6))
def test_cyclotomic_field_arithmetic(m, a, b):
    F = CyclotomicField(2 * m)
    theta = 2 * mpmath.cos(2 * mpmath.pi / (2 * m))

    def value(coeffs):
        return sum(mpmath.mpf(c.numerator) / c.denominator * theta ** i for i, c in enumerate(coeffs))

    x, y = F.element(a), F.element(b)
    assert abs(value(x.c) - value(a)) < 1e-40
    assert abs(value((x * y).c) - value(a) * value(b)) < 1e-35
    assert abs(value((x - y).c) - (value(a) - value(b))) < 1e-40
    v = value(a)
    if x.is_zero():
        assert abs(v) < 1e-40
    else:
        assert abs(value(x.inverse().c) * v - 1) < 1e-30
        if abs(v) > 1e-45:
            assert x.sign() == (1 if v > 0 else -1)


def test_cyclotomic_cosines():
    F = CyclotomicField(2 * 7 * 8)
    for m in (2, 4, 7, 8, 14, 28, 56):
        assert abs(float(F.cos_pi_over(m)) - math.cos(math.pi / m)) < 1e-12
    c = F.cos_pi_over(8)
    assert (c * c * F.rational(2) - F.rational(1) - F.cos_pi_over(4)).is_zero()
    with pytest.raises(ValueError):
        F.cos_pi_over(5)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n),
                       min_size=n, max_size=n)))
def test_inertia_matches_eigenvalues(rows):
    n = len(rows)
    A = [[Fraction(rows[i][j] + rows[j][i]) for j in range(n)] for i in range(n)]
    pos, neg, zero = inertia(A, lambda x: x == 0, lambda x: (x > 0) - (x < 0))
    eig = np.linalg.eigvalsh(np.array(A, dtype=float))
    assume(np.all((np.abs(eig) > 1e-9) | (np.abs(eig) < 1e-12)))
    assert pos == int((eig > 1e-9).sum())
    assert neg == int((eig < -1e-9).sum())
    assert zero == n - pos - neg


def test_interval_inertia_certifies_or_refuses():
    def definite(prec):
        return [[mpmath.iv.mpf(2), mpmath.iv.mpf(-1)], [mpmath.iv.mpf(-1), mpmath.iv.mpf(2)]]

    assert interval_inertia(definite, 2) == (2, 0, 0)

    def singular(prec):
        return [[mpmath.iv.mpf(1), mpmath.iv.mpf(-1)], [mpmath.iv.mpf(-1), mpmath.iv.mpf(1)]]

    with pytest.raises(Undecided):
        interval_inertia(singular, 2)
