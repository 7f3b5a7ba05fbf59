"""Exact arithmetic in Q(sqrt2, sqrt3, sqrt5) and certified matrix inertia.

An element is stored as eight rational coordinates over the basis
``sqrt(2^a 3^b 5^c)`` with ``(a, b, c)`` read from the bits of the index.
Signs are decided exactly by splitting off one square root at a time:
``sign(x + y sqrt p)`` follows from the signs of ``x``, ``y`` and
``x^2 - p y^2``, which lives in the smaller field.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Callable, Sequence

import mpmath

PRIMES = (2, 3, 5)
DIM = 8


def _basis_product(a: int, b: int) -> tuple[int, int]:
    """sqrt(a) * sqrt(b) = coeff * sqrt(a ^ b) on basis indices."""
    coeff = 1
    common = a & b
    for bit, p in enumerate(PRIMES):
        if common >> bit & 1:
            coeff *= p
    return coeff, a ^ b


_PRODUCT = [[_basis_product(a, b) for b in range(DIM)] for a in range(DIM)]


class QF:
    """Element of Q(sqrt2, sqrt3, sqrt5)."""

    __slots__ = ("c",)

    def __init__(self, coords: Sequence = ()):
        c = [Fraction(0)] * DIM
        for i, x in enumerate(coords):
            c[i] = Fraction(x)
        self.c = tuple(c)

    @classmethod
    def rational(cls, q) -> "QF":
        return cls([q])

    @classmethod
    def sqrt(cls, p: int, coeff=1) -> "QF":
        c = [0] * DIM
        c[1 << PRIMES.index(p)] = coeff
        return cls(c)

    def __add__(self, other):
        other = _coerce(other)
        return QF([a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return QF([-a for a in self.c])

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out = [Fraction(0)] * DIM
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(other.c):
                if b:
                    k, idx = _PRODUCT[i][j]
                    out[idx] += k * a * b
        return QF(out)

    __rmul__ = __mul__

    def conjugate(self, bit: int) -> "QF":
        """Apply sqrt(p) -> -sqrt(p) for the prime at ``bit``."""
        return QF([-a if i >> bit & 1 else a for i, a in enumerate(self.c)])

    def inverse(self) -> "QF":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        # multiply by all Galois conjugates to land in Q
        num = QF.rational(1)
        den = self
        for bit in range(len(PRIMES)):
            conj = den.conjugate(bit)
            num = num * conj
            den = den * conj
        q = den.c[0]
        return QF([a / q for a in num.c])

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def is_zero(self) -> bool:
        return not any(self.c)

    def __eq__(self, other):
        try:
            return self.c == _coerce(other).c
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def sign(self) -> int:
        return _sign(self.c, len(PRIMES))

    def __float__(self):
        total = 0.0
        for i, a in enumerate(self.c):
            if a:
                r = 1
                for bit, p in enumerate(PRIMES):
                    if i >> bit & 1:
                        r *= p
                total += float(a) * r ** 0.5
        return total

    def __repr__(self):
        return f"QF({float(self):.6g})"


def _coerce(x) -> QF:
    if isinstance(x, QF):
        return x
    if isinstance(x, (int, Fraction)):
        return QF.rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as a field element")


def _sign(c: tuple, nbits: int) -> int:
    """Sign of an element whose coordinates vanish above ``2**nbits``."""
    if nbits == 0:
        return (c[0] > 0) - (c[0] < 0)
    half = 1 << (nbits - 1)
    p = PRIMES[nbits - 1]
    lo = QF(c[:half])
    hi = QF([c[half + i] for i in range(half)])
    sa, sb = _sign(lo.c, nbits - 1), _sign(hi.c, nbits - 1)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    diff = lo * lo - p * (hi * hi)
    return sa * _sign(diff.c, nbits - 1)


_HALF = Fraction(1, 2)
_COS_PI_OVER = {
    1: QF.rational(-1),
    2: QF.rational(0),
    3: QF.rational(_HALF),
    4: QF.sqrt(2, _HALF),
    5: QF([Fraction(1, 4), 0, 0, 0, Fraction(1, 4)]),
    6: QF.sqrt(3, _HALF),
}


def exact_cos_pi_over(m: int) -> QF | None:
    """cos(pi / m) in the field, or None when it lies outside it."""
    return _COS_PI_OVER.get(m)


def inertia(A: list[list], is_zero: Callable, sign: Callable, order=None) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric matrix by congruence.

    ``A`` holds field elements supporting + - * /.  Pivots are taken from
    the diagonal in ``order``; when every remaining diagonal entry vanishes
    but an off-diagonal one does not, row and column ``j`` are replaced by
    their sums with those of ``k``, producing the nonzero pivot ``2 A[j][k]``.
    """
    A = [list(row) for row in A]
    idx = list(order if order is not None else range(len(A)))
    pos = neg = zero = 0
    while idx:
        k = next((i for i in idx if not is_zero(A[i][i])), None)
        if k is None:
            pair = next(
                ((j, i) for i in idx for j in idx if j != i and not is_zero(A[j][i])), None
            )
            if pair is None:
                zero += len(idx)
                break
            j, k = pair
            for t in range(len(A)):
                A[j][t] = A[j][t] + A[k][t]
            for t in range(len(A)):
                A[t][j] = A[t][j] + A[t][k]
            k = j
        s = sign(A[k][k])
        if s > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(k)
        piv = A[k][k]
        for i in idx:
            f = A[i][k] / piv
            for j in idx:
                A[i][j] = A[i][j] - f * A[k][j]
    return pos, neg, zero


class Undecided(Exception):
    pass


def interval_inertia(entries: Callable[[int], list[list]], n: int, precisions=(53, 106, 212, 424, 848)):
    """Inertia with mpmath interval arithmetic, certified or :class:`Undecided`.

    ``entries(prec)`` builds the interval matrix at working precision
    ``prec``.  An interval pivot must exclude zero; any ordering whose
    pivots are all certified yields the inertia (a symmetric matrix with
    a certified nonzero pivot sequence has no zero eigenvalue).
    """
    orders = list(permutations(range(n))) if n <= 5 else [tuple(range(n))]
    saved = mpmath.iv.prec
    try:
        for prec in precisions:
            mpmath.iv.prec = prec
            A = entries(prec)
            for order in orders:
                try:
                    return _interval_elimination(A, order)
                except Undecided:
                    continue
    finally:
        mpmath.iv.prec = saved
    raise Undecided(f"interval pivots straddle zero up to {precisions[-1]} bits")


def _interval_elimination(A, order):
    A = [list(r) for r in A]
    idx = list(order)
    pos = neg = 0
    while idx:
        k = idx.pop(0)
        piv = A[k][k]
        if piv.a > 0:
            pos += 1
        elif piv.b < 0:
            neg += 1
        else:
            raise Undecided
        for i in idx:
            f = A[i][k] / piv
            for j in idx:
                A[i][j] = A[i][j] - f * A[k][j]
    return pos, neg, 0


# -- real cyclotomic fields ----------------------------------------------------
#
# Q(theta) with theta = 2 cos(2 pi / n) holds cos(pi / m) for every m dividing
# n / 2.  Its minimal polynomial comes from the palindromic cyclotomic
# polynomial: Phi_n(z) / z^k = p_k + sum_j p_(k+j) D_j(z + 1/z), where
# D_j(2 cos a) = 2 cos(j a).  Elements are polynomials in theta reduced
# modulo it; zero tests are exact and signs of nonzero elements are settled
# by refining interval evaluations, which always terminates.


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        f = Fraction(a[-1]) / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return q, a


_CYCLO: dict[int, list] = {}


def cyclotomic(n: int) -> list:
    """Integer coefficients (constant term first) of the n-th cyclotomic polynomial."""
    if n not in _CYCLO:
        num = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
        for d in range(1, n):
            if n % d == 0:
                num, rem = _poly_divmod(num, cyclotomic(d))
                assert not rem
        _CYCLO[n] = [int(c) for c in num]
    return _CYCLO[n]


def _dickson(j: int) -> list:
    """D_j with D_j(z + 1/z) = z^j + z^-j."""
    prev, cur = [2], [0, 1]
    if j == 0:
        return prev
    for _ in range(j - 1):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def real_cyclotomic_minpoly(n: int) -> list:
    """Minimal polynomial of 2 cos(2 pi / n) for n >= 3 (monic, constant term first)."""
    p = cyclotomic(n)
    k = (len(p) - 1) // 2
    out = [0] * (k + 1)
    out[0] += p[k]
    for j in range(1, k + 1):
        for i, c in enumerate(_dickson(j)):
            out[i] += p[k + j] * c
    return out


class CyclotomicField:
    """Q(2 cos(2 pi / n))."""

    def __init__(self, n: int):
        if n < 3:
            raise ValueError("use n >= 3")
        self.n = n
        self.modulus = [Fraction(c) for c in real_cyclotomic_minpoly(n)]
        self.degree = len(self.modulus) - 1

    def element(self, coeffs) -> "CycNum":
        return CycNum(self, _poly_divmod([Fraction(c) for c in coeffs], self.modulus)[1])

    def rational(self, q) -> "CycNum":
        return self.element([q])

    def theta_power(self, j: int) -> "CycNum":
        """2 cos(2 pi j / n)."""
        return self.element(_dickson(j))

    def cos_pi_over(self, m: int) -> "CycNum":
        """cos(pi / m); requires 2m | n."""
        if self.n % (2 * m):
            raise ValueError(f"cos(pi/{m}) is not in Q(2cos(2pi/{self.n}))")
        half = Fraction(1, 2)
        return self.theta_power(self.n // (2 * m)) * self.rational(half)


class CycNum:
    __slots__ = ("field", "c")

    def __init__(self, field: CyclotomicField, coeffs: list):
        self.field = field
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    def _wrap(self, coeffs) -> "CycNum":
        return CycNum(self.field, _poly_divmod(coeffs, self.field.modulus)[1])

    def __add__(self, o):
        n = max(len(self.c), len(o.c))
        a = list(self.c) + [0] * (n - len(self.c))
        b = list(o.c) + [0] * (n - len(o.c))
        return CycNum(self.field, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return CycNum(self.field, [-x for x in self.c])

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not self.c or not o.c:
            return CycNum(self.field, [])
        out = [Fraction(0)] * (len(self.c) + len(o.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(o.c):
                    out[i + j] += x * y
        return self._wrap(out)

    def inverse(self) -> "CycNum":
        if not self.c:
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid: s * self = 1 mod modulus
        r0, r1 = list(self.field.modulus), list(self.c)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while any(r1):
            q, r = _poly_divmod(r0, r1)
            qs = _poly_mul(q, s1)
            n = max(len(s0), len(qs))
            s2 = [(s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0) for i in range(n)]
            r0, r1, s0, s1 = r1, r, s1, s2
        g = r0[0]  # gcd is a nonzero constant since the modulus is irreducible
        return self._wrap([x / g for x in s0])

    def __truediv__(self, o):
        return self * o.inverse()

    def is_zero(self) -> bool:
        return not self.c

    def sign(self, precisions=(64, 128, 256, 512, 1024, 2048, 4096)) -> int:
        if not self.c:
            return 0
        saved = mpmath.iv.prec
        try:
            for prec in precisions:
                mpmath.iv.prec = prec
                theta = 2 * mpmath.iv.cos(2 * mpmath.iv.pi / self.field.n)
                val = mpmath.iv.mpf(0)
                for x in reversed(self.c):
                    val = val * theta + mpmath.iv.mpf(x.numerator) / x.denominator
                if val.a > 0:
                    return 1
                if val.b < 0:
                    return -1
        finally:
            mpmath.iv.prec = saved
        raise Undecided(f"sign of a nonzero element unresolved at {precisions[-1]} bits")

    def __float__(self):
        t = 2 * mpmath.cos(2 * mpmath.pi / self.field.n)
        return float(sum(mpmath.mpf(x.numerator) / x.denominator * t ** i for i, x in enumerate(self.c)))

    def __repr__(self):
        return f"CycNum({float(self):.6g})"


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out
