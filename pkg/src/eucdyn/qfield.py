"""Exact arithmetic in real quadratic fields Q(sqrt(D)).

Elements are stored as a + b*sqrt(D) with rational a, b, so every
comparison, norm and sign decision is made over the rationals; no
floating point enters any predicate.  A :class:`FieldContext` fixes D,
the integral basis {1, alpha}, and the fundamental unit eps > 1 of the
maximal order, and is shared by all elements derived from it.

The fundamental unit is found by the continued-fraction expansion of
sqrt(D) when D = 2,3 mod 4, and by the minimal solution of
x^2 - D*y^2 = +-4 when D = 1 mod 4 (the maximal order then contains
half-integral units such as (1+sqrt(5))/2 which the plain Pell equation
misses).
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import isqrt

Rational = (int, Fraction)


def _is_square_free(n: int) -> bool:
    if n % 4 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 2
    return True


def _cf_pell_unit(D: int) -> tuple[int, int]:
    """Minimal (p, q) with p^2 - D*q^2 = +-1, q >= 1, via sqrt(D)'s continued fraction."""
    a0 = isqrt(D)
    m, d, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while p * p - D * q * q not in (1, -1):
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    return p, q


def _pell4_unit(D: int, cap: int = 10**6) -> tuple[Fraction, Fraction]:
    """Minimal (x+y*sqrt(D))/2 > 1 with x^2 - D*y^2 = +-4, for D = 1 mod 4.

    Searches y upward; for fixed y the -4 branch gives the smaller unit,
    so it is probed first.  Covers integral units too (even x, y).
    """
    for y in range(1, cap):
        for c in (-4, 4):
            t = D * y * y + c
            if t <= 0:
                continue
            x = isqrt(t)
            if x * x == t:
                return Fraction(x, 2), Fraction(y, 2)
    raise ValueError(f"no fundamental unit found for D={D} within search cap")


class QElem:
    """An element a + b*sqrt(D) of the field fixed by a FieldContext."""

    __slots__ = ("a", "b", "ctx")

    def __init__(self, ctx: "FieldContext", a, b=0):
        self.ctx = ctx
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)

    # -- ring structure -------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QElem):
            if other.ctx.D != self.ctx.D:
                raise ValueError("elements from different fields")
            return other
        if isinstance(other, Rational):
            return QElem(self.ctx, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QElem(self.ctx, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QElem(self.ctx, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QElem(self.ctx, o.a - self.a, o.b - self.b)

    def __neg__(self):
        return QElem(self.ctx, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        D = self.ctx.D
        return QElem(
            self.ctx,
            self.a * o.a + D * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        nm = o.norm()
        if nm == 0:
            raise ZeroDivisionError("division by zero field element")
        # z/w = z * conj(w) / Nm(w)
        num = self * o.conj()
        return QElem(self.ctx, num.a / nm, num.b / nm)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return (QElem(self.ctx, 1) / self) ** (-k)
        result = QElem(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- field-specific operations --------------------------------------

    def conj(self) -> "QElem":
        return QElem(self.ctx, self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm a^2 - D*b^2 (signed)."""
        return self.a * self.a - self.ctx.D * self.b * self.b

    def abs_norm(self) -> Fraction:
        return abs(self.norm())

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        sa = 1 if a > 0 else -1
        sb = 1 if b > 0 else -1
        if sa == sb:
            return sa
        # opposite signs: decided by a^2 vs D*b^2 (equality impossible,
        # it would make sqrt(D) rational)
        return sa if a * a > self.ctx.D * b * b else sb

    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self!r} is irrational")
        return self.a

    def floor(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        n = math.floor(float(self))
        # float estimate corrected by exact comparisons
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def ceil(self) -> int:
        return -(-self).floor()

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- order and equality ----------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.ctx.D, self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.ctx.D)

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        return f"({self.a} + {self.b}*sqrt{self.ctx.D})"


class FieldContext:
    """Fixed data for K = Q(sqrt(D)): basis, fundamental unit, search box.

    Attributes are set once at construction and treated as immutable;
    contexts are safe to share between threads.

    ``m1_bound`` is a rational upper bound for the inhomogeneous minimum
    of the field, used only to size the representative search box; any
    valid upper bound is safe, larger values just enlarge searches.  The
    default is ceil(sqrt(D)).
    """

    def __init__(self, D: int, m1_bound=None):
        if not isinstance(D, int) or D <= 1:
            raise ValueError(f"D must be an integer > 1, got {D!r}")
        if not _is_square_free(D):
            raise ValueError(f"D must be square-free, got {D}")
        self.D = D

        if D % 4 == 1:
            self.alpha = QElem(self, Fraction(1, 2), Fraction(1, 2))
        else:
            self.alpha = QElem(self, 0, 1)
        self.alpha_conj = self.alpha.conj()
        self.alpha_trace = self.alpha.a * 2  # alpha + conj(alpha)
        self.alpha_norm = self.alpha.norm()
        self.covolume = self.alpha - self.alpha_conj  # positive

        if D % 4 == 1:
            ua, ub = _pell4_unit(D)
            self.eps = QElem(self, ua, ub)
        else:
            p, q = _cf_pell_unit(D)
            self.eps = QElem(self, p, q)
        nm = self.eps.norm()
        if nm not in (1, -1):
            raise AssertionError(f"unit computation failed for D={D}: norm {nm}")
        self.nm_eps = int(nm)
        self.eps_conj = self.eps.conj()
        self.eps_conj_sign = self.nm_eps  # sign of conj(eps) = Nm(eps)/eps
        self.eps_inv = self.eps_conj * self.nm_eps  # 1/eps, always positive

        # integer coordinates of eps in the basis {1, alpha}
        e1 = self.eps.b / self.alpha.b
        e0 = self.eps.a - e1 * self.alpha.a
        if e0.denominator != 1 or e1.denominator != 1:
            raise AssertionError(f"unit not integral in basis for D={D}")
        self.unit_xy = (int(e0), int(e1))

        # matrix of multiplication by eps on (x, y) basis coordinates,
        # using alpha^2 = T*alpha - N
        T, N = self.alpha_trace, self.alpha_norm
        m00, m10 = self.unit_xy
        m01 = int(-m10 * N)
        m11 = int(m00 + m10 * T)
        self.phi_matrix = ((m00, m01), (m10, m11))
        det = m00 * m11 - m01 * m10  # equals Nm(eps)
        self.phi_inv_matrix = ((m11 * det, -m01 * det), (-m10 * det, m00 * det))

        if m1_bound is None:
            self.m1_bound = Fraction(isqrt(D) + 1)
        else:
            self.m1_bound = Fraction(m1_bound)
            if self.m1_bound <= 0:
                raise ValueError("m1_bound must be positive")
        # rational outer bound W >= sqrt(eps*(m1_bound+1)); used only to
        # bound searches, never to decide trapping
        self.box_halfwidth = rational_sqrt_upper(self.eps * (self.m1_bound + 1))

    # -- element constructors --------------------------------------------

    def elem(self, a, b=0) -> QElem:
        return QElem(self, a, b)

    def from_xy(self, x, y) -> QElem:
        """Element with coordinates (x, y) in the basis {1, alpha}."""
        return QElem(self, x, 0) + self.alpha * Fraction(y)

    def xy_of(self, z: QElem) -> tuple[Fraction, Fraction]:
        """Coordinates of z in the basis {1, alpha}."""
        y = z.b / self.alpha.b
        x = z.a - y * self.alpha.a
        return x, y

    def in_ring(self, z: QElem) -> bool:
        """True iff z lies in the ring of integers Z + Z*alpha."""
        x, y = self.xy_of(z)
        return x.denominator == 1 and y.denominator == 1

    def sqrt_d(self) -> QElem:
        return QElem(self, 0, 1)

    def __repr__(self):
        return f"FieldContext(D={self.D})"


def make_context(D: int, m1_bound=None) -> FieldContext:
    """Validated context for Q(sqrt(D)) with exact fundamental unit eps > 1."""
    return FieldContext(D, m1_bound=m1_bound)


def abs_norm(x: QElem) -> Fraction:
    """|Nm(x)| = |a^2 - D*b^2|."""
    return x.abs_norm()


def compare(x: QElem, y: QElem) -> int:
    """-1, 0 or +1, under the embedding sqrt(D) > 0; exact."""
    if isinstance(x, QElem):
        return (x - y).sign()
    return (-(y - x)).sign()


def rational_sqrt_upper(z, denominator: int = 10**8) -> Fraction:
    """A rational W >= sqrt(z), certified by exact comparison of W^2 with z.

    ``z`` may be a Fraction or a (positive) QElem.  The bound is tight to
    about 1/denominator; it only ever enlarges search boxes.
    """
    zf = float(z)
    if zf < 0:
        raise ValueError("negative argument")
    c = int(math.sqrt(zf) * denominator) + 1
    W = Fraction(c, denominator)
    while W * W < z:
        c += 1 + c // denominator
        W = Fraction(c, denominator)
    while True:
        c2 = c - 1
        W2 = Fraction(c2, denominator)
        if c2 >= 0 and W2 * W2 >= z:
            c, W = c2, W2
        else:
            return W
