"""Exact scalars: rationals and truncated series in the formal Planck constant.

Every coefficient in the library is a Fraction.  HPoly is a polynomial in
the formal parameter h; HLaurent additionally allows negative exponents.
Values built from exact data are exact (infinite truncation order); values
assembled from an h-adic series carry the finite order through which their
coefficients are known.  Binary operations track the surviving precision
(multiplication by a power of h raises it), equality compares the common
window, and exact division by h^k lowers a finite order by k.
"""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction

DEFAULT_H_ORDER = 6
INF_TRUNC = 10**9

_h_order = DEFAULT_H_ORDER


def h_order() -> int:
    """Global order for h-adic series assembly and series comparisons."""
    return _h_order


def set_h_order(n: int) -> None:
    global _h_order
    if n < 0:
        raise ValueError("truncation order must be nonnegative")
    _h_order = n


@contextmanager
def h_truncation(n: int):
    """Temporarily change the global series order."""
    global _h_order
    old = _h_order
    set_h_order(n)
    try:
        yield
    finally:
        _h_order = old


def _rat(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


class NotDivisibleError(ArithmeticError):
    """Raised when an exact division by a power of h fails.

    Carries the lowest exponent whose coefficient obstructs the division.
    """

    def __init__(self, offending_exponent: int, message: str = ""):
        self.offending_exponent = offending_exponent
        super().__init__(
            message or f"not divisible: nonzero coefficient at h^{offending_exponent}"
        )


class HPoly:
    """Polynomial in h with Fraction coefficients and tracked precision.

    `trunc` is the largest exponent whose coefficient is known; INF_TRUNC
    marks exact values.  Exponents above a finite trunc are discarded.
    """

    __slots__ = ("c", "trunc")

    def __init__(self, coeffs=None, trunc: int | None = None):
        t = INF_TRUNC if trunc is None else trunc
        if t < 0:
            raise ValueError("negative truncation order")
        self.trunc = t
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                if k < 0:
                    raise ValueError("HPoly exponents must be nonnegative")
                if k > t:
                    continue
                v = _rat(v)
                if v != 0:
                    c[k] = v
        self.c = c

    # -- constructors -------------
    @classmethod
    def const(cls, v) -> "HPoly":
        return cls({0: _rat(v)})

    @classmethod
    def zero(cls, trunc: int | None = None) -> "HPoly":
        return cls({}, trunc=trunc)

    @classmethod
    def h(cls, power: int = 1) -> "HPoly":
        return cls({power: Fraction(1)})

    @classmethod
    def promote(cls, v) -> "HPoly":
        if isinstance(v, HPoly):
            return v
        return cls.const(v)

    # -- queries -------------
    def coeff(self, k: int) -> Fraction:
        return self.c.get(k, Fraction(0))

    def is_zero(self) -> bool:
        return not self.c

    def is_const(self) -> bool:
        return all(k == 0 for k in self.c)

    def classical(self) -> Fraction:
        return self.coeff(0)

    def degree(self) -> int:
        """Largest stored exponent (-1 when zero)."""
        return max(self.c) if self.c else -1

    def low(self) -> int:
        return min(self.c) if self.c else 0

    def _val(self) -> int:
        """h-adic valuation; a zero value has maximal valuation."""
        return min(self.c) if self.c else INF_TRUNC

    def cap(self, t: int) -> "HPoly":
        """Restrict the known window to order t."""
        if t >= self.trunc:
            return self
        return HPoly(self.c, trunc=t)

    # -- arithmetic -------------
    def _combine(self, other, sign: int) -> "HPoly":
        other = HPoly.promote(other)
        t = min(self.trunc, other.trunc)
        c = {k: v for k, v in self.c.items() if k <= t}
        for k, v in other.c.items():
            if k > t:
                continue
            w = c.get(k, Fraction(0)) + sign * v
            if w == 0:
                c.pop(k, None)
            else:
                c[k] = w
        out = HPoly.zero(trunc=t)
        out.c = c
        return out

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return HPoly.promote(other) - self

    def __neg__(self):
        out = HPoly.zero(trunc=self.trunc)
        out.c = {k: -v for k, v in self.c.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, HLaurent):
            return HLaurent.promote(self) * other
        if not isinstance(other, HPoly):
            other = HPoly.const(other)
        t = min(
            self.trunc + other._val(), other.trunc + self._val(), INF_TRUNC
        )
        c = {}
        for i, a in self.c.items():
            for j, b in other.c.items():
                k = i + j
                if k > t:
                    continue
                w = c.get(k, Fraction(0)) + a * b
                if w == 0:
                    c.pop(k, None)
                else:
                    c[k] = w
        out = HPoly.zero(trunc=t)
        out.c = c
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, HLaurent):
            return other == self
        if not isinstance(other, HPoly):
            try:
                other = HPoly.promote(other)
            except TypeError:
                return NotImplemented
        t = min(self.trunc, other.trunc)
        a = {k: v for k, v in self.c.items() if k <= t}
        b = {k: v for k, v in other.c.items() if k <= t}
        return a == b

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def h_divide(self, k: int) -> "HPoly":
        """Exact division by h^k; a finite precision window shrinks by k."""
        if k == 0:
            return self
        bad = [e for e in self.c if e < k]
        if bad:
            raise NotDivisibleError(min(bad))
        t = self.trunc if self.trunc >= INF_TRUNC else self.trunc - k
        if t < 0:
            raise NotDivisibleError(
                0, f"insufficient precision to divide by h^{k}"
            )
        out = HPoly.zero(trunc=t)
        out.c = {e - k: v for e, v in self.c.items() if e - k <= t}
        return out

    def neg_h_divide(self, k: int) -> "HPoly":
        """Exact division by (-h)^k."""
        out = self.h_divide(k)
        return out if k % 2 == 0 else -out

    def classical_part(self, j: int) -> "HPoly":
        """The h^j coefficient as an exact constant."""
        return HPoly.const(self.coeff(j))

    def to_laurent(self) -> "HLaurent":
        return HLaurent(dict(self.c), trunc=self.trunc)

    def __repr__(self):
        return f"HPoly({_fmt_coeffs(self.c)})"

    def __str__(self):
        return _fmt_coeffs(self.c)


class HLaurent:
    """Bounded-Laurent scalar in h: finitely many negative exponents allowed."""

    __slots__ = ("c", "trunc")

    def __init__(self, coeffs=None, trunc: int | None = None):
        t = INF_TRUNC if trunc is None else trunc
        self.trunc = t
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                if k > t:
                    continue
                v = _rat(v)
                if v != 0:
                    c[k] = v
        self.c = c

    @classmethod
    def promote(cls, v) -> "HLaurent":
        if isinstance(v, HLaurent):
            return v
        if isinstance(v, HPoly):
            return v.to_laurent()
        return cls({0: _rat(v)})

    @classmethod
    def zero(cls, trunc: int | None = None) -> "HLaurent":
        return cls({}, trunc=trunc)

    def coeff(self, k: int) -> Fraction:
        return self.c.get(k, Fraction(0))

    def is_zero(self) -> bool:
        return not self.c

    def low(self) -> int:
        return min(self.c) if self.c else 0

    def _val(self) -> int:
        return min(self.c) if self.c else INF_TRUNC

    def _combine(self, other, sign: int) -> "HLaurent":
        other = HLaurent.promote(other)
        t = min(self.trunc, other.trunc)
        c = {k: v for k, v in self.c.items() if k <= t}
        for k, v in other.c.items():
            if k > t:
                continue
            w = c.get(k, Fraction(0)) + sign * v
            if w == 0:
                c.pop(k, None)
            else:
                c[k] = w
        out = HLaurent.zero(trunc=t)
        out.c = c
        return out

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return HLaurent.promote(other) - self

    def __neg__(self):
        out = HLaurent.zero(trunc=self.trunc)
        out.c = {k: -v for k, v in self.c.items()}
        return out

    def __mul__(self, other):
        other = HLaurent.promote(other)
        t = min(
            self.trunc + other._val(), other.trunc + self._val(), INF_TRUNC
        )
        c = {}
        for i, a in self.c.items():
            for j, b in other.c.items():
                k = i + j
                if k > t:
                    continue
                w = c.get(k, Fraction(0)) + a * b
                if w == 0:
                    c.pop(k, None)
                else:
                    c[k] = w
        out = HLaurent.zero(trunc=t)
        out.c = c
        return out

    __rmul__ = __mul__

    def h_shift(self, k: int) -> "HLaurent":
        """Multiply by h^k (k may be negative)."""
        t = self.trunc if self.trunc >= INF_TRUNC else self.trunc + k
        out = HLaurent.zero(trunc=max(t, -INF_TRUNC))
        out.c = {e + k: v for e, v in self.c.items() if e + k <= t}
        return out

    def neg_h_divide(self, k: int) -> "HLaurent":
        out = self.h_shift(-k)
        return out if k % 2 == 0 else -out

    def __eq__(self, other):
        try:
            other = HLaurent.promote(other)
        except TypeError:
            return NotImplemented
        t = min(self.trunc, other.trunc)
        a = {k: v for k, v in self.c.items() if k <= t}
        b = {k: v for k, v in other.c.items() if k <= t}
        return a == b

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __repr__(self):
        return f"HLaurent({_fmt_coeffs(self.c)})"

    def __str__(self):
        return _fmt_coeffs(self.c)


def _fmt_coeffs(c: dict) -> str:
    if not c:
        return "0"
    bits = []
    for k in sorted(c):
        v = c[k]
        if k == 0:
            bits.append(str(v))
        else:
            pow_str = "h" if k == 1 else f"h^{k}"
            if v == 1:
                bits.append(pow_str)
            elif v == -1:
                bits.append(f"-{pow_str}")
            else:
                bits.append(f"{v}*{pow_str}")
    out = " + ".join(bits)
    return out.replace("+ -", "- ")


def rat_str(v: Fraction) -> str:
    """Serialize a rational as "p/q" (or "p" for integers)."""
    return str(v)
