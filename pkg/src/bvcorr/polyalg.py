"""The polynomial BV algebra: fields x_i, antifields eta_i, and its operators.

C = Q[x_1..x_N] (x) Lambda[eta_1..eta_N] with ghost number -1 on each eta.
The differential is quantum: Khat = K_cl - h*Delta, where K_cl contracts
eta_i against dS/dx_i and Delta is the odd second-order operator pairing
eta_i with x_i.  The descendant family ell_n measures iterated failures of
Khat to be a derivation, divided by powers of (-h).
"""

from __future__ import annotations

from fractions import Fraction

from .partitions import (
    ArityCapError,
    distinguished_blocks,
    koszul_sign,
    set_partitions,
)
from .scalars import HPoly, NotDivisibleError

DEFAULT_POLY_ARITY_CAP = 6


def _rat(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    raise TypeError(f"not an exact scalar: {v!r}")


class Potential:
    """A classical action S_cl in Q[x_1..x_N] (ghost number zero)."""

    def __init__(self, n_vars: int, terms):
        if n_vars < 1:
            raise ValueError("need at least one variable")
        self.n_vars = n_vars
        s = {}
        for exp, coef in dict(terms).items():
            exp = tuple(exp)
            if len(exp) != n_vars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp}")
            c = _rat(coef)
            if c != 0:
                s[exp] = c
        self.s_cl = s

    @classmethod
    def single_variable(cls, coeffs) -> "Potential":
        """Potential in one variable from {degree: coefficient}."""
        return cls(1, {(d,): c for d, c in coeffs.items()})

    @classmethod
    def a_k(cls, k: int) -> "Potential":
        """The A_k singularity x^(k+1)/(k+1) in one variable."""
        return cls.single_variable({k + 1: Fraction(1, k + 1)})

    def jacobian(self) -> list:
        """dS/dx_i as exponent-dict polynomials, one per variable."""
        gens = []
        for i in range(self.n_vars):
            g = {}
            for exp, c in self.s_cl.items():
                if exp[i] == 0:
                    continue
                de = list(exp)
                de[i] -= 1
                g[tuple(de)] = g.get(tuple(de), Fraction(0)) + c * exp[i]
            gens.append({e: c for e, c in g.items() if c != 0})
        return gens

    def __repr__(self):
        return f"Potential(n_vars={self.n_vars}, terms={self.s_cl})"


def _eta_normalize(etas):
    """Sort an eta-index sequence; return (sorted tuple, sign) or sign 0."""
    lst = list(etas)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(lst)):
        if lst[i - 1] == lst[i]:
            return tuple(lst), 0
    return tuple(lst), sign


class PolyElement:
    """Sparse element of C; terms map (x-exponents, eta-index set) to HPoly."""

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms=None):
        self.n_vars = n_vars
        self.terms = {}
        if terms:
            for (exp, etas), coef in terms.items():
                self._add_term(tuple(exp), tuple(etas), coef)

    def _add_term(self, exp, etas, coef):
        coef = HPoly.promote(coef)
        if coef.is_zero():
            return
        etas, sign = _eta_normalize(etas)
        if sign == 0:
            return
        if sign < 0:
            coef = -coef
        key = (exp, etas)
        cur = self.terms.get(key)
        new = coef if cur is None else cur + coef
        if new.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    # -- constructors -------------
    @classmethod
    def zero(cls, n_vars: int) -> "PolyElement":
        return cls(n_vars)

    @classmethod
    def one(cls, n_vars: int) -> "PolyElement":
        return cls(n_vars, {((0,) * n_vars, ()): 1})

    @classmethod
    def x(cls, i: int, n_vars: int, power: int = 1) -> "PolyElement":
        exp = [0] * n_vars
        exp[i] = power
        return cls(n_vars, {(tuple(exp), ()): 1})

    @classmethod
    def eta(cls, i: int, n_vars: int) -> "PolyElement":
        return cls(n_vars, {((0,) * n_vars, (i,)): 1})

    @classmethod
    def monomial(cls, n_vars: int, exp, etas=(), coef=1) -> "PolyElement":
        return cls(n_vars, {(tuple(exp), tuple(etas)): coef})

    @classmethod
    def from_x_poly(cls, poly: dict, n_vars: int) -> "PolyElement":
        """Lift an exponent-dict x-polynomial into C."""
        return cls(n_vars, {(exp, ()): c for exp, c in poly.items()})

    # -- structure queries -------------
    def is_zero(self) -> bool:
        return not self.terms

    def ghost_parts(self) -> dict:
        parts = {}
        for (exp, etas), coef in self.terms.items():
            g = -len(etas)
            parts.setdefault(g, PolyElement(self.n_vars))._add_term(exp, etas, coef)
        return parts

    def is_homogeneous(self) -> bool:
        return len({len(etas) for _, etas in self.terms}) <= 1

    def ghost(self) -> int:
        """Ghost number of a homogeneous element (0 for the zero element)."""
        gs = {-len(etas) for _, etas in self.terms}
        if not gs:
            return 0
        if len(gs) > 1:
            raise ValueError("element is not homogeneous")
        return gs.pop()

    def x_degree(self) -> int:
        return max((sum(exp) for exp, _ in self.terms), default=0)

    def classical_part(self, j: int) -> "PolyElement":
        """Coefficient of h^j, as an h-independent element."""
        out = PolyElement(self.n_vars)
        for (exp, etas), coef in self.terms.items():
            c = coef.coeff(j)
            if c != 0:
                out._add_term(exp, etas, HPoly.const(c))
        return out

    def h_degree(self) -> int:
        return max((coef.degree() for coef in self.terms.values()), default=-1)

    def ghost_zero_x_poly(self) -> dict:
        """The eta-free part as {exponent: HPoly}."""
        return {exp: coef for (exp, etas), coef in self.terms.items() if not etas}

    # -- linear algebra -------------
    def __add__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        out = PolyElement(self.n_vars, self.terms)
        for (exp, etas), coef in other.terms.items():
            out._add_term(exp, etas, coef)
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = PolyElement(self.n_vars)
        for (exp, etas), coef in self.terms.items():
            out.terms[(exp, etas)] = -coef
        return out

    def scale(self, coef) -> "PolyElement":
        coef = HPoly.promote(coef)
        out = PolyElement(self.n_vars)
        for (exp, etas), c in self.terms.items():
            out._add_term(exp, etas, c * coef)
        return out

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, HPoly)):
            return self.scale(other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, HPoly)):
            return self.scale(other)
        if not isinstance(other, PolyElement):
            return NotImplemented
        out = PolyElement(self.n_vars)
        for (e1, t1), c1 in self.terms.items():
            for (e2, t2), c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                out._add_term(exp, t1 + t2, c1 * c2)
        return out

    def __eq__(self, other):
        if not isinstance(other, PolyElement):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        zero = HPoly.zero()
        return all(
            self.terms.get(k, zero) == other.terms.get(k, zero) for k in keys
        )

    def __hash__(self):
        return hash(frozenset((k, hash(v)) for k, v in self.terms.items()))

    # -- graded operators -------------
    def J(self) -> "PolyElement":
        """The parity twist J v = (-1)^{gh(v)} v."""
        out = PolyElement(self.n_vars)
        for (exp, etas), coef in self.terms.items():
            out.terms[(exp, etas)] = -coef if len(etas) % 2 else coef
        return out

    def h_divide(self, k: int) -> "PolyElement":
        out = PolyElement(self.n_vars)
        for (exp, etas), coef in self.terms.items():
            out.terms[(exp, etas)] = coef.h_divide(k)
        return out

    def cap_trunc(self, t: int) -> "PolyElement":
        out = PolyElement(self.n_vars)
        for (exp, etas), coef in self.terms.items():
            capped = coef.cap(t)
            if not capped.is_zero():
                out.terms[(exp, etas)] = capped
        return out

    def neg_h_divide(self, k: int) -> "PolyElement":
        out = self.h_divide(k)
        return out if k % 2 == 0 else -out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (exp, etas), coef in self.sorted_terms():
            mono = []
            for i, e in enumerate(exp):
                if e == 1:
                    mono.append(f"x{i}" if self.n_vars > 1 else "x")
                elif e > 1:
                    mono.append(f"x{i}^{e}" if self.n_vars > 1 else f"x^{e}")
            for i in etas:
                mono.append(f"eta{i}" if self.n_vars > 1 else "eta")
            ms = "*".join(mono) if mono else "1"
            cs = str(coef)
            if cs == "1":
                bits.append(ms)
            elif ms == "1":
                bits.append(f"({cs})")
            else:
                bits.append(f"({cs})*{ms}")
        return " + ".join(bits)


def _eta_derivative_sign(etas, i):
    """Left derivative d/deta_i on the sorted eta word; None when absent."""
    if i not in etas:
        return None
    pos = etas.index(i)
    rest = etas[:pos] + etas[pos + 1:]
    return rest, (-1) ** pos


def delta_op(a: PolyElement) -> PolyElement:
    """The odd Laplacian: sum over i of d^2/(deta_i dx_i)."""
    out = PolyElement(a.n_vars)
    for (exp, etas), coef in a.terms.items():
        for i in etas:
            if exp[i] == 0:
                continue
            rest, sgn = _eta_derivative_sign(etas, i)
            de = list(exp)
            de[i] -= 1
            out._add_term(tuple(de), rest, coef * Fraction(sgn * exp[i]))
    return out


def classical_K(pot: Potential, a: PolyElement) -> PolyElement:
    """K = sum_i (dS/dx_i) d/deta_i."""
    gens = pot.jacobian()
    out = PolyElement(a.n_vars)
    for (exp, etas), coef in a.terms.items():
        for i in etas:
            rest, sgn = _eta_derivative_sign(etas, i)
            for gexp, gc in gens[i].items():
                nexp = tuple(x + y for x, y in zip(exp, gexp))
                out._add_term(nexp, rest, coef * Fraction(sgn) * gc)
    return out


def quantum_K(pot: Potential, a: PolyElement) -> PolyElement:
    """Khat = K - h*Delta."""
    return classical_K(pot, a) - delta_op(a).scale(HPoly.h())


def bv_bracket(a: PolyElement, b: PolyElement) -> PolyElement:
    """(a, b)_BV = Delta(ab) - Delta(a) b - Ja Delta(b); a must be homogeneous."""
    if not a.is_homogeneous():
        raise ValueError("first bracket argument must be homogeneous")
    return delta_op(a * b) - delta_op(a) * b - a.J() * delta_op(b)


class DescendantFamily:
    """The descendant brackets ell_n of a square-zero differential on C.

    ell_1 is the differential (Khat of the potential unless another
    square-zero pointed differential is supplied); higher ell_n are defined
    by the partition recursion and an exact division by (-h)^(n-1).  Values
    on monomial tuples are memoized on canonical order; general inputs
    expand by multilinearity.
    """

    def __init__(
        self,
        pot: Potential,
        arity_cap: int = DEFAULT_POLY_ARITY_CAP,
        differential=None,
    ):
        self.pot = pot
        self.arity_cap = arity_cap
        self._K = differential if differential is not None else (
            lambda a: quantum_K(pot, a)
        )
        self._memo = {}

    def ell(self, n: int, args) -> PolyElement:
        args = list(args)
        if len(args) != n:
            raise ValueError("arity mismatch")
        if n > self.arity_cap:
            raise ArityCapError(f"arity {n} exceeds cap {self.arity_cap}")
        if n == 1:
            return self._K(args[0])
        for a in args:
            if not a.is_homogeneous():
                raise ValueError("descendant arguments must be homogeneous")
        nv = self.pot.n_vars
        out = PolyElement.zero(nv)
        # multilinear expansion into monomials
        for combo, coef in _monomial_combos(args):
            val = self._ell_monomials(n, combo)
            out = out + val.scale(coef)
        return out

    def _ell_monomials(self, n: int, monos) -> PolyElement:
        # canonical order with Koszul sign so permuted calls share the memo
        from .partitions import sort_sign

        canon, csign = sort_sign(monos, [-len(m[1]) for m in monos])
        if csign == 0:
            return PolyElement.zero(self.pot.n_vars)
        if csign < 0:
            return -self._ell_monomials(n, canon)
        monos = canon
        key = (n, monos)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        nv = self.pot.n_vars
        elems = [PolyElement(nv, {m: 1}) for m in monos]
        degs = [-len(m[1]) for m in monos]
        prod = elems[0]
        for e in elems[1:]:
            prod = prod * e
        acc = self._K(prod)
        for p in set_partitions(n, cap=max(n, 7)):
            if len(p) == 1:
                continue
            eps = koszul_sign(p, degs)
            for i, block in distinguished_blocks(p, n):
                inner = self.ell(len(block), [elems[j - 1] for j in block])
                term = None
                for bi, b in enumerate(p):
                    if bi == i:
                        factor = inner
                    else:
                        e = elems[b[0] - 1]
                        factor = e.J() if bi < i else e
                    term = factor if term is None else term * factor
                w = HPoly.h(n - len(p))
                if (n - len(p)) % 2:
                    w = -w
                acc = acc - term.scale(w * Fraction(eps))
        try:
            val = acc.neg_h_divide(n - 1)
        except NotDivisibleError as e:
            raise NotDivisibleError(
                e.offending_exponent,
                f"descendant recursion not h-divisible at arity {n}: "
                "the algebra is not a binary QFT algebra",
            ) from e
        self._memo[key] = val
        return val


def _monomial_combos(args):
    """Expand a tuple of elements into (monomial-tuple, coefficient) pairs."""
    combos = [((), HPoly.const(1))]
    for a in args:
        nxt = []
        for key, coef in combos:
            for mono, c in a.terms.items():
                nxt.append((key + (mono,), coef * c))
        combos = nxt
    return combos
