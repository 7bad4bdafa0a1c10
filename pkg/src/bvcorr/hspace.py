"""Vectors over a finite cohomology basis and symmetric operator families.

HVector is a sparse vector with HPoly coordinates.  SymMap stores a
graded-symmetric multilinear map on basis tuples (values in C or in H);
PairSymMap stores maps on S^(n-2)H (x) S^2H, the carrier shape of the
level-one families.  Keys are kept sorted; lookups on unsorted tuples
canonicalize with the Koszul sign.
"""

from __future__ import annotations

from fractions import Fraction

from .partitions import sort_sign
from .scalars import HPoly


class HVector:
    """Sparse element of H[[h]] over a fixed basis index set."""

    __slots__ = ("c",)

    def __init__(self, coords=None):
        self.c = {}
        if coords:
            for i, v in coords.items():
                v = HPoly.promote(v)
                if not v.is_zero():
                    self.c[i] = v

    @classmethod
    def basis(cls, i: int) -> "HVector":
        return cls({i: 1})

    @classmethod
    def zero(cls) -> "HVector":
        return cls()

    def coeff(self, i: int) -> HPoly:
        return self.c.get(i, HPoly.zero())

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.c.values())

    def __add__(self, other):
        out = HVector(self.c)
        for i, v in other.c.items():
            w = out.c.get(i)
            w = v if w is None else w + v
            if w.is_zero():
                out.c.pop(i, None)
            else:
                out.c[i] = w
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return HVector({i: -v for i, v in self.c.items()})

    def scale(self, coef) -> "HVector":
        coef = HPoly.promote(coef)
        return HVector({i: v * coef for i, v in self.c.items()})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, HPoly)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, HVector):
            return NotImplemented
        keys = set(self.c) | set(other.c)
        z = HPoly.zero()
        return all(self.c.get(k, z) == other.c.get(k, z) for k in keys)

    def __hash__(self):
        return hash(frozenset((k, hash(v)) for k, v in self.c.items()))

    def classical_part(self, j: int) -> "HVector":
        return HVector(
            {i: HPoly.const(v.coeff(j)) for i, v in self.c.items() if v.coeff(j) != 0}
        )

    def cap_trunc(self, t: int) -> "HVector":
        return HVector({i: v.cap(t) for i, v in self.c.items()})

    def h_degree(self) -> int:
        return max((v.degree() for v in self.c.values()), default=-1)

    def neg_h_divide(self, k: int) -> "HVector":
        return HVector({i: v.neg_h_divide(k) for i, v in self.c.items()})

    def sorted_items(self):
        return sorted(self.c.items())

    def __repr__(self):
        if not self.c:
            return "0"
        return " + ".join(f"({v})*e{i}" for i, v in self.sorted_items())


class SymMap:
    """Graded-symmetric n-ary map on basis tuples of H.

    `ghosts[i]` is the ghost number of basis element i; values live in a
    module with +, unary -, and .scale (PolyElement or HVector).
    """

    def __init__(self, arity: int, ghosts, zero_value):
        self.arity = arity
        self.ghosts = ghosts
        self.zero_value = zero_value
        self.values = {}

    def canon(self, idxs):
        degs = [self.ghosts[i] for i in idxs]
        return sort_sign(tuple(idxs), degs)

    def set(self, idxs, value) -> None:
        key, sign = self.canon(idxs)
        if sign == 0:
            return
        self.values[key] = value if sign > 0 else -value

    def get(self, idxs):
        key, sign = self.canon(idxs)
        if sign == 0:
            return self.zero_value
        v = self.values.get(key)
        if v is None:
            return self.zero_value
        return v if sign > 0 else -v

    def keys(self):
        return sorted(self.values)

    def map_values(self, fn) -> "SymMap":
        out = SymMap(self.arity, self.ghosts, fn(self.zero_value))
        for k, v in self.values.items():
            out.values[k] = fn(v)
        return out

    def classical_part(self, j: int) -> "SymMap":
        return self.map_values(lambda v: v.classical_part(j))

    def add(self, other: "SymMap") -> "SymMap":
        out = SymMap(self.arity, self.ghosts, self.zero_value)
        for k in set(self.values) | set(other.values):
            out.values[k] = self.get(k) + other.get(k)
        return out

    def h_degree(self) -> int:
        return max((v.h_degree() for v in self.values.values()), default=-1)


class PairSymMap:
    """Map on S^(n-2)H (x) S^2H: symmetric in the front block and in the pair."""

    def __init__(self, arity: int, ghosts, zero_value):
        if arity < 2:
            raise ValueError("pair-tagged maps need arity >= 2")
        self.arity = arity
        self.ghosts = ghosts
        self.zero_value = zero_value
        self.values = {}

    def canon(self, front, pair):
        fkey, fsign = sort_sign(tuple(front), [self.ghosts[i] for i in front])
        pkey, psign = sort_sign(tuple(pair), [self.ghosts[i] for i in pair])
        return (fkey, pkey), fsign * psign

    def set(self, front, pair, value) -> None:
        key, sign = self.canon(front, pair)
        if sign == 0:
            return
        self.values[key] = value if sign > 0 else -value

    def get(self, front, pair):
        key, sign = self.canon(front, pair)
        if sign == 0:
            return self.zero_value
        v = self.values.get(key)
        if v is None:
            return self.zero_value
        return v if sign > 0 else -v

    def keys(self):
        return sorted(self.values)

    def map_values(self, fn) -> "PairSymMap":
        out = PairSymMap(self.arity, self.ghosts, fn(self.zero_value))
        for k, v in self.values.items():
            out.values[k] = fn(v)
        return out

    def classical_part(self, j: int) -> "PairSymMap":
        return self.map_values(lambda v: v.classical_part(j))

    def h_degree(self) -> int:
        return max((v.h_degree() for v in self.values.values()), default=-1)


def tuples_with_repetition(num_basis: int, arity: int):
    """All ascending index tuples (multisets) of the given arity."""
    out = []

    def rec(prefix, start):
        if len(prefix) == arity:
            out.append(tuple(prefix))
            return
        for i in range(start, num_basis):
            rec(prefix + [i], i)

    rec([], 0)
    return out
