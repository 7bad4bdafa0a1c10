"""Finite-basis sL-infinity structures, morphisms, and their verification.

Structures are tables of structure constants over a graded basis; the
relations are checked two independent ways: directly (partition sums) and
through the square of the bar-construction coderivation.  Morphism-side
machinery covers descendants of pointed cochain maps, composition,
correlators, the moment/cumulant identity, and minimal-model transfer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .hspace import HVector, SymMap, tuples_with_repetition
from .partitions import (
    distinguished_blocks,
    koszul_sign,
    set_partitions,
    sort_sign,
)
from .polyalg import PolyElement
from .scalars import HPoly, NotDivisibleError


@dataclass(frozen=True)
class GradedBasisElement:
    label: str
    ghost: int


def _block_J_sign(block, ghosts_of) -> int:
    s = 1
    for j in block:
        if ghosts_of(j) % 2:
            s = -s
    return s


class SLInfStructure:
    """Unital sL-infinity structure constants over a finite graded basis."""

    def __init__(self, basis, ops=None, unit: int | None = None):
        self.basis = list(basis)
        self.ghosts = [b.ghost for b in self.basis]
        self.ops = {}
        if ops:
            for n, table in ops.items():
                for idxs, value in table.items():
                    self.set_op(n, idxs, value)
        self.unit = unit

    def set_op(self, n: int, idxs, value: HVector) -> None:
        idxs = tuple(idxs)
        if len(idxs) != n:
            raise ValueError("arity mismatch")
        want = sum(self.ghosts[i] for i in idxs) + 1
        for k, coef in value.c.items():
            if not coef.is_zero() and self.ghosts[k] != want:
                raise ValueError(
                    f"structure constant at {idxs} lands in ghost "
                    f"{self.ghosts[k]}, expected {want}"
                )
        table = self.ops.setdefault(n, SymMap(n, self.ghosts, HVector.zero()))
        table.set(idxs, value)

    def op(self, idxs) -> HVector:
        n = len(idxs)
        table = self.ops.get(n)
        if table is None:
            return HVector.zero()
        return table.get(tuple(idxs))

    def op_on_vectors(self, args) -> HVector:
        """Evaluate the bracket multilinearly on HVector / index arguments."""
        vecs = [a if isinstance(a, HVector) else HVector.basis(a) for a in args]
        out = HVector.zero()
        combos = [((), HPoly.const(1))]
        for v in vecs:
            combos = [
                (key + (i,), coef * c)
                for key, coef in combos
                for i, c in v.c.items()
            ]
        for key, coef in combos:
            out = out + self.op(key).scale(coef)
        return out

    def relation_residual(self, idxs) -> HVector:
        """The arity-n Jacobi-type sum on a basis tuple; zero iff satisfied."""
        n = len(idxs)
        degs = [self.ghosts[i] for i in idxs]
        acc = HVector.zero()
        for p in set_partitions(n):
            eps = koszul_sign(p, degs)
            for i, block in distinguished_blocks(p, n):
                inner = self.op(tuple(idxs[j - 1] for j in block))
                if inner.is_zero():
                    continue
                jsign = 1
                outer_args = []
                for bi, b in enumerate(p):
                    if bi == i:
                        outer_args.append(inner)
                    else:
                        if bi < i:
                            jsign *= _block_J_sign(
                                b, lambda j: degs[j - 1]
                            )
                        outer_args.append(idxs[b[0] - 1])
                val = self.op_on_vectors(outer_args)
                acc = acc + val.scale(Fraction(eps * jsign))
        return acc


@dataclass
class Violation:
    arity: int
    where: tuple
    residual: object
    kind: str = "relation"


@dataclass
class Report:
    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def first_failure_arity(self, kind: str | None = None):
        for v in self.violations:
            if kind is None or v.kind == kind:
                return v.arity
        return None

    def has_kind(self, kind: str) -> bool:
        return any(v.kind == kind for v in self.violations)

    def add(self, arity, where, residual, kind: str = "relation") -> None:
        self.violations.append(Violation(arity, where, residual, kind))

    def __repr__(self):
        status = "pass" if self.ok else f"{len(self.violations)} violations"
        return f"Report({self.checks} checks, {status})"


def verify_sl_infinity(S: SLInfStructure, n_max: int) -> Report:
    """Check every relation instance on basis tuples up to arity n_max."""
    rep = Report()
    dim = len(S.basis)
    for n in range(1, n_max + 1):
        for idxs in tuples_with_repetition(dim, n):
            if any(
                S.ghosts[i] % 2 and idxs.count(i) > 1 for i in idxs
            ):
                continue  # repeated odd element: the symmetric word vanishes
            rep.checks += 1
            res = S.relation_residual(idxs)
            if not res.is_zero():
                rep.add(n, idxs, res)
        if S.unit is not None:
            for idxs in tuples_with_repetition(dim, n - 1) if n > 1 else [()]:
                rep.checks += 1
                val = S.op(tuple(idxs) + (S.unit,))
                if not val.is_zero():
                    rep.add(n, tuple(idxs) + (S.unit,), val, kind="unit")
    rep.violations.sort(key=lambda v: (v.arity, v.where))
    return rep


# -- bar construction oracle -------------


def _word_canon(idxs, ghosts):
    return sort_sign(tuple(idxs), [ghosts[i] for i in idxs])


class _WordSum:
    """Finite sum of symmetric words with HPoly coefficients."""

    def __init__(self, ghosts):
        self.ghosts = ghosts
        self.c = {}

    def add(self, idxs, coef) -> None:
        coef = HPoly.promote(coef)
        if coef.is_zero():
            return
        key, sign = _word_canon(idxs, self.ghosts)
        if sign == 0:
            return
        if sign < 0:
            coef = -coef
        cur = self.c.get(key)
        new = coef if cur is None else cur + coef
        if new.is_zero():
            self.c.pop(key, None)
        else:
            self.c[key] = new

    def is_zero(self) -> bool:
        return not self.c


def _delta_on_word(S: SLInfStructure, idxs) -> _WordSum:
    """The coderivation of the descendant weights on one symmetric word."""
    n = len(idxs)
    degs = [S.ghosts[i] for i in idxs]
    out = _WordSum(S.ghosts)
    for p in set_partitions(n):
        eps = koszul_sign(p, degs)
        for i, block in distinguished_blocks(p, n):
            inner = S.op(tuple(idxs[j - 1] for j in block))
            if inner.is_zero():
                continue
            w = HPoly.h(n - len(p))
            if (n - len(p)) % 2:
                w = -w
            jsign = 1
            rest = []
            for bi, b in enumerate(p):
                if bi == i:
                    continue
                if bi < i:
                    jsign *= _block_J_sign(b, lambda j: degs[j - 1])
                rest.append((bi, idxs[b[0] - 1]))
            for k, coef in inner.c.items():
                word = []
                for bi, b in enumerate(p):
                    if bi == i:
                        word.append(k)
                    else:
                        word.append(idxs[b[0] - 1])
                out.add(tuple(word), coef * w * Fraction(eps * jsign))
    return out


def coderivation_square(S: SLInfStructure, n_max: int) -> Report:
    """Check that the bar coderivation squares to zero on words up to n_max."""
    rep = Report()
    dim = len(S.basis)
    for n in range(1, n_max + 1):
        for idxs in tuples_with_repetition(dim, n):
            key, sign = _word_canon(idxs, S.ghosts)
            if sign == 0:
                continue
            rep.checks += 1
            first = _delta_on_word(S, key)
            total = _WordSum(S.ghosts)
            for word, coef in first.c.items():
                second = _delta_on_word(S, word)
                for w2, c2 in second.c.items():
                    total.add(w2, coef * c2)
            if not total.is_zero():
                rep.add(n, key, total.c)
    rep.violations.sort(key=lambda v: (v.arity, v.where))
    return rep


# -- morphisms -------------


class EvalMorphism:
    """sL-infinity morphism given by evaluation procedures with memoization.

    `components[n]` maps a tuple of source elements to a target element;
    when only component 1 is given, higher components are produced by a
    descendant recursion (see `descendant_morphism`).
    """

    def __init__(self, components):
        self.components = components

    def ev(self, args) -> object:
        n = len(args)
        comp = self.components.get(n)
        if comp is None:
            return None
        return comp(tuple(args))

    @classmethod
    def identity(cls, max_arity: int = 8) -> "EvalMorphism":
        comps = {1: lambda args: args[0]}
        return cls(comps)


@dataclass
class DescendantResult:
    ok: bool
    morphism: object = None
    failure_arity: int | None = None
    residue: object = None


class DescendantDivisibilityError(NotDivisibleError):
    """The descendant recursion produced a residue not divisible by h.

    The map is a pointed cochain map but not a morphism of the quantum
    algebras; `residue` holds the undivided combination at `arity`.
    """

    def __init__(self, arity: int, residue, cause: NotDivisibleError):
        self.arity = arity
        self.residue = residue
        super().__init__(
            cause.offending_exponent,
            f"descendant recursion not h-divisible at arity {arity}",
        )


class TargetAlgebra:
    """Product data of the target of a pointed cochain map."""

    def __init__(self, unit, product, is_zero, zero):
        self.unit = unit
        self.product = product
        self.is_zero = is_zero
        self.zero = zero


def scalar_target() -> TargetAlgebra:
    return TargetAlgebra(
        unit=HPoly.const(1),
        product=lambda a, b: a * b,
        is_zero=lambda a: a.is_zero(),
        zero=HPoly.zero(),
    )


def poly_target(n_vars: int) -> TargetAlgebra:
    return TargetAlgebra(
        unit=PolyElement.one(n_vars),
        product=lambda a, b: a * b,
        is_zero=lambda a: a.is_zero(),
        zero=PolyElement.zero(n_vars),
    )


def descendant_morphism(
    F,
    pot,
    target: TargetAlgebra,
    n_max: int,
    precheck_span=None,
    target_K=None,
) -> DescendantResult:
    """Quantum descendant of a pointed cochain map out of the BV algebra.

    F maps PolyElement to the target; it must satisfy F(1) = 1' and
    intertwine the differentials (checked on `precheck_span` if given).
    Returns the family psi or the first arity where h-divisibility fails.
    """
    from .polyalg import quantum_K

    nv = pot.n_vars
    one = PolyElement.one(nv)
    if F(one) != target.unit:
        raise ValueError("not pointed: F(1) != 1'")
    if precheck_span is not None:
        for m in precheck_span:
            lhs = F(quantum_K(pot, m))
            rhs = target_K(F(m)) if target_K is not None else target.zero
            if lhs != rhs:
                raise ValueError("not a cochain map: F Khat != Khat' F")

    memo = {}

    def psi_mono(n, monos):
        key = (n, monos)
        hit = memo.get(key)
        if hit is not None:
            return hit
        elems = [PolyElement(nv, {m: 1}) for m in monos]
        degs = [-len(m[1]) for m in monos]
        prod = elems[0]
        for e in elems[1:]:
            prod = prod * e
        acc = F(prod)
        if n > 1:
            for p in set_partitions(n):
                if len(p) == 1:
                    continue
                eps = koszul_sign(p, degs)
                w = HPoly.h(n - len(p))
                if (n - len(p)) % 2:
                    w = -w
                term = None
                for b in p:
                    v = psi(len(b), [elems[j - 1] for j in b])
                    term = v if term is None else target.product(term, v)
                acc = acc - _scale_target(term, w * Fraction(eps))
            try:
                acc = _neg_h_divide_target(acc, n - 1)
            except DescendantDivisibilityError:
                raise
            except NotDivisibleError as e:
                raise DescendantDivisibilityError(n, acc, e) from e
        memo[key] = acc
        return acc

    def psi(n, args):
        acc = target.zero
        combos = [((), HPoly.const(1))]
        for a in args:
            combos = [
                (key + (m,), coef * c)
                for key, coef in combos
                for m, c in a.terms.items()
            ]
        for monos, coef in combos:
            acc = acc + _scale_target(psi_mono(n, monos), coef)
        return acc

    # divisibility failures surface lazily at evaluation time; callers probe
    # arities through the returned morphism (see `probe_descendant`)
    components = {
        n: (lambda nn: (lambda args: psi(nn, list(args))))(n)
        for n in range(1, n_max + 1)
    }
    return DescendantResult(ok=True, morphism=EvalMorphism(components))


def probe_descendant(result: DescendantResult, probes) -> DescendantResult:
    """Evaluate a descendant morphism on probe tuples, catching h-failures.

    probes: iterable of tuples of homogeneous PolyElements, in increasing
    arity; the first failing arity (the arity of the inner recursion step
    that broke, which probing in increasing arity makes deterministic) is
    reported together with the undivided residue.
    """
    if not result.ok:
        return result
    for args in probes:
        try:
            result.morphism.ev(args)
        except DescendantDivisibilityError as e:
            return DescendantResult(
                ok=False, failure_arity=e.arity, residue=e.residue
            )
        except NotDivisibleError as e:
            return DescendantResult(
                ok=False, failure_arity=len(args), residue=e
            )
    return result


def _scale_target(v, coef: HPoly):
    if isinstance(v, HPoly):
        return v * coef
    return v.scale(coef)


def _neg_h_divide_target(v, k: int):
    return v.neg_h_divide(k)


def compose_morphisms(outer, inner, ghosts_of_source):
    """Partition-sum composition (outer after inner) of sL-infinity morphisms.

    Both morphisms are evaluation-based; the composite evaluates on tuples
    of the inner morphism's source elements.
    """

    def comp(n):
        def ev_n(args):
            degs = [_ghost_of(a, ghosts_of_source) for a in args]
            acc = None
            for p in set_partitions(n):
                eps = koszul_sign(p, degs)
                vals = [inner.ev(tuple(args[j - 1] for j in b)) for b in p]
                v = outer.ev(tuple(vals))
                if v is None:
                    continue
                v = _scale_target(v, HPoly.const(eps))
                acc = v if acc is None else acc + v
            return acc

        return ev_n

    return EvalMorphism({n: comp(n) for n in range(1, 9)})


def _ghost_of(a, ghosts_of_source):
    if ghosts_of_source is not None:
        return ghosts_of_source(a)
    if isinstance(a, PolyElement):
        return a.ghost()
    return 0


class CorrelatorClosureError(RuntimeError):
    """A correlator value is not annihilated by the differential."""


def correlators(phi_ev, ghosts, n_max: int, n_vars: int, K_check=None):
    """Quantum correlators of a family phi into the BV algebra.

    phi_ev(idxs) returns the PolyElement value on a basis tuple.  Returns
    {n: SymMap of PolyElement} with
    Pi_n = sum over partitions of (-h)^(n-|p|) eps(p) prod phi(blocks).
    When K_check is given, every value is checked to be K_check-closed;
    a failure means phi is not a morphism.
    """
    out = {}
    dim = len(ghosts)
    for n in range(1, n_max + 1):
        table = SymMap(n, ghosts, PolyElement.zero(n_vars))
        for key in tuples_with_repetition(dim, n):
            degs = [ghosts[i] for i in key]
            acc = PolyElement.zero(n_vars)
            for p in set_partitions(n):
                eps = koszul_sign(p, degs)
                w = HPoly.h(n - len(p))
                if (n - len(p)) % 2:
                    w = -w
                term = None
                for b in p:
                    v = phi_ev(tuple(key[j - 1] for j in b))
                    term = v if term is None else term * v
                acc = acc + term.scale(w * Fraction(eps))
            if K_check is not None and not K_check(acc).is_zero():
                raise CorrelatorClosureError(
                    f"correlator at arity {n}, {key} is not closed"
                )
            table.set(key, acc)
        out[n] = table
    return out


def moment_cumulant_report(expect, chi_on_H, ghosts, correlator_tables, n_max: int) -> Report:
    """Verify the partition identity between quantum moments and cumulants.

    expect(c) is the expectation on C; chi_on_H(idxs) the cumulant value on
    basis tuples (an HPoly); correlator_tables as from `correlators`.
    """
    rep = Report()
    dim = len(ghosts)
    for n in range(1, n_max + 1):
        for key in tuples_with_repetition(dim, n):
            rep.checks += 1
            mu = expect(correlator_tables[n].get(key))
            degs = [ghosts[i] for i in key]
            acc = HPoly.zero()
            for p in set_partitions(n):
                eps = koszul_sign(p, degs)
                w = HPoly.h(n - len(p))
                if (n - len(p)) % 2:
                    w = -w
                term = HPoly.const(1)
                for b in p:
                    term = term * chi_on_H(tuple(key[j - 1] for j in b))
                acc = acc + term * w * Fraction(eps)
            if mu != acc:
                rep.add(n, key, mu - acc)
    return rep


class Expectation:
    """A quantum expectation built canonically as iota . hhat.

    iota_coeffs lists one exact coefficient per H-basis element with
    iota(1_H) = 1; the rule sends c to iota(hhat(c)).  Pointedness and the
    cochain property are verified on a spanning monomial set at build time.
    Whether the rule is additionally a morphism of the full quantum algebras
    (a "strong" expectation) is not assumed; probe its descendant instead.
    """

    def __init__(self, q, iota_coeffs, span=None):
        from fractions import Fraction as _F

        self.q = q
        self.iota = [HPoly.promote(c) for c in iota_coeffs]
        if len(self.iota) != q.dim:
            raise ValueError("iota must list one value per basis element")
        if self.iota[0] != HPoly.const(_F(1)):
            raise ValueError("iota(1_H) must be 1")
        self.construction = "iota . hhat"
        if span is not None:
            one = PolyElement.one(q.n_vars)
            if self(one) != HPoly.const(1):
                raise ValueError("expectation not pointed")
            for m in span:
                if not self(q.Khat(m)).is_zero():
                    raise ValueError("expectation does not annihilate Khat")

    def apply_iota(self, v: HVector) -> HPoly:
        acc = HPoly.zero()
        for i, coef in v.c.items():
            acc = acc + self.iota[i] * coef
        return acc

    def __call__(self, c: PolyElement) -> HPoly:
        return self.apply_iota(self.q.hhat(c))


# -- minimal model transfer -------------


class RetractAxiomError(ValueError):
    """The supplied transfer data violates a retract axiom."""


def minimal_model(ell_eval, retract_f, retract_h, retract_s, ghosts, n_max: int):
    """Homotopy transfer of an sL-infinity structure to its cohomology.

    ell_eval(args) evaluates the source brackets on source elements;
    retract_f maps basis index -> source element, retract_h source -> HVector,
    retract_s source -> source.  Returns (lhat, phi) where lhat[n] and phi[n]
    are SymMaps on H-tuples (lhat HVector-valued, phi source-valued).
    """
    dim = len(ghosts)
    for i in range(dim):
        fi = retract_f(i)
        if retract_h(fi) != HVector.basis(i):
            raise RetractAxiomError("h . f is not the identity")
        if not retract_s(fi).is_zero():
            raise RetractAxiomError("side condition s f = 0 fails")
        if not retract_h(retract_s(fi)).is_zero():
            raise RetractAxiomError("side condition h s = 0 fails")
    phi = {1: None}
    lhat = {}

    def phi_block(idxs):
        n = len(idxs)
        if n == 1:
            return retract_f(idxs[0])
        return phi[n].get(tuple(idxs))

    def lhat_block(idxs):
        n = len(idxs)
        if n == 1:
            return HVector.zero()
        return lhat[n].get(tuple(idxs))

    zero_src = retract_s(retract_f(0))  # a zero-shaped source element
    zero_src = zero_src - zero_src

    for n in range(2, n_max + 1):
        Ln = SymMap(n, ghosts, zero_src)
        for key in tuples_with_repetition(dim, n):
            degs = [ghosts[i] for i in key]
            acc = zero_src
            for p in set_partitions(n):
                eps = koszul_sign(p, degs)
                if len(p) != 1:
                    vals = [phi_block(tuple(key[j - 1] for j in b)) for b in p]
                    acc = acc + _scale_target(
                        ell_eval(tuple(vals)), HPoly.const(eps)
                    )
                if len(p) not in (1, n):
                    for i, block in distinguished_blocks(p, n):
                        inner = lhat_block(tuple(key[j - 1] for j in block))
                        if inner.is_zero():
                            continue
                        jsign = 1
                        for bi, b in enumerate(p):
                            if bi < i:
                                jsign *= _block_J_sign(b, lambda j: degs[j - 1])
                        for k, coef in inner.c.items():
                            args = []
                            for bi, b in enumerate(p):
                                args.append(k if bi == i else key[b[0] - 1])
                            skey, ssign = sort_sign(
                                tuple(args), [ghosts[a] for a in args]
                            )
                            if ssign == 0:
                                continue
                            val = phi_block(skey)
                            acc = acc - _scale_target(
                                val, coef * Fraction(eps * jsign * ssign)
                            )
            Ln.set(key, acc)
        ln_table = SymMap(n, ghosts, HVector.zero())
        phin_table = SymMap(n, ghosts, zero_src)
        for key in Ln.keys():
            ln_table.set(key, retract_h(Ln.get(key)))
            phin_table.set(key, -retract_s(Ln.get(key)))
        lhat[n] = ln_table
        phi[n] = phin_table
    return lhat, phi
