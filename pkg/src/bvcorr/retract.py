"""Off-to-on-shell retracts of the polynomial BV complex and their quantization.

The classical retract (f, h, s) splits C into the Milnor ring H plus an
acyclic piece, with the side conditions s s = s f = h s = 0.  Quantization
produces corrections order by order in h together with the anomaly kappa;
for potentials whose chosen representatives are killed by Delta the anomaly
vanishes identically.  The operator `nabla` implements division of
symmetric-map families by (-h) up to homotopy correction terms.
"""

from __future__ import annotations

from fractions import Fraction

from .groebner import MilnorData, p_is_zero
from .hspace import HVector, PairSymMap, SymMap
from .polyalg import PolyElement, classical_K, delta_op, quantum_K
from .scalars import HPoly, h_order


class RetractError(RuntimeError):
    """A retract identity failed verification."""


DEFAULT_SPAN_DEGREE = 8


def spanning_monomials(n_vars: int, x_degree: int, eta_count: int | None = None):
    """Monomials of C with bounded x-degree: the operator-identity test set."""
    if eta_count is None:
        eta_count = n_vars
    exps = []

    def rec(prefix, left):
        if len(prefix) == n_vars:
            exps.append(tuple(prefix))
            return
        for k in range(left + 1):
            rec(prefix + [k], left - k)

    rec([], x_degree)
    etasets = [()]
    for i in range(n_vars):
        etasets = etasets + [t + (i,) for t in etasets if len(t) < eta_count and (not t or t[-1] < i)]
    out = []
    for exp in sorted(exps):
        for etas in sorted(etasets, key=lambda t: (len(t), t)):
            out.append(PolyElement.monomial(n_vars, exp, etas))
    return out


class Retract:
    """Classical off-to-on-shell retract (f, h, s) over a Milnor basis."""

    def __init__(self, milnor: MilnorData, verify: bool = True, span_degree: int = DEFAULT_SPAN_DEGREE):
        self.milnor = milnor
        self.pot = milnor.pot
        self.n_vars = milnor.n_vars
        self.dim = milnor.dimension
        self.ghosts = [0] * self.dim  # Milnor ring sits in ghost number 0
        self.basis_elements = [
            PolyElement.monomial(self.n_vars, exp) for exp in milnor.basis
        ]
        if verify:
            self._verify(span_degree)

    # -- the three maps -------------
    def f(self, v: HVector) -> PolyElement:
        out = PolyElement.zero(self.n_vars)
        for i, coef in v.c.items():
            out = out + self.basis_elements[i].scale(coef)
        return out

    def h(self, c: PolyElement) -> HVector:
        out = HVector.zero()
        for exp, coef in c.ghost_zero_x_poly().items():
            nf = self.milnor.normal_form_monomial(exp)
            for i, val in self.milnor.coords(nf).items():
                out = out + HVector({i: coef * val})
        return out

    def s(self, c: PolyElement) -> PolyElement:
        out = PolyElement.zero(self.n_vars)
        for (exp, etas), coef in c.terms.items():
            if etas:
                continue  # zero on ghost < 0 (Koszul splitting for one variable)
            for i, w in enumerate(self.milnor.witness_monomial(exp)):
                if p_is_zero(w):
                    continue
                lifted = PolyElement(
                    self.n_vars, {(we, (i,)): wc for we, wc in w.items()}
                )
                out = out + lifted.scale(coef)
        return out

    def unit(self) -> HVector:
        return HVector.basis(0)

    # -- verification -------------
    def _verify(self, span_degree: int) -> None:
        mil = self.milnor
        if mil.basis[0] != (0,) * self.n_vars:
            raise RetractError("first basis element is not the unit")
        for i in range(self.dim):
            hv = self.h(self.basis_elements[i])
            if hv != HVector.basis(i):
                raise RetractError("h . f is not the identity on H")
        if not self.s(PolyElement.one(self.n_vars)).is_zero():
            raise RetractError("s(1) != 0")
        for m in spanning_monomials(self.n_vars, span_degree):
            km = classical_K(self.pot, m)
            lhs = self.f(self.h(m))
            rhs = m - classical_K(self.pot, self.s(m)) - self.s(km)
            if lhs != rhs:
                raise RetractError(
                    "homotopy identity f h = 1 - K s - s K fails; "
                    "the splitting for this potential is not a retract"
                )
            if not self.s(self.s(m)).is_zero():
                raise RetractError("side condition s s = 0 fails")
            if not self.h(self.s(m)).is_zero():
                raise RetractError("side condition h s = 0 fails")
            if not self.h(km).is_zero():
                raise RetractError("h K = 0 fails")
        for b in self.basis_elements:
            if not classical_K(self.pot, b).is_zero():
                raise RetractError("K f = 0 fails")
            if not self.s(b).is_zero():
                raise RetractError("side condition s f = 0 fails")


def build_retract(milnor: MilnorData, span_degree: int = DEFAULT_SPAN_DEGREE) -> Retract:
    return Retract(milnor, verify=True, span_degree=span_degree)


def _arg_trunc(terms) -> int:
    from .scalars import INF_TRUNC

    return min((v.trunc for v in terms), default=INF_TRUNC)


def _apply_series_poly(orders, arg: PolyElement, built_to: int) -> PolyElement:
    """Assemble sum_n h^n sum_{i+j=n} m_i(arg_j) for a C-valued series map.

    The result is a truncated series: it is known through the order the map
    was built to (further capped by the precision of the argument).
    """
    cap = min(built_to, _arg_trunc(arg.terms.values()))
    out = None
    top = min(len(orders) - 1, cap)
    for n in range(top + 1):
        mapped = orders[n]
        if mapped is None:
            continue
        for j in range(cap - n + 1):
            part = arg.classical_part(j)
            if part.is_zero():
                continue
            val = mapped(part)
            if val is None or val.is_zero():
                continue
            term = val.scale(HPoly.h(n + j)) if n + j else val
            out = term if out is None else out + term
    out = PolyElement.zero(arg.n_vars) if out is None else out
    return out.cap_trunc(cap)


def _apply_series_hvec(orders, arg: PolyElement, built_to: int) -> HVector:
    cap = min(built_to, _arg_trunc(arg.terms.values()))
    out = HVector.zero()
    top = min(len(orders) - 1, cap)
    for n in range(top + 1):
        mapped = orders[n]
        if mapped is None:
            continue
        for j in range(cap - n + 1):
            part = arg.classical_part(j)
            if part.is_zero():
                continue
            val = mapped(part)
            if val.is_zero():
                continue
            out = out + val.scale(HPoly.h(n + j))
    return out.cap_trunc(cap)


class QuantizedRetract:
    """The quantized trio (fhat, hhat, shat) plus the anomaly series kappa."""

    def __init__(self, retract: Retract, order: int | None = None, verify: bool = True):
        self.retract = retract
        self.pot = retract.pot
        self.n_vars = retract.n_vars
        self.dim = retract.dim
        self.ghosts = retract.ghosts
        self.order = h_order() if order is None else order
        self._build()
        if verify:
            self._verify()

    # K^(0) = classical K, K^(1) = -Delta, higher orders vanish for BV.
    def _K_order(self, n: int):
        if n == 0:
            return lambda c: classical_K(self.pot, c)
        if n == 1:
            return lambda c: -delta_op(c)
        return None

    def _build(self) -> None:
        r = self.retract
        N = self.order
        # f^(n) as values on the H basis; kappa^(n) as HVector per basis index
        self.f_orders = [list(r.basis_elements)]
        self.kappa_orders = [[HVector.zero() for _ in range(self.dim)]]
        for n in range(1, N + 1):
            g_vals = []
            for b in range(self.dim):
                acc = PolyElement.zero(self.n_vars)
                for j in range(n):
                    K_op = self._K_order(n - j)
                    if K_op is not None:
                        acc = acc + K_op(self.f_orders[j][b])
                for j in range(1, n):
                    kap = self.kappa_orders[j][b]
                    for i, coef in kap.c.items():
                        acc = acc + self.f_orders[n - j][i].scale(coef)
                g_vals.append(acc)
            self.kappa_orders.append([r.h(g) for g in g_vals])
            self.f_orders.append([-r.s(g) for g in g_vals])

        # h^(n) = -u^(n) . s and s^(n) as lazy compositions
        h_orders: list = [r.h]
        s_orders: list = [r.s]

        def make_u(n):
            def u(c):
                acc = HVector.zero()
                for j in range(n):
                    K_op = self._K_order(n - j)
                    if K_op is not None:
                        acc = acc + h_orders[j](K_op(c))
                for j in range(1, n):
                    hv = h_orders[n - j](c)
                    kap_mat = self.kappa_orders[j]
                    for i, coef in hv.c.items():
                        acc = acc + kap_mat[i].scale(coef)
                return acc

            return u

        def make_h(n):
            u = make_u(n)
            return lambda c: -u(r.s(c))

        def make_s(n):
            def s_n(c):
                acc = PolyElement.zero(self.n_vars)
                for j in range(n):
                    K_op = self._K_order(n - j)
                    if K_op is not None:
                        acc = acc - r.s(K_op(s_orders[j](c)))
                return acc

            return s_n

        for n in range(1, N + 1):
            h_orders.append(make_h(n))
            s_orders.append(make_s(n))
        self.h_orders = h_orders
        self.s_orders = s_orders
        self._kappa_zero = all(
            k.is_zero() for mat in self.kappa_orders for k in mat
        )
        self._kappa_basis = None
        self._f_uncorrected = all(
            v.is_zero() for row in self.f_orders[1:] for v in row
        )

    # -- assembled quantum maps -------------
    def fhat(self, v: HVector) -> PolyElement:
        if self._f_uncorrected:
            return self.retract.f(v)
        cap = min(self.order, _arg_trunc(v.c.values()))
        out = PolyElement.zero(self.n_vars)
        for n in range(cap + 1):
            for j in range(cap - n + 1):
                part = v.classical_part(j)
                if part.is_zero():
                    continue
                val = PolyElement.zero(self.n_vars)
                for i, coef in part.c.items():
                    val = val + self.f_orders[n][i].scale(coef)
                if not val.is_zero():
                    out = out + val.scale(HPoly.h(n + j))
        return out.cap_trunc(cap)

    def hhat(self, c: PolyElement) -> HVector:
        return _apply_series_hvec(self.h_orders, c, self.order)

    def shat(self, c: PolyElement) -> PolyElement:
        return _apply_series_poly(self.s_orders, c, self.order)

    def Khat(self, c: PolyElement) -> PolyElement:
        return quantum_K(self.pot, c)

    def kappa_basis(self, i: int) -> HVector:
        """The assembled anomaly series on one basis element (cached)."""
        if self._kappa_basis is None:
            table = []
            for b in range(self.dim):
                acc = HVector.zero()
                for n in range(self.order + 1):
                    acc = acc + self.kappa_orders[n][b].scale(HPoly.h(n))
                table.append(acc.cap_trunc(self.order))
            self._kappa_basis = table
        return self._kappa_basis[i]

    def kappa(self, v: HVector) -> HVector:
        if self._kappa_zero:
            return HVector.zero()
        cap = min(self.order, _arg_trunc(v.c.values()))
        out = HVector.zero()
        for j in range(cap + 1):
            part = v.classical_part(j)
            if part.is_zero():
                continue
            for i, coef in part.c.items():
                out = out + self.kappa_basis(i).scale(coef * HPoly.h(j))
        return out.cap_trunc(cap)

    def kappa_is_zero(self) -> bool:
        return self._kappa_zero

    def f_correction_order(self) -> int:
        """Lowest h-order with a nonzero correction to f (order+1 when none)."""
        for n in range(1, self.order + 1):
            if any(not v.is_zero() for v in self.f_orders[n]):
                return n
        return self.order + 1

    def unit(self) -> HVector:
        return HVector.basis(0)

    # -- verification -------------
    def _verify(self, span_degree: int = 4) -> None:
        one = PolyElement.one(self.n_vars)
        if self.fhat(self.unit()) != one:
            raise RetractError("fhat(1_H) != 1_C")
        if self.hhat(one) != self.unit():
            raise RetractError("hhat(1_C) != 1_H")
        if not self.shat(one).is_zero():
            raise RetractError("shat(1_C) != 0")
        if not self.kappa(self.unit()).is_zero():
            raise RetractError("kappa(1_H) != 0")
        for i in range(self.dim):
            v = HVector.basis(i)
            if self.hhat(self.fhat(v)) != v:
                raise RetractError("hhat fhat != id")
            if self.Khat(self.fhat(v)) != self.fhat(self.kappa(v)):
                raise RetractError("Khat fhat != fhat kappa")
            kk = self.kappa(self.kappa(v))
            if not kk.is_zero():
                raise RetractError("kappa^2 != 0")
        for m in spanning_monomials(self.n_vars, span_degree):
            lhs = self.fhat(self.hhat(m))
            rhs = m - self.Khat(self.shat(m)) - self.shat(self.Khat(m))
            if lhs != rhs:
                raise RetractError("quantized homotopy identity fails")
            if not self.shat(self.shat(m)).is_zero():
                raise RetractError("side condition shat shat = 0 fails")
            if not self.hhat(self.shat(m)).is_zero():
                raise RetractError("side condition hhat shat = 0 fails")
            if self.hhat(self.Khat(m)) != self.kappa(self.hhat(m)):
                raise RetractError("hhat Khat != kappa hhat")
            # mixed side conditions with the classical splitting
            if not self.retract.s(self.shat(m)).is_zero():
                raise RetractError("side condition s shat = 0 fails")
            if not self.shat(self.retract.s(m)).is_zero():
                raise RetractError("side condition shat s = 0 fails")
            if not self.hhat(self.retract.s(m)).is_zero():
                raise RetractError("side condition hhat s = 0 fails")
            if not self.retract.h(self.shat(m)).is_zero():
                raise RetractError("side condition h shat = 0 fails")
        for i in range(self.dim):
            if not self.shat(self.retract.basis_elements[i]).is_zero():
                raise RetractError("side condition shat f = 0 fails")


def quantize_retract(retract: Retract, order: int | None = None) -> QuantizedRetract:
    return QuantizedRetract(retract, order=order)


class PerturbedRetract(Retract):
    """A retract with representatives shifted by a K-exact perturbation.

    f'(e_i) = f(e_i) + K(lam(e_i)); h is unchanged and s is rebuilt so the
    homotopy identity holds: s' = s + (correction on the f'-h' split).
    """

    def __init__(self, base: Retract, lam_values):
        self.base = base
        self.milnor = base.milnor
        self.pot = base.pot
        self.n_vars = base.n_vars
        self.dim = base.dim
        self.ghosts = base.ghosts
        self.basis_elements = [
            base.basis_elements[i] + classical_K(base.pot, lam_values[i])
            for i in range(base.dim)
        ]
        self._lam = lam_values
        self._verify_light()

    def f(self, v: HVector) -> PolyElement:
        out = PolyElement.zero(self.n_vars)
        for i, coef in v.c.items():
            out = out + self.basis_elements[i].scale(coef)
        return out

    def h(self, c: PolyElement) -> HVector:
        return self.base.h(c)

    def s(self, c: PolyElement) -> PolyElement:
        # adjust the splitting so that f' h = 1 - K s' - s' K keeps holding:
        # s'(c) = s(c) + lam(h(c)) restores the defect f'(h c) - f(h c).
        out = self.base.s(c)
        hv = self.base.h(c)
        for i, coef in hv.c.items():
            out = out - self._lam[i].scale(coef)
        return out

    def _verify_light(self) -> None:
        for i in range(self.dim):
            if self.h(self.basis_elements[i]) != HVector.basis(i):
                raise RetractError("perturbation changed the induced classes")
        for v in self._lam:
            if v.is_zero():
                continue
            if v.ghost() != -1:
                raise RetractError("perturbation must have ghost number -1")
        if not self.s(PolyElement.one(self.n_vars)).is_zero():
            raise RetractError("s(1) != 0 after perturbation")


def compare_retracts(q: QuantizedRetract, qp: QuantizedRetract, verify: bool = True):
    """Gauge data (xi, lam) relating two quantized retracts of one potential.

    Returns (xi_orders, lam_orders) with xi = 1 + h xi1 + ... as basis-indexed
    HVector tables and lam as PolyElement tables, satisfying
    kappa' = xi^-1 kappa xi and fhat' = fhat xi + Khat lam + lam kappa'.
    """
    if q.pot is not qp.pot and q.pot.s_cl != qp.pot.s_cl:
        raise ValueError("retracts quantize different potentials")
    r = q.retract
    N = min(q.order, qp.order)
    dim = q.dim
    # classical gauge: lam0 = s(f' - f), xi0 = identity
    lam_orders = [
        [r.s(qp.f_orders[0][b] - q.f_orders[0][b]) for b in range(dim)]
    ]
    xi_orders = [[HVector.basis(b) for b in range(dim)]]

    def K_op(n):
        return q._K_order(n)

    for n in range(1, N + 1):
        w_vals = []
        for b in range(dim):
            w = qp.f_orders[n][b] - q.f_orders[n][b]
            for l in range(1, n):
                xv = xi_orders[l][b]
                for i, coef in xv.c.items():
                    w = w - q.f_orders[n - l][i].scale(coef)
            for l in range(n):
                op = K_op(n - l)
                if op is not None:
                    w = w - op(lam_orders[l][b])
            for l in range(1, n + 1):
                kv = qp.kappa_orders[l][b]
                for i, coef in kv.c.items():
                    w = w - lam_orders[n - l][i].scale(coef)
            w_vals.append(w)
        xi_orders.append([r.h(w) for w in w_vals])
        lam_orders.append([-r.s(w) for w in w_vals])

    if verify:
        _verify_gauge(q, qp, xi_orders, lam_orders, N)
    return xi_orders, lam_orders


def _series_table_apply(orders, v: HVector, combine_zero, scale_basis) -> object:
    cap = len(orders) - 1
    out = combine_zero
    for n in range(len(orders)):
        for j in range(cap - n + 1):
            part = v.classical_part(j)
            if part.is_zero():
                continue
            for i, coef in part.c.items():
                out = out + scale_basis(orders[n][i], coef * HPoly.h(n + j))
    return out.cap_trunc(cap)


def _verify_gauge(q, qp, xi_orders, lam_orders, N) -> None:
    dim = q.dim

    def xi(v: HVector) -> HVector:
        return _series_table_apply(
            xi_orders, v, HVector.zero(), lambda b, c: b.scale(c)
        )

    def lam(v: HVector) -> PolyElement:
        return _series_table_apply(
            lam_orders, v, PolyElement.zero(q.n_vars), lambda b, c: b.scale(c)
        )

    # invert xi order by order: xi_inv0 = id, xi_inv(n) = -sum xi(j) xi_inv(n-j)
    xi_inv = [[HVector.basis(b) for b in range(dim)]]
    for n in range(1, N + 1):
        row = []
        for b in range(dim):
            acc = HVector.zero()
            for j in range(1, n + 1):
                prev = xi_inv[n - j][b]
                for i, coef in prev.c.items():
                    acc = acc - xi_orders[j][i].scale(coef)
            row.append(acc)
        xi_inv.append(row)

    def xi_inverse(v: HVector) -> HVector:
        return _series_table_apply(
            xi_inv, v, HVector.zero(), lambda b, c: b.scale(c)
        )

    for b in range(dim):
        v = HVector.basis(b)
        if xi_inverse(xi(v)) != v:
            raise RetractError("xi inverse is wrong")
        lhs = qp.kappa(v)
        rhs = xi_inverse(q.kappa(xi(v)))
        if lhs != rhs:
            raise RetractError("kappa' != xi^-1 kappa xi")
        lhs2 = qp.fhat(v)
        rhs2 = q.fhat(xi(v)) + q.Khat(lam(v)) + lam(qp.kappa(v))
        if lhs2 != rhs2:
            raise RetractError("f' != f xi + K lam + lam kappa'")


# -- homotopy h-divisibility -------------


def twisted_K_HC(q: QuantizedRetract, omega, ghost: int):
    """K_HC on a C-valued symmetric family: Khat after, kappa-twist before.

    (K_HC W)(v_1..v_n) = Khat(W(v)) - (-1)^ghost sum_j W(Jv_1..Jv_{j-1},
    kappa v_j, v_{j+1}..v_n).
    """
    out = _like(omega, PolyElement.zero(q.n_vars))
    sign = -1 if ghost % 2 else 1
    twist = not q.kappa_is_zero()
    for key in _iter_keys(omega):
        val = q.Khat(_get(omega, key))
        if twist:
            tw = _kappa_twist(q, omega, key, PolyElement.zero(q.n_vars))
            val = val - tw.scale(HPoly.const(sign))
        _set(out, key, val)
    return out


def twisted_kappa_HH(q: QuantizedRetract, omega, ghost: int):
    """kappa_HH on an H-valued symmetric family."""
    out = _like(omega, HVector.zero())
    if q.kappa_is_zero():
        for key in _iter_keys(omega):
            _set(out, key, HVector.zero())
        return out
    sign = -1 if ghost % 2 else 1
    for key in _iter_keys(omega):
        val = q.kappa(_get(omega, key))
        tw = _kappa_twist(q, omega, key, HVector.zero())
        _set(out, key, val - tw.scale(HPoly.const(sign)))
    return out


def _flat_key(key):
    if isinstance(key[0], tuple):
        return key[0] + key[1]
    return key


def _iter_keys(omega):
    return omega.keys()


def _get(omega, key):
    if isinstance(omega, PairSymMap):
        return omega.get(key[0], key[1])
    return omega.get(key)


def _set(omega, key, value):
    if isinstance(omega, PairSymMap):
        omega.set(key[0], key[1], value)
    else:
        omega.set(key, value)


def _like(omega, zero):
    if isinstance(omega, PairSymMap):
        return PairSymMap(omega.arity, omega.ghosts, zero)
    return SymMap(omega.arity, omega.ghosts, zero)


def _kappa_twist(q: QuantizedRetract, omega, key, zero):
    """sum_j W(Jv_1..Jv_{j-1}, kappa v_j, ...) expanded over the basis."""
    idxs = _flat_key(key)
    acc = zero
    for j in range(len(idxs)):
        kv = q.kappa(HVector.basis(idxs[j]))
        if kv.is_zero():
            continue
        jsign = 1
        for a in range(j):
            if q.ghosts[idxs[a]] % 2:
                jsign = -jsign
        for i, coef in kv.c.items():
            new = idxs[:j] + (i,) + idxs[j + 1:]
            if isinstance(omega, PairSymMap):
                val = omega.get(new[:-2], new[-2:])
            else:
                val = omega.get(new)
            acc = acc + val.scale(coef * Fraction(jsign))
    return acc


def nabla(q: QuantizedRetract, omega, ghost: int):
    """One application of the division-by-(-h) homotopy operator.

    (-h) nabla W = W - fhat(h W0) - K_HC(s W0) - s(K W0), where W0 is the
    classical limit of W.  Raises NotDivisibleError when the combination is
    not h-divisible (an input violating the divisibility hypothesis).
    """
    r = q.retract
    cl = omega.classical_part(0)
    out = _like(omega, PolyElement.zero(q.n_vars))
    s_cl = cl.map_values(r.s)
    ks = twisted_K_HC(q, s_cl, ghost - 1)
    for key in _iter_keys(omega):
        w = _get(omega, key)
        w0 = _get(cl, key)
        val = w
        hvec = r.h(w0)
        if not hvec.is_zero():
            val = val - q.fhat(hvec)
        val = val - _get(ks, key)
        kw = classical_K(q.pot, w0)
        if not kw.is_zero():
            val = val - r.s(kw)
        _set(out, key, val.neg_h_divide(1))
    return out
