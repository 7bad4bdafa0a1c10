"""Command-line front end: parse a job, run the pipeline, emit reports.

Input is a single JSON document (schema 1) describing the potential and the
truncation orders; rationals are "p/q" strings and polynomials are lists of
[exponent-vector, coefficient] pairs.  Output ordering is fixed everywhere,
so a given job always produces identical bytes.

Exit codes: 0 all checks pass, 2 input rejected, 3 a mathematical identity
failed, 4 a resource cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .groebner import MilnorData, NonIsolatedError
from .hspace import HVector
from .partitions import ArityCapError
from .polyalg import DescendantFamily, Potential
from .retract import RetractError, build_retract, quantize_retract
from .scalars import rat_str
from .slinf import Expectation, correlators
from .solver import (
    MasterEquationError,
    generalized_associativity_report,
    level_one_report,
    level_zero_report,
    mhat_symmetric,
    mhat_unity_report,
    reconstruct_pi,
    solve_level_one,
    solve_level_zero,
    verify_M_identity,
)
from .fmanifold import (
    FlatCoords,
    flat_coordinate_report,
    generating_function,
    structure_constants,
    theta_mc_report,
    wdvv_report,
)

EXIT_OK = 0
EXIT_REJECTED = 2
EXIT_VIOLATION = 3
EXIT_RESOURCE = 4

ARITY_HARD_CAP = 7


class InputError(ValueError):
    pass


class JobSpec:
    """Validated job description."""

    def __init__(self, doc: dict):
        if doc.get("schema") != 1:
            raise InputError('input must declare "schema": 1')
        pot = doc.get("potential")
        if not isinstance(pot, dict):
            raise InputError('missing "potential" object')
        n_vars = pot.get("n_vars")
        terms = pot.get("terms")
        if not isinstance(n_vars, int) or n_vars < 1:
            raise InputError('"n_vars" must be a positive integer')
        if not isinstance(terms, list) or not terms:
            raise InputError('"terms" must be a nonempty list')
        parsed = {}
        for item in terms:
            if not (isinstance(item, list) and len(item) == 2):
                raise InputError("each term is [exponent-vector, rational]")
            exp, coef = item
            exp = tuple(exp)
            if len(exp) != n_vars or any(
                not isinstance(e, int) or e < 0 for e in exp
            ):
                raise InputError(f"bad exponent vector {exp}")
            try:
                c = Fraction(str(coef))
            except (ValueError, ZeroDivisionError) as e:
                raise InputError(f"bad rational {coef!r}") from e
            parsed[exp] = parsed.get(exp, Fraction(0)) + c
        self.potential = Potential(n_vars, parsed)
        self.n_max = int(doc.get("n_max", 5))
        self.h_order = int(doc.get("h_order", 6))
        self.t_order = int(doc.get("t_order", 4))
        if self.n_max < 1 or self.h_order < 1 or self.t_order < 1:
            raise InputError("truncation orders must be positive")
        if self.n_max > ARITY_HARD_CAP or self.t_order + 2 > ARITY_HARD_CAP:
            raise ArityCapError(
                f"requested arity exceeds the cap ({ARITY_HARD_CAP})"
            )
        self.iota = doc.get("iota")
        if self.iota is not None:
            try:
                self.iota = [Fraction(str(v)) for v in self.iota]
            except (ValueError, ZeroDivisionError) as e:
                raise InputError("bad rational in iota") from e
            if not self.iota or self.iota[0] != 1:
                raise InputError("iota must start with 1 (the unit value)")
        self.outputs = doc.get("outputs")
        if self.outputs is not None:
            known = {"pi0", "mhat", "phi0", "phim1"}
            if not isinstance(self.outputs, list) or not set(self.outputs) <= known:
                raise InputError(f'"outputs" must be a sublist of {sorted(known)}')


def load_job(path: str) -> JobSpec:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from e
    return JobSpec(doc)


# -- serialization -------------


def hpoly_json(p) -> dict:
    return {f"h^{k}": rat_str(v) for k, v in sorted(p.c.items())}


def hvector_json(v: HVector, labels) -> dict:
    return {labels[i]: hpoly_json(c) for i, c in v.sorted_items()}


def poly_json(p) -> list:
    out = []
    for (exp, etas), coef in p.sorted_terms():
        out.append(
            {"x": list(exp), "eta": list(etas), "coeff": hpoly_json(coef)}
        )
    return out


def monomial_label(exp, n_vars: int) -> str:
    if not any(exp):
        return "1"
    bits = []
    for i, e in enumerate(exp):
        name = "x" if n_vars == 1 else f"x{i}"
        bits.append(name if e == 1 else f"{name}^{e}")
    return "*".join(bits)


def report_json(rep) -> dict:
    out = {"checks": rep.checks, "ok": rep.ok}
    if rep.violations:
        v = rep.violations[0]
        out["first_failure"] = {
            "arity": v.arity,
            "where": list(map(str, v.where)),
            "what": str(v.residual),
        }
    return out


def _emit(line: str, sink: list) -> None:
    sink.append(line)


def cmd_basis(job: JobSpec, sink: list) -> tuple[int, dict]:
    mil = MilnorData(job.potential)
    labels = [monomial_label(e, mil.n_vars) for e in mil.basis]
    _emit(f"dimension {mil.dimension}", sink)
    _emit("basis (ghost number 0):", sink)
    for lab in labels:
        _emit(f"  {lab}", sink)
    bundle = {
        "command": "basis",
        "dimension": mil.dimension,
        "basis": labels,
        "ghosts": [0] * mil.dimension,
    }
    return EXIT_OK, bundle


def _run_solve(job: JobSpec, audit: bool, fault: bool = False):
    mil = MilnorData(job.potential)
    r = build_retract(mil)
    q = quantize_retract(r, order=job.h_order)
    z = solve_level_zero(q, job.n_max)
    o = solve_level_one(q, z, job.n_max)
    if fault:
        # test hook: corrupt one solver value, then re-verify
        n = min(3, job.n_max)
        key = next(iter(sorted(o.mhat[n].values)))
        o.mhat[n].values[key] = o.mhat[n].values[key] + HVector({0: 1})
    reports = {
        "level-zero": level_zero_report(z),
        "level-one": level_one_report(o),
        "M-identity": verify_M_identity(q, z, o, job.n_max),
    }
    ms = mhat_symmetric(o)
    reports["unity"] = mhat_unity_report(ms, z.ghosts, job.n_max)
    spect = max(0, min(3, job.n_max - 3))
    reports["associativity"] = generalized_associativity_report(
        ms, z.ghosts, spect
    )
    pi = reconstruct_pi(ms, z.ghosts, job.n_max)
    recon_ok = all(
        pi[n].get(key) == z.pi0[n].get(key)
        for n in range(1, job.n_max + 1)
        for key in z.pi0[n].keys()
    )
    return mil, q, z, o, ms, reports, recon_ok


def _table_lines(title, table_by_arity, labels, render_value, sink):
    _emit(f"{title}:", sink)
    for n in sorted(table_by_arity):
        t = table_by_arity[n]
        for key in t.keys():
            if isinstance(key, tuple) and key and isinstance(key[0], tuple):
                front, pair = key
                label = ",".join(labels[i] for i in front + pair)
                val = t.get(front, pair)
            else:
                label = ",".join(labels[i] for i in key)
                val = t.get(key)
            _emit(f"  [{label}] -> {render_value(val)}", sink)


def cmd_solve(job: JobSpec, sink: list, audit: bool, fault: bool = False):
    mil, q, z, o, ms, reports, recon_ok = _run_solve(job, audit, fault)
    labels = [monomial_label(e, mil.n_vars) for e in mil.basis]
    _emit(f"dimension {mil.dimension}; anomaly-free: {q.kappa_is_zero()}", sink)

    def hv(v):
        if v.is_zero():
            return "0"
        return " + ".join(f"({c})*[{labels[i]}]" for i, c in v.sorted_items())

    wanted = set(job.outputs) if job.outputs is not None else {
        "pi0", "mhat", "phi0", "phim1"
    }
    if "pi0" in wanted:
        _table_lines("pi0 (iterated correlation products)", z.pi0, labels, hv, sink)
        for n in sorted(z.pi0):
            if n < 2:
                continue
            top = max(
                (z.pi0[n].get(k).h_degree() for k in z.pi0[n].keys()),
                default=-1,
            )
            _emit(
                f"  arity {n}: max h-degree {max(top, 0)} (bound {n - 2})",
                sink,
            )
    if "mhat" in wanted:
        _table_lines("mhat (on-shell products)", o.mhat, labels, hv, sink)
    if "phi0" in wanted:
        _table_lines("phi0 (off-shell lifts)", z.phi0, labels, repr, sink)
    if "phim1" in wanted:
        _table_lines("phim1 (product homotopies)", o.phim1, labels, repr, sink)
    ok = True
    for name in sorted(reports):
        rep = reports[name]
        status = "pass" if rep.ok else "FAIL"
        _emit(f"check {name}: {status} ({rep.checks} instances)", sink)
        if not rep.ok:
            ok = False
            v = rep.violations[0]
            _emit(f"  witness: arity {v.arity} at {v.where}: {v.residual}", sink)
    _emit(f"check pi0-reconstruction: {'pass' if recon_ok else 'FAIL'}", sink)
    ok = ok and recon_ok
    bundle = {
        "command": "solve",
        "dimension": mil.dimension,
        "anomaly_free": q.kappa_is_zero(),
        "reports": {k: report_json(v) for k, v in sorted(reports.items())},
        "pi0_reconstruction_ok": recon_ok,
        "tables": {
            "pi0": _json_family(z.pi0, labels),
            "mhat": _json_family(o.mhat, labels),
        },
    }
    if audit:
        from .solver import build_M0

        fam = DescendantFamily(job.potential)
        m_family = {}
        for n in range(2, job.n_max + 1):
            rows = {}
            for fkey, pkey in o.mhat[n].keys():
                label = ",".join(labels[i] for i in fkey + pkey)
                rows[label] = poly_json(build_M0(o, n, fkey, pkey, fam))
            m_family[str(n)] = rows
        from .retract import twisted_K_HC

        l_family = {}
        for n in range(1, job.n_max + 1):
            k_phi = twisted_K_HC(q, z.phi0[n], ghost=0)
            rows = {}
            for key in z.phi0[n].keys():
                label = ",".join(labels[i] for i in key)
                val = q.fhat(z.lhat[n].get(key)) - k_phi.get(key)
                rows[label] = poly_json(val)
            l_family[str(n)] = rows
        bundle["audit"] = {
            "omega0": _json_family(z.omega0, labels, value=poly_json),
            "varpi1": _json_family(z.varpi1, labels),
            "omega1": _json_family(o.omega1, labels, value=poly_json),
            "varpi0": _json_family(o.varpi0, labels),
            "eta1": _json_family(z.eta1, labels, value=poly_json),
            "eta2": _json_family(o.eta2, labels, value=poly_json),
            "M0": m_family,
            "L": l_family,
        }
    return (EXIT_OK if ok else EXIT_VIOLATION), bundle


def _json_family(family, labels, value=None):
    out = {}
    for n in sorted(family):
        t = family[n]
        rows = {}
        for key in t.keys():
            if isinstance(key, tuple) and key and isinstance(key[0], tuple):
                front, pair = key
                label = ",".join(labels[i] for i in front + pair)
                val = t.get(front, pair)
            else:
                label = ",".join(labels[i] for i in key)
                val = t.get(key)
            if value is not None:
                rows[label] = value(val)
            elif isinstance(val, HVector):
                rows[label] = hvector_json(val, labels)
            else:
                rows[label] = poly_json(val)
        out[str(n)] = rows
    return out


def cmd_fmanifold(job: JobSpec, sink: list, audit: bool):
    need = job.t_order + 2
    job_n = max(job.n_max, need)
    mil = MilnorData(job.potential)
    r = build_retract(mil)
    q = quantize_retract(r, order=job.h_order + job.t_order)
    z = solve_level_zero(q, job_n)
    o = solve_level_one(q, z, job_n)
    ms = mhat_symmetric(o)
    labels = [monomial_label(e, mil.n_vars) for e in mil.basis]
    A = structure_constants(ms, z.ghosts, job.t_order)
    _emit("structure constants A[a,b]^c:", sink)
    for a in range(z.dim):
        for b in range(z.dim):
            for c in range(z.dim):
                s = A[(a, b)][c]
                if s.is_zero():
                    continue
                _emit(f"  A[{labels[a]},{labels[b]}]^[{labels[c]}] = {s}", sink)
    w = wdvv_report(A, z.ghosts, job.t_order)
    _emit(
        f"check wdvv: {'pass' if w.ok else 'FAIL'} ({w.checks} instances)", sink
    )
    if not w.ok:
        v = w.violations[0]
        _emit(f"  witness: {v.where}: {v.residual}", sink)
    fc = FlatCoords(z, job.t_order)
    frep, sign = flat_coordinate_report(fc, A, job.t_order)
    _emit("flat coordinates That^c:", sink)
    for c in range(z.dim):
        _emit(f"  That^[{labels[c]}] = {fc.T[c]}", sink)
    _emit(
        f"check flat-coordinates: {'pass' if frep.ok else 'FAIL'} "
        f"({frep.checks} instances)",
        sink,
    )
    _emit(f"flat-coordinate PDE sign resolution: {sign}", sink)
    iota = job.iota if job.iota is not None else [1] + [0] * (z.dim - 1)
    if len(iota) != z.dim:
        raise InputError(
            f"iota must list {z.dim} values for this potential"
        )
    expect = Expectation(q, iota)
    corr = correlators(
        lambda idxs: z.phi0[len(idxs)].get(idxs), z.ghosts, job.t_order, mil.n_vars
    )
    zc, zt, zrep = generating_function(expect.apply_iota, z, corr, job.t_order)
    _emit(f"Z = {zc}", sink)
    _emit(
        f"check generating-function: {'pass' if zrep.ok else 'FAIL'} "
        f"({zrep.checks} instances)",
        sink,
    )
    fam = DescendantFamily(job.potential)
    mc = theta_mc_report(z, fam, min(job.t_order, 3))
    _emit(
        f"check maurer-cartan: {'pass' if mc.ok else 'FAIL'} "
        f"({mc.checks} instances)",
        sink,
    )
    ok = w.ok and frep.ok and zrep.ok and mc.ok and sign != "neither"
    bundle = {
        "command": "fmanifold",
        "pde_sign": sign,
        "reports": {
            "wdvv": report_json(w),
            "flat_coordinates": report_json(frep),
            "generating_function": report_json(zrep),
            "maurer_cartan": report_json(mc),
        },
        "structure_constants": {
            f"{labels[a]},{labels[b]}": {
                labels[c]: {
                    ",".join(map(str, e)): hpoly_json(v)
                    for e, v in A[(a, b)][c].sorted_terms()
                }
                for c in range(z.dim)
            }
            for a in range(z.dim)
            for b in range(z.dim)
        },
    }
    return (EXIT_OK if ok else EXIT_VIOLATION), bundle


def cmd_selftest(sink: list):
    from .acceptance import run_selftest

    out, ok = run_selftest()
    for line in out.splitlines():
        _emit(line, sink)
    bundle = {"command": "selftest", "ok": ok, "lines": out.splitlines()}
    return (EXIT_OK if ok else EXIT_VIOLATION), bundle


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bvcorr",
        description=(
            "exact quantum correlation algebras of polynomial BV theories"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_input in (
        ("basis", True),
        ("solve", True),
        ("fmanifold", True),
        ("selftest", False),
    ):
        p = sub.add_parser(name)
        p.add_argument("--input", required=needs_input, help="job JSON file")
        p.add_argument("--json", dest="json_path", help="write the full bundle")
        p.add_argument("--audit", action="store_true", help="dump intermediates")
        p.add_argument("--threads", type=int, default=1, help="accepted; the\
 orchestration is single-threaded")
        if name == "solve":
            p.add_argument(
                "--inject-fault", action="store_true", help=argparse.SUPPRESS
            )
    args = parser.parse_args(argv)
    sink: list = []
    try:
        if args.command == "selftest":
            code, bundle = cmd_selftest(sink)
        else:
            job = load_job(args.input)
            if args.command == "basis":
                code, bundle = cmd_basis(job, sink)
            elif args.command == "solve":
                code, bundle = cmd_solve(
                    job, sink, args.audit, getattr(args, "inject_fault", False)
                )
            else:
                code, bundle = cmd_fmanifold(job, sink, args.audit)
    except (InputError, NonIsolatedError, RetractError) as e:
        print(f"input rejected: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except MasterEquationError as e:
        print(f"identity violated: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except ArityCapError as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    for line in sink:
        print(line)
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump(bundle, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
