"""Command-line front end: ``nary check | derive | catalog | search-rb``.

Exit codes: 0 pass, 1 identity or precondition failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalog, geometry, io, ldendriform, nlie, nprelie, trace_induction
from .core import BilinearForm, Covector, LinearMap, ShapeError, SingularMatrixError, parse_rational
from .report import ParseError, PreconditionError, Report, SearchSpaceError, UnverifiedError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# checking

def _algebra_report(obj, literal: bool, workers: int) -> Report:
    if isinstance(obj, nlie.NLieAlgebra):
        return nlie.check_n_lie(obj, workers=workers)
    if isinstance(obj, nprelie.NPreLieAlgebra):
        return nprelie.check_nprelie(obj, workers=workers)
    if isinstance(obj, ldendriform.NLDendriform):
        rep = ldendriform.check_ldend(obj, literal=literal, workers=workers)
        return rep.extend(ldendriform.check_crochet(obj))
    if isinstance(obj, nlie.NLieRep):
        rep = Report("representation")
        rep.extend(nlie.check_n_lie(obj.algebra), prefix="algebra-")
        return rep.extend(nlie.check_rep(obj, workers=workers))
    if isinstance(obj, nprelie.NPreLieRep):
        rep = Report("pre-representation")
        rep.extend(nprelie.check_nprelie(obj.algebra), prefix="algebra-")
        return rep.extend(nprelie.check_pre_rep(obj, literal=literal, workers=workers))
    raise UsageError(f"{type(obj).__name__} needs --algebra to be checked against")


def _relative_report(obj, algebra) -> Report:
    """Checks of forms, maps and covectors relative to an algebra."""
    if isinstance(obj, BilinearForm):
        if isinstance(algebra, nlie.NLieAlgebra):
            return geometry.check_symplectic(algebra, obj) if obj.skew else geometry.check_metric(algebra, obj)
        if isinstance(algebra, nprelie.NPreLieAlgebra):
            return (geometry.check_quadratic(algebra, obj) if obj.skew
                    else ldendriform.check_pseudo_hessian(algebra, obj))
    if isinstance(obj, LinearMap):
        if isinstance(algebra, nlie.NLieAlgebra):
            return nlie.check_rota_baxter(algebra, obj)
        if isinstance(algebra, nprelie.NPreLieAlgebra):
            return nprelie.check_rota_baxter_nprelie(algebra, obj)
    if isinstance(obj, Covector) and isinstance(algebra, (nlie.NLieAlgebra, nprelie.NPreLieAlgebra)):
        return trace_induction.check_trace(algebra, obj)
    raise UsageError(f"cannot check a {type(obj).__name__} against a {type(algebra).__name__}")


def _emit(report: Report, args) -> int:
    report = report.filter(args.identity)
    if args.json:
        print(report.to_json())
    else:
        print(report.to_text(limit=None if args.all else 20))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_check(args) -> int:
    obj = io.resolve(args.file)
    if args.algebra:
        report = _relative_report(obj, io.resolve(args.algebra))
    else:
        report = _algebra_report(obj, args.literal, args.workers)
    return _emit(report, args)


# ---------------------------------------------------------------------------
# derivations

def _verified(obj, force: bool, label: str):
    """Verify an input unless forced; failures name the input."""
    if force or isinstance(obj, (LinearMap, BilinearForm, Covector)):
        return obj
    try:
        return nlie.verify(obj)
    except PreconditionError as e:
        raise PreconditionError(f"{label} fails its identities: {e}", e.report) from None
    except UnverifiedError:
        # a representation whose algebra is unverified
        base = nlie.verify(obj.algebra)
        import dataclasses

        return nlie.verify(dataclasses.replace(obj, algebra=base))


def _form_meta(form: BilinearForm) -> dict:
    return io.to_dict(form, {})


def _map_meta(m: LinearMap) -> dict:
    return io.to_dict(m, {})


def _expect(obj, types, label):
    if not isinstance(obj, types):
        names = " or ".join(t.kind if hasattr(t, "kind") else t.__name__ for t in
                            (types if isinstance(types, tuple) else (types,)))
        raise UsageError(f"{label} must be {names}, got {type(obj).__name__}")
    return obj


def _derive(name: str, objs: list, raw: list[str], force: bool, mode: str):
    """Run one construction; returns ``(result, extra_metadata)``."""
    NL, NP, LD = nlie.NLieAlgebra, nprelie.NPreLieAlgebra, ldendriform.NLDendriform
    R, PR = nlie.NLieRep, nprelie.NPreLieRep

    def arg(i, types, label):
        if i >= len(objs):
            raise UsageError(f"{name} needs an input for {label}")
        return _verified(_expect(objs[i], types, label), force, label)

    def arity(k):
        if len(objs) != k:
            raise UsageError(f"{name} takes {k} input(s), got {len(objs)}")

    if name == "sub-adjacent":
        arity(1)
        return nprelie.sub_adjacent(arg(0, NP, "product"), force=True), {}
    if name == "adjoint":
        arity(1)
        a = arg(0, (NL, NP), "algebra")
        return (nlie.adjoint_rep(a, force=True) if isinstance(a, NL) else nprelie.left_right_mult(a, force=True)), {}
    if name == "coadjoint":
        arity(1)
        return nlie.coadjoint_rep(arg(0, NL, "algebra"), force=True), {}
    if name == "left-rep":
        arity(1)
        return nprelie.left_rep(arg(0, NP, "product"), force=True), {}
    if name == "rho-tilde":
        arity(1)
        return nprelie.rho_tilde(arg(0, PR, "pre-representation"), force=True), {}
    if name == "semidirect":
        arity(1)
        r = arg(0, (R, PR), "representation")
        return (nlie.semidirect_nlie(r, force=True) if isinstance(r, R) else nprelie.semidirect_nprelie(r, force=True)), {}
    if name == "dual-rep":
        arity(1)
        r = arg(0, (R, PR), "representation")
        return (nlie.dual_rep(r, force=True) if isinstance(r, R) else nprelie.dual_pre_rep(r, force=True)), {}
    if name == "phase-space":
        arity(1)
        ps = geometry.phase_space(arg(0, NP, "product"), force=True)
        return ps.total.algebra, {"omega": _form_meta(ps.total.omega), "half": ps.half}
    if name == "symplectic-double":
        arity(1)
        chain = geometry.symplectic_double(arg(0, NP, "product"), 2, force=True)
        last = chain[-1]
        return last.total.algebra, {"omega": _form_meta(last.total.omega), "half": last.half}
    if name == "induce":
        arity(2)
        p = arg(0, (NP, NL), "algebra")
        tau = _expect(objs[1], Covector, "trace")
        if isinstance(p, NL):
            return trace_induction.induce_nlie(p, tau, force=force), {}
        return trace_induction.induce(p, tau, force=force), {}
    if name == "induce-rep":
        arity(2)
        return trace_induction.induce_rep(arg(0, PR, "pre-representation"),
                                          _expect(objs[1], Covector, "trace"), force=force), {}
    if name == "o-to-nprelie":
        arity(2)
        T = _expect(objs[0], LinearMap, "operator")
        out = nlie.o_to_nprelie(T, arg(1, R, "representation"), force=force)
        return out, {}
    if name == "o-to-ldend":
        arity(2)
        T = _expect(objs[0], LinearMap, "operator")
        return ldendriform.o_to_ldend(T, arg(1, PR, "pre-representation"), force=force), {}
    if name == "rb-to-ldend":
        arity(2)
        return ldendriform.rb_to_ldend(arg(0, NP, "product"), _expect(objs[1], LinearMap, "operator"), force=force), {}
    if name == "commuting-rb-to-ldend":
        arity(3)
        return ldendriform.commuting_rb_to_ldend(
            arg(0, NL, "algebra"), _expect(objs[1], LinearMap, "P1"), _expect(objs[2], LinearMap, "P2"), force=force
        ), {}
    if name == "hessian-to-ldend":
        arity(2)
        L, derived, report = ldendriform.hessian_to_ldend(
            arg(0, NP, "product"), _expect(objs[1], BilinearForm, "form"), force=force
        )
        if not report.ok:
            raise PreconditionError("construction did not reproduce the product", report)
        return L, {"derived": io.to_dict(derived, {})}
    if name == "assoc-prelie":
        arity(1)
        return ldendriform.assoc_prelie(arg(0, LD, "dendriform"), mode, force=True), {}
    if name == "assoc-nlie":
        arity(1)
        return ldendriform.assoc_nlie(arg(0, LD, "dendriform"), force=True), {}
    if name == "build-a-m":
        if len(raw) != 2:
            raise UsageError("build-a-m takes an algebra and an integer m")
        try:
            m = int(raw[1])
        except ValueError:
            raise UsageError(f"m must be an integer, got {raw[1]!r}") from None
        res = geometry.build_a_m(arg(0, NL, "algebra"), m, force=True)
        return res.algebra, {"metric": _form_meta(res.metric.B), "derivation": _map_meta(res.derivation),
                             "omega": _form_meta(res.omega)}
    if name == "symplectic-to-nprelie":
        if len(objs) == 1 and "omega" in getattr(objs[0], "metadata", {}):
            # phase-space output carries its form
            objs = objs + [io.from_dict(objs[0].metadata["omega"], "$.metadata.omega")]
        arity(2)
        A = arg(0, NL, "algebra")
        w = _expect(objs[1], BilinearForm, "form")
        S = geometry.SymplecticNLie(A, w)
        if not force:
            S = nlie.verify(S)
        return geometry.symplectic_to_nprelie(S, force=True), {}
    raise UsageError(f"unknown construction {name!r}; known: {', '.join(CONSTRUCTIONS)}")


CONSTRUCTIONS = (
    "sub-adjacent", "adjoint", "coadjoint", "left-rep", "rho-tilde", "semidirect", "dual-rep",
    "phase-space", "symplectic-double", "induce", "induce-rep", "o-to-nprelie", "o-to-ldend",
    "rb-to-ldend", "commuting-rb-to-ldend", "hessian-to-ldend", "assoc-prelie", "assoc-nlie",
    "build-a-m", "symplectic-to-nprelie", "manin-check",
)


# kind of the first input, used to pick the form of ambiguous catalog names such as Z(d,n)
FIRST_KIND = {
    "sub-adjacent": "n_pre_lie", "left-rep": "n_pre_lie", "phase-space": "n_pre_lie",
    "symplectic-double": "n_pre_lie", "rb-to-ldend": "n_pre_lie", "hessian-to-ldend": "n_pre_lie",
    "manin-check": "n_pre_lie", "assoc-prelie": "n_l_dendriform", "assoc-nlie": "n_l_dendriform",
}


def cmd_derive(args) -> int:
    name = args.construction
    refs = args.inputs[:1] if name == "build-a-m" else args.inputs
    objs = [io.resolve(r, FIRST_KIND.get(name) if i == 0 else None) for i, r in enumerate(refs)]
    if name == "manin-check":
        if len(objs) != 2:
            raise UsageError("manin-check takes a product and a form")
        P = _verified(_expect(objs[0], nprelie.NPreLieAlgebra, "product"), args.force, "product")
        B = _expect(objs[1], BilinearForm, "form")
        return _emit(geometry.check_manin_triple(P, B), args)
    result, extra = _derive(name, objs, args.inputs, args.force, args.mode)
    meta = {
        "construction": name,
        "inputs": [{"ref": r, "sha256": io.digest(o)} for r, o in zip(args.inputs, objs)],
    }
    if args.force:
        meta["warning"] = "inputs not verified (--force)"
    meta.update(extra)
    text = io.dumps(result, meta)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# catalog and search

def cmd_catalog(args) -> int:
    if not args.name:
        for n in catalog.NAMES:
            print(n)
        return EXIT_OK
    try:
        obj = catalog.get(args.name, args.kind)
    except KeyError as e:
        raise UsageError(str(e).strip("'\"")) from None
    text = io.dumps(obj, {"catalog": args.name})
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_support(text: str | None, d: int):
    if text is None or text == "diag":
        return None
    if text == "all":
        return [(i, j) for i in range(d) for j in range(d)]
    cells = []
    for part in text.split(";"):
        try:
            i, j = (int(x) for x in part.split(","))
        except ValueError:
            raise UsageError(f"bad support cell {part!r}; use 'i,j;i,j' (1-based), 'diag' or 'all'") from None
        cells.append((i - 1, j - 1))
    return cells


def cmd_search_rb(args) -> int:
    A = io.resolve(args.file)
    if not isinstance(A, (nlie.NLieAlgebra, nprelie.NPreLieAlgebra)):
        raise UsageError("search-rb needs an n_lie or n_pre_lie input")
    try:
        entries = [parse_rational(x.strip()) for x in args.entries.split(",")]
    except ValueError as e:
        raise UsageError(str(e)) from None
    found = nlie.rb_search(A, entries, _parse_support(args.support, A.dim), max_cells=args.max_cells)
    out = []
    for P in found:
        rep = (nlie.check_rota_baxter(A, P) if isinstance(A, nlie.NLieAlgebra)
               else nprelie.check_rota_baxter_nprelie(A, P))
        out.append({"operator": io.to_dict(P, {}), "report": rep.to_dict()})
    text = json.dumps({"count": len(out), "operators": out}, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nary", description="Exact workbench for n-ary Lie-type algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    def report_flags(sp):
        sp.add_argument("--json", action="store_true", help="print the report as JSON")
        sp.add_argument("--identity", help="only show violations of this identity family")
        sp.add_argument("--all", action="store_true", help="print every violation, not just the first 20")

    c = sub.add_parser("check", help="run the identity checks for a file or catalog:NAME")
    c.add_argument("file")
    c.add_argument("--algebra", help="algebra to check a form, map or covector against")
    c.add_argument("--literal", action="store_true", help="use the identities exactly as printed")
    c.add_argument("--workers", type=int, default=1)
    report_flags(c)
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("derive", help="run a construction and write the result")
    d.add_argument("construction", help=", ".join(CONSTRUCTIONS))
    d.add_argument("inputs", nargs="*")
    d.add_argument("-o", "--output")
    d.add_argument("--force", action="store_true", help="skip input verification")
    d.add_argument("--mode", default="horizontal", choices=("horizontal", "vertical"))
    report_flags(d)
    d.set_defaults(func=cmd_derive)

    k = sub.add_parser("catalog", help="list or emit built-in objects")
    k.add_argument("name", nargs="?")
    k.add_argument("--kind", choices=("n_lie", "n_pre_lie", "n_l_dendriform"), help="kind for Z(d,n)")
    k.add_argument("-o", "--output")
    k.set_defaults(func=cmd_catalog)

    s = sub.add_parser("search-rb", help="enumerate Rota-Baxter operators of weight 0")
    s.add_argument("file")
    s.add_argument("--entries", default="-1,0,1")
    s.add_argument("--support", help="'diag' (default), 'all', or 1-based cells 'i,j;i,j'")
    s.add_argument("--max-cells", type=int, default=8)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_search_rb)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ParseError, SearchSpaceError, ShapeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, UnverifiedError, SingularMatrixError) as e:
        print(f"precondition failed: {e}", file=sys.stderr)
        report = getattr(e, "report", None)
        if report is not None:
            print(report.to_text(), file=sys.stderr)
        return EXIT_FAIL
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
