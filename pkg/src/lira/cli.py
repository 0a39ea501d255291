"""Command-line interface: ``lira SUBCOMMAND WORKSPACE [options]``.

Exit status: 0 on success, 1 on a mathematical negative (failed audit, no
solution in the window, non-cocycle, ...), 2 on usage or parse errors.
WORKSPACE is a path or the name of a shipped fixture.
"""

from __future__ import annotations

import argparse
import sys
from itertools import combinations

from . import matrix as M
from .chern import chern_character, first_chern_form, trace_curvature_powers
from .cochain import Connection, coboundary_solve, curvature, field_case_cohomology
from .curvmod import idempotent_curvature_check, vmodule_audit, vmodule_build, vmodule_scaled
from .enveloping import TwistedAlgebra, adef_hom, env_normal_form_text, pbw_confluence_check, symbol, theta_apply
from .errors import (
    DomainError,
    LiraError,
    LiraSyntaxError,
    NotACocycle,
    NotFieldCase,
    NotFlat,
    SignMismatch,
    ValidationError,
    WrongCurvatureType,
)
from .jets import field_case_homology, jet_check, standard_samples
from .lierinehart import lr_validate
from .workspace import fixture_names, load_workspace

NEGATIVE = (NotACocycle, NotFlat, WrongCurvatureType, SignMismatch, ValidationError)


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _conn(ws, name):
    if name is None:
        return Connection.trivial(ws.algebra)
    try:
        return ws.connection(name)
    except KeyError as exc:
        raise _Usage(exc.args[0]) from None


def _twist(ws, name):
    try:
        return ws.twist(name)
    except KeyError as exc:
        raise _Usage(exc.args[0]) from None


def _cochain(ws, name):
    try:
        return ws.cochain(name)
    except KeyError as exc:
        raise _Usage(exc.args[0]) from None


def _algebra(ws, name, check=True):
    return TwistedAlgebra(ws.algebra, _twist(ws, name), check=check, name=name)


# -- commands ----------------------------------------------------------------------

def cmd_validate(ws, args, out):
    rep = lr_validate(ws.algebra)
    out.append(f"ring: {ws.ring}")
    out.append(f"rank: {ws.algebra.rank}")
    out.extend(rep.lines())
    ok = rep.passed
    for name in ws.cocycles:
        out.append(f"PASS  cocycle {name}")
    for name, c in ws.connections.items():
        R = curvature(c)
        flat = R.is_zero()
        out.append(f"connection {name}: rank {c.rank}, " + ("flat" if flat else "curvature " + _curv_str(R)))
    for name, im in ws.idempotents.items():
        anchors = ws.algebra.anchor
        for i, j in combinations(range(len(anchors)), 2):
            r = idempotent_curvature_check(im, anchors[i], anchors[j])
            tag = "PASS" if r.passed else "FAIL"
            out.append(f"{tag}  idempotent {name}: R(e{i + 1},e{j + 1}) = [e{i + 1}(phi), e{j + 1}(phi)] on im phi")
            ok = ok and r.passed
    out.append("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _curv_str(R):
    return "; ".join(f"R(e{i + 1},e{j + 1}) = {M.fmt(m)}" for (i, j), m in sorted(R.values.items()))


def cmd_cohomology(ws, args, out):
    dims = field_case_cohomology(_conn(ws, args.conn))
    out.append("dim H^p: " + ", ".join(str(d) for d in dims))
    out.append("euler characteristic: " + str(sum((-1) ** p * d for p, d in enumerate(dims))))
    return 0


def cmd_homology(ws, args, out):
    dims = field_case_homology(_conn(ws, args.conn))
    out.append("dim H_p: " + ", ".join(str(d) for d in dims))
    return 0


def cmd_cobound(ws, args, out):
    f = _twist(ws, args.cocycle)
    if args.minus:
        f = f - _twist(ws, args.minus)
    res = coboundary_solve(ws.algebra, f, args.degree)
    if not res.found:
        out.append(f"NoSolutionInWindow (degree {args.degree}): no primitive found; classes distinct up to this degree")
        return 1
    out.append("rho:")
    for i in range(ws.algebra.rank):
        out.append(f"  rho(e{i + 1}) = {res.rho.scalar((i,))}")
    out.append("verified: d1 rho = f")
    return 0


def cmd_env(ws, args, out):
    ta = _algebra(ws, args.f)
    if args.op == "mul":
        if len(args.exprs) != 2:
            raise _Usage("env mul needs two elements")
        u, v = (ta.parse(e) for e in args.exprs)
        out.append(str(u * v))
    elif args.op == "nf":
        if len(args.exprs) != 1:
            raise _Usage("env nf needs one expression")
        out.append(str(env_normal_form_text(ta, args.exprs[0], args.strategy)))
    else:
        if len(args.exprs) != 1:
            raise _Usage("env symbol needs one element")
        out.append(str(symbol(ta, ta.parse(args.exprs[0]))))
    return 0


def cmd_pbw(ws, args, out):
    ta = _algebra(ws, args.f, check=False)
    rep = pbw_confluence_check(ta, args.N)
    out.extend(rep.lines())
    return 0 if rep.passed else 1


def cmd_theta(ws, args, out):
    ta_f = _algebra(ws, args.f)
    ta_g = _algebra(ws, args.g)
    h = _cochain(ws, args.h)
    u = ta_f.parse(args.element)
    image = theta_apply(ta_f, ta_g, h, u)
    out.append("relation audit: PASS")
    out.append(str(image))
    return 0


def cmd_adef(ws, args, out):
    ta_f = _algebra(ws, args.f)
    ta_g = _algebra(ws, args.g)
    res = adef_hom(ta_f, ta_g, args.degree)
    out.extend(res.lines())
    return 0 if res.found else 1


def cmd_vmodule(ws, args, out):
    ta = _algebra(ws, args.f)
    target = None
    if args.scale:
        v, target = vmodule_scaled(ta, args.k, args.i)
        out.append(f"scaled twist F = f/{v.rank}")
    else:
        v = vmodule_build(ta, args.k, args.i)
    out.append(f"V^({args.k},{args.i}): rank {v.rank}")
    out.append("basis: " + ", ".join(str(ta.monomial(P)) for P in v.basis))
    for j, A in enumerate(v.action):
        out.append(f"action e{j + 1}: {M.fmt(A)}")
    if not args.audit:
        return 0
    rep = vmodule_audit(v, target)
    out.extend(rep.lines())
    ok = rep.passed and (target is None or rep.trace_matches)
    out.append("audit: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_chern(ws, args, out):
    conn = _conn(ws, args.conn)
    kmax = args.kmax
    out.append(f"c1 representative tr R: {first_chern_form(conn)!r}")
    out.append("tr R^k:")
    out.extend("  " + s for s in trace_curvature_powers(conn, kmax).lines())
    out.append("Ch:")
    out.extend("  " + s for s in chern_character(conn, kmax).lines())
    return 0


def cmd_jet(ws, args, out):
    conn = _conn(ws, args.conn)
    out.append(f"splitting s(x (x) e) = (grad(x)e, x (x) e) for rank {conn.rank}")
    if not args.check:
        return 0
    rep = jet_check(conn, standard_samples(conn))
    out.extend(rep.lines())
    out.append("PASS" if rep.passed else "FAIL")
    return 0 if rep.passed else 1


def build_parser():
    p = _Parser(prog="lira", description="Exact computations with Lie-Rinehart algebras.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("workspace", help="workspace file or fixture name (" + ", ".join(fixture_names()) + ")")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "validate the algebra, cocycles, connections and idempotents")
    sp = add("cohomology", cmd_cohomology, "field-case cohomology dimensions")
    sp.add_argument("--conn", help="flat connection (default: trivial rank 1)")
    sp = add("homology", cmd_homology, "field-case homology dimensions")
    sp.add_argument("--conn", help="flat connection (default: trivial rank 1)")
    sp = add("cobound", cmd_cobound, "search rho with d1 rho = f (- g)")
    sp.add_argument("--cocycle", required=True)
    sp.add_argument("--minus", help="subtract this cocycle first")
    sp.add_argument("--degree", type=int, required=True, help="truncation window degree D")
    sp = add("env", cmd_env, "arithmetic in U(B, L, f)")
    sp.add_argument("op", choices=["mul", "nf", "symbol"])
    sp.add_argument("exprs", nargs="+")
    sp.add_argument("--f", default="zero")
    sp.add_argument("--strategy", default="fast", choices=["fast", "leftmost", "rightmost"])
    sp = add("pbw-check", cmd_pbw, "confluence and PBW count audit")
    sp.add_argument("--f", default="zero")
    sp.add_argument("--N", type=int, default=4)
    sp = add("theta", cmd_theta, "apply theta_h : U_f -> U_g")
    sp.add_argument("element")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--h", required=True, help="name of a 1-cochain")
    sp = add("adef-hom", cmd_adef, "morphisms U_f -> U_g, i.e. h with d1 h = f - g")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp = add("vmodule", cmd_vmodule, "the truncated module V^{k,i}")
    sp.add_argument("--f", default="zero")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--audit", action="store_true")
    sp.add_argument("--scale", action="store_true", help="use F = f / rank")
    sp = add("chern", cmd_chern, "traces of curvature powers and the Chern character")
    sp.add_argument("--conn", required=True)
    sp.add_argument("--kmax", type=int)
    sp = add("jet", cmd_jet, "jet splitting of a connection")
    sp.add_argument("--conn", required=True)
    sp.add_argument("--check", action="store_true")
    return p


def run(argv):
    """Run a command line; returns (exit status, stdout text, stderr text)."""
    out = []
    try:
        args = build_parser().parse_args(argv)
        ws = load_workspace(args.workspace)
        status = args.fn(ws, args, out)
    except SystemExit as exc:  # --help
        return (exc.code if isinstance(exc.code, int) else 0), "", ""
    except _Usage as exc:
        return 2, "", f"lira: usage error: {exc}\n"
    except (FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        return 2, "", f"lira: {exc}\n"
    except LiraSyntaxError as exc:
        src = getattr(exc, "source", None)
        return 2, "", f"lira: syntax error{' in ' + src if src else ''}: {exc}\n"
    except NEGATIVE as exc:
        text = "\n".join(out + [f"{type(exc).__name__}: {exc}"]) + "\n"
        return 1, text, ""
    except (NotFieldCase, DomainError, LiraError) as exc:
        return 2, "", f"lira: {type(exc).__name__}: {exc}\n"
    return status, "\n".join(out) + "\n", ""


def main(argv=None):
    status, text, err = run(sys.argv[1:] if argv is None else argv)
    if text:
        sys.stdout.write(text)
    if err:
        sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())
