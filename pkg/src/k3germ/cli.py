"""Command-line front end.

Every command prints a JSON document on stdout and a short human summary on
stderr (``--format text`` prints the summary on stdout instead).  Exit codes:
0 computed/verified, 2 precondition violated, 3 inconclusive at the working
precision, 4 internal contradiction.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import germs, lattice, surface
from .errors import ContradictionError, InconclusiveError, PreconditionError
from .exactfield import QQ
from .powerseries import congruence_level

EXIT_OK, EXIT_PRECONDITION, EXIT_INCONCLUSIVE, EXIT_CONTRADICTION = 0, 2, 3, 4
MAX_DEGREE_ENV = "K3GERM_MAX_DEGREE"


class Result:
    def __init__(self, data: dict, summary: str, code: int = EXIT_OK):
        self.data, self.summary, self.code = data, summary, code


def _params(args, d=None) -> surface.SurfaceParams:
    d = args.d if d is None else d
    return surface.SurfaceParams.parse(args.a, args.b, d)


def _order(args) -> int:
    T = args.order
    cap = os.environ.get(MAX_DEGREE_ENV)
    if cap is not None and T > int(cap):
        raise PreconditionError(f"T = {T} exceeds {MAX_DEGREE_ENV} = {cap}")
    return T


def _matrix(rows):
    return [[str(c) for c in r] for r in rows]


def _exponent(args) -> int:
    return args.N if args.N is not None else 2 * args.D + 2


# -- commands -------------------------------------------------------------------

def cmd_smoothness(args) -> Result:
    p = _params(args)
    value = surface.smoothness_condition(p.a, p.b)
    factors = surface.smoothness_factors(p.a, p.b)
    data = {"params": p.to_json(), "value": str(value), "smooth": not value.is_zero(),
            "factors": [str(f) for f in factors]}
    summary = f"condition value {value}: {'smooth' if data['smooth'] else 'singular'}"
    if args.eliminate:
        pts = surface.singular_points(p)
        data["singular_points"] = [w.to_json() for w in pts]
        if bool(pts) == data["smooth"]:
            raise ContradictionError("elimination disagrees with the smoothness condition")
        summary += f"; elimination found {len(pts)} singular witness(es)"
    return Result(data, summary)


def cmd_contraction(args) -> Result:
    p = _params(args)
    rep = surface.contraction_test(p)
    return Result({"params": p.to_json(), **rep}, f"contractions {rep}")


def cmd_linear_order(args) -> Result:
    p = _params(args)
    order = surface.phi_linear_order(p.a)
    order_json = "infinite" if order == surface.INFINITE else order
    M = surface.phi_linear_matrix(p.a)
    return Result({"a": str(p.a), "matrix": _matrix(M), "order": order_json},
                  f"linear part of iota_x o iota_y at a = {p.a} has order {order_json}")


def cmd_word(args) -> Result:
    p = _params(args)
    T = _order(args)
    g = germs.word_to_germ(args.word, p, T)
    data = {"params": p.to_json(), "word": args.word, "T": T, "linear_part": _matrix(g.linear_part()),
            "congruence_level": congruence_level(g.forward), "germ": g.forward.to_json()}
    return Result(data, f"word {args.word}: linear part {data['linear_part']}")


def cmd_gamma(args) -> Result:
    p = _params(args)
    T = _order(args)
    N = _exponent(args)
    tower = germs.gamma_tower(args.n, N, p, T)
    g = tower[-1]
    level = congruence_level(g.forward)
    data = {"params": p.to_json(), "n": args.n, "N": N, "T": T,
            "congruence_level": level,
            "identity_to_precision": level >= T,
            "lower_bound": germs.multiplicity_lower_bound(g),
            "germ": g.forward.to_json()}
    max_k = args.max_k if args.max_k is not None else T - 1
    try:
        data["multiplicity"] = germs.multiplicity(g, max_k).to_json()
    except InconclusiveError as exc:
        data["multiplicity"] = {"dim": None, "certified": False, "K": None,
                                "lower_bound": data["lower_bound"], "note": str(exc)}
    summary = (f"gamma_{args.n} (N = {N}, T = {T}) = id mod m^{level}; "
               f"multiplicity >= {data['lower_bound']}")
    if data["multiplicity"]["certified"]:
        summary += f", certified {data['multiplicity']['dim']}"
    return Result(data, summary)


def cmd_curve(args) -> Result:
    d = args.d
    if args.curve == "fiber_z" and d is None:
        d = -1
    p = _params(args, d)
    # the tower only needs the field of a and b; embed afterwards
    rational = p.a.is_rational() and p.b.is_rational()
    tp = surface.SurfaceParams(p.a.r, p.b.r, QQ) if rational else p
    N = _exponent(args)
    T = _order(args)
    cap = int(os.environ.get(MAX_DEGREE_ENV, args.max_order))
    while True:
        curve = germs.curve_branch(p, args.curve, T)
        g = germs.gamma_tower(args.n, N, tp, T)[-1]
        if g.field != p.field:
            g = germs.AutGerm(g.forward.with_field(p.field), g.inverse.with_field(p.field), g.base)
        try:
            mu = germs.intersection_multiplicity(curve, g)
            break
        except InconclusiveError:
            if not args.search or T >= cap:
                raise
            T = min(2 * T, cap)
    data = {"params": p.to_json(), "curve": args.curve, "n": args.n, "N": N, "T": T, "mu": mu,
            "bound": args.n, "distinct": True, "mu_ge_n": mu >= args.n, "mu_ge_n_plus_1": mu >= args.n + 1}
    return Result(data, f"mu_P(C . gamma_{args.n}^-1 C) = {mu} for C = {args.curve}")


def cmd_jordan(args) -> Result:
    T = _order(args)
    A = germs.jordan_block(args.size)
    g = germs.projective_linear_germ(A, T)
    rep = germs.multiplicity(g, args.max_k if args.max_k is not None else T - 1)
    return Result({"matrix": A, "T": T, **rep.to_json()}, f"Jordan block of size {args.size}: multiplicity {rep.dim}")


def _ints(text, n):
    vals = [int(x) for x in text.replace(";", ",").split(",") if x.strip()]
    if len(vals) != n:
        raise PreconditionError(f"expected {n} comma-separated integers")
    return vals


def cmd_lattice(args) -> Result:
    sub = args.lattice_cmd
    if sub == "rho":
        a, b, c, d = _ints(args.matrix, 4)
        A = ((a, b), (c, d))
        B = lattice.rho(A)
        data = {"A": [list(r) for r in A], "rho": [list(r) for r in B], "basis": "E",
                "char_poly": lattice.char_poly(B, A)}
        return Result(data, f"rho(A) = {B}")
    if sub == "rho-inv":
        v = _ints(args.matrix, 9)
        B = (tuple(v[0:3]), tuple(v[3:6]), tuple(v[6:9]))
        if args.basis == "H":
            B = lattice.basis_change(B, "H", "E")
        A = lattice.rho_inverse(B)
        return Result({"B": [list(r) for r in B], "basis": "E", "A": [list(r) for r in A]}, f"A = {A}")
    if sub == "tower":
        N = _exponent(args)
        levels = lattice.gamma_matrix_tower(args.n, N)
        data = {"n": args.n, "N": N, "s": lattice.s_parameter(), "levels": [lv.to_json() for lv in levels],
                "closed_form_agrees": True}
        return Result(data, "traces " + ", ".join(str(lv.trace) for lv in levels))
    if sub == "bound":
        N = _exponent(args)
        rep = lattice.fixed_curve_bound(args.n, N, args.D)
        return Result(rep, f"-(u,u) = {rep['minus_uu']} vs 4D^2 = {rep['four_D2']}: exceeds = {rep['exceeds']}")
    if sub == "free":
        rep = lattice.free_word_check(args.max_len)
        return Result(rep, f"no relation found among {rep['words_checked']} reduced words")
    raise PreconditionError(f"unknown lattice command {sub!r}")


# -- parser ----------------------------------------------------------------------------

def _common(p, surface_flags=True, order=True):
    if surface_flags:
        p.add_argument("--a", default="0", help="parameter a (field element text, default 0)")
        p.add_argument("--b", default="1", help="parameter b (default 1)")
        p.add_argument("--d", type=int, default=None, help="work in Q(sqrt(d)); omit for Q")
    if order:
        p.add_argument("--order", "-T", type=int, default=10, help="truncation order T (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="k3germ", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--out", help="also write the JSON document to this file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("smoothness", help="smoothness condition, optionally checked by elimination")
    _common(p, order=False)
    p.add_argument("--eliminate", action="store_true", help="also compute singular points")
    p.set_defaults(func=cmd_smoothness)

    p = sub.add_parser("contraction", help="which projections contract a curve")
    _common(p, order=False)
    p.set_defaults(func=cmd_contraction)

    p = sub.add_parser("linear-order", help="order of the linear part of iota_x o iota_y at P")
    _common(p, order=False)
    p.set_defaults(func=cmd_linear_order)

    p = sub.add_parser("word", help="germ at P of a word in X, Y, Z")
    _common(p)
    p.add_argument("--word", default="ZXYZ")
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("gamma", help="commutator tower germ gamma_n")
    _common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--N", type=int, default=None, help="exponent of phi (default 2D + 2)")
    p.add_argument("--D", type=int, default=1)
    p.add_argument("--max-k", type=int, default=None)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("curve", help="intersection multiplicity of C and gamma_n^-1 C")
    _common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--D", type=int, default=1)
    p.add_argument("--curve", choices=("fiber_z", "ramification_x"), default="fiber_z")
    p.add_argument("--search", action="store_true", help="double T until the order is found")
    p.add_argument("--max-order", type=int, default=64)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("jordan", help="multiplicity of a P^2 chart germ with one Jordan block")
    _common(p, surface_flags=False)
    p.add_argument("--size", type=int, choices=(1, 2, 3), default=3)
    p.add_argument("--max-k", type=int, default=None)
    p.set_defaults(func=cmd_jordan)

    p = sub.add_parser("lattice", help="lattice computations")
    lsub = p.add_subparsers(dest="lattice_cmd", required=True)
    q = lsub.add_parser("rho")
    q.add_argument("--matrix", required=True, help="a,b,c,d")
    q = lsub.add_parser("rho-inv")
    q.add_argument("--matrix", required=True, help="nine integers, row-major")
    q.add_argument("--basis", choices=("E", "H"), default="E")
    for name in ("tower", "bound"):
        q = lsub.add_parser(name)
        q.add_argument("--n", type=int, default=3)
        q.add_argument("--N", type=int, default=None)
        q.add_argument("--D", type=int, default=1)
    q = lsub.add_parser("free")
    q.add_argument("--max-len", type=int, default=10)
    p.set_defaults(func=cmd_lattice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        result = args.func(args)
    except PreconditionError as exc:
        result = Result({"error": "precondition", "message": str(exc)}, f"precondition: {exc}", EXIT_PRECONDITION)
    except InconclusiveError as exc:
        result = Result({"error": "inconclusive", "message": str(exc)}, f"inconclusive: {exc}", EXIT_INCONCLUSIVE)
    except ContradictionError as exc:
        result = Result({"error": "contradiction", "message": str(exc)}, f"contradiction: {exc}", EXIT_CONTRADICTION)
    text = json.dumps(result.data, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.format == "text":
        print(result.summary)
    else:
        print(text)
        print(result.summary, file=sys.stderr)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
