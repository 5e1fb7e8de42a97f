"""Command line interface: ``x0n <command> N ...``.

Exit status is 0 on success, 2 when ``verify`` finds differences and 1 on
any error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from .corpus import reference_levels
from .jrep import CUSP, evaluate_j
from .modcurve import cusp_class_of, cusps_gamma0, genus0, w_order
from .pipeline import PipelineConfig, PipelineError, load_generators, run, verify_against_reference
from .search import SearchBounds, save_system, search_generators, verify_system
from .weier import parse_expr

EXIT_OK, EXIT_ERROR, EXIT_DIFF = 0, 1, 2


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def _pair(text: str) -> tuple[int, int]:
    v = _ints(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError(f"expected two integers u,t, got {text!r}")
    return v[0], v[1]


def _point(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected x or x,y, got {text!r}")
    return tuple(Fraction(p) for p in parts)


def _bounds(args) -> SearchBounds:
    b = SearchBounds()
    if getattr(args, "max_entry", None) is not None:
        b.max_entry = args.max_entry
    if getattr(args, "max_terms", None) is not None:
        b.max_terms = args.max_terms
    if getattr(args, "slack", None) is not None:
        b.slack = args.slack
    if getattr(args, "max_candidates", None) is not None:
        b.max_candidates = args.max_candidates
    return b


def _config(args, **kw) -> PipelineConfig:
    return PipelineConfig(
        args.N,
        precision_guard=args.guard,
        bounds=_bounds(args),
        use_reference_generators=getattr(args, "use_reference_generators", False),
        apply_errata=getattr(args, "apply_errata", False),
        generators_file=getattr(args, "generators", None),
        killer_policy=getattr(args, "killer_policy", "f1"),
        **kw,
    )


def _emit(obj, args):
    text = json.dumps(obj, indent=2)
    out = getattr(args, "output", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


# -- commands ---------------------------------------------------------------------------

def cmd_genus(args):
    print(genus0(args.N))
    return EXIT_OK


def cmd_cusps(args):
    cs = cusps_gamma0(args.N)
    if args.json:
        print(json.dumps([c.to_json_obj() for c in cs]))
    else:
        for c in cs:
            print(f"{c.label():>8}  width {c.width}  d {c.d}")
    return EXIT_OK


def cmd_order(args):
    a = _ints(args.vec)
    u, t = args.cusp
    val = w_order(a, (u, t), args.N)
    if args.vec2:
        val += w_order(_ints(args.vec2), (u, t), args.N)
    print(val)
    return EXIT_OK


def cmd_expand(args):
    N = args.N
    e = parse_expr(args.expr, N)
    Q = cusp_class_of(args.cusp[0], args.cusp[1], N)
    if args.normalize:
        # scale so that the leading coefficient at <1/1> is 1
        lead = e.expansion(cusps_gamma0(N)[0], 1).leading_coefficient()
        e = e.scale(Fraction(1) / Fraction(lead))
    s = e.expansion(Q, args.prec)
    if args.json:
        print(json.dumps(s.to_json_obj()))
    else:
        print(s.to_text())
    return EXIT_OK


def cmd_generators(args):
    cfg = _config(args)
    if cfg.use_reference_generators or cfg.generators_file:
        system = load_generators(cfg)
    else:
        system = search_generators(args.N, cfg.bounds)
    problems = verify_system(system)
    if args.save:
        save_system(system, args.save)
    obj = system.to_json_obj()
    obj["provenance"] = system.provenance
    obj["problems"] = problems
    print(json.dumps(obj, indent=2))
    return EXIT_OK if not problems else EXIT_ERROR


def cmd_equation(args):
    if genus0(args.N) == 0:
        print(f"N={args.N} has genus 0; X_0(N) is the line and F1 is a Hauptmodul", file=sys.stderr)
        return EXIT_ERROR
    res = run(_config(args, emit_collapsed=False, stop_after="equation"))
    print(res.equation.to_text())
    return EXIT_OK


def cmd_jrep(args):
    res = run(_config(args, emit_collapsed=True if args.collapse else None))
    obj = res.jrep.to_json_obj()
    obj["N"] = res.N
    obj["g"] = res.g
    obj["generators"] = [f.to_text() for f in res.system.funcs]
    if res.equation is not None:
        obj["equation"] = res.equation.to_text()
    if res.H:
        obj["Delta"] = res.H[0].Delta.to_text()
        obj["U"] = {f"U{h.index}": h.U.to_text() for h in res.H}
    _emit(obj, args)
    return EXIT_OK


def cmd_eval(args):
    res = run(_config(args, emit_collapsed=True))
    if res.collapsed is None:
        print("no collapsed representation for this level", file=sys.stderr)
        return EXIT_ERROR
    point = args.point
    if res.g == 0:
        if len(point) != 1:
            raise ValueError("genus 0: give the single coordinate x")
        val = evaluate_j(None, res.collapsed, point[0])
    else:
        if len(point) != 2:
            raise ValueError("give the point as x,y")
        val = evaluate_j(res.equation, res.collapsed, point)
    print("cusp" if val is CUSP else str(val))
    return EXIT_OK


def cmd_verify(args):
    use_ref = not args.search and not args.generators
    cfg = _config(args)
    cfg.use_reference_generators = use_ref
    res = run(cfg)
    diffs = verify_against_reference(res, errata=args.apply_errata)
    bad = [d for d in diffs if not d.ok]
    for d in diffs:
        print(d)
    print(f"N={args.N}: {len(diffs) - len(bad)} of {len(diffs)} items match")
    return EXIT_OK if not bad else EXIT_DIFF


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="x0n", description="Equations of X_0(N) and the modular invariant J.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def level(sp):
        sp.add_argument("N", type=int, help="level")

    def pipeline_opts(sp, verify=False):
        sp.add_argument("--guard", type=int, default=25, help="precision guard (>= 10)")
        sp.add_argument("--generators", metavar="FILE", help="generator system JSON file")
        sp.add_argument("--use-reference-generators", action="store_true",
                        help="take the generators from the bundled reference tables"
                        + (" (the default for verify)" if verify else ""))
        sp.add_argument("--apply-errata", action="store_true",
                        help="apply the known corrections to the reference tables")
        sp.add_argument("--killer-policy", choices=("f1", "affine"), default="f1")
        bounds_opts(sp)

    def bounds_opts(sp):
        g = sp.add_argument_group("search bounds")
        g.add_argument("--max-entry", type=int, help="largest vector entry (default N-1)")
        g.add_argument("--max-terms", type=int, help="trace terms per candidate (1 or 2)")
        g.add_argument("--slack", type=int, help="slack in the pole bound at <1/1> (default 2g)")
        g.add_argument("--max-candidates", type=int, help="candidates expanded before giving up")

    sp = sub.add_parser("genus", help="genus of X_0(N)")
    level(sp)
    sp.set_defaults(func=cmd_genus)

    sp = sub.add_parser("cusps", help="cusps <u/D> of X_0(N)")
    level(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_cusps)

    sp = sub.add_parser("order", help="order of W_a at a Gamma_1(N) cusp (u:t)")
    level(sp)
    sp.add_argument("--vec", required=True, help="a1,a2,a3,a4")
    sp.add_argument("--vec2", help="second vector for a product W_a W_b")
    sp.add_argument("--cusp", type=_pair, required=True, help="u,t")
    sp.set_defaults(func=cmd_order)

    sp = sub.add_parser("expand", help="expansion of a trace expression at a cusp")
    level(sp)
    sp.add_argument("--expr", required=True, help='e.g. "T[5,1,2,1]" or "-3 + T[4,1,3,1]*[5,1,2,1]"')
    sp.add_argument("--cusp", type=_pair, default=(1, 1), help="u,t (default 1,1)")
    sp.add_argument("--prec", type=int, default=20, help="exponents below this in q_D")
    sp.add_argument("--normalize", action="store_true",
                    help="scale to leading coefficient 1 at <1/1> first")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("generators", help="find (or load) F_1..F_{g+1}")
    level(sp)
    sp.add_argument("--save", metavar="FILE", help="write the system as JSON")
    pipeline_opts(sp)
    sp.set_defaults(func=cmd_generators)

    sp = sub.add_parser("equation", help="plane model F_N(X, Y) = 0")
    level(sp)
    pipeline_opts(sp)
    sp.set_defaults(func=cmd_equation)

    sp = sub.add_parser("jrep", help="representation of J by the generators (JSON)")
    level(sp)
    sp.add_argument("--collapse", action="store_true", help="also emit R_N(X, Y) (default for g <= 2)")
    sp.add_argument("--output", metavar="FILE", help="also write the JSON here")
    pipeline_opts(sp)
    sp.set_defaults(func=cmd_jrep)

    sp = sub.add_parser("eval", help="j at a rational point of the model")
    level(sp)
    sp.add_argument("--point", type=_point, required=True, help="x,y (or x for genus 0)")
    pipeline_opts(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("verify", help="compare with the bundled reference tables")
    level(sp)
    sp.add_argument("--search", action="store_true",
                    help="use searched generators instead of the reference ones")
    pipeline_opts(sp, verify=True)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "verify" and args.N not in reference_levels():
        print(f"error: no reference record for N={args.N}", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (ValueError, KeyError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
