"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 violated precondition,
4 internal inconsistency (a guaranteed step failed).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .automorphism import check_fixed_congruence, fixed_lattice, index_report, load_automorphism
from .congruence import (
    default_precision,
    e6_reduced,
    eisenstein_from_neighbors,
    find_congruent_form,
    grading_tag,
    weight_of,
)
from .exceptions import InvalidInput, PreconditionError, ThetaCongError
from .fixtures import FIXTURES, load_fixture
from .lattice import Lattice, direct_sum, load_lattice
from .lifting import main_theorem_pipeline
from .modforms import extremal_form
from .theta import theta_series


def _lattice(arg: str) -> Lattice:
    """A JSON path, or ``fixture:NAME`` for a packaged lattice."""
    if arg.startswith("fixture:"):
        name = arg.split(":", 1)[1]
        if name not in FIXTURES:
            raise InvalidInput(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
        return load_fixture(name)
    path = Path(arg)
    if not path.is_file():
        raise InvalidInput(f"no such file: {arg}")
    return load_lattice(path)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


def _fmt_series(coeffs) -> str:
    return " ".join(str(c) for c in coeffs)


def _csv(values) -> str:
    return ",".join(str(v) for v in values)


def cmd_analyze(args) -> int:
    L = _lattice(args.lattice)
    info = {
        "rank": L.rank,
        "det": L.det,
        "divisors": list(L.elementary_divisors),
        "level": L.level,
        "e": L.e_sum,
    }
    if L.e_sum % 2 == 0:
        info["weight"] = L.e_sum // 2
    if args.l is not None:
        tag = grading_tag(L, args.l)
        info["grading"] = {"residue": tag.residue, "modulus": tag.modulus}
    if args.json:
        print(_dump(info))
        return 0
    parts = [f"rank {L.rank}", f"det {L.det}", f"divisors {_csv(L.elementary_divisors)}",
             f"level {L.level}", f"e={L.e_sum}"]
    if "weight" in info:
        parts.append(f"weight {info['weight']}")
    print(", ".join(parts))
    if args.l is not None:
        print(f"grading t = {info['grading']['residue']} mod {info['grading']['modulus']}")
    return 0


def cmd_theta(args) -> int:
    L = _lattice(args.lattice)
    s = theta_series(L, args.N, n_jobs=args.threads, reduce=args.reduce)
    if args.json:
        print(_dump({"N": args.N, "coefficients": list(s.coeffs)}))
    else:
        print(_fmt_series(s.coeffs))
    return 0


def cmd_extremal(args) -> int:
    f = extremal_form(args.k, args.N)
    monos = [list(m) for m in f.monomials]
    if args.json:
        print(_dump({"weight": f.weight, "monomials": monos, "coords": list(f.coords),
                     "form": f.describe(), "expansion": list(f.expansion.coeffs)}))
        return 0
    print(f"weight {f.weight}")
    print(f"form {f.describe()}")
    print(f"coords {_csv(f.coords)}")
    print(f"expansion {_fmt_series(f.expansion.coeffs)}")
    return 0


def cmd_congruence(args) -> int:
    L = _lattice(args.lattice)
    cert = find_congruent_form(L, args.l, args.N, n_jobs=args.threads)
    if args.json:
        data = cert.to_dict()
        if args.table:
            data["table"] = [list(r) for r in cert.table()]
        print(_dump(data))
        return 0
    print(f"weight {cert.weight}")
    print(f"form {cert.form.describe()}")
    print(f"coords {_csv(cert.form.coords)}")
    print(f"verified to q^{cert.verified_to} (Sturm bound {cert.sturm_bound})")
    if args.table:
        print("n r_L(n) f_n r_L(n)_mod_l")
        for row in cert.table():
            print(" ".join(str(v) for v in row))
    return 0


def cmd_lift(args) -> int:
    L = _lattice(args.lattice)
    N = args.N if args.N is not None else default_precision(weight_of(L, args.l))
    rep = main_theorem_pipeline(L, args.l, N, lift_precision=args.lift_N, n_jobs=args.threads)
    if args.json:
        print(_dump(rep.to_dict()))
        return 0
    hat = rep.lift.hat_lattice
    print(f"hat rank {hat.rank}, det {hat.det}, level {hat.level}")
    print(f"blocks {_csv(rep.lift.block_sizes)}, norms {_csv(rep.lift.norms)}, d {rep.lift.d}")
    print("gram " + json.dumps([list(r) for r in hat.gram]))
    print("sigma " + json.dumps([list(r) for r in rep.lift.sigma.matrix]))
    for name, value in rep.steps:
        print(f"ok {name} {value}")
    return 0


def cmd_fixed(args) -> int:
    L = _lattice(args.lattice)
    sigma = load_automorphism(L, args.automorphism)
    fixed, emb = fixed_lattice(L, sigma)
    info = {
        "order": sigma.order,
        "fixed_rank": fixed.rank,
        "fixed_gram": [list(r) for r in fixed.gram],
        "embedding": [list(r) for r in emb],
    }
    if args.l is not None:
        info["congruent_to"] = args.N if check_fixed_congruence(L, sigma, args.l, args.N) else None
        rep = index_report(L, sigma, args.l)
        info["index_report"] = {
            "dual_fixed_mod_fixed": rep.dual_fixed_mod_fixed,
            "det_fixed_lattice": rep.det_fixed_lattice,
            "fixed_det_group": rep.fixed_det_group,
            "index_in_det_fixed": rep.index_in_det_fixed,
            "index_in_fixed_det": rep.index_in_fixed_det,
        }
    if args.json:
        print(_dump(info))
        return 0
    print(f"order {sigma.order}, fixed rank {fixed.rank}")
    print("fixed gram " + json.dumps(info["fixed_gram"]))
    if args.l is not None:
        print(f"theta congruent mod {args.l} to q^{args.N}")
        for k, v in info["index_report"].items():
            print(f"{k} {v}")
    return 0


def cmd_neighbors(args) -> int:
    if not args.slow:
        raise PreconditionError("the neighbour sum is minutes-scale; pass --slow to run it")
    L = direct_sum(*(_lattice(p) for p in args.lattice))
    total, rep = eisenstein_from_neighbors(L, args.l, args.N, n_jobs=args.threads)
    target = e6_reduced(args.l, args.N)
    info = {"lines": rep.lines, "isotropic_lines": rep.isotropic_lines,
            "series": list(total.coeffs), "e6_reduced": list(target.coeffs),
            "matches_e6": total == target}
    if args.json:
        print(_dump(info))
    else:
        print(f"lines {rep.lines}, isotropic {rep.isotropic_lines}")
        print(f"series {_fmt_series(total.coeffs)}")
        print(f"E6 mod {args.l} {_fmt_series(target.coeffs)}")
        print(f"matches {info['matches_e6']}")
    return 0 if info["matches_e6"] else 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetacong",
                                description="Theta series congruences of even lattices.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, lattice=True, ell=False, ell_required=False, n_default=20):
        if lattice:
            sp.add_argument("lattice", help="lattice JSON file or fixture:NAME")
        if ell:
            sp.add_argument("--l", type=int, required=ell_required, help="prime ell >= 5")
        if n_default is not False:
            sp.add_argument("-N", type=int, default=n_default, help="precision")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--threads", type=int, default=1, help="theta worker threads")

    sp = sub.add_parser("analyze", help="invariants of a lattice")
    common(sp, ell=True, n_default=False)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("theta", help="theta series coefficients")
    common(sp)
    sp.add_argument("--reduce", action="store_true", help="LLL-reduce before enumerating")
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("extremal", help="extremal level-one form of weight k")
    common(sp, lattice=False)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_extremal)

    sp = sub.add_parser("congruence", help="level-one form congruent to the theta series")
    common(sp, ell=True, ell_required=True, n_default=None)
    sp.add_argument("--table", action="store_true", help="per-coefficient table")
    sp.set_defaults(func=cmd_congruence)

    sp = sub.add_parser("lift", help="lift to a lattice with an automorphism, with checks")
    common(sp, ell=True, ell_required=True, n_default=None)
    sp.add_argument("--lift-N", type=int, default=None,
                    help="precision of the lifted theta comparison (default N)")
    sp.set_defaults(func=cmd_lift)

    sp = sub.add_parser("fixed", help="fixed lattice of an automorphism")
    common(sp, ell=True, n_default=10)
    sp.add_argument("automorphism", help='automorphism JSON {"matrix": ...}')
    sp.set_defaults(func=cmd_fixed)

    sp = sub.add_parser("neighbors", help="E6 mod ell from isotropic neighbours")
    sp.add_argument("lattice", nargs="+", help="summands of the lattice")
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("-N", type=int, default=10)
    sp.add_argument("--slow", action="store_true", help="allow the long computation")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_neighbors)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "N", 1) is not None and getattr(args, "N", 1) < 1:
        print("error: InvalidInput: N must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ThetaCongError as exc:
        name = type(exc).__name__
        msg = str(exc)
        print(f"error: {msg}" if msg.startswith(name) else f"error: {name}: {msg}",
              file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
