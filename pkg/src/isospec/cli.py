"""Command line interface.

    isospec verify   --q 9 [--exhaustive-oracle]
    isospec fields   --candidates 5,7,11 --limit 10000 [--format csv]
    isospec pipeline --type A2 --pprime 5 --drange 150:400
    isospec bounds   --type A2 --pprime 5 --drange 10:400
    isospec embed    --type B2 --q 5
    isospec order    --type A2 --q 3 | --type A2 --p 5 --inertia 1,2

Exit codes: 0 success, 1 counterexample, 2 usage, 3 cap exceeded, 4 empty result.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import math
import os
import sys
import tempfile

from . import __version__
from .errors import CAP_ENV_VAR, CapExceeded, IsospecError, enumeration_cap
from .numfmt import decimal_str

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_CAP, EXIT_EMPTY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _drange(text):
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if lo > hi:
        raise argparse.ArgumentTypeError("empty d range")
    return lo, hi


def _write(text: str, path: str | None):
    """Write once: stdout, or a temp file renamed over ``path``."""
    if not path:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".isospec-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
    cfg["cap"] = enumeration_cap(args.cap)
    cfg["version"] = __version__
    return cfg


def _emit_json(args, result: dict):
    doc = {"command": args.command, "config": _config(args), "result": result,
           "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")}
    _write(json.dumps(doc, indent=2) + "\n", args.output)


def _emit_csv(args, body: str):
    header = "# config: " + json.dumps(_config(args), sort_keys=True) + "\n"
    _write(header + body, args.output)


# -- commands -----------------------------------------------------------------

def cmd_verify(args) -> int:
    from .finfield import field_of_order
    from .heisenberg import HeisenbergGroup, bgg_family, product_family, product_group
    from .sunada import certify_family

    try:
        fields = [field_of_order(q, args.cap) for q in args.q]
    except ValueError as exc:
        raise UsageError(str(exc))
    expected = math.prod(F.p ** (F.n * (F.n - 1)) for F in fields)
    if len(fields) == 1:
        G = HeisenbergGroup(fields[0], args.cap)
        family = bgg_family(fields[0], G, args.cap)
    else:
        G = product_group(fields, args.cap)
        family = product_family([bgg_family(F, H, args.cap) for F, H in zip(fields, G.factors)], G, args.cap)
    cert = certify_family(G, family, exhaustive_oracle=args.exhaustive_oracle, cap=args.cap)
    cert["expected_family_size"] = expected
    if len(family) != expected:
        cert["failures"].append(f"family has {len(family)} members, expected {expected}")
        cert["verified"] = False
    _emit_json(args, cert)
    return EXIT_OK if cert["verified"] else EXIT_COUNTEREXAMPLE


def cmd_fields(args) -> int:
    from .cyclofields import conductor_table, table_to_csv, table_to_records

    rows = conductor_table(args.candidates, args.limit)
    if args.format == "csv":
        _emit_csv(args, table_to_csv(rows))
    else:
        _emit_json(args, {"rows": table_to_records(rows), "count": len(rows)})
    return EXIT_OK if rows else EXIT_EMPTY


def _params(args):
    from .bounds import default_params

    return default_params(args.type, c0=args.c0, c0_prime=args.c0_prime, p0=args.p0, pprime=args.pprime,
                          C=args.C, eps=args.eps, torsion_free=args.torsion_free, c_tf=args.c_tf,
                          paper_literal=args.paper_literal_count, s=args.s)


def _emit_growth(args, table, extra=None) -> int:
    if args.format == "csv":
        _emit_csv(args, table.to_csv())
    else:
        result = table.to_dict()
        if extra:
            result.update(extra)
        _emit_json(args, result)
    return EXIT_OK


def cmd_bounds(args) -> int:
    from .bounds import growth_table

    lo, hi = args.drange
    if lo < 2:
        raise UsageError("d must be at least 2")
    params = _params(args)
    return _emit_growth(args, growth_table(params, range(lo, hi + 1)))


def cmd_pipeline(args) -> int:
    from .bounds import growth_table
    from .cyclofields import decomposition_in_real_subfield, inert_conductor_stream, pipeline_degree

    params = _params(args)
    lo, hi = args.drange
    limit = hi + 1 if args.doubling else 2 * hi + 1
    conductors, degrees, inertia = [], [], []
    for ell, g in inert_conductor_stream({args.pprime}, limit):
        d, n = pipeline_degree(ell, args.doubling)
        if lo <= d <= hi:
            dec = decomposition_in_real_subfield(args.pprime, ell)
            if dec.residue_degree != (ell - 1) // 2:
                raise AssertionError(f"{args.pprime} is not inert for conductor {ell}")
            conductors.append(ell)
            degrees.append(d)
            inertia.append(n)
    if not conductors:
        _emit_json(args, {"conductors": [], "a_defined": False})
        return EXIT_EMPTY
    table = growth_table(params, degrees, conductors)
    if args.paper_literal_count:
        table.notes.append("counts use the literal c3^(d^2) variant")
    return _emit_growth(args, table, {"conductors": conductors, "inertia_degrees": inertia,
                                      "doubling": args.doubling})


def cmd_embed(args) -> int:
    from .finfield import field_of_order
    from .lietype import embedding_certificate

    try:
        F = field_of_order(args.q, args.cap)
    except ValueError as exc:
        raise UsageError(str(exc))
    cert = embedding_certificate(args.type, F, args.cap)
    _emit_json(args, cert.summary())
    return EXIT_OK if cert.isomorphism else EXIT_COUNTEREXAMPLE


def cmd_order(args) -> int:
    from .bounds import prop41_index_bound
    from .lietype import chevalley_order, parse_type

    t, r = parse_type(args.type)
    result = {"type": args.type}
    if args.q is not None:
        result["order"] = decimal_str(chevalley_order(t, r, args.q))
        result["q"] = args.q
    if args.inertia:
        if args.p is None:
            raise UsageError("--inertia needs --p")
        result["index_bound"] = decimal_str(prop41_index_bound(t, r, args.p, args.inertia))
    if len(result) == 1:
        raise UsageError("give --q, or --p with --inertia")
    _emit_json(args, result)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _bound_options(p):
    p.add_argument("--type", default="A2", help="group type, e.g. A2, B3, G2 (A1 is rejected)")
    p.add_argument("--pprime", type=int, default=5, choices=(5, 7, 11), help="inert prime p'")
    p.add_argument("--drange", type=_drange, default=(150, 400), help="LO:HI degree range")
    p.add_argument("--c0", type=float, default=1.0)
    p.add_argument("--c0-prime", type=float, default=1.0)
    p.add_argument("--p0", type=int, default=13)
    p.add_argument("--C", type=float, default=1.0, help="conjugacy-cap exponent constant")
    p.add_argument("--s", type=int, default=None, help="covolume exponent integer s (default 0)")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--torsion-free", action="store_true")
    p.add_argument("--c-tf", type=float, default=2.0, help="index multiplier for torsion-free subgroups")
    p.add_argument("--paper-literal-count", action="store_true",
                   help="use d^2 log c3 - d log(c5 d^(gamma C)) as the count")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isospec", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--cap", type=int, default=None,
                        help=f"enumeration cap (default ${CAP_ENV_VAR} or 65536)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="certify the H_T family in H(F_q) or a product")
    p.add_argument("--q", type=_int_list, required=True, help="prime power, or comma list for a product")
    p.add_argument("--exhaustive-oracle", action="store_true",
                   help="cross-check against every subgroup of the same order")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fields", parents=[common], help="conductors with an inert candidate prime")
    p.add_argument("--candidates", type=_int_list, default=[5, 7, 11])
    p.add_argument("--limit", type=int, default=1000)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_fields)

    p = sub.add_parser("pipeline", parents=[common], help="conductors -> degrees -> growth table")
    _bound_options(p)
    p.add_argument("--no-doubling", dest="doubling", action="store_false",
                   help="use Q(zeta_l)^+ itself (totally real case) instead of a quadratic extension")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("bounds", parents=[common], help="growth table over a range of degrees")
    _bound_options(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("embed", parents=[common], help="Heisenberg subgroup of SL3 / Sp4")
    p.add_argument("--type", default="A2", choices=("A2", "B2", "C2"))
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("order", parents=[common], help="Chevalley group orders and index bounds")
    p.add_argument("--type", required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--inertia", type=_int_list)
    p.set_defaults(func=cmd_order)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"isospec: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, IsospecError) as exc:
        print(f"isospec: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
