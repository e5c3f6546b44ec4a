"""Command-line front end.

Exit codes: 0 on success, 1 on a domain error (the error code is printed on
stderr as ``error: <code>: <message>``), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .cyclotomic import parse_rational
from .errors import CyctomoError

CONFIG_KEYS = {"precision_cap_bits", "workers", "scale", "out"}


class UsageError(Exception):
    pass


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj, out: str | None) -> None:
    _write(json.dumps(obj) + "\n", out)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def read_config(path: str) -> dict[str, str]:
    """key = value lines; '#' starts a comment; [sections] are ignored."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value.strip('"').strip("'")
    return out


def parse_int_list(text: str) -> list[int]:
    """Comma list with an optional arithmetic ellipsis: '0,2,...,22'."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    out: list[int] = []
    i = 0
    while i < len(parts):
        if parts[i] == "...":
            if len(out) < 2 or i + 1 >= len(parts):
                raise UsageError(f"bad ellipsis in {text!r}")
            step = out[-1] - out[-2]
            stop = int(parts[i + 1])
            if step <= 0 or (stop - out[-1]) % step:
                raise UsageError(f"ellipsis in {text!r} does not reach {stop}")
            out.extend(range(out[-1] + step, stop + 1, step))
            i += 2
            continue
        try:
            out.append(int(parts[i]))
        except ValueError as exc:
            raise UsageError(f"not an integer: {parts[i]!r}") from exc
        i += 1
    return out


# -- subcommands -----------------------------------------------------------------


def cmd_enumerate(args) -> int:
    from .solutions import records_to_csv, solve_in_field

    recs = solve_in_field(args.m, args.sqrt, workers=args.workers)
    if not args.all:
        recs = [r for r in recs if r.sporadic]
    if args.format == "csv":
        _write(records_to_csv(recs), args.out)
    else:
        _dump([r.to_json() for r in recs], args.out)
    return 0


def cmd_obstruction_set(args) -> int:
    from .solutions import obstruction_set

    obs = obstruction_set(args.n, general=args.general, workers=args.workers)
    vals = obs.sorted_values()
    _dump(
        {
            "n": obs.n,
            "m": obs.m_used,
            "count": len(vals),
            "values": [v.to_json() for v in vals],
            "display": [str(v) for v in vals],
        },
        args.out,
    )
    return 0


def _spec_from_args(n: int, window: str | None, star: int | None):
    from .modelset import ModelSetSpec, parse_window

    if window in (None, "default"):
        spec = ModelSetSpec.default(n)
        if star is None:
            return spec
        return ModelSetSpec(n, star, spec.window)
    if window == "shield":
        window = "dodecagon:1"
    verts = parse_window(window, n)
    if star is None:
        from .modelset import DEFAULT_STAR

        star = DEFAULT_STAR.get(n, 0)
    return ModelSetSpec(n, star, verts)


def cmd_modelset(args) -> int:
    from .modelset import generate_patch

    spec = _spec_from_args(args.n, args.window, args.star)
    patch = generate_patch(spec, parse_rational(args.radius), workers=args.workers)
    _dump(patch.to_json(), args.out)
    return 0


def _points_from_json(obj) -> tuple[int, list]:
    from .modelset import LatticePoint

    if "points" not in obj or "n" not in obj:
        raise UsageError("input JSON needs 'n' and 'points'")
    n = int(obj["n"])
    return n, [LatticePoint.from_json(p, n) for p in obj["points"]]


def cmd_xray(args) -> int:
    from .tomography import Direction, xray

    n, pts = _points_from_json(_load_json(args.patch))
    dirs = [Direction.parse(d, n) for d in args.dir]
    _dump([xray(pts, u).to_json() for u in dirs], args.out)
    return 0


def cmd_certify(args) -> int:
    from .tomography import Direction, Slope, certify_slopes, determination_certificate

    if args.slopes:
        cert = certify_slopes([Slope.parse(s) for s in args.slopes.split(",")], args.n)
    else:
        raw = _load_json(args.dirs)
        items = raw["directions"] if isinstance(raw, dict) else raw
        cert = determination_certificate([Direction(args.n, d) for d in items], args.n)
    out = cert.to_json()
    if args.out:
        _dump(out, args.out)
    else:
        sys.stdout.write(cert.status + "\n")
        if args.verbose:
            _dump(out, None)
    return 0


def cmd_max_dirs(args) -> int:
    from .upolygon import max_direction_sets, printed_ranges

    md = max_direction_sets(args.n, source=args.source)
    obj = md.to_json()
    if args.compare and args.n in (5, 8, 12):
        _, printed = printed_ranges(args.n)
        got = {r.hs for r in md.ranges}
        ref = {r.hs for r in printed}
        obj["printed_only"] = sorted(list(h) for h in ref - got)
        obj["computed_only"] = sorted(list(h) for h in got - ref)
    _dump(obj, args.out)
    return 0


def cmd_upolygon(args) -> int:
    from .upolygon import build_upolygon, ghost_pair

    hs = parse_int_list(args.range)
    P = build_upolygon(hs, args.n, m=args.m, vertices=args.vertices, star_exponent=args.star)
    if args.embed in (None, "none"):
        _dump(P.to_json(), args.out)
        return 0
    spec = _spec_from_args(args.n, args.embed, args.star)
    _dump(ghost_pair(P, spec).to_json(), args.out)
    return 0


def cmd_ghost(args) -> int:
    from .upolygon import UPolygon, ghost_pair

    P = UPolygon.from_json(_load_json(args.polygon))
    spec = _spec_from_args(P.n, args.window, args.star)
    _dump(ghost_pair(P, spec).to_json(), args.out)
    return 0


def cmd_render(args) -> int:
    from .modelset import Patch
    from .svg import RenderSpec, render
    from .upolygon import GhostPair, UPolygon

    obj = _load_json(args.input)
    if "black" in obj:
        item = GhostPair.from_json(obj)
    elif "vertices" in obj:
        item = UPolygon.from_json(obj)
    elif "points" in obj:
        item = Patch.from_json(obj)
    else:
        raise UsageError("input is neither a patch, a U-polygon nor a ghost pair")
    vp = None
    if args.viewport:
        vp = tuple(parse_rational(v) for v in args.viewport.split(","))
        if len(vp) != 4:
            raise UsageError("--viewport takes xmin,ymin,xmax,ymax")
    spec = RenderSpec(scale=parse_rational(args.scale), viewport=vp)
    _write(render(item, spec), args.out)
    return 0


def cmd_reconcile(args) -> int:
    from .solutions import load_reference, parse_reference, reconcile_with_reference, solve_in_field

    ref = parse_reference(_load_json(args.reference), args.table) if args.reference else load_reference(args.table)
    recs = solve_in_field(ref.m, ref.D, workers=args.workers)
    report = reconcile_with_reference(recs, ref)
    if args.format == "text":
        _write("\n".join(report.lines()) + "\n", args.out)
    else:
        _dump(report.to_json(), args.out)
    return 1 if args.strict and not report.empty else 0


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cyctomo", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key = value file (precision_cap_bits, workers, scale, out)")
    p.add_argument("--precision-cap-bits", type=int, help="cap for sign refinement (default 4096)")
    p.add_argument("--workers", type=int, default=None, help="worker threads for enumeration")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="output file (default stdout)")
        return sp

    sp = add("enumerate", cmd_enumerate, "solutions of f_m(d) in Q(sqrt D)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--sqrt", type=int, required=True, help="squarefree D (1 for rational values)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--all", action="store_true", help="include the two infinite families")

    sp = add("obstruction-set", cmd_obstruction_set, "values C(Q(zeta_n)^+)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--general", action="store_true", help="allow fields beyond real quadratic")

    sp = add("modelset", cmd_modelset, "patch of a cyclotomic model set")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--window", default=None, help="shape:radius, e.g. octagon:1, or 'shield'")
    sp.add_argument("--star", type=int, default=None, help="exponent a of the star map")
    sp.add_argument("--radius", required=True)

    sp = add("xray", cmd_xray, "discrete X-rays of a point set")
    sp.add_argument("--patch", required=True, help="JSON with 'n' and 'points'")
    sp.add_argument("--dir", action="append", required=True, help="coefficient list, repeatable")

    sp = add("certify", cmd_certify, "determination certificate for a direction set")
    sp.add_argument("--n", type=int, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--slopes", help="comma list of slopes, 'inf' allowed")
    g.add_argument("--dirs", help="JSON list of direction coefficient vectors")
    sp.add_argument("--verbose", action="store_true")

    sp = add("max-dirs", cmd_max_dirs, "maximal direction ranges and b_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--source", choices=("computed", "printed"), default="computed")
    sp.add_argument("--compare", action="store_true", help="diff against the shipped range lists")

    sp = add("upolygon", cmd_upolygon, "build a U-polygon, optionally its ghost pair")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--range", required=True, help="h values, e.g. '0,2,...,22'")
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--vertices", type=int, default=None)
    sp.add_argument("--star", type=int, default=None)
    sp.add_argument("--embed", default=None, help="window for a ghost pair, e.g. shield")

    sp = add("ghost", cmd_ghost, "ghost pair of a U-polygon JSON")
    sp.add_argument("--polygon", required=True)
    sp.add_argument("--window", default=None)
    sp.add_argument("--star", type=int, default=None)

    sp = add("render", cmd_render, "SVG of a patch, U-polygon or ghost pair")
    sp.add_argument("--input", required=True)
    sp.add_argument("--scale", default="20")
    sp.add_argument("--viewport", default=None, help="xmin,ymin,xmax,ymax")

    sp = add("reconcile", cmd_reconcile, "diff a reference table against enumeration")
    sp.add_argument("--table", choices=("a", "b", "c"), required=True)
    sp.add_argument("--reference", default=None, help="alternative transcription JSON")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.add_argument("--strict", action="store_true", help="exit 1 on a nonempty diff")
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = read_config(args.config) if args.config else {}
        cap = args.precision_cap_bits or cfg.get("precision_cap_bits")
        if cap is not None:
            if int(cap) < 64:
                raise UsageError("precision cap must be at least 64 bits")
            os.environ["DT_PRECISION_CAP_BITS"] = str(int(cap))
        if args.workers is None:
            args.workers = int(cfg.get("workers", 1))
        if getattr(args, "out", None) is None and "out" in cfg:
            args.out = cfg["out"]
        if args.command == "render" and "scale" in cfg and args.scale == "20":
            args.scale = cfg["scale"]
        return args.func(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except CyctomoError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError) as exc:
        # malformed input values that escaped the parser
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
