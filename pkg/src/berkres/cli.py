"""Command line interface.

Subcommands: eval-ordres, eval-hypres, depths, classify, minlocus, verify,
profile.  Output goes to stdout or --out FILE in text, json, or csv form;
when an output file is written, profile and verify also render a matplotlib
figure next to it (suppress with --no-plot, or point elsewhere with --plot).
"""

import argparse
import json
import sys

from . import harness, hypres, ratmap, redtheory
from .berktree import Segment, format_point, parse_point, point_along, rho
from .errors import BerkresError, EnlargeRamificationError
from .valfield import FieldConfig, format_fraction


def _add_common(sub, point=False):
    sub.add_argument("--backend", choices=["padic", "laurent"], default="padic")
    sub.add_argument("--p", type=int, default=None, help="residue characteristic (padic)")
    sub.add_argument("--e", type=int, default=1, help="ramification index")
    sub.add_argument("--map", required=True, help="rational map expression in z")
    sub.add_argument("--format", choices=["json", "csv", "text"], default="text")
    sub.add_argument("--out", default=None, help="write output to this file")
    sub.add_argument("--plot", default=None, help="write a figure to this file")
    sub.add_argument("--no-plot", action="store_true", help="never render figures")
    sub.add_argument("--degree-cap", type=int, default=ratmap.DEFAULT_DEGREE_CAP)
    if point:
        sub.add_argument("--point", required=True, help='type II point "center@t"')


def build_parser():
    parser = argparse.ArgumentParser(
        prog="berkres",
        description="Exact reduction loci of rational maps on the Berkovich line",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    _add_common(subs.add_parser("eval-ordres", help="ordRes at a point"), point=True)
    _add_common(subs.add_parser("eval-hypres", help="hypRes at a point"), point=True)
    _add_common(subs.add_parser("depths", help="depth profile at a point"), point=True)
    _add_common(subs.add_parser("classify", help="classify the reduction at the minimizer"))
    _add_common(subs.add_parser("minlocus", help="minimum locus of the map"))

    verify = subs.add_parser("verify", help="stationarity report for the iterates")
    _add_common(verify)
    verify.add_argument("--iters", type=int, default=harness.DEFAULT_ITERATES)

    profile = subs.add_parser("profile", help="ordRes/hypRes along a segment")
    _add_common(profile)
    profile.add_argument("--from", dest="from_point", required=True)
    profile.add_argument("--to", dest="to_point", required=True)
    profile.add_argument("--samples", type=int, default=5)
    return parser


def _config(args):
    if args.backend == "laurent":
        return FieldConfig("laurent", e=args.e)
    if args.p is None:
        raise BerkresError("--p is required for the padic backend")
    return FieldConfig("padic", p=args.p, e=args.e)


def _locus_json(locus):
    if isinstance(locus, Segment):
        return {
            "segment": {
                "a": harness._point_dict(locus.a),
                "b": harness._point_dict(locus.b),
            }
        }
    return harness._point_dict(locus)


def _emit(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _figure_path(args):
    if args.no_plot:
        return None
    if args.plot:
        return args.plot
    if args.out:
        stem = args.out.rsplit(".", 1)[0]
        return stem + ".png"
    return None


def _value_output(args, value):
    s = format_fraction(value)
    if args.format == "json":
        return json.dumps({"value": s}, indent=2)
    if args.format == "csv":
        return "value\n" + s
    return s


def cmd_eval_ordres(args):
    cfg = _config(args)
    m = ratmap.parse_map(args.map, cfg)
    pt = parse_point(args.point, cfg)
    _emit(args, _value_output(args, hypres.ord_res_at(m, pt)))
    return 0


def cmd_eval_hypres(args):
    cfg = _config(args)
    m = ratmap.parse_map(args.map, cfg)
    pt = parse_point(args.point, cfg)
    _emit(args, _value_output(args, hypres.hypres_eval(m, pt)))
    return 0


def cmd_depths(args):
    cfg = _config(args)
    m = ratmap.parse_map(args.map, cfg)
    pt = parse_point(args.point, cfg)
    profile = redtheory.depth_profile(m, pt)
    data = harness._profile_dict(profile)
    data["point"] = harness._point_dict(pt)
    if args.format == "csv":
        buf = ["tag,dep,count"]
        for d in data["directions"]:
            buf.append(f"{d['tag']},{d['dep']},{d['count']}")
        buf.append(f"point_mass,{data['point_mass']},1")
        _emit(args, "\n".join(buf))
    elif args.format == "text":
        lines = [f"depth profile at {format_point(pt)}"]
        for d in data["directions"]:
            count = f" (x{d['count']})" if d["count"] != 1 else ""
            lines.append(f"  toward {d['tag']}: {d['dep']}{count}")
        lines.append(f"  at the point: {data['point_mass']}")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, json.dumps(data, indent=2))
    return 0


def cmd_classify(args):
    cfg = _config(args)
    m = ratmap.parse_map(args.map, cfg)
    cl = harness.classify_reduction(m)
    data = {
        "classification": cl.kind,
        "period": cl.period,
        "xi_phi": harness._point_dict(cl.xi_phi),
    }
    if cl.detail:
        data["detail"] = cl.detail
    if args.format == "text":
        period = f" (period {cl.period})" if cl.period else ""
        _emit(args, f"{cl.kind}{period} at {format_point(cl.xi_phi)}")
    else:
        _emit(args, json.dumps(data, indent=2))
    return 0


def cmd_minlocus(args):
    cfg = _config(args)
    m = ratmap.parse_map(args.map, cfg)
    locus = hypres.min_locus(m)
    if args.format == "text":
        if isinstance(locus, Segment):
            _emit(args, f"segment {format_point(locus.a)} .. {format_point(locus.b)}")
        else:
            _emit(args, format_point(locus))
    else:
        _emit(args, json.dumps({"locus": _locus_json(locus)}, indent=2))
    return 0


def cmd_verify(args):
    cfg = _config(args)
    if args.degree_cap > ratmap.DEFAULT_DEGREE_CAP:
        print(
            f"warning: degree cap raised to {args.degree_cap}; "
            "iterates grow exponentially",
            file=sys.stderr,
        )
    m = ratmap.parse_map(args.map, cfg)
    report = harness.verify_theorem(
        m, args.iters, map_text=args.map, degree_cap=args.degree_cap
    )
    data = report.to_dict()
    if args.format == "csv":
        buf = ["j,locus_center,locus_t,semistability,matches,millis"]
        for row in data["per_j"]:
            loc = row["locus"]
            center, t = (loc["center"], loc["t"]) if "center" in loc else ("segment", "")
            buf.append(
                f"{row['j']},{center},{t},{row['semistability']},"
                f"{row['matches_prediction']},{row['millis']}"
            )
        _emit(args, "\n".join(buf))
    elif args.format == "text":
        lines = [
            f"map: {data['map']}",
            f"classification: {data['classification']}"
            + (f" (period {data['period']})" if data["period"] else ""),
            f"xi_phi: {data['xi_phi']['center']}@{data['xi_phi']['t']}",
        ]
        if data["xi_0"]:
            lines.append(f"xi_0:   {data['xi_0']['center']}@{data['xi_0']['t']}")
        for row in data["per_j"]:
            loc = row["locus"]
            where = (
                f"{loc['center']}@{loc['t']}" if "center" in loc else "segment"
            )
            ok = "ok" if row["matches_prediction"] else "MISMATCH"
            lines.append(
                f"j={row['j']}: locus {where}  [{row['semistability']}] {ok}"
            )
        lines.append(f"theorem holds: {data['theorem_holds']}")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, json.dumps(data, indent=2))
    fig = _figure_path(args)
    if fig:
        from . import plotting

        plotting.save_report_figure(data, fig)
    return 0 if data["theorem_holds"] else 1


def cmd_profile(args):
    cfg = _config(args)
    m = ratmap.parse_map(args.map, cfg)
    start = parse_point(args.from_point, cfg)
    end = parse_point(args.to_point, cfg)
    if args.samples < 2:
        raise BerkresError("--samples must be at least 2")
    length = rho(start, end)
    rows = []
    coarse = False
    for k in range(args.samples):
        dist = length * k / (args.samples - 1)
        pt = point_along(start, end, dist)
        orv = hypres.ord_res_at(m, pt)
        try:
            hrv = hypres.hypres_eval(m, pt)
        except EnlargeRamificationError:
            hrv = None
            coarse = True
        rows.append((pt.texp, orv, hrv))
    if coarse:
        print(
            "warning: hyp_res left blank at some samples; the retraction "
            "integral needs a larger ramification index e",
            file=sys.stderr,
        )

    def fmt(v):
        return "" if v is None else format_fraction(v)

    if args.format == "json":
        data = {
            "rows": [
                {"t": format_fraction(t), "ord_res": fmt(o), "hyp_res": fmt(h)}
                for t, o, h in rows
            ]
        }
        _emit(args, json.dumps(data, indent=2))
    else:
        buf = ["t,ord_res,hyp_res"]
        for t, o, h in rows:
            buf.append(f"{format_fraction(t)},{fmt(o)},{fmt(h)}")
        _emit(args, "\n".join(buf))
    fig = _figure_path(args)
    if fig:
        from . import plotting

        plotting.save_profile_figure(rows, fig, title=args.map)
    return 0


_COMMANDS = {
    "eval-ordres": cmd_eval_ordres,
    "eval-hypres": cmd_eval_hypres,
    "depths": cmd_depths,
    "classify": cmd_classify,
    "minlocus": cmd_minlocus,
    "verify": cmd_verify,
    "profile": cmd_profile,
}


_EXPR_FLAGS = {"--map", "--point", "--from", "--to"}


def _join_expr_flags(argv):
    """Glue expression flags to their values so maps starting with a minus
    sign (like "-z*(z-10)/(z-4)") survive argparse."""
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in _EXPR_FLAGS and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(_join_expr_flags(list(argv)))
    try:
        return _COMMANDS[args.command](args)
    except BerkresError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
