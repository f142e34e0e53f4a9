"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 I/O error.
Numbers in data files carry six significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import comparison, dimensioning, placement, propagation
from .propagation import DomainError, LinkModelParams, PathGeometry
from .scene import SceneError, load_scene, los_many
from .tables import Table, fmt, write_pgm

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_IO = 0, 2, 3, 4

PGM_LEGEND = "gray levels: 255=bs_los 0=uncovered ris k=64+48*((k-1) mod 4)"


class UsageError(Exception):
    pass


def _gray(code: int) -> int:
    if code == placement.BS_LOS:
        return 255
    if code == placement.UNCOVERED:
        return 0
    return 64 + 48 * ((code - 1) % 4)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("element counts must be >= 1")
    return values


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {v}")
    return v


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _formats(args, allowed) -> set[str]:
    chosen = set(args.format or allowed)
    return chosen & set(allowed)


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def _coverage_outputs(out: Path, stem: str, scene, labels: np.ndarray, coverage, formats):
    pts = scene.grid.points()
    written = []
    if "csv" in formats:
        lines = ["x,y,label"]
        lines += [
            f"{fmt(x)},{fmt(y)},{coverage.label_name(int(c))}"
            for (x, y, _), c in zip(pts, labels)
        ]
        _write(out / f"{stem}.csv", "\n".join(lines) + "\n")
        written.append(out / f"{stem}.csv")
    if "pgm" in formats:
        img = np.array([_gray(int(c)) for c in labels]).reshape(scene.grid.ny, scene.grid.nx)
        path = out / f"{stem}.pgm"
        try:
            write_pgm(path, img[::-1], comments=[PGM_LEGEND, "top row is ymax, left column is xmin"])
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from None
        written.append(path)
    return written


def cmd_los_map(args) -> list[Path]:
    scene = load_scene(_require_scene(args))
    out = _out_dir(args)
    bs_los = los_many(scene, scene.bs, scene.grid.points())
    labels = np.where(bs_los, placement.BS_LOS, placement.UNCOVERED)
    cov = placement.CoverageGrid(scene.grid, labels)
    return _coverage_outputs(out, "los_map", scene, labels, cov, _formats(args, ("csv", "pgm")))


def cmd_place(args) -> list[Path]:
    scene = load_scene(_require_scene(args))
    if not scene.candidates:
        raise SceneError("scene has no RIS candidates")
    link_filter = None
    if args.max_pathloss_db is not None:
        params = LinkModelParams(frequency_hz=args.freq, ris_elements=args.elements)
        link_filter = placement.pathloss_filter(params, args.max_pathloss_db)
    out = _out_dir(args)
    plan, _ = placement.greedy_place(scene, args.k, link_filter)
    report = placement.coverage_report(scene, plan)
    formats = _formats(args, ("csv", "pgm", "json"))
    written = []
    if "json" in formats:
        _write(out / "plan.json", json.dumps(plan.to_dict(), indent=2, sort_keys=True) + "\n")
        written.append(out / "plan.json")
    written += _coverage_outputs(
        out, "coverage", scene, report.coverage.labels, report.coverage, formats
    )
    lines = report.summary_lines()
    if plan.truncated:
        lines.append(f"note requested k={plan.requested_k} truncated to {len(plan)} candidates")
    if link_filter is not None:
        lines.append(
            f"pathloss_limit_db {fmt(args.max_pathloss_db)} freq_hz {fmt(args.freq)} elements {args.elements}"
        )
    for row in placement.candidate_coverage_table(scene, link_filter):
        lines.append(
            f"candidate{row['candidate_index']} raw_los {row['raw_los_count']}"
            f" fov_best {row['fov_best_count']} orientation_deg {fmt(row['orientation_deg'])}"
        )
    _write(out / "summary.txt", "\n".join(lines) + "\n")
    written.append(out / "summary.txt")
    return written


def _params(args, **overrides) -> LinkModelParams:
    kw = dict(frequency_hz=args.freq)
    for name, attr in (
        ("bandwidth_hz", "bandwidth"),
        ("noise_figure_db", "noise_figure"),
        ("rate_bps_per_hz", "rate"),
        ("blockage_db", "blockage_db"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            kw[name] = value
    kw.update(overrides)
    return LinkModelParams(**kw)


def cmd_dimension(args) -> list[Path]:
    params = _params(args)
    query = dimensioning.DimensioningQuery(
        params, mode=args.mode, rho_t_m=args.rho_t, rho_d_rule=args.rho_d_rule
    )
    if not (0 < args.dmin <= args.dmax and args.dstep > 0):
        raise DomainError("distance sweep needs 0 < dmin <= dmax and dstep > 0")
    n_steps = int(round((args.dmax - args.dmin) / args.dstep))
    distances = args.dmin + args.dstep * np.arange(n_steps + 1)
    out = _out_dir(args)
    tag = f"{fmt(args.freq / 1e9)}GHz_{args.mode}"
    pl = dimensioning.pathloss_curve(query, args.n, distances)
    dim = dimensioning.dimensioning_curve(query, distances)
    paths = [out / f"pathloss_{tag}.csv", out / f"dimensioning_{tag}.csv"]
    _write(paths[0], pl.to_csv())
    _write(paths[1], dim.to_csv(int_columns=("n_req",)))
    return paths


def cmd_compare(args) -> list[Path]:
    out = _out_dir(args)
    paths = []
    for f in args.freq:
        setup = comparison.ComparisonSetup(
            params=_params(argparse.Namespace(**{**vars(args), "freq": f})),
            d_bs_ris_m=args.d_bs_ris,
            lateral_offset_m=args.lateral_offset,
            d1_range_m=tuple(float(x) for x in np.arange(args.d1_min, args.d1_max + 1e-9, args.d1_step)),
        )
        table = comparison.power_sweep(setup, args.n, ee=args.ee, p_overhead_w=args.overhead_w)
        path = out / f"power_{fmt(f / 1e9)}GHz.csv"
        _write(path, table.to_csv())
        paths.append(path)
    return paths


def cmd_pathloss(args) -> float:
    m = args.model
    if m == "knife":
        if args.v is not None:
            loss = propagation.knife_edge_loss_from_v(args.v)
        else:
            if None in (args.f, args.d1, args.d2, args.h):
                raise UsageError("knife needs --v or all of --f --d1 --d2 --h")
            loss = propagation.knife_edge_loss_db(propagation.wavelength(args.f), args.d1, args.d2, args.h)
        return float(loss)
    if args.f is None:
        raise UsageError(f"{m} needs --f")
    lam = propagation.wavelength(args.f)
    if m == "umi":
        return propagation.umi_pathloss_db(args.f, _need(args, "d"), los=not args.nlos)
    if m == "fspl":
        gain = propagation.fspl_gain(lam, _need(args, "d"))
    elif m == "two-ray":
        gain = propagation.two_ray_gain(lam, _need(args, "d"), _need(args, "ht"), _need(args, "hr"), args.gamma)
    else:  # ris
        params = LinkModelParams(frequency_hz=args.f, ris_elements=_need(args, "n"))
        rho_t, rho_r = _need(args, "rho_t"), _need(args, "rho_r")
        geom = PathGeometry(args.rho_d or float(np.hypot(rho_t, rho_r)), rho_t, rho_r)
        gain = propagation.ris_path_gain(params, geom, args.theta_i, args.theta_r)
    return float(-propagation.to_db(gain))


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"{args.model} needs --{name.replace('_', '-')}")
    return value


def _require_scene(args):
    if not getattr(args, "scene", None):
        raise UsageError(f"{args.command} needs --scene")
    return args.scene


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", default=argparse.SUPPRESS, help="scene JSON file")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument(
        "--format", action="append", choices=("csv", "pgm", "json"), default=argparse.SUPPRESS,
        help="restrict outputs to these formats (repeatable)",
    )

    parser = argparse.ArgumentParser(
        prog="risplan", description="RIS placement, dimensioning and power comparison", parents=[common]
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("los-map", parents=[common], help="direct BS line-of-sight map")

    p = sub.add_parser("place", parents=[common], help="greedy RIS placement")
    p.add_argument("--k", type=_positive_int, required=True, help="number of RIS to place")
    p.add_argument(
        "--max-pathloss-db", type=float, default=None,
        help="also require the broadside RIS path loss to stay within this budget",
    )
    p.add_argument("--freq", type=float, default=6e9, help="Hz, used with --max-pathloss-db")
    p.add_argument("--elements", type=_positive_int, default=484, help="RIS element count for the budget")

    link = argparse.ArgumentParser(add_help=False)
    link.add_argument("--bandwidth", type=float, help="Hz (default 10e6)")
    link.add_argument("--noise-figure", type=float, help="dB (default 10)")
    link.add_argument("--rate", type=float, help="bit/s/Hz (default 4)")

    d = sub.add_parser("dimension", parents=[common, link], help="path-loss and sizing curves")
    d.add_argument("--freq", type=float, default=6e9)
    d.add_argument("--mode", choices=(dimensioning.FIXED_RHO_T, dimensioning.SYMMETRIC), default=dimensioning.SYMMETRIC)
    d.add_argument("--rho-t", type=float, default=20.0)
    d.add_argument("--rho-d-rule", choices=(dimensioning.RIGHT_ANGLE, dimensioning.COLLINEAR), default=dimensioning.RIGHT_ANGLE)
    d.add_argument("--blockage-db", type=float, default=20.0)
    d.add_argument("--n", type=_int_list, default=None, help="comma-separated element counts")
    d.add_argument("--dmin", type=float, default=1.0)
    d.add_argument("--dmax", type=float, default=100.0)
    d.add_argument("--dstep", type=float, default=0.01)

    c = sub.add_parser("compare", parents=[common, link], help="SISO / relay / RIS transmit power")
    c.add_argument("--freq", type=float, action="append", help="Hz, repeatable (default 6e9 and 27e9)")
    c.add_argument("--n", type=_int_list, default=list(comparison.DEFAULT_N))
    c.add_argument("--ee", action="store_true", help="add energy-efficiency columns")
    c.add_argument("--overhead-w", type=float, default=0.0, help="static power added for EE")
    c.add_argument("--d-bs-ris", type=float, default=80.0)
    c.add_argument("--lateral-offset", type=float, default=10.0)
    c.add_argument("--d1-min", type=float, default=20.0)
    c.add_argument("--d1-max", type=float, default=120.0)
    c.add_argument("--d1-step", type=float, default=1.0)

    pl = sub.add_parser("pathloss", parents=[common], help="evaluate one model and print the loss in dB")
    pl.add_argument("model", choices=("fspl", "umi", "two-ray", "knife", "ris"))
    pl.add_argument("--f", type=float, help="frequency in Hz")
    pl.add_argument("--d", type=float, help="distance in m")
    pl.add_argument("--nlos", action="store_true")
    pl.add_argument("--ht", type=float)
    pl.add_argument("--hr", type=float)
    pl.add_argument("--gamma", type=float, default=-1.0)
    pl.add_argument("--v", type=float, help="Fresnel parameter")
    pl.add_argument("--d1", type=float)
    pl.add_argument("--d2", type=float)
    pl.add_argument("--h", type=float)
    pl.add_argument("--n", type=int)
    pl.add_argument("--rho-t", type=float)
    pl.add_argument("--rho-r", type=float)
    pl.add_argument("--rho-d", type=float)
    pl.add_argument("--theta-i", type=float, default=0.0)
    pl.add_argument("--theta-r", type=float, default=0.0)
    return parser


COMMANDS = {
    "los-map": cmd_los_map,
    "place": cmd_place,
    "dimension": cmd_dimension,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name, default in (("out", "."), ("format", None), ("scene", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.command == "dimension" and args.n is None:
        args.n = [484, 121] if args.freq < 15e9 else [2500, 625]
    if args.command == "compare" and not args.freq:
        args.freq = [6e9, 27e9]
    try:
        if args.command == "pathloss":
            print(f"{fmt(cmd_pathloss(args))} dB")
        else:
            for path in COMMANDS[args.command](args):
                print(path)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"risplan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SceneError, DomainError, ValueError) as exc:
        print(f"risplan: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"risplan: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
