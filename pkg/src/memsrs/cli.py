"""Command-line front end: device info, address mapping, benchmark sweeps.

Output is plain text for `info` and `map`, CSV for the bench commands
(stdout by default, a file with --out).  Device geometry comes from the
built-in reference preset unless --device-config points at a key/value
file; behavioral flags always win over both.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Sequence

from . import bench
from .device import DeviceParams, cmu_defaults, derive, load_config
from .rs import PhysAddr, RSAddr, mems_to_rs, rs_params, rs_to_mems


def _ratio(token: str) -> float:
    """Number or fraction: '8', '0.5', and '1/16' all parse."""
    if "/" in token:
        num, _, den = token.partition("/")
        return float(num) / float(den)
    return float(token)


def _num_list(text: str, conv) -> List:
    return [conv(tok.strip()) for tok in text.split(",") if tok.strip()]


def _device(args: argparse.Namespace) -> DeviceParams:
    if args.device_config:
        return load_config(args.device_config)
    return cmu_defaults()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------

def cmd_info(args: argparse.Namespace) -> int:
    p = _device(args)
    d = derive(p)
    rs = rs_params(p)
    settle_total = (p.sectors_x - 1) * p.settle_time_s
    pairs = [
        ("regions_x", p.regions_x), ("regions_y", p.regions_y),
        ("sectors_x", p.sectors_x), ("sectors_y", p.sectors_y),
        ("n_regions", p.n_regions), ("n_tips", p.n_tips),
        ("n_active_tips", p.n_active_tips),
        ("sectors_per_region", p.sectors_per_region),
        ("sector_bits", p.sector_bits),
        ("tip_rate_bits_s", p.tip_rate_bits_s),
        ("move_x_s", p.move_x_s), ("move_y_s", p.move_y_s),
        ("settle_time_s", p.settle_time_s),
        ("turnaround_time_s", p.turnaround_time_s),
        ("region_bits", d.region_bits),
        ("sector_time_s", d.sector_time_s),
        ("region_read_time_s", d.region_read_time_s),
        ("transfer_rate_rs_bits_s", rs.transfer_rate_rs_bits_s),
        ("seek_time_rs_s", rs.seek_time_rs_s),
        # share of a full-region read spent settling between columns
        ("seek_fraction", settle_total / d.region_read_time_s),
    ]
    for name, value in pairs:
        print(f"{name} = {value}")
    return 0


def cmd_map(args: argparse.Namespace) -> int:
    p = _device(args)
    if args.direction == "rs-to-mems":
        if len(args.address) != 2:
            raise ValueError("rs-to-mems takes two integers: region sector")
        mapped = rs_to_mems(RSAddr(*args.address), p)
    else:
        if len(args.address) != 4:
            raise ValueError("mems-to-rs takes four integers: "
                             "region_x region_y column row")
        mapped = mems_to_rs(PhysAddr(*args.address), p)
    print(" ".join(str(part) for part in mapped))
    return 0


def cmd_bench_relational(args: argparse.Namespace) -> int:
    p = _device(args)
    seeds = tuple(range(args.seed, args.seed + args.repeats))
    placements = tuple(args.placement or bench.RELATIONAL_PLACEMENTS)
    rows: List[bench.Row] = []
    sizes = _num_list(args.sizes, _ratio)
    if sizes:
        rows += bench.run_experiment1(p, sizes_mb=sizes,
                                      selectivity=args.selectivity,
                                      seeds=seeds, placements=placements,
                                      seek_model=args.seek_model)
    nprojs = _num_list(args.nproj, int)
    if nprojs:
        rows += bench.run_experiment2(p, n_projections=nprojs,
                                      selectivity=args.selectivity,
                                      seeds=seeds, placements=placements,
                                      seek_model=args.seek_model)
    _emit(bench.csv_text(rows, bench.RELATIONAL_FIELDS), args.out)
    return 0


def cmd_bench_spatial(args: argparse.Namespace) -> int:
    p = _device(args)
    seeds = tuple(range(args.seed, args.seed + args.repeats))
    placements = tuple(args.placement or bench.SPATIAL_PLACEMENTS)
    rows: List[bench.Row] = []
    fracs = [pct / 100 for pct in _num_list(args.query_sizes, _ratio)]
    if fracs:
        rows += bench.run_experiment3(p, query_fracs=fracs, seeds=seeds,
                                      placements=placements, curve=args.curve,
                                      seek_model=args.seek_model)
    aspects = _num_list(args.aspects, _ratio)
    if aspects:
        rows += bench.run_experiment4(p, aspects=aspects, seeds=seeds,
                                      placements=placements, curve=args.curve,
                                      seek_model=args.seek_model)
    _emit(bench.csv_text(rows, bench.SPATIAL_FIELDS), args.out)
    return 0


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--device-config", metavar="PATH",
                        help="key/value device geometry file "
                             "(defaults to the reference preset)")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--placement", action="append", metavar="NAME",
                     help="restrict to one placement (repeatable)")
    run.add_argument("--seek-model", choices=("average", "distance"),
                     default="average")
    run.add_argument("--seed", type=int, default=0, metavar="N",
                     help="first seed (default 0)")
    run.add_argument("--repeats", type=int, default=20, metavar="N",
                     help="seeds per sweep point (default 20)")
    run.add_argument("--out", metavar="PATH",
                     help="CSV file (default: stdout)")

    parser = argparse.ArgumentParser(
        prog="memsrs",
        description="Probe-tip storage emulator and placement benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)

    info = sub.add_parser("info", parents=[common],
                          help="print device, derived, and averaged-model "
                               "parameters")
    info.set_defaults(handler=cmd_info)

    map_p = sub.add_parser("map", parents=[common],
                           help="convert one address between the logical "
                                "and physical spaces")
    map_p.add_argument("direction", choices=("rs-to-mems", "mems-to-rs"))
    map_p.add_argument("address", nargs="+", type=int)
    map_p.set_defaults(handler=cmd_map)

    bench_p = sub.add_parser("bench", help="run retrieval-time sweeps")
    bsub = bench_p.add_subparsers(dest="bench_command", required=True)

    rel = bsub.add_parser("relational", parents=[common, run],
                          help="data-size and projection-width sweeps")
    rel.add_argument("--sizes", default="5,10,20,40,80,160,320",
                     metavar="LIST",
                     help="data-size sweep in MB (empty string skips it)")
    rel.add_argument("--nproj",
                     default=",".join(str(i) for i in range(1, 17)),
                     metavar="LIST",
                     help="projection-width sweep (empty string skips it)")
    rel.add_argument("--selectivity", type=float, default=0.1, metavar="F")
    rel.set_defaults(handler=cmd_bench_relational)

    spa = bsub.add_parser("spatial", parents=[common, run],
                          help="query-size and query-aspect sweeps")
    spa.add_argument("--query-sizes", default="0.01,0.1,1,10", metavar="LIST",
                     help="query sizes as percent of the space "
                          "(empty string skips the size sweep)")
    spa.add_argument("--aspects", default="16,8,4,2,1,1/2,1/4,1/8,1/16",
                     metavar="LIST",
                     help="query aspect sweep; fractions like 1/16 are fine "
                          "(empty string skips it)")
    spa.add_argument("--curve", choices=("hilbert", "zorder"),
                     default="hilbert")
    spa.set_defaults(handler=cmd_bench_spatial)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
