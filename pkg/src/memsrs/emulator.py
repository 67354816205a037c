"""Event-free timing emulator for the probe-array device.

The media sled serpentines through tip-sector columns: odd columns are
traversed top-to-bottom, even columns bottom-to-top, so consecutive
linear rows are physically adjacent.  All tips share the single sled,
which is why a scan is priced once no matter how many tips it powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .device import DeviceParams


def _col_of(s: int, sy: int) -> int:
    return (s - 1) // sy + 1


def _col_row(s: int, sy: int) -> Tuple[int, int]:
    """Linear RS row -> (column, physical row) under serpentine order."""
    col = (s - 1) // sy + 1
    off = (s - 1) % sy
    row = off + 1 if col % 2 == 1 else sy - off
    return col, row


def _lin(col: int, row: int, sy: int) -> int:
    off = row - 1 if col % 2 == 1 else sy - row
    return (col - 1) * sy + off + 1


def _phys_dir(col: int, ascending: bool) -> int:
    """Physical Y direction while moving through `col` in linear order."""
    d = 1 if col % 2 == 1 else -1
    return d if ascending else -d


@dataclass
class SledState:
    col: int = 1
    row: int = 1
    y_dir: int = 1  # +1 toward higher physical rows


@dataclass
class Scan:
    """One contiguous pass request over linear rows [start, start+length).

    `tips` is the default activation set (region numbers).  `per_row_tips`
    replaces that set entirely for the listed rows; an empty override
    means the row is stepped over without reading.
    """
    tips: Sequence[int]
    start: int
    length: int
    per_row_tips: Optional[Dict[int, Sequence[int]]] = None


@dataclass
class AccessPlan:
    scans: List[Scan] = field(default_factory=list)


@dataclass(frozen=True)
class Timing:
    total_s: float
    seek_s: float
    transfer_s: float
    settle_s: float
    turnaround_s: float
    n_seeks: int
    n_turnarounds: int
    n_row_steps: int
    n_sectors: int


class MediaImage:
    """Sparse cell store; unwritten cells read back as zero bytes."""

    def __init__(self, params: DeviceParams):
        if params.sector_bits % 8 != 0:
            raise ValueError("sector_bits must be a whole number of bytes")
        self.params = params
        self.sector_bytes = params.sector_bits // 8
        self._cells: Dict[Tuple[int, int], bytes] = {}

    def _check(self, region: int, s: int) -> None:
        p = self.params
        if not 1 <= region <= p.n_regions:
            raise ValueError(f"region {region} out of range 1..{p.n_regions}")
        if not 1 <= s <= p.sectors_per_region:
            raise ValueError(f"row {s} out of range 1..{p.sectors_per_region}")

    def write_cell(self, region: int, s: int, data: bytes) -> None:
        self._check(region, s)
        if len(data) != self.sector_bytes:
            raise ValueError(f"cell payload must be {self.sector_bytes} bytes")
        self._cells[(region, s)] = bytes(data)

    def read_cell(self, region: int, s: int) -> bytes:
        self._check(region, s)
        return self._cells.get((region, s), bytes(self.sector_bytes))


def _transition_cost(state: SledState, tcol: int, trow: int, first_dir: int,
                     p: DeviceParams, model: str) -> Tuple[float, bool]:
    """Cost of repositioning before a scan; True when the sled moved.

    X and Y repositioning overlap, so the charge is the larger of the two.
    A target in an adjacent column is reachable by a settle alone.
    """
    dcol = abs(tcol - state.col)
    drow = abs(trow - state.row)
    if model == "average":
        if dcol == 0:
            x_comp = 0.0
        elif dcol == 1:
            x_comp = p.settle_time_s
        else:
            x_comp = p.move_x_s + p.settle_time_s
        y_move = p.move_y_s if drow else 0.0
    elif model == "distance":
        x_comp = 0.0 if dcol == 0 else 3.0 * p.move_x_s * dcol / p.sectors_x + p.settle_time_s
        y_move = 3.0 * p.move_y_s * drow / p.sectors_y
    else:
        raise ValueError(f"unknown seek model: {model!r}")
    turn = p.turnaround_time_s if first_dir != 0 and first_dir == -state.y_dir else 0.0
    return max(x_comp, y_move + turn), bool(dcol or drow)


def seek_time(state: SledState, col: int, row: int, p: DeviceParams,
              model: str = "average") -> float:
    """Repositioning time from `state` to physical (col, row)."""
    if not 1 <= col <= p.sectors_x:
        raise ValueError(f"column {col} out of range 1..{p.sectors_x}")
    if not 1 <= row <= p.sectors_y:
        raise ValueError(f"row {row} out of range 1..{p.sectors_y}")
    if row != state.row:
        first_dir = 1 if row > state.row else -1
    else:
        first_dir = 0
    cost, _ = _transition_cost(state, col, row, first_dir, p, model)
    return cost


class Emulator:
    """Executes access plans scan by scan, accumulating a timing trace."""

    def __init__(self, params: DeviceParams, seek_model: str = "average",
                 state: Optional[SledState] = None):
        if seek_model not in ("average", "distance"):
            raise ValueError(f"unknown seek model: {seek_model!r}")
        self.params = params
        self.seek_model = seek_model
        self.state = state if state is not None else SledState()
        self._sector_time = params.sector_bits / params.tip_rate_bits_s

    def execute(self, plan: AccessPlan) -> Timing:
        t, _ = self._run(plan, None)
        return t

    def read(self, plan: AccessPlan, media: MediaImage) -> Tuple[Timing, bytes]:
        t, data = self._run(plan, media)
        return t, data

    # -- internals ------------------------------------------------------

    def _validate(self, scan: Scan) -> None:
        p = self.params
        if scan.length < 1:
            raise ValueError("scan length must be >= 1")
        if scan.start < 1 or scan.start + scan.length - 1 > p.sectors_per_region:
            raise ValueError(
                f"scan rows {scan.start}..{scan.start + scan.length - 1} exceed "
                f"1..{p.sectors_per_region}")
        for tip in scan.tips:
            if not 1 <= tip <= p.n_tips:
                raise ValueError(f"tip {tip} out of range 1..{p.n_tips}")
        if scan.per_row_tips:
            lo, hi = scan.start, scan.start + scan.length - 1
            for s, tips in scan.per_row_tips.items():
                if not lo <= s <= hi:
                    raise ValueError(f"override row {s} outside scan {lo}..{hi}")
                for tip in tips:
                    if not 1 <= tip <= p.n_tips:
                        raise ValueError(f"tip {tip} out of range 1..{p.n_tips}")

    def _run(self, plan: AccessPlan, media: Optional[MediaImage]):
        p = self.params
        napt = p.n_active_tips
        sy = p.sectors_y
        st = self._sector_time
        seek_s = transfer_s = settle_s = turnaround_s = 0.0
        n_seeks = n_turnarounds = n_row_steps = n_sectors = 0
        out: List[bytes] = []

        for scan in plan.scans:
            self._validate(scan)
            lo = scan.start
            hi = scan.start + scan.length - 1
            cur = _lin(self.state.col, self.state.row, sy)
            ascending = abs(cur - lo) <= abs(cur - hi)
            entry, exit_ = (lo, hi) if ascending else (hi, lo)
            tcol, trow = _col_row(entry, sy)

            if trow != self.state.row:
                first_dir = 1 if trow > self.state.row else -1
            elif scan.length > 1:
                first_dir = _phys_dir(tcol, ascending)
            else:
                first_dir = 0
            cost, moved = _transition_cost(self.state, tcol, trow, first_dir,
                                           p, self.seek_model)
            if moved:
                seek_s += cost
            else:
                turnaround_s += cost
                if cost > 0:
                    n_turnarounds += 1
            n_seeks += 1

            if scan.per_row_tips is None and media is None:
                # uniform activation: every sweep retraces the whole range
                cnt = len(scan.tips)
                passes = max(1, -(-cnt // napt))
                transfer_s += scan.length * passes * st
                n_row_steps += scan.length * passes
                n_sectors += scan.length * cnt
                crossings = abs(_col_of(exit_, sy) - tcol)
                settle_s += crossings * passes * p.settle_time_s
                turnaround_s += (passes - 1) * p.turnaround_time_s
                n_turnarounds += passes - 1
                final = exit_ if passes % 2 == 1 else entry
                asc_final = ascending if passes % 2 == 1 else not ascending
                fcol, frow = _col_row(final, sy)
                self.state.col, self.state.row = fcol, frow
                if scan.length > 1:
                    self.state.y_dir = _phys_dir(fcol, asc_final)
                elif first_dir != 0:
                    self.state.y_dir = first_dir
                continue

            step = 1 if ascending else -1
            prt = scan.per_row_tips or {}
            cur_col = tcol
            last_dir = step

            def do_path(path, base):
                nonlocal transfer_s, settle_s, n_row_steps, n_sectors, cur_col
                for s in path:
                    col = _col_of(s, sy)
                    if col != cur_col:
                        settle_s += p.settle_time_s
                        cur_col = col
                    transfer_s += st
                    n_row_steps += 1
                    eff = prt.get(s, scan.tips)
                    cnt = len(eff)
                    if cnt > base:
                        n_sectors += min(cnt, base + napt) - base
                        if media is not None:
                            for tip in eff[base:base + napt]:
                                out.append(media.read_cell(tip, s))

            do_path(range(entry, exit_ + step, step), 0)
            pos = exit_

            # rows wanting more tips than fit one pass get extra sweeps;
            # each sweep reverses and retraces the span still in need
            deep = [(s, len(prt.get(s, scan.tips)))
                    for s in range(lo, hi + 1)
                    if len(prt.get(s, scan.tips)) > napt]
            sweep = 1
            while deep:
                need = [s for s, c in deep if c > sweep * napt]
                if not need:
                    break
                lo_n, hi_n = min(need), max(need)
                turnaround_s += p.turnaround_time_s
                n_turnarounds += 1
                if pos <= lo_n:
                    far, on_edge, dirn = hi_n, pos == lo_n, 1
                else:
                    far, on_edge, dirn = lo_n, pos == hi_n, -1
                if far == pos:
                    do_path((pos,), sweep * napt)
                    last_dir = -last_dir
                else:
                    start = pos if on_edge else pos + dirn
                    do_path(range(start, far + dirn, dirn), sweep * napt)
                    last_dir = dirn
                pos = far
                sweep += 1

            fcol, frow = _col_row(pos, sy)
            self.state.col, self.state.row = fcol, frow
            if scan.length > 1:
                self.state.y_dir = _phys_dir(fcol, last_dir == 1)
            elif first_dir != 0:
                self.state.y_dir = first_dir

        total = seek_s + transfer_s + settle_s + turnaround_s
        timing = Timing(total_s=total, seek_s=seek_s, transfer_s=transfer_s,
                        settle_s=settle_s, turnaround_s=turnaround_s,
                        n_seeks=n_seeks, n_turnarounds=n_turnarounds,
                        n_row_steps=n_row_steps, n_sectors=n_sectors)
        return timing, b"".join(out)


# -- plan text form -----------------------------------------------------

def _rle(tips: Iterable[int]) -> str:
    vals = sorted(tips)
    if not vals:
        return "-"
    parts: List[str] = []
    run_start = prev = vals[0]
    for v in vals[1:]:
        if v == prev + 1:
            prev = v
            continue
        parts.append(str(run_start) if run_start == prev else f"{run_start}-{prev}")
        run_start = prev = v
    parts.append(str(run_start) if run_start == prev else f"{run_start}-{prev}")
    return ",".join(parts)


def _parse_rle(text: str) -> Tuple[int, ...]:
    if text == "-":
        return ()
    vals: List[int] = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            vals.extend(range(int(a), int(b) + 1))
        else:
            vals.append(int(part))
    return tuple(vals)


def plan_to_text(plan: AccessPlan) -> str:
    """One scan per line: start, length, then the tip set run-length encoded.

    Per-row overrides follow on `row` continuation lines.
    """
    lines: List[str] = []
    for scan in plan.scans:
        lines.append(f"scan {scan.start} {scan.length} {_rle(scan.tips)}")
        if scan.per_row_tips:
            for s in sorted(scan.per_row_tips):
                lines.append(f"row {s} {_rle(scan.per_row_tips[s])}")
    return "\n".join(lines) + ("\n" if lines else "")


def plan_from_text(text: str) -> AccessPlan:
    scans: List[Scan] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "scan":
            if len(fields) != 4:
                raise ValueError(f"line {lineno}: expected 'scan start length tips'")
            scans.append(Scan(tips=_parse_rle(fields[3]),
                              start=int(fields[1]), length=int(fields[2])))
        elif fields[0] == "row":
            if not scans:
                raise ValueError(f"line {lineno}: row override before any scan")
            if len(fields) != 3:
                raise ValueError(f"line {lineno}: expected 'row s tips'")
            if scans[-1].per_row_tips is None:
                scans[-1].per_row_tips = {}
            scans[-1].per_row_tips[int(fields[1])] = _parse_rle(fields[2])
        else:
            raise ValueError(f"line {lineno}: unknown record {fields[0]!r}")
    return AccessPlan(scans)
