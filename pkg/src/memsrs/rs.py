"""The two-axis logical view of the device: Region x Sector.

A linearized region lays its tip sectors along the Sector axis in
column-prime (serpentine) order: down the first column, up the second,
and so on. That makes consecutive sector indices physically adjacent,
so a whole linearized region streams at an averaged rate that folds the
per-column settle into the transfer rate. Addresses are 1-based on both
axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .device import DeviceParams, derive
from .emulator import AccessPlan, Scan


class RSAddr(NamedTuple):
    region: int   # linearized-region index, 1..n_regions
    sector: int   # position along the serpentine sector order, 1..sectors_per_region


class PhysAddr(NamedTuple):
    region_x: int
    region_y: int
    col: int   # tip-sector column inside the region
    row: int   # tip-sector position inside the column


@dataclass(frozen=True)
class RSParams:
    transfer_rate_rs_bits_s: float  # averaged per-tip rate over a linearized region
    seek_time_rs_s: float           # averaged random-position seek


def rs_to_mems(a: RSAddr, p: DeviceParams) -> PhysAddr:
    r, s = a
    if not (1 <= r <= p.n_regions and 1 <= s <= p.sectors_per_region):
        raise ValueError(f"RS address out of bounds: {a}")
    region_x = (r - 1) % p.regions_x + 1
    region_y = (r - 1) // p.regions_x + 1
    col = (s - 1) // p.sectors_y + 1
    off = (s - 1) % p.sectors_y
    # serpentine: odd columns run downward, even columns run back up
    row = off + 1 if col % 2 == 1 else p.sectors_y - off
    return PhysAddr(region_x, region_y, col, row)


def mems_to_rs(a: PhysAddr, p: DeviceParams) -> RSAddr:
    region_x, region_y, col, row = a
    if not (1 <= region_x <= p.regions_x and 1 <= region_y <= p.regions_y
            and 1 <= col <= p.sectors_x and 1 <= row <= p.sectors_y):
        raise ValueError(f"physical address out of bounds: {a}")
    r = (region_y - 1) * p.regions_x + region_x
    off = row - 1 if col % 2 == 1 else p.sectors_y - row
    s = (col - 1) * p.sectors_y + off + 1
    return RSAddr(r, s)


def rs_params(p: DeviceParams) -> RSParams:
    d = derive(p)
    # one settle per sector column, folded into the streaming rate
    denominator = d.region_bits / p.tip_rate_bits_s + p.sectors_x * p.settle_time_s
    rate = d.region_bits / denominator
    seek = max(p.move_x_s + p.settle_time_s, p.move_y_s + p.turnaround_time_s)
    return RSParams(transfer_rate_rs_bits_s=rate, seek_time_rs_s=seek)


def rs_read(regions: Iterable[int], s_start: int, s_len: int,
            p: DeviceParams) -> AccessPlan:
    """Read rows [s_start, s_start+s_len-1] of the given regions.

    Regions are assigned to scans in ascending order, at most
    n_active_tips per scan; each scan re-traverses the whole row range.
    """
    tips = sorted(set(regions))
    if s_len < 1 or s_start < 1 or s_start + s_len - 1 > p.sectors_per_region:
        raise ValueError("sector range out of bounds")
    if tips and (tips[0] < 1 or tips[-1] > p.n_regions):
        raise ValueError("region index out of bounds")
    scans = [
        Scan(tips=tuple(tips[i:i + p.n_active_tips]), start=s_start, length=s_len)
        for i in range(0, len(tips), p.n_active_tips)
    ]
    return AccessPlan(scans=scans)
