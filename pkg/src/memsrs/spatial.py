"""Spatial object placements.

Two layouts for a uniformly gridded object space:

* column-per-tip (`SSYLayout`): object column x feeds tip x, so a query's
  x-extent fixes its parallelism and tall narrow queries serialize.
* block (`BlockGrid` + `compile_sp`): the space is tiled into blocks of
  exactly one object per region, blocks are laid along a space-filling
  curve, and a query touches one sector-group row per overlapped block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .cost import CostInput
from .device import DeviceParams
from .emulator import AccessPlan, MediaImage, Scan
from .rs import PhysAddr, RSAddr


@dataclass(frozen=True)
class SpatialSpace:
    width: int
    height: int
    obj_bits: int = 64

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.obj_bits < 1:
            raise ValueError("space dimensions and object size must be >= 1")


@dataclass(frozen=True)
class QueryRegion:
    x0: int
    y0: int
    qx: int
    qy: int

    def __post_init__(self):
        if self.x0 < 1 or self.y0 < 1:
            raise ValueError("query origin must be 1-based")
        if self.qx < 0 or self.qy < 0:
            raise ValueError("query extents must be >= 0")

    def clip(self, space: SpatialSpace) -> Optional[Tuple[int, int, int, int]]:
        """Intersection with the space as (x0, y0, x1, y1), or None."""
        if self.qx == 0 or self.qy == 0:
            return None
        x1 = min(self.x0 + self.qx - 1, space.width)
        y1 = min(self.y0 + self.qy - 1, space.height)
        if self.x0 > x1 or self.y0 > y1:
            return None
        return self.x0, self.y0, x1, y1


@dataclass(frozen=True)
class WorkloadProfile:
    entries: Tuple[Tuple[float, int, int], ...]  # (frequency, qx, qy)

    def __post_init__(self):
        for f, qx, qy in self.entries:
            if f <= 0 or qx < 1 or qy < 1:
                raise ValueError("profile rows need frequency > 0 and extents >= 1")

    @property
    def weighted_aspect(self) -> float:
        fx = sum(f * qx for f, qx, _ in self.entries)
        fy = sum(f * qy for f, _, qy in self.entries)
        return fx / fy


def parse_profile(text: str) -> WorkloadProfile:
    """One `f qx qy` triple per line; blank lines and # comments skipped."""
    entries: List[Tuple[float, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(f"profile line {lineno}: expected 'f qx qy'")
        entries.append((float(fields[0]), int(fields[1]), int(fields[2])))
    return WorkloadProfile(entries=tuple(entries))


# -- column-per-tip layout -------------------------------------------------

class SSYLayout:
    """Object (x, y) -> tip x, sector row y, components stacked along s."""

    def __init__(self, params: DeviceParams, space: SpatialSpace):
        self.params = params
        self.space = space
        self.spo = -(-space.obj_bits // params.sector_bits)
        self.n_components = -(-space.width // params.n_tips)
        self.component_rows = space.height * self.spo
        if self.n_components * self.component_rows > params.sectors_per_region:
            raise ValueError("space does not fit the device under this layout")

    def _check(self, x: int, y: int) -> None:
        if not 1 <= x <= self.space.width:
            raise ValueError(f"x {x} out of range 1..{self.space.width}")
        if not 1 <= y <= self.space.height:
            raise ValueError(f"y {y} out of range 1..{self.space.height}")

    def map(self, x: int, y: int) -> RSAddr:
        self._check(x, y)
        comp = (x - 1) // self.params.n_tips
        return RSAddr((x - 1) % self.params.n_tips + 1,
                      comp * self.component_rows + (y - 1) * self.spo + 1)

    def map_phys(self, x: int, y: int) -> PhysAddr:
        """Straight-line physical mapping; oracle for the RS composition."""
        self._check(x, y)
        p = self.params
        tip = (x - 1) % p.n_tips
        s0 = ((x - 1) // p.n_tips) * self.component_rows + (y - 1) * self.spo
        col, off = divmod(s0, p.sectors_y)
        return PhysAddr(tip % p.regions_x + 1, tip // p.regions_x + 1, col + 1,
                        off + 1 if col % 2 == 0 else p.sectors_y - off)

    def compile(self, qr: QueryRegion) -> AccessPlan:
        box = qr.clip(self.space)
        if box is None:
            return AccessPlan([])
        x0, y0, x1, y1 = box
        n_pt = self.params.n_tips
        napt = self.params.n_active_tips
        scans: List[Scan] = []
        for comp in range((x0 - 1) // n_pt, (x1 - 1) // n_pt + 1):
            lo = max(x0, comp * n_pt + 1) - comp * n_pt
            hi = min(x1, (comp + 1) * n_pt) - comp * n_pt
            start = comp * self.component_rows + (y0 - 1) * self.spo + 1
            length = (y1 - y0 + 1) * self.spo
            for tip_lo in range(lo, hi + 1, napt):
                scans.append(Scan(tips=range(tip_lo, min(hi, tip_lo + napt - 1) + 1),
                                  start=start, length=length))
        return AccessPlan(scans)

    def k_values(self, qr: QueryRegion) -> CostInput:
        box = qr.clip(self.space)
        if box is None:
            return CostInput(bits=0, k_parallel=self.params.n_active_tips, k_random=0)
        x0, y0, x1, y1 = box
        bits = (x1 - x0 + 1) * (y1 - y0 + 1) * self.space.obj_bits
        return CostInput(bits=bits,
                         k_parallel=min(x1 - x0 + 1, self.params.n_active_tips),
                         k_random=1)


# -- block layout -----------------------------------------------------------

def _hilbert_d2xy(side: int, d: int) -> Tuple[int, int]:
    x = y = 0
    t = d
    s = 1
    while s < side:
        rx = 1 & (t // 2)
        ry = 1 & (t ^ rx)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        t //= 4
        s *= 2
    return x, y


def _zorder_d2xy(d: int) -> Tuple[int, int]:
    x = y = 0
    i = 0
    while d:
        x |= (d & 1) << i
        d >>= 1
        y |= (d & 1) << i
        d >>= 1
        i += 1
    return x, y


@dataclass(frozen=True)
class BlockGrid:
    params: DeviceParams
    space: SpatialSpace
    B_x: int
    B_y: int
    G_x: int
    G_y: int
    spo: int
    curve: str
    order: Tuple[Tuple[int, int], ...]
    rank: Dict[Tuple[int, int], int]

    @property
    def n_blocks(self) -> int:
        return self.G_x * self.G_y


def _power_of_two_pairs(n: int) -> List[Tuple[int, int]]:
    pairs = []
    for bx in range(1, n + 1):
        if n % bx:
            continue
        by = n // bx
        hi, lo = max(bx, by), min(bx, by)
        if hi % lo == 0 and (hi // lo) & (hi // lo - 1) == 0:
            pairs.append((bx, by))
    return pairs


def build_block_grid(params: DeviceParams, space: SpatialSpace,
                     profile: Optional[WorkloadProfile] = None,
                     curve: str = "hilbert",
                     ratio: Optional[float] = None) -> BlockGrid:
    """Pick block dimensions for the workload's aspect mix and order them.

    Candidate dimensions are the factor pairs of the region count whose own
    ratio is a power of two, so the curve runs on a power-of-two grid.
    """
    if curve not in ("hilbert", "zorder"):
        raise ValueError(f"unknown curve: {curve!r}")
    if ratio is None:
        if profile is None or not profile.entries:
            raise ValueError("need a workload profile or an explicit ratio")
        ratio = profile.weighted_aspect
    if ratio <= 0:
        raise ValueError("aspect ratio must be positive")
    n_r = params.n_regions
    target = math.log2(ratio)
    best = min(_power_of_two_pairs(n_r),
               key=lambda p: (abs(math.log2(p[0] / p[1]) - target), -p[0]))
    b_x, b_y = best
    if space.width % b_x or space.height % b_y:
        raise ValueError(f"{b_x}x{b_y} blocks do not tile the "
                         f"{space.width}x{space.height} space")
    g_x, g_y = space.width // b_x, space.height // b_y
    spo = -(-space.obj_bits // params.sector_bits)
    if g_x * g_y * spo > params.sectors_per_region:
        raise ValueError("space does not fit the device under this layout")
    side = 1
    while side < max(g_x, g_y):
        side *= 2
    order: List[Tuple[int, int]] = []
    for d in range(side * side):
        x, y = _hilbert_d2xy(side, d) if curve == "hilbert" else _zorder_d2xy(d)
        if x < g_x and y < g_y:
            order.append((x + 1, y + 1))
    rank = {cell: i + 1 for i, cell in enumerate(order)}
    return BlockGrid(params=params, space=space, B_x=b_x, B_y=b_y,
                     G_x=g_x, G_y=g_y, spo=spo, curve=curve,
                     order=tuple(order), rank=rank)


def map_sp(grid: BlockGrid, x: int, y: int) -> RSAddr:
    if not 1 <= x <= grid.space.width:
        raise ValueError(f"x {x} out of range 1..{grid.space.width}")
    if not 1 <= y <= grid.space.height:
        raise ValueError(f"y {y} out of range 1..{grid.space.height}")
    gx = (x - 1) // grid.B_x + 1
    gy = (y - 1) // grid.B_y + 1
    x_l = (x - 1) % grid.B_x + 1
    y_l = (y - 1) % grid.B_y + 1
    b = grid.rank[(gx, gy)]
    return RSAddr((y_l - 1) * grid.B_x + x_l, (b - 1) * grid.spo + 1)


def query_block_set(grid: BlockGrid, qr: QueryRegion) -> List[Tuple[int, Tuple[int, int]]]:
    """Blocks overlapping the query as (rank, (gx, gy)), rank-ascending."""
    box = qr.clip(grid.space)
    if box is None:
        return []
    x0, y0, x1, y1 = box
    blocks = []
    for gx in range((x0 - 1) // grid.B_x + 1, (x1 - 1) // grid.B_x + 2):
        for gy in range((y0 - 1) // grid.B_y + 1, (y1 - 1) // grid.B_y + 2):
            blocks.append((grid.rank[(gx, gy)], (gx, gy)))
    blocks.sort()
    return blocks


def _block_tips(grid: BlockGrid, box, gx: int, gy: int) -> Sequence[int]:
    x0, y0, x1, y1 = box
    la = max(x0, (gx - 1) * grid.B_x + 1) - (gx - 1) * grid.B_x
    lb = min(x1, gx * grid.B_x) - (gx - 1) * grid.B_x
    ya = max(y0, (gy - 1) * grid.B_y + 1) - (gy - 1) * grid.B_y
    yb = min(y1, gy * grid.B_y) - (gy - 1) * grid.B_y
    if (la, ya, lb, yb) == (1, 1, grid.B_x, grid.B_y):
        return range(1, grid.B_x * grid.B_y + 1)
    return tuple((y_l - 1) * grid.B_x + x_l
                 for y_l in range(ya, yb + 1) for x_l in range(la, lb + 1))


def compile_sp(grid: BlockGrid, qr: QueryRegion,
               gap_threshold: Optional[int] = None) -> AccessPlan:
    """Visit overlapped blocks in curve order, streaming through rank gaps
    that cost less to read over than to reseek."""
    box = qr.clip(grid.space)
    if box is None:
        return AccessPlan([])
    p = grid.params
    if gap_threshold is None:
        sector_time = p.sector_bits / p.tip_rate_bits_s
        seek_rs = max(p.move_x_s + p.settle_time_s,
                      p.move_y_s + p.turnaround_time_s)
        gap_threshold = int(seek_rs / (grid.spo * sector_time))
        if gap_threshold * grid.spo * sector_time >= seek_rs:
            gap_threshold -= 1
    blocks = query_block_set(grid, qr)
    runs: List[List[Tuple[int, Sequence[int]]]] = []
    prev_rank = None
    for rank, (gx, gy) in blocks:
        tips = _block_tips(grid, box, gx, gy)
        if prev_rank is not None and rank - prev_rank - 1 <= gap_threshold:
            runs[-1].append((rank, tips))
        else:
            runs.append([(rank, tips)])
        prev_rank = rank
    napt = p.n_active_tips
    full_cells = grid.B_x * grid.B_y
    scans: List[Scan] = []
    for run in runs:
        first_rank, default = run[0][0], run[0][1]
        last_rank = run[-1][0]
        present = dict(run)
        has_full = any(len(t) == full_cells for _, t in run)
        deepest = max(len(t) for _, t in run)
        if has_full or deepest <= napt:
            prt: Dict[int, Sequence[int]] = {}
            for rank in range(first_rank, last_rank + 1):
                tips = present.get(rank, ())
                if tips != default:
                    base = (rank - 1) * grid.spo + 1
                    for i in range(grid.spo):
                        prt[base + i] = tips
            scans.append(Scan(tips=default, start=(first_rank - 1) * grid.spo + 1,
                              length=(last_rank - first_rank + 1) * grid.spo,
                              per_row_tips=prt or None))
            continue
        # a run of partial blocks only, some past the activation limit:
        # read the first tip layer across the run, then short capped
        # follow-up scans per remaining layer instead of full retraces
        base_default = default[:napt] if len(default) > napt else default
        prt = {}
        for rank in range(first_rank, last_rank + 1):
            tips = present.get(rank, ())
            eff = tips[:napt] if len(tips) > napt else tips
            if eff != base_default:
                base = (rank - 1) * grid.spo + 1
                for i in range(grid.spo):
                    prt[base + i] = eff
        scans.append(Scan(tips=base_default, start=(first_rank - 1) * grid.spo + 1,
                          length=(last_rank - first_rank + 1) * grid.spo,
                          per_row_tips=prt or None))
        layer = 1
        while layer * napt < deepest:
            want = [r for r, t in run if len(t) > layer * napt]
            lo_r, hi_r = min(want), max(want)
            lprt: Dict[int, Sequence[int]] = {}
            for rank in range(lo_r, hi_r + 1):
                tips = present.get(rank, ())
                if len(tips) > layer * napt:
                    eff = tips[layer * napt:(layer + 1) * napt]
                    base = (rank - 1) * grid.spo + 1
                    for i in range(grid.spo):
                        lprt[base + i] = eff
            scans.append(Scan(tips=(), start=(lo_r - 1) * grid.spo + 1,
                              length=(hi_r - lo_r + 1) * grid.spo,
                              per_row_tips=lprt))
            layer += 1
    return AccessPlan(scans)


def k_values_sp(grid: BlockGrid, qr: QueryRegion) -> CostInput:
    box = qr.clip(grid.space)
    if box is None:
        return CostInput(bits=0, k_parallel=grid.params.n_active_tips, k_random=0)
    x0, y0, x1, y1 = box
    napt = grid.params.n_active_tips
    cells = steps = 0
    blocks = query_block_set(grid, qr)
    for _, (gx, gy) in blocks:
        cnt = len(_block_tips(grid, box, gx, gy))
        cells += cnt
        steps += -(-cnt // napt) * grid.spo
    return CostInput(bits=(x1 - x0 + 1) * (y1 - y0 + 1) * grid.space.obj_bits,
                     k_parallel=cells / steps, k_random=len(blocks))


# -- module-level operation names and image writers -------------------------

def map_ssy(layout: SSYLayout, x: int, y: int) -> RSAddr:
    return layout.map(x, y)


def map_ssy_phys(layout: SSYLayout, x: int, y: int) -> PhysAddr:
    return layout.map_phys(x, y)


def compile_ssy(layout: SSYLayout, qr: QueryRegion) -> AccessPlan:
    return layout.compile(qr)


def k_values_ssy(layout: SSYLayout, qr: QueryRegion) -> CostInput:
    return layout.k_values(qr)


def _write_objects(space: SpatialSpace, mapper, image: MediaImage, value_fn) -> None:
    spo = -(-space.obj_bits // image.params.sector_bits)
    cell = image.sector_bytes
    for x in range(1, space.width + 1):
        for y in range(1, space.height + 1):
            payload = value_fn(x, y)
            if len(payload) != spo * cell:
                raise ValueError(f"object payload must be {spo * cell} bytes")
            addr = mapper(x, y)
            for i in range(spo):
                image.write_cell(addr.region, addr.sector + i,
                                 payload[i * cell:(i + 1) * cell])


def write_image_ssy(layout: SSYLayout, image: MediaImage, value_fn) -> None:
    _write_objects(layout.space, layout.map, image, value_fn)


def write_image_sp(grid: BlockGrid, image: MediaImage, value_fn) -> None:
    _write_objects(grid.space, lambda x, y: map_sp(grid, x, y), image, value_fn)
