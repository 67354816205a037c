"""Geometry and timing constants of the probe-storage device.

The device is a movable media sled divided into a grid of regions, one
probe tip per region. Each region holds a grid of 64-bit tip sectors
addressed by (column, in-column row); at most `n_active_tips` tips may
transfer at the same time. Everything downstream (emulator, logical
address model, placement engines) reads its constants from here.

Internal units are seconds and bits. The key/value config format uses
the conventional catalog units instead (ms, Mbit/s) and converts at the
I/O boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from decimal import Decimal


@dataclass(frozen=True)
class DeviceParams:
    regions_x: int = 80          # regions per sled row
    regions_y: int = 80          # regions per sled column
    sectors_x: int = 2500        # tip-sector columns per region
    sectors_y: int = 27          # tip sectors per column
    n_active_tips: int = 1280    # concurrent-transfer limit
    sector_bits: int = 64        # payload bits per tip sector
    tip_rate_bits_s: float = 0.7e6   # per-tip media transfer rate, bits/s
    move_x_s: float = 0.52e-3    # average sled move along X, s
    move_y_s: float = 0.35e-3    # average sled move along Y, s
    settle_time_s: float = 0.215e-3  # vibration settle after an X move, s
    turnaround_time_s: float = 0.06e-3  # Y direction-reversal penalty, s

    def __post_init__(self) -> None:
        for name in ("regions_x", "regions_y", "sectors_x", "sectors_y",
                     "n_active_tips", "sector_bits"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("tip_rate_bits_s", "move_x_s", "move_y_s",
                     "settle_time_s", "turnaround_time_s"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.n_active_tips > self.regions_x * self.regions_y:
            raise ValueError("n_active_tips exceeds the tip count")

    @property
    def n_regions(self) -> int:
        return self.regions_x * self.regions_y

    @property
    def n_tips(self) -> int:
        # one probe tip per region
        return self.n_regions

    @property
    def sectors_per_region(self) -> int:
        return self.sectors_x * self.sectors_y


@dataclass(frozen=True)
class DerivedParams:
    region_bits: int            # capacity of one region
    sector_time_s: float        # per-tip time to transfer one sector
    region_read_time_s: float   # one tip reading a whole region in column-prime order


def cmu_defaults() -> DeviceParams:
    """The published reference device this artifact is calibrated to."""
    return DeviceParams()


def derive(params: DeviceParams) -> DerivedParams:
    region_bits = params.sectors_per_region * params.sector_bits
    sector_time = params.sector_bits / params.tip_rate_bits_s
    # column-prime order crosses (sectors_x - 1) column boundaries,
    # each costing one settle
    read_time = (region_bits / params.tip_rate_bits_s
                 + (params.sectors_x - 1) * params.settle_time_s)
    return DerivedParams(region_bits, sector_time, read_time)


# -- key/value config ---------------------------------------------------
#
# Keys follow the device catalog's symbols; values use its units
# (counts, bits, Mbit/s, ms). Decimal-string exponent shifting keeps the
# unit conversion exact, so any DeviceParams round-trips unchanged.

_INT_KEYS = {
    "R_x": "regions_x",
    "R_y": "regions_y",
    "S_x": "sectors_x",
    "S_y": "sectors_y",
    "N_APT": "n_active_tips",
    "SectorSize": "sector_bits",
}
# key -> (field, power of ten between file unit and seconds/bits-per-second)
_SCALED_KEYS = {
    "TransferRate": ("tip_rate_bits_s", 6),   # Mbit/s
    "T_X": ("move_x_s", -3),                  # ms
    "T_Y": ("move_y_s", -3),
    "T_S": ("settle_time_s", -3),
    "T_T": ("turnaround_time_s", -3),
}
_DERIVED_KEYS = ("N_R", "N_S", "N_PT")


def _shift(value: float, k: int) -> str:
    """Exact decimal representation of value * 10**k."""
    return str(Decimal(repr(value)).scaleb(k).normalize())


def to_config_text(p: DeviceParams) -> str:
    lines = ["# device geometry and timing"]
    for key, field in _INT_KEYS.items():
        lines.append(f"{key} {getattr(p, field)}")
    lines.append(f"N_R {p.n_regions}")
    lines.append(f"N_S {p.sectors_per_region}")
    lines.append(f"N_PT {p.n_tips}")
    for key, (field, power) in _SCALED_KEYS.items():
        lines.append(f"{key} {_shift(getattr(p, field), -power)}")
    return "\n".join(lines) + "\n"


def from_config_text(text: str) -> DeviceParams:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ValueError(f"config line {lineno}: expected 'key value'")
        raw[parts[0]] = parts[1].strip()

    kwargs: dict[str, int | float] = {}
    derived_claims: dict[str, int] = {}
    for key, value in raw.items():
        if key in _INT_KEYS:
            kwargs[_INT_KEYS[key]] = int(value)
        elif key in _SCALED_KEYS:
            field, power = _SCALED_KEYS[key]
            kwargs[field] = float(str(Decimal(value).scaleb(power).normalize()))
        elif key in _DERIVED_KEYS:
            derived_claims[key] = int(value)
        else:
            raise ValueError(f"unknown config key: {key}")

    p = DeviceParams(**kwargs)
    checks = {"N_R": p.n_regions, "N_S": p.sectors_per_region, "N_PT": p.n_tips}
    for key, claimed in derived_claims.items():
        if claimed != checks[key]:
            raise ValueError(f"{key} {claimed} inconsistent with geometry ({checks[key]})")
    return p


def load_config(path: str) -> DeviceParams:
    with open(path, "r", encoding="utf-8") as fh:
        return from_config_text(fh.read())
