"""Probe-storage emulator, region-sector layer, and placement engines."""

from .device import DeviceParams, DerivedParams, cmu_defaults, derive
from .emulator import AccessPlan, Emulator, MediaImage, Scan, SledState, Timing
from .rs import RSAddr, PhysAddr, RSParams, mems_to_rs, rs_params, rs_read, rs_to_mems

__version__ = "0.1.0"

__all__ = [
    "DeviceParams", "DerivedParams", "cmu_defaults", "derive",
    "AccessPlan", "Emulator", "MediaImage", "Scan", "SledState", "Timing",
    "RSAddr", "PhysAddr", "RSParams", "mems_to_rs", "rs_params", "rs_read",
    "rs_to_mems",
    "__version__",
]
