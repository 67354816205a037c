"""Analytic retrieval-time estimator.

Retrieval time splits into a transfer term (bits moved at the averaged
per-tip rate, divided by the average number of concurrently active
tips) and a seek term (average seek count times the averaged seek
time). The lower bound prices the same bits at full tip parallelism
with no seeks; no real placement can beat it on the Region-Sector axes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .device import DeviceParams
from .emulator import Timing
from .rs import RSParams


@dataclass(frozen=True)
class CostInput:
    bits: float        # data volume the placement transfers for the query
    k_parallel: float  # average concurrently active tips
    k_random: float    # average seek count


@dataclass(frozen=True)
class CostEstimate:
    total_s: float
    transfer_s: float
    seek_s: float


def estimate(c: CostInput, rs: RSParams) -> CostEstimate:
    if c.k_parallel <= 0:
        raise ValueError("k_parallel must be positive")
    transfer = c.bits / (rs.transfer_rate_rs_bits_s * c.k_parallel)
    seek = rs.seek_time_rs_s * c.k_random
    return CostEstimate(total_s=transfer + seek, transfer_s=transfer, seek_s=seek)


def lower_bound(bits: float, rs: RSParams, n_active_tips: int) -> CostEstimate:
    return estimate(CostInput(bits=bits, k_parallel=n_active_tips, k_random=0.0), rs)


def trace_k_values(t: Timing, rs: RSParams, p: DeviceParams) -> CostInput:
    """K values realized by an emulated run, from its trace counters.

    Repositioning time of any kind, seeks and direction reversals
    alike, counts as a fraction of the averaged seek time.
    """
    bits = t.n_sectors * p.sector_bits
    k_parallel = (t.n_sectors / t.n_row_steps) if t.n_row_steps else float(p.n_active_tips)
    if k_parallel <= 0:
        k_parallel = 1.0
    k_random = (t.seek_s + t.turnaround_s) / rs.seek_time_rs_s
    return CostInput(bits=bits, k_parallel=k_parallel, k_random=k_random)


def estimate_from_trace(t: Timing, rs: RSParams, p: DeviceParams) -> CostEstimate:
    return estimate(trace_k_values(t, rs, p), rs)
