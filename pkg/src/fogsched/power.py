"""Dynamic power model, DVFS scaling, and energy accounting.

Dynamic power is activity * load_cap * V^2 * f; scaling both voltage and
frequency by rho therefore scales power by rho^3 while execution time grows
by 1/rho, so energy per task scales by rho^2. Totals are accumulated with
math.fsum so results do not depend on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .model import FogNode, ScheduleEntry


@dataclass(frozen=True)
class PowerSample:
    """Dynamic power draw at one operating point."""

    watts: float
    volts: float
    hertz: float


def dynamic_power(node: FogNode, volts: float, hertz: float) -> float:
    """Dynamic power (W) of `node` driven at `volts` / `hertz`."""
    if not 0.0 <= volts <= node.v_max:
        raise ValueError(f"volts {volts} outside [0, {node.v_max}] for node {node.id}")
    if not 0.0 <= hertz <= node.f_max:
        raise ValueError(f"hertz {hertz} outside [0, {node.f_max}] for node {node.id}")
    return node.activity * node.load_cap * volts * volts * hertz


def scaled_vf(node: FogNode, rho: float) -> tuple[float, float]:
    """Operating point (volts, hertz) at scale factor rho in (0, 1]."""
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho {rho} outside (0, 1]")
    return rho * node.v_max, rho * node.f_max


def operating_point(node: FogNode, rho: float) -> PowerSample:
    volts, hertz = scaled_vf(node, rho)
    return PowerSample(dynamic_power(node, volts, hertz), volts, hertz)


def active_power(node: FogNode, rho: float) -> float:
    """Total draw (W) while executing at rho: dynamic plus static power."""
    volts, hertz = scaled_vf(node, rho)
    return dynamic_power(node, volts, hertz) + node.static_power


def entry_energy(node: FogNode, entry: ScheduleEntry) -> float:
    """Energy (J) of one executed entry: (dynamic + static power) * time."""
    return active_power(node, entry.rho) * entry.exec_time


def schedule_energy(nodes_by_id: dict[int, FogNode],
                    entries: Iterable[ScheduleEntry]) -> float:
    """Order-independent total energy (J) over entries."""
    return math.fsum(entry_energy(nodes_by_id[e.node_id], e) for e in entries)


def total_power_full(nodes: list[FogNode], entries: Iterable[ScheduleEntry]) -> float:
    """Summed full-speed dynamic power (W) over entries, one term per entry."""
    by_id = {n.id: n for n in nodes}
    return math.fsum(
        dynamic_power(by_id[e.node_id], by_id[e.node_id].v_max, by_id[e.node_id].f_max)
        for e in entries
    )
