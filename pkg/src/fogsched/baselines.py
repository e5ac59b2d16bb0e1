"""Reference schedulers: FCFS, SJF, RR, and a particle-swarm mapper.

All baselines run at full speed, emit exactly one primary entry per task,
and do no deadline admission; missed deadlines surface in the metrics
instead of being prevented. They share the per-processor-element slot model
of the main scheduler: a task needing k elements starts at the k-th
earliest slot time of its node.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass

import numpy as np

from .model import FogNode, Phase, Schedule, ScheduleEntry, Task
from .power import active_power


@dataclass(frozen=True)
class PsoConfig:
    """Swarm parameters; penalty is joules charged per missed deadline.

    penalty=None auto-scales to 10x the largest single-task full-power
    energy of the instance so feasibility dominates energy.
    """

    swarm_size: int = 30
    iterations: int = 100
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    penalty: float | None = None

    def validate(self) -> None:
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 <= self.inertia <= 1.0:
            raise ValueError("inertia must be in [0, 1]")
        if self.cognitive <= 0 or self.social <= 0:
            raise ValueError("cognitive and social factors must be > 0")
        if self.penalty is not None and self.penalty <= 0:
            raise ValueError("penalty must be > 0")


def _fresh_lanes(nodes: list[FogNode]) -> dict[int, list[float]]:
    return {n.id: [0.0] * n.npe_slots for n in nodes}


def _place(lanes: dict[int, list[float]], task: Task, node: FogNode,
           sched: Schedule) -> None:
    lane = lanes[node.id]
    avail = lane[task.npe - 1]
    start = avail if avail > task.submit_time else task.submit_time
    ext = task.length / node.mips
    entry = ScheduleEntry.make(task.id, node.id, start, ext, 1.0, Phase.PRIMARY)
    sched.entries.append(entry)
    sched.assignment[task.id] = node.id
    del lane[:task.npe]
    for _ in range(task.npe):
        insort(lane, entry.completion)


def _list_schedule(ordered: list[Task], nodes: list[FogNode]) -> Schedule:
    """Greedy placement on the earliest-available capable node (tie: lower id)."""
    sched = Schedule(selected_rho=1.0)
    by_id = sorted(nodes, key=lambda n: n.id)
    lanes = _fresh_lanes(nodes)
    for task in ordered:
        best = None  # (start, node)
        for node in by_id:
            if task.npe > node.npe_slots:
                continue
            avail = lanes[node.id][task.npe - 1]
            start = avail if avail > task.submit_time else task.submit_time
            if best is None or start < best[0]:
                best = (start, node)
        if best is None:
            sched.failed.append(task.id)
            sched.cb += 1
            continue
        _place(lanes, task, best[1], sched)
    return sched


def fcfs_schedule(tasks: list[Task], nodes: list[FogNode]) -> Schedule:
    """First come, first served: submission order, earliest-available node."""
    return _list_schedule(sorted(tasks, key=lambda t: (t.submit_time, t.id)), nodes)


def sjf_schedule(tasks: list[Task], nodes: list[FogNode]) -> Schedule:
    """Shortest job first: length order, earliest-available node."""
    return _list_schedule(sorted(tasks, key=lambda t: (t.length, t.id)), nodes)


def rr_schedule(tasks: list[Task], nodes: list[FogNode]) -> Schedule:
    """Round robin: submission order, node cycled by task index.

    A node too small for the task's npe is skipped in cycle order.
    """
    sched = Schedule(selected_rho=1.0)
    by_id = sorted(nodes, key=lambda n: n.id)
    lanes = _fresh_lanes(nodes)
    m = len(by_id)
    for i, task in enumerate(sorted(tasks, key=lambda t: (t.submit_time, t.id))):
        node = None
        for probe in range(m):
            cand = by_id[(i + probe) % m]
            if task.npe <= cand.npe_slots:
                node = cand
                break
        if node is None:
            sched.failed.append(task.id)
            sched.cb += 1
            continue
        _place(lanes, task, node, sched)
    return sched


def pso_schedule(tasks: list[Task], nodes: list[FogNode],
                 cfg: PsoConfig = PsoConfig(), seed: int = 0) -> Schedule:
    """Particle-swarm task-to-node mapping.

    Particle positions are real vectors, one dimension per task, decoded by
    clamped rounding into each task's list of capable nodes. Fitness is the
    full-speed energy of the decoded schedule plus a penalty per missed
    deadline. The global best after the final iteration is rebuilt into a
    schedule with the shared placement rules.
    """
    cfg.validate()
    sched = Schedule(selected_rho=1.0)
    by_id = sorted(nodes, key=lambda n: n.id)
    order = sorted(tasks, key=lambda t: (t.submit_time, t.id))
    capable = [[j for j, n in enumerate(by_id) if t.npe <= n.npe_slots] for t in order]
    placeable = [i for i, c in enumerate(capable) if c]
    for i, c in zip(range(len(order)), capable):
        if not c:
            sched.failed.append(order[i].id)
            sched.cb += 1
    if not placeable:
        return sched

    dims = len(placeable)
    m = len(by_id)
    slots = np.array([n.npe_slots for n in by_id])
    max_slots = int(slots.max())
    # Per-(task, node) execution time and energy at full speed; incapable
    # pairs never get decoded so their values are irrelevant.
    lengths = np.array([order[i].length for i in placeable], dtype=float)
    submits = np.array([order[i].submit_time for i in placeable])
    deadlines = np.array([order[i].deadline for i in placeable])
    npes = np.array([order[i].npe for i in placeable])
    mips = np.array([n.mips for n in by_id])
    powers = np.array([active_power(n, 1.0) for n in by_id])
    ext = lengths[:, None] / mips[None, :]
    energy = ext * powers[None, :]

    penalty = cfg.penalty
    if penalty is None:
        penalty = 10.0 * float(energy.max())

    cand = [np.array(capable[i]) for i in placeable]
    hi = np.array([len(c) - 1 for c in cand], dtype=float)

    def fitness(pos: np.ndarray) -> np.ndarray:
        """Vectorized over the swarm: decode, place, score every particle."""
        s = pos.shape[0]
        idx = np.clip(np.rint(pos), 0.0, hi[None, :]).astype(int)
        lanes = np.full((s, m, max_slots), np.inf)
        for j in range(m):
            lanes[:, j, : int(slots[j])] = 0.0
        rows_i = np.arange(s)
        total = np.zeros(s)
        misses = np.zeros(s, dtype=int)
        for t in range(dims):
            node = cand[t][idx[:, t]]
            k = int(npes[t])
            rows = lanes[rows_i, node]
            ordering = np.argsort(rows, axis=1)
            kth = np.take_along_axis(rows, ordering[:, k - 1 : k], axis=1).ravel()
            start = np.maximum(submits[t], kth)
            ct = start + ext[t, node]
            misses += ct > deadlines[t]
            lanes[rows_i[:, None], node[:, None], ordering[:, :k]] = ct[:, None]
            total += energy[t, node]
        return total + penalty * misses

    rng = np.random.default_rng(seed)
    pos = rng.random((cfg.swarm_size, dims)) * hi[None, :]
    vel = np.zeros_like(pos)
    pbest = pos.copy()
    pbest_fit = fitness(pos)
    g = int(np.argmin(pbest_fit))
    gbest = pbest[g].copy()
    gbest_fit = float(pbest_fit[g])
    for _ in range(cfg.iterations):
        r1 = rng.random(pos.shape)
        r2 = rng.random(pos.shape)
        vel = cfg.inertia * vel + cfg.cognitive * r1 * (pbest - pos) \
            + cfg.social * r2 * (gbest[None, :] - pos)
        pos = np.clip(pos + vel, 0.0, hi[None, :])
        fit = fitness(pos)
        improved = fit < pbest_fit
        pbest[improved] = pos[improved]
        pbest_fit = np.where(improved, fit, pbest_fit)
        g = int(np.argmin(pbest_fit))
        if float(pbest_fit[g]) < gbest_fit:
            gbest = pbest[g].copy()
            gbest_fit = float(pbest_fit[g])

    chosen = np.clip(np.rint(gbest), 0.0, hi).astype(int)
    lanes = _fresh_lanes(nodes)
    for t, i in enumerate(placeable):
        _place(lanes, order[i], by_id[int(cand[t][chosen[t]])], sched)
    return sched
