"""Seeded random instance generation and the standard experiment sweep.

Task lengths, node MIPS, and processor-element counts are drawn uniformly
(integers, inclusive) from configurable ranges; deadlines are the submit
time plus a slack multiple of the pessimistic execution estimate (length
over the slowest possible MIPS). Node electrical constants come from a
fixed host profile so absolute joule figures are model-relative.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import DvfsConfig, FaultModel, FogNode, Instance, Task, validate_instance

# Simulator host parameters carried as inert metadata; only RAM and
# bandwidth of the per-VM profile feed the generated nodes.
HOST_PROFILE = {
    "architecture": "X86",
    "bandwidth_bps": 10000,
    "ram_mb": 2048,
    "storage_mb": 100000,
    "os": "CentOS",
    "vm_model": "Xen",
    "time_zone": 8.0,
    "cost": 2,
    "cost_per_memory": 0.01,
    "cost_per_storage": 0.001,
}

VM_RAM_MB = 256.0
VM_BANDWIDTH_BPS = 1000.0

# Electrical defaults shared by all generated nodes; f_max maps one MI/s to
# 1e6 Hz so full-speed dynamic power lands on a watt scale.
V_MAX = 1.2
HZ_PER_MIPS = 1e6
ACTIVITY = 0.5
LOAD_CAP = 2e-9

DEFAULT_FAULT_MODEL = FaultModel(lambda0=1e-6, d=3.0, f_min=0.5)
DEFAULT_DVFS = DvfsConfig((0.6, 0.7, 0.8, 0.9, 1.0))

# Sweep shape: task counts at a fixed VM count, then VM counts at a fixed
# task count. Arrivals and deadline slack put every scenario in the
# admission-limited regime (offered load above capacity, slack tight), where
# deadline-aware scheduling separates from the queue-everything baselines.
SWEEP_TASK_COUNTS = (200, 400, 600, 800, 1000)
SWEEP_VM_COUNTS = (20, 50, 80, 100)
SWEEP_FIXED_VMS = 100
SWEEP_FIXED_TASKS = 1000
SWEEP_ARRIVALS_PER_SECOND = 300.0
SWEEP_SLACK = (1.05, 1.6)


@dataclass
class WorkloadSpec:
    """Parameters of one random instance. Equal specs generate equal instances."""

    n_tasks: int
    n_vms: int
    length_range: tuple[int, int] = (1000, 2000)
    mips_range: tuple[int, int] = (1000, 2000)
    npe_range: tuple[int, int] = (1, 8)
    deadline_base: float = 0.0
    slack_factor_range: tuple[float, float] = (1.5, 4.0)
    submit_mode: str = "zero"          # "zero" | "uniform"
    submit_horizon: float = 0.0        # upper bound of uniform submits
    seed: int | str = 0
    scenario: str = ""                 # label carried through to reports
    seed_index: int = 0

    def validate(self) -> None:
        if self.n_tasks < 0 or self.n_vms < 0:
            raise ValueError("n_tasks and n_vms must be >= 0")
        for name in ("length_range", "mips_range", "npe_range", "slack_factor_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} must satisfy lo <= hi")
        if self.submit_mode not in ("zero", "uniform"):
            raise ValueError(f"unknown submit_mode {self.submit_mode!r}")


def generate(spec: WorkloadSpec,
             fault_model: FaultModel = DEFAULT_FAULT_MODEL,
             dvfs: DvfsConfig = DEFAULT_DVFS) -> Instance:
    """Draw a full instance from the spec's private random stream.

    Task npe is clamped to the largest generated node capacity so every task
    has at least one capable node.
    """
    spec.validate()
    rng = random.Random(spec.seed)
    nodes = []
    for j in range(spec.n_vms):
        mips = rng.randint(*spec.mips_range)
        slots = rng.randint(*spec.npe_range)
        nodes.append(FogNode(
            id=j + 1, mips=float(mips), bandwidth=VM_BANDWIDTH_BPS, ram=VM_RAM_MB,
            npe_slots=slots, v_max=V_MAX, f_max=mips * HZ_PER_MIPS,
            activity=ACTIVITY, load_cap=LOAD_CAP, static_power=0.0,
        ))
    npe_cap = max((n.npe_slots for n in nodes), default=spec.npe_range[1])
    tasks = []
    for i in range(spec.n_tasks):
        length = rng.randint(*spec.length_range)
        npe = min(rng.randint(*spec.npe_range), npe_cap)
        if spec.submit_mode == "uniform" and spec.submit_horizon > 0:
            submit = rng.uniform(0.0, spec.submit_horizon)
        else:
            submit = 0.0
        slack = rng.uniform(*spec.slack_factor_range)
        estimate = length / spec.mips_range[0]  # pessimistic: slowest MIPS
        deadline = submit + spec.deadline_base + estimate * slack
        tasks.append(Task(id=i + 1, length=length, deadline=deadline,
                          submit_time=submit, npe=npe))
    return validate_instance(tasks, nodes, dvfs, fault_model)


def paper_sweep(seeds: int = 10, master_seed: int | str = 0) -> list[WorkloadSpec]:
    """The standard scenario grid: task counts at 100 VMs, VM counts at
    1000 tasks, `seeds` replicas each.

    Arrivals are uniform over a window proportional to the task count, so
    load per VM rises as VMs are removed. Streams are isolated per
    (master seed, scenario, replica).
    """
    shapes = [(f"tasks{n:04d}", n, SWEEP_FIXED_VMS) for n in SWEEP_TASK_COUNTS]
    shapes += [(f"vms{m:03d}", SWEEP_FIXED_TASKS, m) for m in SWEEP_VM_COUNTS]
    specs = []
    for scenario, n_tasks, n_vms in shapes:
        horizon = n_tasks / SWEEP_ARRIVALS_PER_SECOND
        for k in range(seeds):
            specs.append(WorkloadSpec(
                n_tasks=n_tasks, n_vms=n_vms,
                slack_factor_range=SWEEP_SLACK,
                submit_mode="uniform", submit_horizon=horizon,
                seed=f"{master_seed}/{scenario}/{k}",
                scenario=scenario, seed_index=k,
            ))
    return specs
