"""Named invariant checks behind the `verify` CLI command.

Each check returns (passed, detail). Budgets are sized for an interactive
run of a few tens of seconds; the pytest suite runs the same properties at
full scale.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from . import baselines, gap, oracle, sim
from .model import DvfsConfig, FaultModel, FogNode, Phase
from .power import dynamic_power, scaled_vf
from .reliability import FaultSampler, fault_probability, fault_rate_freq, reliability
from .workload import WorkloadSpec, generate


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_small_spec(rng: random.Random, max_tasks: int = 50,
                       max_vms: int = 8) -> WorkloadSpec:
    return WorkloadSpec(
        n_tasks=rng.randint(1, max_tasks),
        n_vms=rng.randint(1, max_vms),
        slack_factor_range=(1.2, 3.5),
        submit_mode="uniform",
        submit_horizon=rng.uniform(0.0, 6.0),
        seed=rng.randrange(2**32),
    )


def check_equation_examples() -> tuple[bool, str]:
    node = FogNode(id=1, mips=1000, bandwidth=0, ram=0, npe_slots=1,
                   v_max=1.2, f_max=1e9, activity=0.5, load_cap=2e-9)
    checks = [
        (dynamic_power(node, 1.2, 1e9), 1.44),
        (dynamic_power(node, *scaled_vf(node, 0.5)), 0.18),
        (fault_rate_freq(FaultModel(1e-6, 3.0, 0.5), 0.5), 1e-3),
        (reliability(1e-3, 1000.0), math.exp(-1.0)),
        (fault_probability(math.log(2), 1.0), 0.5),
    ]
    bad = [f"{got} != {want}" for got, want in checks
           if abs(got - want) > 1e-9 * abs(want)]
    return not bad, "; ".join(bad) or "5 worked examples at 1e-9"


def check_cubic_power(samples: int = 1000) -> tuple[bool, str]:
    rng = random.Random(101)
    worst = 0.0
    for _ in range(samples):
        node = FogNode(id=1, mips=1000, bandwidth=0, ram=0, npe_slots=1,
                       v_max=rng.uniform(0.6, 1.4), f_max=rng.uniform(1e8, 3e9),
                       activity=rng.uniform(0.05, 1.0),
                       load_cap=rng.uniform(1e-10, 1e-8))
        rho = rng.uniform(0.05, 1.0)
        full = dynamic_power(node, node.v_max, node.f_max)
        scaled = dynamic_power(node, *scaled_vf(node, rho))
        worst = max(worst, abs(scaled - rho**3 * full) / full)
    return worst <= 1e-12, f"max relative error {worst:.3e} over {samples} pairs"


def check_deadline_safety(instances: int = 100) -> tuple[bool, str]:
    rng = random.Random(202)
    for i in range(instances):
        inst = generate(_random_small_spec(rng))
        for build in (lambda: gap.gap_schedule(inst.tasks, inst.nodes, inst.dvfs),
                      lambda: gap.wgap_schedule(inst.tasks, inst.nodes)):
            sched = build()
            by_id = {t.id: t for t in inst.tasks}
            for e in sched.entries:
                if e.completion > by_id[e.task_id].deadline:
                    return False, f"instance {i}: task {e.task_id} past deadline"
            placed = {e.task_id for e in sched.entries}
            if placed & set(sched.failed):
                return False, f"instance {i}: task both placed and failed"
            if sched.cp != len(sched.backup_list) or sched.cb != len(sched.failed):
                return False, f"instance {i}: counter mismatch"
    return True, f"{instances} instances, zero deadline violations"


def check_backup_separation(runs: int = 100) -> tuple[bool, str]:
    rng = random.Random(303)
    fm = FaultModel(lambda0=1e-3, d=3.0, f_min=0.5)
    backups = 0
    for i in range(runs):
        spec = _random_small_spec(rng, max_tasks=25)
        inst = generate(spec, fault_model=fm)
        sched = gap.gap_schedule(inst.tasks, inst.nodes, inst.dvfs)
        trace, _ = sim.run(sched, inst, fm, FaultSampler(f"sep/{i}"))
        primary_node = {e.task_id: e.node_id for e in sched.entries
                        if e.phase is Phase.PRIMARY}
        for seg in trace.segments:
            if seg.phase is Phase.BACKUP and seg.task_id in primary_node:
                backups += 1
                if seg.node_id == primary_node[seg.task_id]:
                    return False, f"run {i}: backup on its primary's node"
        if sim.check_capacity(trace, inst):
            return False, f"run {i}: node capacity exceeded"
    return True, f"{runs} fault-injected runs, {backups} backups, all separated"


def check_oracle_bounding(instances: int = 200) -> tuple[bool, str]:
    rng = random.Random(404)
    dvfs = DvfsConfig((0.6, 0.8, 1.0))
    ratios = []
    for i in range(instances):
        spec = WorkloadSpec(
            n_tasks=rng.randint(1, 5), n_vms=rng.randint(1, 3),
            slack_factor_range=(1.2, 4.0), submit_mode="uniform",
            submit_horizon=rng.uniform(0.0, 2.0), seed=rng.randrange(2**32),
        )
        inst = generate(spec, dvfs=dvfs)
        best = oracle.exhaustive(inst.tasks, inst.nodes, dvfs)
        sched = gap.gap_schedule(inst.tasks, inst.nodes, dvfs)
        fully_feasible = not sched.failed and sched.cp == 0
        if fully_feasible:
            if not best.feasible:
                return False, f"instance {i}: heuristic feasible, oracle not"
            energy = gap.schedule_energy({n.id: n for n in inst.nodes}, sched.entries)
            if energy < best.best_energy * (1 - 1e-9):
                return False, f"instance {i}: heuristic energy beat the oracle"
            ratios.append(energy / best.best_energy if best.best_energy > 0 else 1.0)
    ratios.sort()
    median = ratios[len(ratios) // 2] if ratios else float("nan")
    return True, (f"{instances} instances, {len(ratios)} bounded, "
                  f"median energy ratio {median:.3f}")


def check_fault_statistics(samples: int = 100_000) -> tuple[bool, str]:
    points = [(1e-3, 200.0), (5e-4, 1000.0), (2e-3, 600.0)]
    worst = 0.0
    for k, (lam, t) in enumerate(points):
        p = fault_probability(lam, t)
        sampler = FaultSampler(f"stats/{k}")
        hits = sum(1 for _ in range(samples) if sampler.sample(p)[0])
        worst = max(worst, abs(hits / samples - p))
    return worst <= 0.01, f"max |empirical - model| = {worst:.4f} over 3 points"


def check_determinism() -> tuple[bool, str]:
    spec = WorkloadSpec(n_tasks=40, n_vms=5, submit_mode="uniform",
                        submit_horizon=3.0, seed=77)
    fm = FaultModel(lambda0=1e-3, d=3.0, f_min=0.5)
    outputs = []
    for _ in range(2):
        inst = generate(spec, fault_model=fm)
        sched = gap.gap_schedule(inst.tasks, inst.nodes, inst.dvfs)
        trace, rep = sim.run(sched, inst, fm, FaultSampler("det"))
        outputs.append((tuple(trace.events), rep))
    same = outputs[0] == outputs[1]
    return same, "replay produced identical traces and reports" if same \
        else "replay diverged"


def check_workload_ranges(draws: int = 10_000) -> tuple[bool, str]:
    inst = generate(WorkloadSpec(n_tasks=draws, n_vms=50, seed=9))
    ok = all(1000 <= t.length <= 2000 for t in inst.tasks) \
        and all(1000 <= n.mips <= 2000 for n in inst.nodes) \
        and all(1 <= t.npe <= 8 for t in inst.tasks)
    return ok, f"{draws} tasks within configured ranges" if ok \
        else "value outside configured range"


def check_baseline_shapes() -> tuple[bool, str]:
    rng = random.Random(505)
    for i in range(20):
        inst = generate(_random_small_spec(rng, max_tasks=20))
        for name, build in (
            ("fcfs", baselines.fcfs_schedule), ("sjf", baselines.sjf_schedule),
            ("rr", baselines.rr_schedule),
            ("pso", lambda t, n: baselines.pso_schedule(
                t, n, baselines.PsoConfig(swarm_size=6, iterations=5), seed=i)),
        ):
            sched = build(inst.tasks, inst.nodes)
            if len(sched.entries) + len(sched.failed) != len(inst.tasks):
                return False, f"{name}: not exactly one entry per task"
            if any(e.phase is not Phase.PRIMARY for e in sched.entries):
                return False, f"{name}: emitted a backup entry"
            if any(e.rho != 1.0 for e in sched.entries):
                return False, f"{name}: ran below full speed"
    return True, "fcfs/sjf/rr/pso all emit one full-speed entry per task"


ALL_CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("equation-examples", check_equation_examples),
    ("power-cubic-identity", check_cubic_power),
    ("deadline-safety", check_deadline_safety),
    ("backup-separation", check_backup_separation),
    ("oracle-bounding", check_oracle_bounding),
    ("fault-statistics", check_fault_statistics),
    ("replay-determinism", check_determinism),
    ("workload-ranges", check_workload_ranges),
    ("baseline-shapes", check_baseline_shapes),
]


def run_all() -> list[CheckResult]:
    results = []
    for name, fn in ALL_CHECKS:
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, passed, detail))
    return results
