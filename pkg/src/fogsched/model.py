"""Domain records shared by every other module: tasks, fog nodes, DVFS and
fault-model configuration, schedules, and metric reports.

Records carry no behaviour beyond construction and (de)serialization.
Invariant checking is centralized in :func:`validate_instance` so that
malformed records can still be built, inspected, and reported on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Iterable


class Role(str, Enum):
    PRIMARY = "primary"
    BACKUP = "backup"


class Phase(str, Enum):
    """Which execution slot a schedule entry occupies."""

    PRIMARY = "primary"
    BACKUP = "backup"


@dataclass(frozen=True)
class Task:
    """A unit of work.

    length is in million instructions (MI); deadline and submit_time are
    seconds from the time origin; npe is the number of processor elements
    the task occupies while running.
    """

    id: int
    length: int          # MI
    deadline: float      # s
    submit_time: float   # s
    npe: int = 1
    role: Role = Role.PRIMARY
    backup_of: int | None = None


@dataclass(frozen=True)
class FogNode:
    """A fog resource (VM) with a DVFS envelope and concurrency slots.

    mips is the processing rate at full frequency; npe_slots is the number
    of processor elements the node can run concurrently; activity and
    load_cap are the switching-activity factor and load capacitance of the
    dynamic power model.
    """

    id: int
    mips: float          # MI/s at full frequency
    bandwidth: float     # B/s, carried as configuration only
    ram: float           # MB, carried as configuration only
    npe_slots: int
    v_max: float         # V
    f_max: float         # Hz
    activity: float      # dimensionless, in [0, 1]
    load_cap: float      # F
    static_power: float = 0.0  # W, drawn per active second


@dataclass(frozen=True)
class DvfsConfig:
    """Ordered voltage/frequency scale factors; the last level is full speed."""

    levels: tuple[float, ...]

    def __init__(self, levels: Iterable[float]):
        object.__setattr__(self, "levels", tuple(levels))


@dataclass(frozen=True)
class FaultModel:
    """Transient-fault rate parameters.

    lambda0 is the fault rate (faults/s) at maximum frequency and voltage.
    d is the sensitivity of the frequency-based rate; d_volt the sensitivity
    (in volts) of the voltage-based rate, defaulting to d when unset. The
    two rates are redundant parameterizations when voltage and frequency
    scale together.
    """

    lambda0: float
    d: float
    f_min: float
    d_volt: float | None = None

    @property
    def volt_sensitivity(self) -> float:
        return self.d if self.d_volt is None else self.d_volt


@dataclass(frozen=True)
class ScheduleEntry:
    """One planned execution of a task on a node at a DVFS factor."""

    task_id: int
    node_id: int
    start: float       # s
    exec_time: float   # s
    completion: float  # s, always start + exec_time
    rho: float
    phase: Phase = Phase.PRIMARY

    @classmethod
    def make(cls, task_id: int, node_id: int, start: float, exec_time: float,
             rho: float, phase: Phase = Phase.PRIMARY) -> "ScheduleEntry":
        return cls(task_id, node_id, start, exec_time, start + exec_time, rho, phase)


@dataclass
class Schedule:
    """The output of a scheduler run.

    backup_list holds tasks deferred to the backup phase because no feasible
    primary mapping existed; failed holds tasks that could not be mapped at
    all. cp and cb mirror their lengths.
    """

    entries: list[ScheduleEntry] = field(default_factory=list)
    assignment: dict[int, int] = field(default_factory=dict)
    selected_rho: float = 1.0
    backup_list: list[int] = field(default_factory=list)
    failed: list[int] = field(default_factory=list)
    cp: int = 0
    cb: int = 0

    def primary_entries(self) -> list[ScheduleEntry]:
        return [e for e in self.entries if e.phase is Phase.PRIMARY]

    def backup_entries(self) -> list[ScheduleEntry]:
        return [e for e in self.entries if e.phase is Phase.BACKUP]


@dataclass(frozen=True)
class FaultEvent:
    """A primary (or backup) execution that faulted after `elapsed` seconds."""

    task_id: int
    node_id: int
    elapsed: float


@dataclass
class MetricsReport:
    """Aggregate metrics of one simulated run.

    avg_completion and avg_wait are None when no task executed; avg_power is
    total energy over the makespan (latest completion minus earliest submit).
    """

    total_energy: float = 0.0      # J
    avg_completion: float | None = None  # s
    avg_wait: float | None = None        # s
    avg_power: float = 0.0         # W
    cp: int = 0
    cb: int = 0
    missed_deadlines: int = 0
    reliability_estimate: float = 1.0


@dataclass(frozen=True)
class Violation:
    """One broken invariant, naming the offending record and field."""

    record: str   # e.g. "task", "node", "dvfs", "fault_model", "instance"
    record_id: int | None
    field: str
    message: str

    def __str__(self) -> str:
        where = f"{self.record}[{self.record_id}]" if self.record_id is not None else self.record
        return f"{where}.{self.field}: {self.message}"


class InvalidInstanceError(ValueError):
    """Raised when an instance breaks one or more invariants; carries them all."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"{len(violations)} invariant violation(s): {lines}")


@dataclass
class Instance:
    """A validated problem instance."""

    tasks: list[Task]
    nodes: list[FogNode]
    dvfs: DvfsConfig
    fault_model: FaultModel


NPE_MAX = 8  # processor-element range is [1, 8] for both tasks and nodes


def check_instance(tasks: list[Task], nodes: list[FogNode], dvfs: DvfsConfig,
                   fault_model: FaultModel) -> list[Violation]:
    """Return the full list of invariant violations (empty when valid)."""
    out: list[Violation] = []
    seen_task_ids: set[int] = set()
    for t in tasks:
        if t.id in seen_task_ids:
            out.append(Violation("task", t.id, "id", "id must be unique"))
        seen_task_ids.add(t.id)
        if t.length <= 0:
            out.append(Violation("task", t.id, "length", "length must be > 0"))
        if t.submit_time < 0:
            out.append(Violation("task", t.id, "submit_time", "submit_time must be >= 0"))
        elif t.deadline <= t.submit_time:
            out.append(Violation("task", t.id, "deadline", "deadline must exceed submit_time"))
        if not 1 <= t.npe <= NPE_MAX:
            out.append(Violation("task", t.id, "npe", f"npe must be in [1, {NPE_MAX}]"))
        if (t.role is Role.BACKUP) != (t.backup_of is not None):
            out.append(Violation("task", t.id, "backup_of",
                                 "backup_of must be set exactly when role is backup"))

    seen_node_ids: set[int] = set()
    for n in nodes:
        if n.id in seen_node_ids:
            out.append(Violation("node", n.id, "id", "id must be unique"))
        seen_node_ids.add(n.id)
        if n.mips <= 0:
            out.append(Violation("node", n.id, "mips", "mips must be > 0"))
        if n.v_max <= 0:
            out.append(Violation("node", n.id, "v_max", "v_max must be > 0"))
        if n.f_max <= 0:
            out.append(Violation("node", n.id, "f_max", "f_max must be > 0"))
        if n.npe_slots < 1:
            out.append(Violation("node", n.id, "npe_slots", "npe_slots must be >= 1"))
        if not 0.0 <= n.activity <= 1.0:
            out.append(Violation("node", n.id, "activity", "activity must be in [0, 1]"))
        if n.load_cap < 0:
            out.append(Violation("node", n.id, "load_cap", "load_cap must be >= 0"))
        if n.static_power < 0:
            out.append(Violation("node", n.id, "static_power", "static_power must be >= 0"))

    levels = dvfs.levels
    if not levels:
        out.append(Violation("dvfs", None, "levels", "levels must be nonempty"))
    else:
        if any(not 0.0 < r <= 1.0 for r in levels):
            out.append(Violation("dvfs", None, "levels", "every level must lie in (0, 1]"))
        if any(b <= a for a, b in zip(levels, levels[1:])):
            out.append(Violation("dvfs", None, "levels", "levels must be strictly increasing"))
        if 1.0 not in levels:
            out.append(Violation("dvfs", None, "levels", "levels must contain 1.0"))

    fm = fault_model
    if fm.lambda0 < 0:
        out.append(Violation("fault_model", None, "lambda0", "lambda0 must be >= 0"))
    if fm.d <= 0:
        out.append(Violation("fault_model", None, "d", "d must be > 0"))
    if not 0.0 < fm.f_min < 1.0:
        out.append(Violation("fault_model", None, "f_min", "f_min must lie in (0, 1)"))
    if fm.d_volt is not None and fm.d_volt <= 0:
        out.append(Violation("fault_model", None, "d_volt", "d_volt must be > 0"))

    # Cross-check: the fault-rate model is only defined for normalized
    # frequencies >= f_min, so every DVFS level must clear it.
    if levels and 0.0 < fm.f_min < 1.0 and all(0.0 < r <= 1.0 for r in levels):
        if levels[0] < fm.f_min:
            out.append(Violation("instance", None, "dvfs.levels",
                                 "lowest DVFS level is below fault_model.f_min"))
    return out


def validate_instance(tasks: list[Task], nodes: list[FogNode], dvfs: DvfsConfig,
                      fault_model: FaultModel) -> Instance:
    """Return a validated Instance or raise InvalidInstanceError with every violation."""
    violations = check_instance(tasks, nodes, dvfs, fault_model)
    if violations:
        raise InvalidInstanceError(violations)
    return Instance(list(tasks), list(nodes), dvfs, fault_model)


# ---------------------------------------------------------------------------
# Instance file format (JSON): sections tasks[], nodes[], dvfs, fault_model,
# field names exactly as in the dataclasses above. Serialization is
# deterministic (sorted keys, two-space indent, trailing newline) so a fixed
# instance always round-trips to identical bytes.
# ---------------------------------------------------------------------------

def instance_to_dict(inst: Instance) -> dict:
    return {
        "tasks": [{**asdict(t), "role": t.role.value} for t in inst.tasks],
        "nodes": [asdict(n) for n in inst.nodes],
        "dvfs": {"levels": list(inst.dvfs.levels)},
        "fault_model": asdict(inst.fault_model),
    }


def instance_from_dict(doc: dict, validate: bool = True) -> Instance:
    tasks = [
        Task(
            id=t["id"], length=t["length"], deadline=t["deadline"],
            submit_time=t["submit_time"], npe=t.get("npe", 1),
            role=Role(t.get("role", "primary")), backup_of=t.get("backup_of"),
        )
        for t in doc["tasks"]
    ]
    nodes = [
        FogNode(
            id=n["id"], mips=n["mips"], bandwidth=n["bandwidth"], ram=n["ram"],
            npe_slots=n["npe_slots"], v_max=n["v_max"], f_max=n["f_max"],
            activity=n["activity"], load_cap=n["load_cap"],
            static_power=n.get("static_power", 0.0),
        )
        for n in doc["nodes"]
    ]
    dvfs = DvfsConfig(doc["dvfs"]["levels"])
    f = doc["fault_model"]
    fm = FaultModel(lambda0=f["lambda0"], d=f["d"], f_min=f["f_min"],
                    d_volt=f.get("d_volt"))
    if validate:
        return validate_instance(tasks, nodes, dvfs, fm)
    return Instance(tasks, nodes, dvfs, fm)


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True, indent=2) + "\n"


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_instance(inst))


def load_instance(path: str, validate: bool = True) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh), validate=validate)
