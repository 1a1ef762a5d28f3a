"""Memory-hierarchy cost models.

Three simulators: an exact LRU cache, a static-vs-dynamic shared-L3
partitioning comparison, and a disk/RAM/VRAM staging estimator for the
batch-wise data flow of a training loop. All level parameters are abstract
time units; the shipped default profile encodes only the qualitative
fastest-to-slowest ordering.
"""

from __future__ import annotations

import json
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union


class SpecInvalid(ValueError):
    pass


LEVEL_NAMES = ("Registers", "L1", "L2", "L3", "RAM", "VRAM", "SSD", "HDD", "External")
DISK_LEVELS = ("SSD", "HDD", "External")


@dataclass(frozen=True)
class MemoryLevelSpec:
    name: str
    latency: float  # time units per access
    bandwidth: float  # bytes per time unit
    capacity: float  # bytes

    def __post_init__(self):
        if self.name not in LEVEL_NAMES:
            raise SpecInvalid(f"unknown level name {self.name!r}, expected one of {LEVEL_NAMES}")
        if self.latency < 0 or self.bandwidth <= 0 or self.capacity <= 0:
            raise SpecInvalid(f"level {self.name}: parameters must be positive")


@dataclass
class HierarchySpec:
    """Levels ordered fastest to slowest; validated to pyramid shape."""

    levels: list[MemoryLevelSpec]

    def __post_init__(self):
        self.levels = list(self.levels)
        for faster, slower in zip(self.levels, self.levels[1:]):
            if slower.latency < faster.latency:
                raise SpecInvalid(
                    f"pyramid violation: {slower.name} is below {faster.name} "
                    f"but has lower latency"
                )
            if slower.capacity < faster.capacity:
                raise SpecInvalid(
                    f"pyramid violation: {slower.name} is below {faster.name} "
                    f"but has smaller capacity"
                )

    def level(self, name: str) -> MemoryLevelSpec:
        for lv in self.levels:
            if lv.name == name:
                return lv
        raise SpecInvalid(f"hierarchy has no level named {name!r}")

    def has(self, name: str) -> bool:
        return any(lv.name == name for lv in self.levels)

    @classmethod
    def from_json(cls, data: Sequence[dict]) -> "HierarchySpec":
        return cls(
            [
                MemoryLevelSpec(
                    name=str(d["name"]),
                    latency=float(d["latency"]),
                    bandwidth=float(d["bandwidth"]),
                    capacity=float(d["capacity"]),
                )
                for d in data
            ]
        )

    def to_json(self) -> list[dict]:
        return [
            {"name": lv.name, "latency": lv.latency, "bandwidth": lv.bandwidth, "capacity": lv.capacity}
            for lv in self.levels
        ]


def default_hierarchy() -> HierarchySpec:
    """Qualitative default profile: every number is configuration, not fact."""
    gib = 1 << 30
    return HierarchySpec(
        [
            MemoryLevelSpec("Registers", 1, 1 << 40, 4 << 10),
            MemoryLevelSpec("L1", 2, 1 << 38, 64 << 10),
            MemoryLevelSpec("L2", 4, 1 << 36, 1 << 20),
            MemoryLevelSpec("L3", 8, 1 << 34, 32 << 20),
            MemoryLevelSpec("RAM", 100, 1 << 32, 16 * gib),
            MemoryLevelSpec("VRAM", 120, 1 << 32, 24 * gib),
            MemoryLevelSpec("SSD", 100_000, 1 << 28, 1 << 40),
            MemoryLevelSpec("HDD", 1_000_000, 1 << 26, 4 << 40),
            MemoryLevelSpec("External", 10_000_000, 1 << 24, 1 << 50),
        ]
    )


# ----------------------------------------------------------------------
# LRU cache

@dataclass
class CacheModel:
    """LRU cache over line addresses; state is the recency-ordered resident set."""

    capacity_lines: int
    line_bytes: int = 64
    state: "OrderedDict[int, None]" = field(default_factory=OrderedDict)

    def __post_init__(self):
        if self.capacity_lines < 0:
            raise SpecInvalid("capacity_lines must be non-negative")
        if self.line_bytes <= 0:
            raise SpecInvalid("line_bytes must be positive")

    def access(self, line: int) -> bool:
        """Touch one line; returns True on hit. Evicts least-recently used."""
        if line in self.state:
            self.state.move_to_end(line)
            return True
        if self.capacity_lines > 0:
            if len(self.state) >= self.capacity_lines:
                self.state.popitem(last=False)
            self.state[line] = None
        return False


def simulate_cache(trace: Iterable[int], cache: CacheModel) -> tuple[int, int]:
    """Run a line-address trace through the cache; returns (hits, misses)."""
    hits = misses = 0
    for line in trace:
        if line < 0:
            raise SpecInvalid(f"negative line address {line}")
        if cache.access(line):
            hits += 1
        else:
            misses += 1
    return hits, misses


# ----------------------------------------------------------------------
# shared L3 partitioning

@dataclass(frozen=True)
class L3Config:
    total_lines: int
    cores: int
    policy: str  # "static" | "dynamic"

    def __post_init__(self):
        if self.cores < 1:
            raise SpecInvalid("cores must be >= 1")
        if self.total_lines < 0:
            raise SpecInvalid("total_lines must be non-negative")
        if self.policy not in ("static", "dynamic"):
            raise SpecInvalid(f"unknown policy {self.policy!r}")


def simulate_l3(traces: Sequence[Sequence[int]], cfg: L3Config) -> list[tuple[int, int]]:
    """Per-core (hits, misses) under round-robin interleaving of the traces.

    Static: each core owns an isolated LRU of floor(total/cores) lines.
    Dynamic: all cores contend for one shared LRU of the full size.
    """
    if len(traces) != cfg.cores:
        raise SpecInvalid(f"expected {cfg.cores} traces, got {len(traces)}")
    results = [[0, 0] for _ in range(cfg.cores)]
    if cfg.policy == "static":
        quota = cfg.total_lines // cfg.cores
        caches = [CacheModel(quota) for _ in range(cfg.cores)]
    else:
        shared = CacheModel(cfg.total_lines)
        caches = [shared] * cfg.cores
    longest = max((len(t) for t in traces), default=0)
    for step in range(longest):
        for core, trace in enumerate(traces):
            if step < len(trace):
                if caches[core].access(trace[step]):
                    results[core][0] += 1
                else:
                    results[core][1] += 1
    return [(h, m) for h, m in results]


# ----------------------------------------------------------------------
# training data-flow estimator

@dataclass
class TrainingFlowSpec:
    dataset_bytes: int
    batch_bytes: int
    epochs: int
    hierarchy: HierarchySpec = field(default_factory=default_hierarchy)
    vram_capacity: Optional[float] = None
    ram_capacity: Optional[float] = None

    def __post_init__(self):
        if self.dataset_bytes <= 0 or self.batch_bytes <= 0:
            raise SpecInvalid("dataset_bytes and batch_bytes must be positive")
        if self.epochs < 1:
            raise SpecInvalid("epochs must be >= 1")
        if self.vram_capacity is None:
            self.vram_capacity = self.hierarchy.level("VRAM").capacity
        if self.ram_capacity is None:
            self.ram_capacity = self.hierarchy.level("RAM").capacity
        if self.batch_bytes > self.vram_capacity:
            raise SpecInvalid(
                f"batch_bytes={self.batch_bytes} exceeds vram_capacity={self.vram_capacity}; "
                f"batches must fit device memory"
            )

    @classmethod
    def from_json(cls, source: Union[str, Path, dict]) -> "TrainingFlowSpec":
        if isinstance(source, (str, Path)):
            with open(source) as fh:
                data = json.load(fh)
        else:
            data = source
        hierarchy = (
            HierarchySpec.from_json(data["hierarchy"])
            if "hierarchy" in data
            else default_hierarchy()
        )
        return cls(
            dataset_bytes=int(data["dataset_bytes"]),
            batch_bytes=int(data["batch_bytes"]),
            epochs=int(data["epochs"]),
            hierarchy=hierarchy,
            vram_capacity=data.get("vram_capacity"),
            ram_capacity=data.get("ram_capacity"),
        )


class _ByteLru:
    """LRU over batch ids with a byte-capacity budget."""

    def __init__(self, capacity: float):
        self.capacity = capacity
        self.used = 0.0
        self.entries: "OrderedDict[int, int]" = OrderedDict()

    def __contains__(self, key: int) -> bool:
        return key in self.entries

    def touch(self, key: int) -> None:
        self.entries.move_to_end(key)

    def insert(self, key: int, size: int) -> None:
        if size > self.capacity:
            return
        while self.used + size > self.capacity and self.entries:
            _, evicted = self.entries.popitem(last=False)
            self.used -= evicted
        self.entries[key] = size
        self.used += size


@dataclass
class StageCost:
    stage: str
    transferred_bytes: int
    time: float


@dataclass
class EpochCost:
    epoch: int
    disk_to_ram_bytes: int
    ram_to_vram_bytes: int
    time: float
    stages: list[StageCost] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "epoch": self.epoch,
            "disk_to_ram_bytes": self.disk_to_ram_bytes,
            "ram_to_vram_bytes": self.ram_to_vram_bytes,
            "time": self.time,
            "stages": [
                {"stage": s.stage, "bytes": s.transferred_bytes, "time": s.time}
                for s in self.stages
            ],
        }


@dataclass
class FlowReport:
    epochs: list[EpochCost]
    total_time: float

    def to_json(self) -> dict[str, Any]:
        return {"epochs": [e.to_json() for e in self.epochs], "total_time": self.total_time}


def _disk_level(hierarchy: HierarchySpec) -> MemoryLevelSpec:
    for name in DISK_LEVELS:
        if hierarchy.has(name):
            return hierarchy.level(name)
    raise SpecInvalid(f"hierarchy needs a disk level ({', '.join(DISK_LEVELS)})")


def estimate_training_flow(spec: TrainingFlowSpec) -> FlowReport:
    """Per-epoch staging cost of streaming batches disk -> RAM -> VRAM.

    A batch transfer is skipped when the batch is still resident at the
    destination (LRU residency at each capacity); the stage cost is
    latency + bytes / bandwidth of the source level.
    """
    disk = _disk_level(spec.hierarchy)
    ram = spec.hierarchy.level("RAM")
    n_batches = -(-spec.dataset_bytes // spec.batch_bytes)
    sizes = [spec.batch_bytes] * n_batches
    sizes[-1] = spec.dataset_bytes - spec.batch_bytes * (n_batches - 1)

    ram_set = _ByteLru(spec.ram_capacity)
    vram_set = _ByteLru(spec.vram_capacity)
    epochs: list[EpochCost] = []
    total = 0.0
    for epoch in range(1, spec.epochs + 1):
        cost = EpochCost(epoch, 0, 0, 0.0)
        for batch, size in enumerate(sizes):
            if batch in vram_set:
                vram_set.touch(batch)
                continue
            if batch not in ram_set:
                t = disk.latency + size / disk.bandwidth
                cost.stages.append(StageCost("disk_to_ram", size, t))
                cost.disk_to_ram_bytes += size
                cost.time += t
                ram_set.insert(batch, size)
            else:
                ram_set.touch(batch)
            t = ram.latency + size / ram.bandwidth
            cost.stages.append(StageCost("ram_to_vram", size, t))
            cost.ram_to_vram_bytes += size
            cost.time += t
            vram_set.insert(batch, size)
        total += cost.time
        epochs.append(cost)
    return FlowReport(epochs, total)
