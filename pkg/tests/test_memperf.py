"""Cache, L3 partitioning, and training-flow estimator checks."""

import numpy as np
import pytest

from warpsim.memperf import (
    CacheModel,
    HierarchySpec,
    L3Config,
    MemoryLevelSpec,
    SpecInvalid,
    TrainingFlowSpec,
    default_hierarchy,
    estimate_training_flow,
    simulate_cache,
    simulate_l3,
)


def lru_oracle(trace, capacity):
    """Step-by-step reference LRU built on a plain list."""
    resident, hits, misses = [], 0, 0
    for line in trace:
        if line in resident:
            hits += 1
            resident.remove(line)
            resident.append(line)
        else:
            misses += 1
            if capacity > 0:
                if len(resident) >= capacity:
                    resident.pop(0)
                resident.append(line)
    return hits, misses


class TestLruCache:
    def test_working_set_fits_only_cold_misses(self):
        trace = list(range(8)) * 10
        hits, misses = simulate_cache(trace, CacheModel(capacity_lines=16))
        assert misses == 8
        assert hits == 72

    def test_cyclic_sweep_capacity_plus_one_always_misses(self):
        cap = 8
        trace = list(range(cap + 1)) * 3
        hits, misses = simulate_cache(trace, CacheModel(capacity_lines=cap))
        assert hits == 0
        assert misses == len(trace)
        assert (hits, misses) == lru_oracle(trace, cap)

    def test_single_address_repeated(self):
        hits, misses = simulate_cache([5] * 100, CacheModel(capacity_lines=1))
        assert (hits, misses) == (99, 1)

    def test_random_traces_match_oracle(self):
        rng = np.random.default_rng(51)
        for _ in range(300):
            cap = int(rng.integers(1, 16))
            trace = rng.integers(0, 24, size=int(rng.integers(1, 120))).tolist()
            cache = CacheModel(capacity_lines=cap)
            assert simulate_cache(trace, cache) == lru_oracle(trace, cap)

    def test_inclusion_property(self):
        rng = np.random.default_rng(52)
        for _ in range(200):
            cap = int(rng.integers(1, 12))
            trace = rng.integers(0, 20, size=100).tolist()
            _, small = simulate_cache(trace, CacheModel(capacity_lines=cap))
            _, large = simulate_cache(trace, CacheModel(capacity_lines=cap + 1))
            assert large <= small

    def test_negative_address_rejected(self):
        with pytest.raises(SpecInvalid):
            simulate_cache([-1], CacheModel(capacity_lines=4))


class TestL3Policies:
    def test_single_active_core_dynamic_at_most_static(self):
        rng = np.random.default_rng(53)
        for _ in range(50):
            trace = rng.integers(0, 32, size=200).tolist()
            traces = [trace, [], [], []]
            cfg_s = L3Config(total_lines=16, cores=4, policy="static")
            cfg_d = L3Config(total_lines=16, cores=4, policy="dynamic")
            static = simulate_l3(traces, cfg_s)
            dynamic = simulate_l3(traces, cfg_d)
            assert dynamic[0][1] <= static[0][1]
            for core in (1, 2, 3):
                assert static[core] == dynamic[core] == (0, 0)

    def test_tiny_traces_tie(self):
        traces = [[1, 2, 1, 2], [3, 4, 3, 4]]
        st = simulate_l3(traces, L3Config(total_lines=8, cores=2, policy="static"))
        dy = simulate_l3(traces, L3Config(total_lines=8, cores=2, policy="dynamic"))
        assert st == dy == [(2, 2), (2, 2)]

    def test_adversarial_thrash_static_beats_dynamic(self):
        # Core A cycles a palindrome that fits its static quota of 4; core B
        # floods fresh lines. In the shared pool B stretches A's reuse
        # distance past the full capacity at the turnaround line.
        reps = 10
        a_trace = [0, 1, 2, 3, 3, 2, 1, 0] * reps
        b_trace = [1000 + i for i in range(len(a_trace))]
        cfg_s = L3Config(total_lines=8, cores=2, policy="static")
        cfg_d = L3Config(total_lines=8, cores=2, policy="dynamic")
        static = simulate_l3([a_trace, b_trace], cfg_s)
        dynamic = simulate_l3([a_trace, b_trace], cfg_d)
        assert static[0][1] == 4  # cold misses only
        assert static[0][1] < dynamic[0][1]

    def test_policies_match_isolated_oracle(self):
        rng = np.random.default_rng(54)
        traces = [rng.integers(0, 40, size=80).tolist() for _ in range(3)]
        cfg = L3Config(total_lines=12, cores=3, policy="static")
        got = simulate_l3(traces, cfg)
        for core, trace in enumerate(traces):
            assert got[core] == lru_oracle(trace, 4)

    def test_dynamic_shared_occupancy(self):
        # Two cores hammering the same single line share it in dynamic mode.
        traces = [[7] * 10, [7] * 10]
        dy = simulate_l3(traces, L3Config(total_lines=2, cores=2, policy="dynamic"))
        assert dy[0] == (9, 1)
        assert dy[1] == (10, 0)

    def test_config_validation(self):
        with pytest.raises(SpecInvalid):
            L3Config(total_lines=8, cores=0, policy="static")
        with pytest.raises(SpecInvalid):
            L3Config(total_lines=8, cores=1, policy="magic")
        with pytest.raises(SpecInvalid):
            simulate_l3([[1], [2]], L3Config(total_lines=8, cores=3, policy="static"))


def flow_spec(dataset, batch, epochs, vram, ram):
    hierarchy = HierarchySpec(
        [
            MemoryLevelSpec("RAM", 10, 100, 10**9),
            MemoryLevelSpec("VRAM", 12, 100, 2 * 10**9),
            MemoryLevelSpec("SSD", 1000, 10, 10**12),
        ]
    )
    return TrainingFlowSpec(
        dataset_bytes=dataset,
        batch_bytes=batch,
        epochs=epochs,
        hierarchy=hierarchy,
        vram_capacity=vram,
        ram_capacity=ram,
    )


class TestTrainingFlow:
    def test_fits_in_vram_epoch2_free(self):
        report = estimate_training_flow(flow_spec(400, 100, 3, vram=500, ram=500))
        first, second = report.epochs[0], report.epochs[1]
        assert first.disk_to_ram_bytes == 400
        assert first.ram_to_vram_bytes == 400
        assert second.disk_to_ram_bytes == 0
        assert second.ram_to_vram_bytes == 0
        assert second.time == 0

    def test_fits_ram_not_vram_drops_disk_only(self):
        # Three batches of 100; VRAM holds one batch, RAM holds all three.
        report = estimate_training_flow(flow_spec(300, 100, 2, vram=150, ram=1000))
        first, second = report.epochs
        disk_cost = 1000 + 100 / 10
        ram_cost = 10 + 100 / 100
        assert first.disk_to_ram_bytes == 300
        assert first.time == pytest.approx(3 * disk_cost + 3 * ram_cost)
        assert second.disk_to_ram_bytes == 0
        assert second.ram_to_vram_bytes == 300
        assert second.time == pytest.approx(3 * ram_cost)

    def test_epochs_never_get_slower(self):
        rng = np.random.default_rng(55)
        for _ in range(30):
            dataset = int(rng.integers(100, 2000))
            batch = int(rng.integers(10, 200))
            vram = int(rng.integers(batch, 2500))
            ram = int(rng.integers(batch, 2500))
            report = estimate_training_flow(flow_spec(dataset, batch, 4, vram, ram))
            times = [e.time for e in report.epochs]
            assert all(t <= times[0] + 1e-12 for t in times[1:])

    def test_doubling_disk_latency_never_faster(self):
        base = flow_spec(1000, 100, 3, vram=250, ram=450)
        slow_levels = [
            MemoryLevelSpec(lv.name, lv.latency * 2 if lv.name == "SSD" else lv.latency, lv.bandwidth, lv.capacity)
            for lv in base.hierarchy.levels
        ]
        slow = TrainingFlowSpec(
            dataset_bytes=1000,
            batch_bytes=100,
            epochs=3,
            hierarchy=HierarchySpec(slow_levels),
            vram_capacity=250,
            ram_capacity=450,
        )
        assert estimate_training_flow(slow).total_time >= estimate_training_flow(base).total_time

    def test_monotone_in_capacity_and_bandwidth(self):
        small = estimate_training_flow(flow_spec(1000, 100, 3, vram=150, ram=300))
        big = estimate_training_flow(flow_spec(1000, 100, 3, vram=1050, ram=1300))
        assert big.total_time <= small.total_time

    def test_batch_must_fit_vram(self):
        with pytest.raises(SpecInvalid):
            flow_spec(1000, 600, 1, vram=500, ram=800)

    def test_last_partial_batch_counted_once(self):
        report = estimate_training_flow(flow_spec(250, 100, 1, vram=1000, ram=1000))
        assert report.epochs[0].disk_to_ram_bytes == 250


class TestHierarchyValidation:
    def test_default_profile_is_valid(self):
        default_hierarchy()

    def test_latency_inversion_rejected(self):
        with pytest.raises(SpecInvalid):
            HierarchySpec(
                [
                    MemoryLevelSpec("L1", 5, 100, 100),
                    MemoryLevelSpec("RAM", 2, 100, 1000),
                ]
            )

    def test_capacity_inversion_rejected(self):
        with pytest.raises(SpecInvalid):
            HierarchySpec(
                [
                    MemoryLevelSpec("L1", 1, 100, 1000),
                    MemoryLevelSpec("RAM", 2, 100, 100),
                ]
            )

    def test_unknown_level_name(self):
        with pytest.raises(SpecInvalid):
            MemoryLevelSpec("Floppy", 1, 1, 1)

    def test_flow_requires_disk_level(self):
        hierarchy = HierarchySpec(
            [
                MemoryLevelSpec("RAM", 10, 100, 10**9),
                MemoryLevelSpec("VRAM", 12, 100, 2 * 10**9),
            ]
        )
        spec = TrainingFlowSpec(
            dataset_bytes=100, batch_bytes=50, epochs=1, hierarchy=hierarchy
        )
        with pytest.raises(SpecInvalid):
            estimate_training_flow(spec)

    def test_json_round_trip(self):
        h = default_hierarchy()
        again = HierarchySpec.from_json(h.to_json())
        assert again.to_json() == h.to_json()
