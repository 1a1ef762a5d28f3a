"""Reduction golden traces and oracle checks."""

import numpy as np
import pytest

from warpsim import MetricsReport, Simulator
from warpsim.kernels import NotPowerOfTwo, reduce_sum

PAPER_ARRAY = [8, 3, 5, 7, 2, 9, 1, 6, 4, 10, 12, 15, 11, 14, 13, 16]

# Interleaved adjacent-pair reduction: active threads and their sums per step,
# idle cells empty.
PAPER_ROWS = [
    [11, None, 12, None, 11, None, 7, None, 14, None, 27, None, 25, None, 29, None],
    [23, None, None, None, 18, None, None, None, 41, None, None, None, 54, None, None, None],
    [41, None, None, None, None, None, None, None, 95, None, None, None, None, None, None, None],
    [136] + [None] * 15,
]


class TestGoldenReduction:
    def test_paper_array_sum_and_trace(self):
        total, trace = reduce_sum(PAPER_ARRAY, "interleaved")
        assert total == 136
        assert trace.rows[0] == PAPER_ARRAY
        assert trace.rows[1:] == PAPER_ROWS
        assert trace.n_steps == 4

    def test_sequential_variant_agrees_on_sum(self):
        total, trace = reduce_sum(PAPER_ARRAY, "sequential")
        assert total == 136
        assert trace.n_steps == 4
        # Sequential halving: step 1 keeps threads 0..7 active.
        assert trace.rows[1][:8] == [12, 13, 17, 22, 13, 23, 14, 22]
        assert trace.rows[1][8:] == [None] * 8

    def test_single_element_trace_is_empty(self):
        total, trace = reduce_sum([42])
        assert total == 42
        assert trace.n_steps == 0
        assert trace.rows == [[42]]

    def test_non_power_of_two_rejected(self):
        with pytest.raises(NotPowerOfTwo):
            reduce_sum([1, 2, 3])
        with pytest.raises(NotPowerOfTwo):
            reduce_sum([])


class TestReductionOracles:
    @pytest.mark.parametrize("variant", ["interleaved", "sequential"])
    def test_random_1024_exact(self, variant):
        rng = np.random.default_rng(21)
        values = rng.integers(-(10**6), 10**6, 1024).tolist()
        total, trace = reduce_sum(values, variant)
        assert total == sum(values)
        assert trace.n_steps == 10

    @pytest.mark.parametrize("variant", ["interleaved", "sequential"])
    def test_multi_block_partials(self, variant):
        rng = np.random.default_rng(22)
        values = rng.integers(-1000, 1000, 4096).tolist()
        total, trace = reduce_sum(values, variant)
        assert total == sum(values)
        assert trace.rows[0] == values

    def test_variants_agree_across_sizes(self):
        rng = np.random.default_rng(23)
        for exp in range(0, 12):
            values = rng.integers(-100, 100, 2**exp).tolist()
            a, _ = reduce_sum(values, "interleaved")
            b, _ = reduce_sum(values, "sequential")
            assert a == b == sum(values)

    def test_float_inputs_within_tolerance(self):
        rng = np.random.default_rng(24)
        values = rng.normal(size=256).tolist()
        total, _ = reduce_sum(values)
        assert total == pytest.approx(sum(values), rel=1e-9)

    def test_step_count_is_log2(self):
        for exp in range(1, 11):
            values = list(range(2**exp))
            _, trace = reduce_sum(values)
            assert trace.n_steps == exp

    def test_trace_row_zero_is_input(self):
        values = [5, 1, 4, 1]
        _, trace = reduce_sum(values)
        assert trace.rows[0] == values

    def test_metrics_accumulate_into_caller_report(self):
        report = MetricsReport()
        reduce_sum(PAPER_ARRAY, metrics=report)
        assert report.barriers_executed > 0
        assert report.thread_steps == 15  # n-1 additions for n=16

    def test_reused_simulator_is_consistent(self):
        sim = Simulator()
        a, _ = reduce_sum(PAPER_ARRAY, simulator=sim)
        b, _ = reduce_sum(PAPER_ARRAY, simulator=sim)
        assert a == b == 136
