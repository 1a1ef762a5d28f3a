"""Elementwise vector addition, the hello-world of the machine."""

from __future__ import annotations

from typing import Optional, Sequence

from ..core import DeviceMemory, LaunchConfig, MetricsReport, Simulator, ceil_div
from ._common import THREADS_PER_BLOCK, LengthMismatch, setup, value_dtype


def vector_add_kernel(ctx, a, b, c, n):
    i = ctx.gx

    def body():
        c[i] = ctx.add(a[i], b[i])

    ctx.if_(i < n, body)


def vector_add(
    a: Sequence,
    b: Sequence,
    *,
    threads_per_block: int = THREADS_PER_BLOCK,
    simulator: Optional[Simulator] = None,
    metrics: Optional[MetricsReport] = None,
) -> list:
    """Elementwise a + b via a boundary-guarded launch of 256-thread blocks."""
    a = list(a)
    b = list(b)
    if len(a) != len(b):
        raise LengthMismatch(f"lengths differ: {len(a)} vs {len(b)}")
    n = len(a)
    if n == 0:
        return []
    sim, metrics = setup(simulator, metrics)
    dtype = value_dtype(a, b)
    mem = DeviceMemory()
    buf_a = mem.alloc("a", a, dtype=dtype)
    buf_b = mem.alloc("b", b, dtype=dtype)
    buf_c = mem.alloc("c", n, dtype=dtype)
    config = LaunchConfig(grid_dim=ceil_div(n, threads_per_block), block_dim=threads_per_block)
    sim.launch(vector_add_kernel, config, mem, (buf_a, buf_b, buf_c, n), metrics=metrics)
    return buf_c.tolist()
