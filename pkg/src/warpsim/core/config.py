"""Launch geometry: grid/block dimensions and the thread linearization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import LaunchConfigInvalid

Dim3 = tuple[int, int, int]
DimLike = Union[int, tuple]

DEFAULT_MAX_THREADS_PER_BLOCK = 1024


def as_dim3(dim: DimLike) -> Dim3:
    """Normalize an int or partial tuple to a full (x, y, z) triple."""
    if isinstance(dim, int):
        return (dim, 1, 1)
    t = tuple(int(v) for v in dim)
    if len(t) > 3:
        raise LaunchConfigInvalid(f"dimension has {len(t)} components, expected at most 3")
    return t + (1,) * (3 - len(t))


@dataclass(frozen=True)
class LaunchConfig:
    """Execution geometry of one kernel launch.

    Threads are linearized x-fastest within a block, blocks x-fastest within
    the grid. Blocks whose size is not a multiple of ``warp_size`` get a padded
    final warp whose extra lanes are permanently inactive.
    """

    grid_dim: Dim3 = (1, 1, 1)
    block_dim: Dim3 = (1, 1, 1)
    shared_mem_bytes: int = 0
    warp_size: int = 32

    def __init__(
        self,
        grid_dim: DimLike = (1, 1, 1),
        block_dim: DimLike = (1, 1, 1),
        shared_mem_bytes: int = 0,
        warp_size: int = 32,
    ):
        object.__setattr__(self, "grid_dim", as_dim3(grid_dim))
        object.__setattr__(self, "block_dim", as_dim3(block_dim))
        object.__setattr__(self, "shared_mem_bytes", int(shared_mem_bytes))
        object.__setattr__(self, "warp_size", int(warp_size))

    @property
    def threads_per_block(self) -> int:
        bx, by, bz = self.block_dim
        return bx * by * bz

    @property
    def blocks_per_grid(self) -> int:
        gx, gy, gz = self.grid_dim
        return gx * gy * gz

    @property
    def total_threads(self) -> int:
        return self.threads_per_block * self.blocks_per_grid

    def validate(self, max_threads_per_block: int = DEFAULT_MAX_THREADS_PER_BLOCK) -> None:
        for name, dim in (("grid_dim", self.grid_dim), ("block_dim", self.block_dim)):
            if any(v < 1 for v in dim):
                raise LaunchConfigInvalid(f"{name}={dim} has a component < 1")
        if self.threads_per_block > max_threads_per_block:
            raise LaunchConfigInvalid(
                f"block_dim={self.block_dim} exceeds {max_threads_per_block} threads per block"
            )
        if self.shared_mem_bytes < 0:
            raise LaunchConfigInvalid(f"shared_mem_bytes={self.shared_mem_bytes} is negative")
        if self.warp_size < 1:
            raise LaunchConfigInvalid(f"warp_size={self.warp_size} must be positive")

    def block_coords(self, block_linear: int) -> Dim3:
        gx, gy, _ = self.grid_dim
        bx = block_linear % gx
        by = (block_linear // gx) % gy
        bz = block_linear // (gx * gy)
        return (bx, by, bz)

    def thread_coords(self, thread_linear: int) -> Dim3:
        bx, by, _ = self.block_dim
        tx = thread_linear % bx
        ty = (thread_linear // bx) % by
        tz = thread_linear // (bx * by)
        return (tx, ty, tz)


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)
