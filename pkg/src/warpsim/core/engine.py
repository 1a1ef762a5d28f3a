"""The virtual GPU machine.

Kernels are plain Python functions ``kernel(ctx, *args)`` executed once per
block in data-parallel lockstep: every per-thread value is a numpy array with
one slot per thread of the block, and every context operation (memory access,
structured branch, barrier, arithmetic) is one simulated instruction executed
by all currently active lanes at once. Warps of a block therefore advance
round-robin one structured step at a time, in ascending warp order, which is
the fixed reference schedule; blocks run in ascending linear block id.

Control flow that should be visible to the machine must go through
``ctx.if_``: it masks lanes, serializes both paths, and records divergence.
Plain Python branches on uniform values are allowed; per-lane data-dependent
branching has no direct expression, which is what keeps execution lockstep.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .access import (
    DEFAULT_BANK_COUNT,
    DEFAULT_BANK_WIDTH_BYTES,
    DEFAULT_SEGMENT_BYTES,
    _warp_bank_extra_cycles,
    _warp_segment_total,
)
from .config import DEFAULT_MAX_THREADS_PER_BLOCK, LaunchConfig
from .errors import (
    BarrierDivergence,
    DataRace,
    LaunchConfigInvalid,
    NestingLimit,
    OutOfBounds,
    SimError,
    ThreadCoord,
)
from .memory import AccessRecord, Buffer, DeviceMemory
from .metrics import MetricsReport

LaneValue = Union[int, float, np.ndarray]

_NO_TID = np.int64(-1)


class _Idx3(NamedTuple):
    x: Any
    y: Any
    z: Any


class _RaceTrack:
    """Conflict bookkeeping for one address space within one launch.

    Interval state (reset at barriers and block starts) answers "did another
    thread of this block touch this address since the last barrier"; the
    cross-block state persists for the whole launch because barriers never
    synchronize distinct blocks.

    Reads are buffered and only materialized into per-address state when a
    write to the same space arrives in the interval, which keeps read-only
    traffic (the common case) cheap.
    """

    def __init__(self, length: int, cross_block: bool):
        self.length = length
        self.reader1 = np.full(length, _NO_TID)
        self.reader_multi = np.zeros(length, dtype=bool)
        self.writer1 = np.full(length, _NO_TID)
        self.writer_multi = np.zeros(length, dtype=bool)
        self.writer_max = np.full(length, _NO_TID)
        self.pending_reads: list[tuple[np.ndarray, np.ndarray]] = []
        self.interval_writes = 0
        self.dirty = False
        self.cross_block = cross_block
        if cross_block:
            self.rb_block1 = np.full(length, _NO_TID)  # reads, by block
            self.rb_block_multi = np.zeros(length, dtype=bool)
            self.w_block1 = np.full(length, _NO_TID)  # writes, by block
            self.w_block_multi = np.zeros(length, dtype=bool)
            self.writer_blocks: set[int] = set()

    def reset_interval(self) -> None:
        self.pending_reads.clear()
        self.interval_writes = 0
        if self.dirty:
            self.reader1.fill(_NO_TID)
            self.reader_multi.fill(False)
            self.writer1.fill(_NO_TID)
            self.writer_multi.fill(False)
            self.writer_max.fill(_NO_TID)
            self.dirty = False

    def materialize_reads(self) -> None:
        for addrs, tids in self.pending_reads:
            u_addr, first_idx, counts = np.unique(addrs, return_index=True, return_counts=True)
            rep = tids[first_idx]
            cur = self.reader1[u_addr]
            self.reader_multi[u_addr] |= (counts > 1) | ((cur != _NO_TID) & (cur != rep))
            self.reader1[u_addr] = np.where(cur == _NO_TID, rep, cur)
            self.dirty = True
        self.pending_reads.clear()


@dataclass
class _PredicateEntry:
    """One structured branch: per-warp active-lane predicate tallies."""

    kernel: str
    block: int
    step: int
    true_lane_counts: tuple[int, ...]
    false_lane_counts: tuple[int, ...]


class _LaunchState:
    """Mutable state shared by every block (and child grid) of one launch."""

    def __init__(self, sim: "Simulator", mem: DeviceMemory, metrics: MetricsReport, mode: str, depth: int):
        self.sim = sim
        self.mem = mem
        self.metrics = metrics
        self.mode = mode
        self.depth = depth
        self.multi_block = True  # refined per grid before blocks run
        self.tracks: dict[str, _RaceTrack] = {}

    def track_for(self, buf: Buffer) -> _RaceTrack:
        t = self.tracks.get(buf.name)
        if t is None:
            t = _RaceTrack(len(buf), cross_block=self.multi_block)
            self.tracks[buf.name] = t
        return t

    def reset_intervals(self) -> None:
        for t in self.tracks.values():
            t.reset_interval()

    def child(self) -> "_LaunchState":
        # Child grids get fresh race bookkeeping; parent/child conflicts are
        # outside the checked model (the child completes before the parent's
        # next step).
        return _LaunchState(self.sim, self.mem, self.metrics, self.mode, self.depth + 1)


class GlobalView:
    """Kernel-side handle to a global buffer, indexable by lane arrays."""

    def __init__(self, ctx: "KernelContext", buffer: Buffer):
        self._ctx = ctx
        self.buffer = buffer

    def __getitem__(self, idx: LaneValue) -> np.ndarray:
        return self._ctx._global_access(self.buffer, idx, None)

    def __setitem__(self, idx: LaneValue, value: LaneValue) -> None:
        self._ctx._global_access(self.buffer, idx, value)


class SharedView:
    """One typed allocation inside the block's shared memory region."""

    def __init__(self, ctx: "KernelContext", name: str, length: int, dtype, byte_offset: int, element_width: int):
        self._ctx = ctx
        self.name = name
        self.data = np.zeros(length, dtype=dtype)
        self.byte_offset = byte_offset
        self.element_width = element_width

    def __len__(self) -> int:
        return int(self.data.size)

    def __getitem__(self, idx: LaneValue) -> np.ndarray:
        return self._ctx._shared_access(self, idx, None)

    def __setitem__(self, idx: LaneValue, value: LaneValue) -> None:
        self._ctx._shared_access(self, idx, value)


class KernelContext:
    """Per-block execution context handed to kernel functions."""

    def __init__(
        self,
        state: _LaunchState,
        config: LaunchConfig,
        block_linear: int,
        kernel_name: str,
    ):
        self._state = state
        self._sim = state.sim
        self.config = config
        self.kernel_name = kernel_name
        self.block_linear = block_linear

        T = config.threads_per_block
        ws = config.warp_size
        self.nthreads = T
        self.warp_count = -(-T // ws)

        linear = np.arange(T, dtype=np.int64)
        bdx, bdy, _ = config.block_dim
        self._tx = linear % bdx
        self._ty = (linear // bdx) % bdy
        self._tz = linear // (bdx * bdy)
        bx, by, bz = config.block_coords(block_linear)
        self.block_idx = _Idx3(bx, by, bz)
        self.block_dim = _Idx3(*config.block_dim)
        self.grid_dim = _Idx3(*config.grid_dim)
        self.thread_idx = _Idx3(self._tx, self._ty, self._tz)
        self.lane = linear % ws
        self.warp = linear // ws
        self.global_id = block_linear * T + linear
        self.gx = bx * bdx + self._tx
        self.gy = by * bdy + self._ty
        self.gz = bz * config.block_dim[2] + self._tz

        self._mask_stack: list[np.ndarray] = [np.ones(T, dtype=bool)]
        self._shared_track = _RaceTrack(config.shared_mem_bytes, cross_block=False)
        self._shared_offset = 0
        self._shared_views: list[SharedView] = []
        self.step = 0

    # ------------------------------------------------------------------
    # lane helpers

    @property
    def active(self) -> np.ndarray:
        return self._mask_stack[-1]

    def _lanes(self, value: LaneValue, dtype=None) -> np.ndarray:
        arr = np.asarray(value)
        if arr.ndim == 0:
            arr = np.full(self.nthreads, arr[()])
        if dtype is not None:
            arr = arr.astype(dtype, copy=False)
        if arr.shape != (self.nthreads,):
            raise ValueError(f"lane value has shape {arr.shape}, expected ({self.nthreads},)")
        return arr

    def coord_of(self, global_linear_id: int) -> ThreadCoord:
        T = self.config.threads_per_block
        block_linear, thread_linear = divmod(int(global_linear_id), T)
        return ThreadCoord(
            block_idx=self.config.block_coords(block_linear),
            thread_idx=self.config.thread_coords(thread_linear),
            global_linear_id=int(global_linear_id),
            warp_id=thread_linear // self.config.warp_size,
            lane=thread_linear % self.config.warp_size,
        )

    def _err_kw(self, gids: Sequence[int], buffer: Optional[str] = None) -> dict:
        return {
            "threads": [self.coord_of(g) for g in gids],
            "buffer": buffer,
            "step": self.step,
            "kernel": self.kernel_name,
        }

    # ------------------------------------------------------------------
    # shared memory allocation

    def shared_array(self, length: int, dtype=np.int64, element_width: int = DEFAULT_BANK_WIDTH_BYTES) -> SharedView:
        """Carve a typed array out of the block's shared region.

        Contents are zero at block start and never visible to other blocks.
        """
        nbytes = int(length) * element_width
        if self._shared_offset + nbytes > self.config.shared_mem_bytes:
            raise LaunchConfigInvalid(
                f"shared allocation of {nbytes} bytes exceeds shared_mem_bytes="
                f"{self.config.shared_mem_bytes} (offset {self._shared_offset})",
                kernel=self.kernel_name,
            )
        view = SharedView(
            self,
            f"shared@{self._shared_offset}",
            int(length),
            dtype,
            self._shared_offset,
            element_width,
        )
        self._shared_offset += nbytes
        self._shared_views.append(view)
        return view

    # ------------------------------------------------------------------
    # memory instructions

    def _global_access(self, buf: Buffer, idx: LaneValue, value: Optional[LaneValue]) -> Optional[np.ndarray]:
        act = self.active
        if not act.any():
            return None if value is not None else np.zeros(self.nthreads, dtype=buf.dtype)
        full = bool(act.all())
        ei = self._lanes(idx, np.int64)
        if full:
            tids, warp_ids = self.global_id, self.warp
        else:
            ei, tids, warp_ids = ei[act], self.global_id[act], self.warp[act]
        bad = (ei < 0) | (ei >= len(buf))
        if bad.any():
            first = int(np.argmax(bad))
            raise OutOfBounds(
                f"index {int(ei[first])} outside buffer {buf.name!r} of length {len(buf)}",
                **self._err_kw([int(tids[first])], buf.name),
            )
        byte_addrs = ei * buf.element_width
        kind = "read" if value is None else "write"

        self._state.metrics.bump(
            self.kernel_name,
            "global_transactions",
            _warp_segment_total(warp_ids, byte_addrs, self._sim.segment_bytes),
        )
        track = self._state.track_for(buf)
        result: Optional[np.ndarray] = None
        if value is None:
            self._race_read(track, ei, tids, buf.name)
            if full:
                result = buf.data[ei]
            else:
                result = np.zeros(self.nthreads, dtype=buf.dtype)
                result[act] = buf.data[ei]
        else:
            vals = self._lanes(value)
            if not full:
                vals = vals[act]
            vals = vals.astype(buf.dtype, copy=False)
            eff = self._race_write(track, ei, tids, buf.name)
            buf.data[ei[eff]] = vals[eff]
        self._state.mem.access_log.append(
            AccessRecord(
                kernel=self.kernel_name,
                block=self.block_linear,
                step=self.step,
                space="global",
                kind=kind,
                buffer=buf.name,
                width=buf.element_width,
                warp_ids=warp_ids,
                lanes=tids,
                addresses=byte_addrs,
            )
        )
        self.step += 1
        return result

    def _shared_access(self, view: SharedView, idx: LaneValue, value: Optional[LaneValue]) -> Optional[np.ndarray]:
        act = self.active
        if not act.any():
            return None if value is not None else np.zeros(self.nthreads, dtype=view.data.dtype)
        full = bool(act.all())
        ei = self._lanes(idx, np.int64)
        if full:
            tids, warp_ids = self.global_id, self.warp
        else:
            ei, tids, warp_ids = ei[act], self.global_id[act], self.warp[act]
        bad = (ei < 0) | (ei >= len(view))
        if bad.any():
            first = int(np.argmax(bad))
            raise OutOfBounds(
                f"index {int(ei[first])} outside shared array {view.name!r} of length {len(view)}",
                **self._err_kw([int(tids[first])], view.name),
            )
        byte_addrs = view.byte_offset + ei * view.element_width
        kind = "read" if value is None else "write"

        self._state.metrics.bump(
            self.kernel_name,
            "bank_conflict_extra_cycles",
            _warp_bank_extra_cycles(warp_ids, byte_addrs, self._sim.bank_count, self._sim.bank_width_bytes),
        )
        track = self._shared_track
        result: Optional[np.ndarray] = None
        if value is None:
            self._race_read(track, byte_addrs, tids, view.name)
            if full:
                result = view.data[ei]
            else:
                result = np.zeros(self.nthreads, dtype=view.data.dtype)
                result[act] = view.data[ei]
        else:
            vals = self._lanes(value)
            if not full:
                vals = vals[act]
            vals = vals.astype(view.data.dtype, copy=False)
            eff = self._race_write(track, byte_addrs, tids, view.name)
            view.data[ei[eff]] = vals[eff]
        self._state.mem.access_log.append(
            AccessRecord(
                kernel=self.kernel_name,
                block=self.block_linear,
                step=self.step,
                space="shared",
                kind=kind,
                buffer=view.name,
                width=view.element_width,
                warp_ids=warp_ids,
                lanes=tids,
                addresses=byte_addrs,
            )
        )
        self.step += 1
        return result

    # ------------------------------------------------------------------
    # race bookkeeping (addresses are element indices for global buffers,
    # byte offsets for shared memory; both are per-launch address spaces)

    def _race_fail(self, name: str, addr: int, tid_a: int, tid_b: int) -> None:
        msg = f"conflicting accesses to {name!r} address {addr} without an intervening barrier"
        if self._state.mode == "strict":
            offenders = [tid_a] if tid_b < 0 or tid_b == tid_a else [tid_a, tid_b]
            raise DataRace(msg, **self._err_kw(offenders, name))
        self._state.mem.race_warnings.append(
            f"{msg} (threads {tid_a} and {tid_b}, kernel {self.kernel_name}, block {self.block_linear}, step {self.step})"
        )

    def _race_read(self, track: _RaceTrack, addrs: np.ndarray, tids: np.ndarray, name: str) -> None:
        b = self.block_linear
        if track.interval_writes:
            w1 = track.writer1[addrs]
            conflict = (w1 != _NO_TID) & ((w1 != tids) | track.writer_multi[addrs])
            if conflict.any():
                i = int(np.argmax(conflict))
                self._race_fail(name, int(addrs[i]), int(tids[i]), int(w1[i]))
        if track.cross_block and (track.writer_blocks - {b}):
            wb = track.w_block1[addrs]
            conflict = (wb != _NO_TID) & ((wb != b) | track.w_block_multi[addrs])
            if conflict.any():
                i = int(np.argmax(conflict))
                self._race_fail(name, int(addrs[i]), int(tids[i]), -1)

        track.pending_reads.append((addrs, tids))
        if track.cross_block:
            cur = track.rb_block1[addrs]
            track.rb_block_multi[addrs] |= (cur != _NO_TID) & (cur != b)
            track.rb_block1[addrs] = np.where(cur == _NO_TID, b, cur)

    def _race_write(self, track: _RaceTrack, addrs: np.ndarray, tids: np.ndarray, name: str) -> np.ndarray:
        """Check a store instruction; returns the per-lane apply mask.

        In permissive mode conflicting writes resolve in ascending global id
        order: a lane's write lands only if no higher-id thread already wrote
        this address in the current interval.
        """
        track.materialize_reads()
        b = self.block_linear
        u_addr, first_idx, counts = np.unique(addrs, return_index=True, return_counts=True)
        dup = counts > 1

        r1 = track.reader1[addrs]
        w1 = track.writer1[addrs]
        conflict = (r1 != _NO_TID) & ((r1 != tids) | track.reader_multi[addrs])
        conflict |= (w1 != _NO_TID) & ((w1 != tids) | track.writer_multi[addrs])
        if track.cross_block:
            rb = track.rb_block1[addrs]
            conflict |= (rb != _NO_TID) & ((rb != b) | track.rb_block_multi[addrs])
            wb = track.w_block1[addrs]
            conflict |= (wb != _NO_TID) & ((wb != b) | track.w_block_multi[addrs])
        if conflict.any():
            i = int(np.argmax(conflict))
            other = int(w1[i]) if w1[i] != _NO_TID else int(r1[i])
            self._race_fail(name, int(addrs[i]), int(tids[i]), other)
        if dup.any():
            i = int(first_idx[np.argmax(dup)])
            dup_addr = addrs[i]
            peers = np.flatnonzero(addrs == dup_addr)
            self._race_fail(name, int(dup_addr), int(tids[peers[0]]), int(tids[peers[1]]))

        eff = track.writer_max[addrs] <= tids

        rep = tids[first_idx]
        cur = track.writer1[u_addr]
        track.writer_multi[u_addr] |= dup | ((cur != _NO_TID) & (cur != rep))
        track.writer1[u_addr] = np.where(cur == _NO_TID, rep, cur)
        if dup.any():
            np.maximum.at(track.writer_max, addrs, tids)
        else:
            track.writer_max[addrs] = np.maximum(track.writer_max[addrs], tids)
        track.interval_writes += 1
        track.dirty = True
        if track.cross_block:
            wb = track.w_block1[u_addr]
            track.w_block_multi[u_addr] |= (wb != _NO_TID) & (wb != b)
            track.w_block1[u_addr] = np.where(wb == _NO_TID, b, wb)
            track.writer_blocks.add(b)
        return eff

    # ------------------------------------------------------------------
    # control flow

    def if_(
        self,
        predicate: LaneValue,
        then_branch: Callable[[], None],
        else_branch: Optional[Callable[[], None]] = None,
    ) -> None:
        """Structured branch: then-lanes run first, else-lanes second.

        Records one divergence event per warp whose active lanes disagree on
        the predicate. A barrier inside either branch while the mask is
        partial raises BarrierDivergence.
        """
        pred = self._lanes(predicate).astype(bool)
        act = self.active
        t_mask = act & pred
        f_mask = act & ~pred

        W = self.warp_count
        t_cnt = np.bincount(self.warp[t_mask], minlength=W)
        f_cnt = np.bincount(self.warp[f_mask], minlength=W)
        diverged = int(((t_cnt > 0) & (f_cnt > 0)).sum())
        if diverged:
            self._state.metrics.bump(self.kernel_name, "divergence_events", diverged)
        self._sim.predicate_log.append(
            _PredicateEntry(
                kernel=self.kernel_name,
                block=self.block_linear,
                step=self.step,
                true_lane_counts=tuple(int(c) for c in t_cnt),
                false_lane_counts=tuple(int(c) for c in f_cnt),
            )
        )
        self.step += 1

        if t_mask.any():
            self._mask_stack.append(t_mask)
            try:
                then_branch()
            finally:
                self._mask_stack.pop()
        if else_branch is not None and f_mask.any():
            self._mask_stack.append(f_mask)
            try:
                else_branch()
            finally:
                self._mask_stack.pop()

    def where(self, predicate: LaneValue, a: LaneValue, b: LaneValue) -> np.ndarray:
        """Predicated select: every lane follows one path, no divergence."""
        return np.where(self._lanes(predicate).astype(bool), self._lanes(a), self._lanes(b))

    def barrier(self) -> None:
        """Block-wide synchronization point.

        Legal only when every thread of the block is active; lanes masked off
        by a divergent branch can never arrive, which is the deadlock this
        error models.
        """
        act = self.active
        if not act.all():
            missing = int(np.argmin(act))
            gid = int(self.global_id[missing])
            raise BarrierDivergence(
                "barrier under a partial mask: some threads of the block cannot reach it",
                **self._err_kw([gid]),
            )
        self._state.metrics.bump(self.kernel_name, "barriers_executed", 1)
        self._shared_track.reset_interval()
        self._state.reset_intervals()
        self.step += 1

    # ------------------------------------------------------------------
    # instrumented per-lane arithmetic (each call is one thread step per
    # active lane; masked lanes compute nothing and yield 0)

    def _arith(self, a: LaneValue, b: LaneValue, op: Callable) -> np.ndarray:
        act = self.active
        av = self._lanes(a)
        bv = self._lanes(b)
        self._state.metrics.bump(self.kernel_name, "thread_steps", int(act.sum()))
        if act.all():
            return op(av, bv)
        out = np.zeros(self.nthreads, dtype=np.result_type(av, bv))
        out[act] = op(av[act], bv[act])
        return out

    def add(self, a: LaneValue, b: LaneValue) -> np.ndarray:
        return self._arith(a, b, np.add)

    def sub(self, a: LaneValue, b: LaneValue) -> np.ndarray:
        return self._arith(a, b, np.subtract)

    def mul(self, a: LaneValue, b: LaneValue) -> np.ndarray:
        return self._arith(a, b, np.multiply)

    def floordiv(self, a: LaneValue, b: LaneValue) -> np.ndarray:
        return self._arith(a, b, np.floor_divide)

    # ------------------------------------------------------------------
    # dynamic parallelism

    def launch(
        self,
        kernel: Callable,
        grid_dim,
        block_dim,
        args: Sequence = (),
        shared_mem_bytes: int = 0,
        name: Optional[str] = None,
    ) -> None:
        """Launch a child grid from every active lane, in ascending id order.

        Each child grid runs to completion before the launching thread's next
        step; its metrics fold into the current report.
        """
        act = self.active
        launchers = self.global_id[act]
        cfg = LaunchConfig(grid_dim, block_dim, shared_mem_bytes, self.config.warp_size)
        child_args = tuple(a.buffer if isinstance(a, GlobalView) else a for a in args)
        for gid in launchers.tolist():
            if self._state.depth + 1 >= self._sim.max_nesting_depth:
                raise NestingLimit(
                    f"child launch at depth {self._state.depth + 1} reaches the nesting limit "
                    f"of {self._sim.max_nesting_depth}",
                    **self._err_kw([gid]),
                )
            try:
                cfg.validate(self._sim.max_threads_per_block)
            except LaunchConfigInvalid as e:
                raise LaunchConfigInvalid(
                    f"invalid child launch config: {e.args[0]}", **self._err_kw([gid])
                ) from e
            self._state.metrics.bump(self.kernel_name, "child_launches", 1)
            self._sim._run_grid(kernel, cfg, child_args, self._state.child(), name or kernel.__name__)
        self.step += 1


class Simulator:
    """A virtual GPU. Instances are independent and hold no launch state."""

    def __init__(
        self,
        *,
        segment_bytes: int = DEFAULT_SEGMENT_BYTES,
        bank_count: int = DEFAULT_BANK_COUNT,
        bank_width_bytes: int = DEFAULT_BANK_WIDTH_BYTES,
        max_threads_per_block: int = DEFAULT_MAX_THREADS_PER_BLOCK,
        max_nesting_depth: int = 2,
    ):
        self.segment_bytes = segment_bytes
        self.bank_count = bank_count
        self.bank_width_bytes = bank_width_bytes
        self.max_threads_per_block = max_threads_per_block
        self.max_nesting_depth = max_nesting_depth
        self.predicate_log: list[_PredicateEntry] = []

    def launch(
        self,
        kernel: Callable,
        config: LaunchConfig,
        mem: DeviceMemory,
        args: Sequence = (),
        *,
        name: Optional[str] = None,
        mode: str = "strict",
        metrics: Optional[MetricsReport] = None,
    ) -> MetricsReport:
        """Run one grid to completion; deterministic for identical inputs.

        ``mode`` is "strict" (conflicting unsynchronized accesses abort the
        launch) or "permissive" (they are logged on ``mem.race_warnings`` and
        writes resolve in ascending global thread id order).
        """
        if mode not in ("strict", "permissive"):
            raise ValueError(f"unknown race mode {mode!r}")
        config.validate(self.max_threads_per_block)
        for a in args:
            if isinstance(a, Buffer) and mem.buffers.get(a.name) is not a:
                raise SimError(f"buffer {a.name!r} does not belong to this DeviceMemory")
        mem.clear_log()
        self.predicate_log.clear()
        report = metrics if metrics is not None else MetricsReport()
        state = _LaunchState(self, mem, report, mode, depth=0)
        self._run_grid(kernel, config, tuple(args), state, name or kernel.__name__)
        return report

    def _run_grid(
        self,
        kernel: Callable,
        config: LaunchConfig,
        args: tuple,
        state: _LaunchState,
        kernel_name: str,
    ) -> None:
        state.multi_block = config.blocks_per_grid > 1
        for block_linear in range(config.blocks_per_grid):
            state.reset_intervals()
            ctx = KernelContext(state, config, block_linear, kernel_name)
            bound = tuple(GlobalView(ctx, a) if isinstance(a, Buffer) else a for a in args)
            kernel(ctx, *bound)


def launch_kernel(
    kernel: Callable,
    config: LaunchConfig,
    mem: DeviceMemory,
    args: Sequence = (),
    **kwargs,
) -> MetricsReport:
    """Convenience wrapper: run one launch on a fresh default Simulator."""
    return Simulator().launch(kernel, config, mem, args, **kwargs)


def structured_if(
    ctx: KernelContext,
    warp_predicates: LaneValue,
    then_branch: Callable[[], None],
    else_branch: Optional[Callable[[], None]] = None,
) -> None:
    """Free-function form of ``ctx.if_`` for kernels written in that style."""
    ctx.if_(warp_predicates, then_branch, else_branch)


def barrier_sync(ctx: KernelContext) -> None:
    """Free-function form of ``ctx.barrier``."""
    ctx.barrier()


def device_launch(
    ctx: KernelContext,
    kernel: Callable,
    grid_dim,
    block_dim,
    args: Sequence = (),
    shared_mem_bytes: int = 0,
) -> None:
    """Free-function form of ``ctx.launch``."""
    ctx.launch(kernel, grid_dim, block_dim, args, shared_mem_bytes)
