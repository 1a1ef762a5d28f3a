"""Command-line front end.

Commands: run (execute a primitive and report metrics), trace (step tables),
report (metrics only), pipeline (stream scenario -> schedule), memflow
(training data-flow estimate). Exit codes: 0 success, 2 usage or input
problem, 3 simulation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import memperf, streams
from .core import MetricsReport, SimError
from .kernels import (
    Matrix,
    StepTrace,
    exclusive_scan_blelloch,
    inclusive_scan_hillis_steele,
    matmul,
    matrix_add,
    reduce_sum,
    vector_add,
)

USAGE_EXIT = 2
SIM_EXIT = 3

ARRAY_KERNELS = ("vector_add", "reduce_sum", "inclusive_scan", "exclusive_scan")
MATRIX_KERNELS = ("matrix_add", "matmul")
ALL_KERNELS = ARRAY_KERNELS + MATRIX_KERNELS
TRACE_KERNELS = ("reduce_sum", "inclusive_scan")


class UsageError(Exception):
    pass


class TraceUnsupported(UsageError):
    pass


def _load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from e


def _load_array(path: str) -> list:
    data = _load_json(path)
    if not isinstance(data, list) or any(isinstance(v, list) for v in data):
        raise UsageError(f"{path}: expected a flat JSON array of numbers")
    return data


def _load_matrix(path: str) -> Matrix:
    data = _load_json(path)
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise UsageError(f"{path}: expected a JSON array of rows")
    try:
        return Matrix.from_rows(data)
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from e


def _inputs(arg: Optional[str], expected: int, loader) -> Optional[list]:
    if arg is None:
        return None
    paths = [p for p in arg.split(",") if p]
    if len(paths) != expected:
        raise UsageError(f"--input expects {expected} comma-separated path(s), got {len(paths)}")
    return [loader(p) for p in paths]


def _random_array(rng: np.random.Generator, size: int) -> list:
    return rng.integers(0, 100, size=size).tolist()


def _random_matrix(rng: np.random.Generator, size: int) -> Matrix:
    return Matrix(size, size, rng.integers(-9, 10, size=size * size).tolist())


def _run_primitive(args) -> tuple[Any, Optional[StepTrace], MetricsReport]:
    """Execute the named kernel; returns (result, trace_or_none, metrics)."""
    name = args.kernel
    metrics = MetricsReport()
    rng = np.random.default_rng(args.seed)
    if args.block_dim is not None and name != "vector_add":
        raise UsageError(f"--block-dim does not apply to {name}: its block shape is algorithmic")
    if name in ARRAY_KERNELS:
        n_inputs = 2 if name == "vector_add" else 1
        arrays = _inputs(args.input, n_inputs, _load_array)
        if arrays is None:
            if args.size is None or args.size < 1:
                raise UsageError(f"--size must be >= 1 to generate inputs for {name}")
            arrays = [_random_array(rng, args.size) for _ in range(n_inputs)]
        if name == "vector_add":
            block = args.block_dim or 256
            result = vector_add(arrays[0], arrays[1], threads_per_block=block, metrics=metrics)
            return result, None, metrics
        if name == "reduce_sum":
            total, trace = reduce_sum(arrays[0], args.variant or "interleaved", metrics=metrics)
            return total, trace, metrics
        if name == "inclusive_scan":
            out, trace = inclusive_scan_hillis_steele(arrays[0], metrics=metrics)
            return out, trace, metrics
        return exclusive_scan_blelloch(arrays[0], metrics=metrics), None, metrics

    matrices = _inputs(args.input, 2, _load_matrix)
    if matrices is None:
        if args.size is None or args.size < 1:
            raise UsageError(f"--size must be >= 1 to generate inputs for {name}")
        matrices = [_random_matrix(rng, args.size) for _ in range(2)]
    if name == "matrix_add":
        return matrix_add(matrices[0], matrices[1], metrics=metrics), None, metrics
    return (
        matmul(matrices[0], matrices[1], args.variant or "naive", metrics=metrics),
        None,
        metrics,
    )


def _result_json(result: Any) -> Any:
    if isinstance(result, Matrix):
        return result.to_rows()
    return result


def _result_text(result: Any) -> str:
    if isinstance(result, Matrix):
        return "\n".join(" ".join(str(v) for v in row) for row in result.to_rows())
    if isinstance(result, list):
        return " ".join(str(v) for v in result)
    return str(result)


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _emit(text: str, output: Optional[str]) -> None:
    sys.stdout.write(text)
    if output:
        Path(output).write_text(text)


def cmd_run(args) -> int:
    result, _, metrics = _run_primitive(args)
    payload = {
        "kernel": args.kernel,
        "result": _result_json(result),
        "metrics": metrics.to_json(),
    }
    if args.format == "json":
        _emit(_dump(payload), args.output)
    else:
        lines = [_result_text(result)]
        lines += [f"{k}: {v}" for k, v in metrics.to_json().items() if k != "per_kernel"]
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_report(args) -> int:
    _, _, metrics = _run_primitive(args)
    _emit(_dump({"kernel": args.kernel, "metrics": metrics.to_json()}), args.output)
    return 0


def cmd_trace(args) -> int:
    if args.kernel not in TRACE_KERNELS:
        raise TraceUnsupported(
            f"kernel {args.kernel!r} does not emit a step table; choose from {TRACE_KERNELS}"
        )
    result, trace, _ = _run_primitive(args)
    assert trace is not None
    if args.format == "json":
        _emit(_dump({"kernel": args.kernel, "result": _result_json(result), "steps": trace.to_json()}), args.output)
    else:
        _emit(trace.to_text(one_based=args.one_based) + "\n", args.output)
    return 0


def cmd_pipeline(args) -> int:
    ops, events, engines = streams.load_scenario(args.scenario)
    schedule = streams.simulate_timeline(ops, events, engines)
    report = streams.makespan_report(schedule, ops, events)
    if args.format == "json":
        _emit(_dump({"schedule": schedule.to_json(), "report": report.to_json()}), args.output)
    else:
        text = streams.render_gantt(schedule)
        text += f"\noverlap savings: {report.overlap_savings}\n"
        _emit(text, args.output)
    return 0


def cmd_memflow(args) -> int:
    spec = memperf.TrainingFlowSpec.from_json(args.spec)
    report = memperf.estimate_training_flow(spec)
    if args.format == "json":
        _emit(_dump(report.to_json()), args.output)
    else:
        lines = []
        for e in report.epochs:
            lines.append(
                f"epoch {e.epoch}: time={e.time:.3f} "
                f"disk_to_ram={e.disk_to_ram_bytes} ram_to_vram={e.ram_to_vram_bytes}"
            )
        lines.append(f"total time: {report.total_time:.3f}")
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def _add_kernel_options(p: argparse.ArgumentParser, kernels: Sequence[str]) -> None:
    p.add_argument("--kernel", required=True, choices=kernels)
    p.add_argument("--size", type=int, default=None, help="generated input size")
    p.add_argument("--block-dim", type=int, default=None, help="threads per block (vector_add only)")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed for generated inputs")
    p.add_argument("--variant", default=None, help="kernel variant (e.g. interleaved, tiled)")
    p.add_argument("--input", default=None, help="comma-separated JSON input paths")
    p.add_argument("--output", default=None, help="also write the rendered output to this file")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="warpsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a primitive on the virtual GPU")
    _add_kernel_options(p_run, ALL_KERNELS)
    p_run.set_defaults(func=cmd_run)

    p_report = sub.add_parser("report", help="run a primitive and emit only its metrics")
    _add_kernel_options(p_report, ALL_KERNELS)
    p_report.set_defaults(func=cmd_report)

    p_trace = sub.add_parser("trace", help="emit the step table of a traced primitive")
    _add_kernel_options(p_trace, ALL_KERNELS)
    p_trace.add_argument(
        "--one-based", action="store_true", help="label thread columns T_1..T_n"
    )
    p_trace.set_defaults(func=cmd_trace)

    p_pipe = sub.add_parser("pipeline", help="schedule a stream scenario file")
    p_pipe.add_argument("scenario")
    p_pipe.add_argument("--output", default=None)
    p_pipe.add_argument("--format", choices=("text", "json"), default="text")
    p_pipe.set_defaults(func=cmd_pipeline)

    p_flow = sub.add_parser("memflow", help="estimate a training data-flow spec file")
    p_flow.add_argument("spec")
    p_flow.add_argument("--output", default=None)
    p_flow.add_argument("--format", choices=("text", "json"), default="json")
    p_flow.set_defaults(func=cmd_memflow)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_EXIT
    except (ValueError, OSError, memperf.SpecInvalid) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_EXIT
    except (streams.CyclicDependency, streams.UnknownEvent) as e:
        print(f"scheduling error: {e}", file=sys.stderr)
        return SIM_EXIT
    except SimError as e:
        print(f"simulation error: {json.dumps(e.to_json())}", file=sys.stderr)
        return SIM_EXIT


if __name__ == "__main__":
    sys.exit(main())
