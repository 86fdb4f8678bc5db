"""Run reports and the benchmark-table reproduction suite.

A RunReport captures one compile end to end: input digests, the search
configuration, the cost breakdown and structural metrics, and timings.
The reproduction suite compiles a fixed benchmark-by-system matrix,
checks each row against its inter-op bound, and writes a CSV plus bar
charts of the counts.
"""

from __future__ import annotations

import csv
import hashlib
import io
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .bench import generate_benchmark
from .cost import CostWeights
from .errors import ValidationError
from .ir import Circuit
from .presets import preset_system
from .search import CompileResult, SearchConfig, compile_circuit
from .system import ModularSystem, system_to_dict
import json


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def system_digest(sys: ModularSystem) -> str:
    return sha256_text(json.dumps(system_to_dict(sys), sort_keys=True))


def config_echo(cfg: SearchConfig) -> dict:
    w = cfg.weights
    return {
        "max_iterations": cfg.max_iterations,
        "seed": cfg.seed,
        "jobs": cfg.jobs,
        "breadth_limit": cfg.breadth_limit,
        "local_compiler": getattr(cfg.local_router, "exe", None),
        "weights": {
            "alpha": w.alpha,
            "beta": w.resolved_beta(),
            "gamma": w.gamma,
            "delta": w.delta,
            "t_layer_mode": w.t_layer_mode,
        },
    }


@dataclass
class RunReport:
    """Provenance and outcome of a single compile invocation."""

    version: str
    circuit_digest: str
    system_digest: str
    config: dict
    metrics: dict
    cost: dict
    wall_s: float
    stages: dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    trace: list[float] = field(default_factory=list)
    chips_used: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.wall_s <= 0.0:
            raise ValidationError("transpile wall time must be positive")

    def to_json_dict(self) -> dict:
        return {
            "tool": "modcc",
            "version": self.version,
            "digests": {
                "circuit_sha256": self.circuit_digest,
                "system_sha256": self.system_digest,
            },
            "config": self.config,
            "metrics": self.metrics,
            "cost": self.cost,
            "wall_s": self.wall_s,
            "stages": dict(self.stages),
            "iterations": self.iterations,
            "trace": list(self.trace),
            "chips_used": list(self.chips_used),
        }


def build_report(
    result: CompileResult,
    sys: ModularSystem,
    circuit_text: str,
    cfg: SearchConfig,
    wall_s: float,
    stages: dict[str, float] | None = None,
) -> RunReport:
    from .assemble import metrics

    m = metrics(result.compiled)
    return RunReport(
        version=__version__,
        circuit_digest=sha256_text(circuit_text),
        system_digest=system_digest(sys),
        config=config_echo(cfg),
        metrics={
            "s_on": m.s_on,
            "s_inter": m.s_inter,
            "two_q_on_chip": m.two_q_on_chip,
            "depth_per_chip": dict(m.depth_per_chip),
            "measured": list(m.measured),
        },
        cost=result.cost.to_json_dict(),
        wall_s=wall_s,
        stages=dict(stages or {}),
        iterations=result.iterations,
        trace=list(result.trace),
        chips_used=list(result.compiled.chips_used),
    )


@dataclass(frozen=True)
class ReproduceRow:
    """One benchmark-on-system cell with its inter-op acceptance bound."""

    system: str
    bench: str
    expected_inter: int
    tolerance: int
    time_limit_s: float | None
    group: str

    @property
    def bound(self) -> int:
        return self.expected_inter + self.tolerance


REPRODUCE_ROWS: tuple[ReproduceRow, ...] = (
    ReproduceRow("almaden2x1link", "GHZ:40", 1, 1, 2.0, "table1"),
    ReproduceRow("almaden2x1link", "Cat:35", 1, 1, 2.0, "table1"),
    ReproduceRow("almaden2x1link", "WState:36", 2, 1, 2.0, "table1"),
    ReproduceRow("almaden2x1link", "Ising:34", 1, 1, 2.0, "table1"),
    ReproduceRow("auckland3xchain", "Ising:66", 2, 1, 2.0, "table1"),
    ReproduceRow("auckland3xchain", "GHZ:78", 2, 1, 2.0, "table1"),
    ReproduceRow("almaden2x1link", "GHZ:40", 1, 0, None, "sweep"),
    ReproduceRow("almaden2x2link", "GHZ:40", 1, 0, None, "sweep"),
    ReproduceRow("almaden2x3link", "GHZ:40", 1, 0, None, "sweep"),
    ReproduceRow("almaden2x4link", "GHZ:40", 1, 0, None, "sweep"),
    ReproduceRow("washington4xchain", "Ising:420", 3, 0, 30.0, "scale"),
    ReproduceRow("washington4xchain", "WState:380", 4, 0, 30.0, "scale"),
)

CSV_COLUMNS = ("system", "circuit", "inter", "on", "depth", "cost", "runtime_s", "status")


def parse_bench_spec(spec: str) -> Circuit:
    """Build the benchmark named by a ``kind:n`` spec string."""
    kind, sep, size = spec.partition(":")
    if not sep or not kind:
        raise ValidationError(f"benchmark spec {spec!r} is not of the form kind:n")
    try:
        n = int(size)
    except ValueError as exc:
        raise ValidationError(f"benchmark size {size!r} is not an integer") from exc
    return generate_benchmark(kind, n)


def run_reproduce_row(
    row: ReproduceRow, jobs: int = 1, seed: int = 0
) -> tuple[CompileResult, float]:
    sys = preset_system(row.system)
    circuit = parse_bench_spec(row.bench)
    cfg = SearchConfig(seed=seed, jobs=jobs)
    start = time.perf_counter()
    result = compile_circuit(circuit, sys, cfg)
    return result, time.perf_counter() - start


def _trace_monotone(trace: list[float]) -> bool:
    return all(b <= a for a, b in zip(trace, trace[1:]))


def run_reproduce(jobs: int = 1, seed: int = 0) -> tuple[list[dict], list[str]]:
    """Compile every row; return (records, failure descriptions)."""
    records: list[dict] = []
    failures: list[str] = []
    sweep_prev: int | None = None
    for row in REPRODUCE_ROWS:
        result, runtime = run_reproduce_row(row, jobs=jobs, seed=seed)
        m = result.cost
        inter, on = m.s_inter, m.s_on
        problems: list[str] = []
        if inter > row.bound:
            problems.append(f"inter {inter} exceeds bound {row.bound}")
        if row.time_limit_s is not None and runtime >= row.time_limit_s:
            problems.append(f"runtime {runtime:.2f}s over {row.time_limit_s:.0f}s")
        if not _trace_monotone(result.trace):
            problems.append("best-cost trace increased")
        if row.group == "sweep":
            if sweep_prev is not None and inter > sweep_prev:
                problems.append(f"inter rose {sweep_prev} -> {inter} with more links")
            sweep_prev = inter
        record = {
            "system": row.system,
            "circuit": row.bench,
            "inter": inter,
            "on": on,
            "depth": max(m.depth_per_chip.values(), default=0),
            "cost": f"{m.total:.6f}",
            "runtime_s": f"{runtime:.3f}",
            "status": "pass" if not problems else "fail",
            "group": row.group,
            "bound": row.bound,
        }
        records.append(record)
        for p in problems:
            failures.append(f"{row.system} {row.bench}: {p}")
    return records, failures


def reproduce_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue()


def render_charts(records: list[dict], out_dir: Path) -> list[Path]:
    """Bar-chart the inter-op counts against their bounds, one PNG per view."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written: list[Path] = []
    main = [r for r in records if r["group"] in ("table1", "scale")]
    if main:
        labels = [f"{r['circuit']}\n{r['system']}" for r in main]
        inter = [r["inter"] for r in main]
        bounds = [r["bound"] for r in main]
        x = range(len(main))
        fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(main)), 4.0))
        ax.bar([i - 0.2 for i in x], inter, width=0.4, label="inter ops")
        ax.bar([i + 0.2 for i in x], bounds, width=0.4, label="bound")
        ax.set_xticks(list(x))
        ax.set_xticklabels(labels, fontsize=7)
        ax.set_ylabel("inter-chip operations")
        ax.set_title("Reproduction: inter-chip operation counts")
        ax.legend()
        fig.tight_layout()
        path = out_dir / "reproduce_inter.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    sweep = [r for r in records if r["group"] == "sweep"]
    if sweep:
        links = list(range(1, len(sweep) + 1))
        fig, ax = plt.subplots(figsize=(5.0, 3.5))
        ax.plot(links, [r["inter"] for r in sweep], marker="o")
        ax.set_xticks(links)
        ax.set_xlabel("links between chips")
        ax.set_ylabel("inter-chip operations")
        ax.set_title(f"{sweep[0]['circuit']}: inter ops vs link count")
        ax.set_ylim(bottom=0)
        fig.tight_layout()
        path = out_dir / "reproduce_sweep.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def write_reproduce_outputs(
    records: list[dict], out_dir: str | Path
) -> tuple[Path, list[Path]]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "reproduce.csv"
    csv_path.write_text(reproduce_csv(records))
    charts = render_charts(records, out)
    return csv_path, charts
