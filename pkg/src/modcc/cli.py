"""Command-line surface: compile, cost, partition, bench, reproduce, emit-system.

Exit codes are contract values: 0 success, 1 usage, 2 input validation,
3 infeasible (capacity or connectivity), 4 reproduction-bound failure.
Stdout carries only the requested data; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .assemble import compiled_from_artifacts, sidecar_dict, to_annotated_qasm
from .bench import KINDS
from .cost import CostWeights, total_cost
from .errors import InfeasibleError, QasmParseError, ValidationError
from .external import make_external_router
from .ir import Circuit, interaction_graph
from .partition import cut_edges, cut_weight, determine_k, partition, rank_chips
from .presets import SYSTEM_PRESETS, preset_system
from .qasm import emit_qasm, parse_qasm
from .report import (
    build_report,
    parse_bench_spec,
    run_reproduce,
    write_reproduce_outputs,
)
from .search import SearchConfig, balanced_capacities, compile_circuit
from .system import ModularSystem, load_system, save_system

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_REPRODUCE = 4


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; the contract says 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_weight_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.0, help="on-chip SWAP weight")
    p.add_argument(
        "--beta", type=float, default=None, help="inter-chip op weight (default 3.5*alpha)"
    )
    p.add_argument("--gamma", type=float, default=1.0, help="duration weight")
    p.add_argument(
        "--delta", type=float, default=None, help="fidelity-penalty weight (default: auto)"
    )
    p.add_argument(
        "--t-layer-mode",
        choices=("max", "per-layer"),
        default="max",
        help="layer duration model for the schedule estimate",
    )


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iter", type=int, default=50, help="search iteration budget")
    p.add_argument("--seed", type=int, default=0, help="deterministic tie-break seed")
    p.add_argument("--jobs", type=int, default=1, help="parallel candidate evaluations")
    p.add_argument(
        "--local-compiler",
        metavar="EXE",
        default=None,
        help="external fragment transpiler (QASM in, QASM + mapping JSON out)",
    )


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--circuit", metavar="QASM", help="input circuit file")
    src.add_argument(
        "--bench",
        metavar="KIND:N",
        help=f"generate a benchmark instead (kinds: {', '.join(k.lower() for k in KINDS)})",
    )


def _weights(args: argparse.Namespace) -> CostWeights:
    return CostWeights(
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        delta=args.delta,
        t_layer_mode=args.t_layer_mode,
    )


def _load_circuit(args: argparse.Namespace) -> tuple[Circuit, str]:
    """Return the circuit plus the exact text its digest is taken over."""
    if args.circuit is not None:
        text = Path(args.circuit).read_text()
        return parse_qasm(text, name=args.circuit), text
    circuit = parse_bench_spec(args.bench)
    return circuit, emit_qasm(circuit)


def _load_system(path: str) -> ModularSystem:
    return load_system(path)


def _print_json(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _note(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def cmd_compile(args: argparse.Namespace) -> int:
    stages: dict[str, float] = {}
    t0 = time.perf_counter()
    circuit, circuit_text = _load_circuit(args)
    system = _load_system(args.system)
    stages["load_s"] = time.perf_counter() - t0
    cfg = SearchConfig(
        max_iterations=args.max_iter,
        seed=args.seed,
        weights=_weights(args),
        jobs=args.jobs,
        local_router=(
            make_external_router(args.local_compiler) if args.local_compiler else None
        ),
    )
    t1 = time.perf_counter()
    result = compile_circuit(circuit, system, cfg)
    stages["search_s"] = time.perf_counter() - t1
    t2 = time.perf_counter()
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(to_annotated_qasm(result.compiled))
        Path(str(out) + ".json").write_text(
            json.dumps(sidecar_dict(result.compiled), indent=2) + "\n"
        )
        _note(f"wrote {out} and {out}.json")
    stages["emit_s"] = time.perf_counter() - t2
    wall = max(time.perf_counter() - t0, 1e-9)
    if args.report:
        report = build_report(result, system, circuit_text, cfg, wall, stages)
        rp = Path(args.report)
        rp.parent.mkdir(parents=True, exist_ok=True)
        rp.write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
        _note(f"wrote {rp}")
    _print_json(result.cost.to_json_dict())
    return EXIT_OK


def cmd_cost(args: argparse.Namespace) -> int:
    qasm_text = Path(args.compiled).read_text()
    sidecar_path = args.sidecar or args.compiled + ".json"
    sidecar = json.loads(Path(sidecar_path).read_text())
    cc = compiled_from_artifacts(qasm_text, sidecar)
    system = _load_system(args.system)
    breakdown = total_cost(cc, system, _weights(args))
    _print_json(breakdown.to_json_dict())
    return EXIT_OK


def cmd_partition(args: argparse.Namespace) -> int:
    circuit, _ = _load_circuit(args)
    system = _load_system(args.system)
    graph = interaction_graph(circuit)
    k = args.k if args.k is not None else determine_k(system, circuit.num_qubits)
    chips = rank_chips(system)[:k]
    caps = balanced_capacities(
        [system.chip(c).num_qubits for c in chips], circuit.num_qubits
    )
    fragments = partition(graph, k, caps)
    _print_json(
        {
            "k": k,
            "chips": chips,
            "fragments": fragments,
            "cut_edges": [[u, v, w] for u, v, w in cut_edges(graph, fragments)],
            "cut_weight": cut_weight(graph, fragments),
        }
    )
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    circuit = parse_bench_spec(args.spec)
    text = emit_qasm(circuit)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        _note(f"wrote {out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace) -> int:
    records, failures = run_reproduce(jobs=args.jobs, seed=args.seed)
    csv_path, charts = write_reproduce_outputs(records, args.out)
    from .report import reproduce_csv

    sys.stdout.write(reproduce_csv(records))
    _note(f"wrote {csv_path}")
    for chart in charts:
        _note(f"wrote {chart}")
    if failures:
        _note("failing rows:")
        for f in failures:
            _note(f"  {f}")
        return EXIT_REPRODUCE
    return EXIT_OK


def cmd_emit_system(args: argparse.Namespace) -> int:
    if args.all:
        out_dir = Path(args.out_dir or "fixtures")
        out_dir.mkdir(parents=True, exist_ok=True)
        for name in SYSTEM_PRESETS:
            path = out_dir / f"{name}.json"
            save_system(preset_system(name), path)
            _note(f"wrote {path}")
        return EXIT_OK
    if not args.name:
        raise ValidationError("name a preset or pass --all")
    system = preset_system(args.name)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_system(system, out)
        _note(f"wrote {out}")
    else:
        from .system import system_to_dict

        _print_json(system_to_dict(system))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="modcc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="transpile a circuit onto a modular system")
    _add_input_flags(p)
    p.add_argument("--system", required=True, metavar="JSON", help="system description")
    p.add_argument("--out", metavar="QASM", help="annotated output (sidecar at <out>.json)")
    p.add_argument("--report", metavar="JSON", help="write a run report")
    _add_search_flags(p)
    _add_weight_flags(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("cost", help="score an already-compiled circuit")
    p.add_argument("--compiled", required=True, metavar="QASM", help="annotated circuit")
    p.add_argument("--sidecar", metavar="JSON", help="mapping sidecar (default <compiled>.json)")
    p.add_argument("--system", required=True, metavar="JSON")
    _add_weight_flags(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("partition", help="partition a circuit's interaction graph")
    _add_input_flags(p)
    p.add_argument("--system", required=True, metavar="JSON")
    p.add_argument("--k", type=int, default=None, help="fragment count override")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("bench", help="emit a generated benchmark as OpenQASM")
    p.add_argument("spec", metavar="KIND:N", help="e.g. ghz:40")
    p.add_argument("--out", metavar="QASM")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("reproduce", help="run the benchmark table reproduction suite")
    p.add_argument("--out", default="reproduce-out", metavar="DIR", help="artifact directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("emit-system", help="write a preset system fixture")
    p.add_argument(
        "name", nargs="?", choices=SYSTEM_PRESETS, help="preset to emit"
    )
    p.add_argument("--out", metavar="JSON")
    p.add_argument("--all", action="store_true", help="emit every preset")
    p.add_argument("--out-dir", metavar="DIR", help="directory for --all")
    p.set_defaults(func=cmd_emit_system)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QasmParseError as exc:
        _note(f"error: {exc}")
        return EXIT_VALIDATION
    except ValidationError as exc:
        _note(f"error: {exc}")
        return EXIT_VALIDATION
    except InfeasibleError as exc:
        _note(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except (OSError, json.JSONDecodeError) as exc:
        _note(f"error: {exc}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
