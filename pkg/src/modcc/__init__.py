"""Transpiler for chip-to-chip coupler-connected modular quantum systems."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("modcc")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from .assemble import (
    CompiledCircuit,
    OpMetrics,
    assemble,
    compiled_from_artifacts,
    metrics,
    sidecar_dict,
    to_annotated_qasm,
)
from .bench import KINDS, generate_benchmark
from .cost import (
    CostBreakdown,
    CostWeights,
    fidelity_proxy,
    sum_errors,
    temporal_cost,
    total_cost,
)
from .errors import InfeasibleError, ModccError, QasmParseError, ValidationError
from .external import make_external_router
from .ir import Circuit, Gate, build_layers, interaction_graph
from .partition import brute_force_partition, determine_k, partition, rank_chips
from .presets import SYSTEM_PRESETS, preset_chip, preset_system
from .qasm import emit_qasm, parse_qasm
from .router import BoundaryConstraint, RoutedFragment, route_fragment, validate_routed
from .search import (
    CompileResult,
    FragmentAssignment,
    SearchConfig,
    compile_circuit,
    compile_monolithic,
    evaluate_candidate,
)
from .sim import simulate_statevector, verify_equivalence
from .system import (
    Chip,
    Link,
    ModularSystem,
    load_system,
    save_system,
    system_from_dict,
    system_to_dict,
)

__all__ = [
    "__version__",
    "BoundaryConstraint",
    "Chip",
    "Circuit",
    "CompileResult",
    "CompiledCircuit",
    "CostBreakdown",
    "CostWeights",
    "FragmentAssignment",
    "Gate",
    "InfeasibleError",
    "KINDS",
    "Link",
    "ModccError",
    "ModularSystem",
    "OpMetrics",
    "QasmParseError",
    "RoutedFragment",
    "SYSTEM_PRESETS",
    "SearchConfig",
    "ValidationError",
    "assemble",
    "brute_force_partition",
    "build_layers",
    "compile_circuit",
    "compile_monolithic",
    "compiled_from_artifacts",
    "determine_k",
    "emit_qasm",
    "evaluate_candidate",
    "fidelity_proxy",
    "generate_benchmark",
    "interaction_graph",
    "load_system",
    "make_external_router",
    "metrics",
    "parse_qasm",
    "partition",
    "preset_chip",
    "preset_system",
    "rank_chips",
    "route_fragment",
    "save_system",
    "sidecar_dict",
    "simulate_statevector",
    "sum_errors",
    "system_from_dict",
    "system_to_dict",
    "temporal_cost",
    "to_annotated_qasm",
    "total_cost",
    "validate_routed",
    "verify_equivalence",
]
