"""Adapter that delegates fragment routing to an external transpiler.

The executable is called as

    <exe> <in.qasm> <in.json> <out.qasm> <out.json>

where in.json carries the chip description and boundary pins::

    {"chip": "c0", "num_qubits": 20, "edges": [[0, 1], ...],
     "pins": [{"logical": 3, "physical": 0, "phase": "final"}, ...],
     "seed": 0}

and out.json must provide ``initial_mapping`` and ``final_mapping`` as
logical-to-physical dicts. The output QASM is the fragment over physical
operands with routing swaps inserted; gate order of the original fragment
must be preserved. Output is re-validated before acceptance.
"""

from __future__ import annotations

import json
import subprocess
import tempfile
from pathlib import Path

from .errors import ValidationError
from .ir import Circuit, Gate
from .qasm import emit_qasm, parse_qasm
from .router import BoundaryConstraint, RoutedFragment, validate_routed
from .system import Chip


def _mapping_from_json(doc: dict, key: str, n: int) -> dict[int, int]:
    try:
        raw = doc[key]
        mapping = {int(q): int(p) for q, p in raw.items()}
    except (KeyError, AttributeError, TypeError, ValueError) as exc:
        raise ValidationError(f"external compiler wrote a malformed {key}") from exc
    if sorted(mapping) != list(range(n)):
        raise ValidationError(f"external {key} does not cover qubits 0..{n - 1}")
    return mapping


def _operands_match(gate: Gate, expected: tuple[int, ...]) -> bool:
    if gate.name in ("swap", "barrier"):
        return sorted(gate.qubits) == sorted(expected)
    return gate.qubits == expected


def reconstruct_routed(
    frag: Circuit,
    chip: Chip,
    out_circuit: Circuit,
    initial_mapping: dict[int, int],
    final_mapping: dict[int, int],
) -> RoutedFragment:
    """Recover gate origins and inserted swaps from an external result.

    Walks the output in order, matching each gate against the next input
    gate under the evolving mapping; a swap that does not match is taken
    as inserted and advances the mapping. Swaps present in the input
    exchange states, not wires, so they leave the mapping alone.
    """
    loc = dict(initial_mapping)
    routed = RoutedFragment(
        chip_id=chip.id,
        initial_mapping=dict(initial_mapping),
        final_mapping=dict(final_mapping),
    )
    idx = 0
    for gate in out_circuit.gates:
        if idx < len(frag.gates):
            want = frag.gates[idx]
            expected = tuple(loc[q] for q in want.qubits)
            if (
                gate.name == want.name
                and gate.params == want.params
                and gate.cbits == want.cbits
                and _operands_match(gate, expected)
            ):
                routed.gates.append(gate)
                routed.origins.append(idx)
                idx += 1
                continue
        if gate.name != "swap":
            raise ValidationError(
                f"external compiler emitted unexpected gate {gate.name} "
                f"{gate.qubits} at position {len(routed.gates)}"
            )
        pa, pb = gate.qubits
        occ = {p: q for q, p in loc.items()}
        qa, qb = occ.get(pa), occ.get(pb)
        if qa is not None:
            loc[qa] = pb
        if qb is not None:
            loc[qb] = pa
        routed.gates.append(gate)
        routed.origins.append(None)
        routed.swap_count += 1
    if idx != len(frag.gates):
        raise ValidationError(
            f"external compiler dropped input gates ({idx} of "
            f"{len(frag.gates)} accounted for)"
        )
    return routed


def make_external_router(exe: str | Path):
    """Wrap an executable as a drop-in for route_fragment."""
    exe = str(exe)

    def route(
        frag: Circuit,
        chip: Chip,
        constraints: list[BoundaryConstraint] | None = None,
        seed: int = 0,
    ) -> RoutedFragment:
        request = {
            "chip": chip.id,
            "num_qubits": chip.num_qubits,
            "edges": [list(e) for e in chip.edges],
            "pins": [
                {"logical": c.logical, "physical": c.physical, "phase": c.phase}
                for c in constraints or []
            ],
            "seed": seed,
        }
        with tempfile.TemporaryDirectory(prefix="modcc-ext-") as tmp:
            base = Path(tmp)
            in_qasm = base / "in.qasm"
            in_json = base / "in.json"
            out_qasm = base / "out.qasm"
            out_json = base / "out.json"
            in_qasm.write_text(emit_qasm(frag))
            in_json.write_text(json.dumps(request, indent=2) + "\n")
            proc = subprocess.run(
                [exe, str(in_qasm), str(in_json), str(out_qasm), str(out_json)],
                capture_output=True,
                text=True,
            )
            if proc.returncode != 0:
                raise ValidationError(
                    f"external compiler exited with code {proc.returncode}: "
                    f"{proc.stderr.strip()}"
                )
            if not out_qasm.exists() or not out_json.exists():
                raise ValidationError("external compiler did not write its outputs")
            out_circuit = parse_qasm(out_qasm.read_text())
            doc = json.loads(out_json.read_text())
        init = _mapping_from_json(doc, "initial_mapping", frag.num_qubits)
        final = _mapping_from_json(doc, "final_mapping", frag.num_qubits)
        routed = reconstruct_routed(frag, chip, out_circuit, init, final)
        report = validate_routed(frag, routed, chip)
        if not report["ok"]:
            raise ValidationError(
                "external compiler output failed validation: "
                + "; ".join(report["issues"])
            )
        return routed

    route.exe = exe
    return route
