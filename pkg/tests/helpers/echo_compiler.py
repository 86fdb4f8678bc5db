#!/usr/bin/env python3
"""Reference external transpiler used by the adapter tests.

Implements the adapter protocol with modcc's own router: reads the
fragment QASM and the chip/pin sidecar, routes, and writes the physical
QASM plus the mapping JSON.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "src"))

from modcc.qasm import emit_qasm, parse_qasm  # noqa: E402
from modcc.router import BoundaryConstraint, route_fragment  # noqa: E402
from modcc.system import _chip_from_dict  # noqa: E402


def main() -> int:
    in_qasm, in_json, out_qasm, out_json = sys.argv[1:5]
    frag = parse_qasm(Path(in_qasm).read_text())
    req = json.loads(Path(in_json).read_text())
    chip = _chip_from_dict(
        {"id": req["chip"], "num_qubits": req["num_qubits"], "edges": req["edges"]}
    )
    pins = [
        BoundaryConstraint(p["logical"], p["physical"], p["phase"])
        for p in req["pins"]
    ]
    routed = route_fragment(frag, chip, pins, req.get("seed", 0))
    shell_gates = list(routed.gates)
    out = emit_qasm(
        type(frag)(chip.num_qubits, frag.num_clbits, "", shell_gates)
    )
    Path(out_qasm).write_text(out)
    Path(out_json).write_text(
        json.dumps(
            {
                "initial_mapping": {str(q): p for q, p in routed.initial_mapping.items()},
                "final_mapping": {str(q): p for q, p in routed.final_mapping.items()},
            }
        )
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
