import pytest

from conftest import path_system
from modcc.bench import generate_benchmark
from modcc.errors import ValidationError
from modcc.external import make_external_router, reconstruct_routed
from modcc.ir import Circuit
from modcc.router import FINAL, BoundaryConstraint, route_fragment
from modcc.search import SearchConfig, compile_circuit


def line_chip(n=4):
    return path_system([n], []).chips[0]


def test_reconstruct_plain():
    chip = line_chip(3)
    frag = Circuit(3)
    frag.h(0)
    frag.cx(0, 1)
    out = Circuit(3)
    out.h(0)
    out.cx(0, 1)
    ident = {q: q for q in range(3)}
    routed = reconstruct_routed(frag, chip, out, ident, ident)
    assert routed.origins == [0, 1]
    assert routed.swap_count == 0


def test_reconstruct_inserted_swap():
    chip = line_chip(3)
    frag = Circuit(3)
    frag.cx(0, 2)
    out = Circuit(3)
    out.swap(1, 2)
    out.cx(0, 1)
    ident = {q: q for q in range(3)}
    final = {0: 0, 1: 2, 2: 1}
    routed = reconstruct_routed(frag, chip, out, ident, final)
    assert routed.origins == [None, 0]
    assert routed.swap_count == 1


def test_reconstruct_circuit_swap_keeps_mapping():
    # A swap present in the input exchanges states, so the wire that held
    # qubit 0 still holds it when the next gate is matched.
    chip = line_chip(2)
    frag = Circuit(2)
    frag.swap(0, 1)
    frag.x(0)
    out = Circuit(2)
    out.swap(0, 1)
    out.x(0)
    ident = {0: 0, 1: 1}
    routed = reconstruct_routed(frag, chip, out, ident, ident)
    assert routed.origins == [0, 1]
    assert routed.swap_count == 0


def test_reconstruct_rejects_dropped_gate():
    chip = line_chip(3)
    frag = Circuit(3)
    frag.h(0)
    frag.cx(0, 1)
    out = Circuit(3)
    out.h(0)
    ident = {q: q for q in range(3)}
    with pytest.raises(ValidationError, match="dropped"):
        reconstruct_routed(frag, chip, out, ident, ident)


def test_reconstruct_rejects_unexpected_gate():
    chip = line_chip(3)
    frag = Circuit(3)
    frag.h(0)
    out = Circuit(3)
    out.x(2)
    out.h(0)
    ident = {q: q for q in range(3)}
    with pytest.raises(ValidationError, match="unexpected"):
        reconstruct_routed(frag, chip, out, ident, ident)


def test_adapter_matches_native(echo_compiler):
    sys_ = path_system([5, 5], [(0, 4, 1, 0)])
    c = generate_benchmark("GHZ", 8)
    native = compile_circuit(c, sys_, SearchConfig())
    router = make_external_router(str(echo_compiler))
    ext = compile_circuit(c, sys_, SearchConfig(local_router=router))
    assert ext.compiled.gates == native.compiled.gates
    assert ext.cost.total == native.cost.total


def test_adapter_pins_respected(echo_compiler):
    chip = line_chip(4)
    frag = Circuit(4)
    frag.cx(0, 3)
    pins = [BoundaryConstraint(logical=3, physical=0, phase=FINAL)]
    router = make_external_router(str(echo_compiler))
    routed = router(frag, chip, pins, 0)
    reference = route_fragment(frag, chip, pins, 0)
    assert routed.final_mapping[3] == 0
    assert routed.final_mapping == reference.final_mapping


def test_adapter_reports_failure(tmp_path):
    bad = tmp_path / "bad.py"
    bad.write_text("#!/usr/bin/env python3\nimport sys\nsys.exit(9)\n")
    bad.chmod(0o755)
    router = make_external_router(str(bad))
    chip = line_chip(3)
    frag = Circuit(3)
    frag.h(0)
    with pytest.raises(ValidationError, match="code 9"):
        router(frag, chip)


def test_adapter_requires_outputs(tmp_path):
    lazy = tmp_path / "lazy.py"
    lazy.write_text("#!/usr/bin/env python3\n")
    lazy.chmod(0o755)
    router = make_external_router(str(lazy))
    chip = line_chip(3)
    frag = Circuit(3)
    frag.h(0)
    with pytest.raises(ValidationError, match="outputs"):
        router(frag, chip)


def test_malformed_mapping_rejected(tmp_path):
    liar = tmp_path / "liar.py"
    liar.write_text(
        "#!/usr/bin/env python3\n"
        "import json, shutil, sys\n"
        "shutil.copy(sys.argv[1], sys.argv[3])\n"
        "with open(sys.argv[4], 'w') as f:\n"
        "    json.dump({'initial_mapping': {'0': 0},\n"
        "               'final_mapping': 'nope'}, f)\n"
    )
    liar.chmod(0o755)
    router = make_external_router(str(liar))
    chip = line_chip(3)
    frag = Circuit(3)
    frag.h(0)
    with pytest.raises(ValidationError):
        router(frag, chip)
