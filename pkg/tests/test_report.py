import pytest

from modcc.errors import ValidationError
from modcc.external import make_external_router
from modcc.report import config_echo, parse_bench_spec, sha256_text
from modcc.report import RunReport
from modcc.search import SearchConfig


def test_parse_bench_spec():
    assert parse_bench_spec("ghz:40").num_qubits == 40
    assert parse_bench_spec("Ising:6").num_qubits == 6
    for bad in ("ghz", "ghz:x", ":4", "ghz:"):
        with pytest.raises(ValidationError):
            parse_bench_spec(bad)


def test_sha256_text():
    assert sha256_text("") == (
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    )


def test_wall_time_must_be_positive():
    kwargs = dict(
        version="0",
        circuit_digest="x",
        system_digest="y",
        config={},
        metrics={},
        cost={},
    )
    with pytest.raises(ValidationError):
        RunReport(wall_s=0.0, **kwargs)
    with pytest.raises(ValidationError):
        RunReport(wall_s=-1.0, **kwargs)
    assert RunReport(wall_s=0.5, **kwargs).to_json_dict()["wall_s"] == 0.5


def test_config_echo_reports_external_compiler(echo_compiler):
    cfg = SearchConfig(local_router=make_external_router(str(echo_compiler)))
    echoed = config_echo(cfg)
    assert echoed["local_compiler"] == str(echo_compiler)
    assert echoed["weights"]["beta"] == pytest.approx(3.5)
    assert config_echo(SearchConfig())["local_compiler"] is None
