import json

import pytest

from tdlc import cli
from tdlc.errors import ConfigInvalid

SCALE_CFG = {"op": "scale", "model": {"field": "Qp", "p": 5, "n": 2}, "matrix": [["5", "0"], ["0", "1/5"]]}


def test_run_scale_example():
    rep, code = cli.run(dict(SCALE_CFG))
    assert code == 0
    assert rep["outputs"]["scale"]["value"] == 5 and rep["checks"]["oracle_agreement"]
    assert rep["provenance"]["oracle_agreement"] == "oracle"


def test_run_suite_example():
    rep, code = cli.run({"op": "counterexample_suite", "window": 4})
    assert code == 0 and rep["outputs"]["tau_ok"]


def test_run_fingerprint_example():
    rep, code = cli.run({"op": "fingerprint", "case": "lamplighter", "radius": 3})
    assert code == 0 and rep["outputs"]["matched"]


def test_unknown_keys_rejected():
    with pytest.raises(ConfigInvalid):
        cli.run({**SCALE_CFG, "colour": "red"})
    with pytest.raises(ConfigInvalid):
        cli.run({"op": "nonsense"})
    with pytest.raises(ConfigInvalid):
        cli.run({"op": "scale", "matrix": [["1"]]})


def test_exit_codes(capsys, tmp_path):
    assert cli.main(["scale", json.dumps(SCALE_CFG)]) == 0
    assert cli.main(["scale", '{"op": "scale", "bogus": 1}']) == 1
    assert cli.main(["shift", json.dumps(SCALE_CFG)]) == 1
    deep = {**SCALE_CFG, "matrix": [["625", "0"], ["0", "1/5"]], "precision": 3}
    assert cli.main(["scale", json.dumps(deep)]) == 3
    assert cli.main(["shift", '{"op": "tail_detect", "window": 2, "annihilators": [{"h": [-1, 1]}], '
                              '"closure": "forward"}']) == 3
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(SCALE_CFG))
    assert cli.main(["scale", str(path)]) == 0
    capsys.readouterr()


def test_precision_env(monkeypatch):
    monkeypatch.setenv("TDLC_PRECISION", "3")
    rep, code = cli.run({**SCALE_CFG, "matrix": [["625", "0"], ["0", "1/5"]]})
    assert code == 3 and rep["error"]["type"] == "PrecisionExhausted"


def test_batch_and_determinism(tmp_path, capsys):
    batch = tmp_path / "batch.json"
    batch.write_text(json.dumps([SCALE_CFG, {"op": "tail_detect", "window": 4}]))
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["batch", str(batch), "-o", str(out1)]) == 0
    assert cli.main(["batch", str(batch), "-o", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
    doc = json.loads(out1.read_text())
    assert [r["op"] for r in doc["results"]] == ["scale", "tail_detect"]


def test_worked_examples_default():
    doc = cli.golden_suite()
    assert doc["status"] == "pass", [r for r in doc["results"] if r["status"] != "pass"]


def test_worked_examples_forced_failures():
    doc = cli.golden_suite(window=2, precision=4)
    errors = {r["error"]["type"] for r in doc["results"] if r["status"] == "error"}
    assert {"PrecisionExhausted", "WindowTooSmall"} <= errors
    assert doc["status"] == "fail" and doc["exit_code"] == 3
