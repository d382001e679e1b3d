"""CLI: exit codes, file artifacts, reproducibility, error paths."""

import json

import pytest

from sboxsim.cli import main
from sboxsim.gf import DEFAULT_PARAMS, FieldParams


def test_verify_default_params(capsys):
    assert main(["verify"]) == 0
    assert "all 256 bytes" in capsys.readouterr().out


def test_verify_corrupted_params(tmp_path, capsys):
    rows = list(DEFAULT_PARAMS.delta)
    rows[0] ^= 0x01
    bad = FieldParams(lam=DEFAULT_PARAMS.lam, phi=DEFAULT_PARAMS.phi,
                      delta=tuple(rows), delta_inv=DEFAULT_PARAMS.delta_inv)
    p = tmp_path / "bad.json"
    bad.save(p)
    assert main(["verify", "--params", str(p)]) == 1
    out = capsys.readouterr().out
    assert "MISMATCH" in out and "0x" in out


def test_missing_params_file_is_usage_error(tmp_path, capsys):
    assert main(["verify", "--params", str(tmp_path / "nope.json")]) == 2
    assert "error" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as e:
        main(["campaign", "--design", "warp", "--fault", "transient"])
    assert e.value.code == 2


def test_synth_writes_design_json(tmp_path, capsys):
    out = tmp_path / "design.json"
    assert main(["synth", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["n_stages"] == 5
    assert doc["meta"]["tool_version"]
    assert doc["meta"]["params_sha256"] == DEFAULT_PARAMS.sha256()
    assert len(doc["cuts"]) == 5
    assert doc["netlist"]["gates"]


def test_simulate_fault_free_trace(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    assert main(["simulate", "--design", "original", "--count", "6",
                 "--trace", str(trace)]) == 0
    lines = trace.read_text().strip().split("\n")
    head = json.loads(lines[0])
    assert head["design"] == "original"
    recs = [json.loads(l) for l in lines[1:]]
    assert all(set(r) == {"cycle", "input", "accepted", "err", "Err",
                          "output"} for r in recs)
    outs = [r["output"] for r in recs if r["output"] is not None]
    assert len(outs) == 6


def test_simulate_with_fault(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    assert main(["simulate", "--design", "hfs", "--count", "10",
                 "--fault-site", "reg:1:2:0", "--fault-model", "flip",
                 "--fault-start", "6", "--fault-duration", "3",
                 "--trace", str(trace)]) == 0
    out = capsys.readouterr().out
    assert "detected_corrected" in out
    recs = [json.loads(l) for l in trace.read_text().strip().split("\n")[1:]]
    assert any(r["Err"] for r in recs)
    outs = [r["output"] for r in recs if r["output"] is not None]
    assert len(outs) == 10


def test_simulate_explicit_hex_input(capsys):
    assert main(["simulate", "--design", "ttr", "--input-hex", "0053"]) == 0
    assert "outputs=2" in capsys.readouterr().out


def test_simulate_bad_site_is_config_error(capsys):
    assert main(["simulate", "--design", "hfs", "--fault-site", "gibberish",
                 "--count", "2"]) == 2


def test_campaign_guarantee_held_and_artifacts(tmp_path, capsys):
    j = tmp_path / "r.json"
    c = tmp_path / "r.csv"
    rc = main(["campaign", "--design", "hfs", "--fault", "transient",
               "--sample", "60", "--seed", "21",
               "--out-json", str(j), "--out-csv", str(c)])
    assert rc == 0
    assert "guarantee HELD" in capsys.readouterr().out
    doc = json.loads(j.read_text())
    assert doc["counts"]["sdc"] == 0
    assert doc["meta"]["seed"] == 21
    assert c.read_text().startswith("site,model,duration,start,")


def test_campaign_unprotected_violates(capsys):
    rc = main(["campaign", "--design", "original", "--fault", "transient",
               "--sample", "80", "--seed", "21"])
    assert rc == 1
    assert "VIOLATED" in capsys.readouterr().out


def test_campaign_repeat_same_seed_byte_identical(tmp_path):
    blobs = []
    for tag in ("a", "b"):
        j = tmp_path / f"{tag}.json"
        c = tmp_path / f"{tag}.csv"
        assert main(["campaign", "--design", "tmr", "--fault", "transient",
                     "--sample", "40", "--seed", "77",
                     "--out-json", str(j), "--out-csv", str(c)]) == 0
        blobs.append((j.read_bytes(), c.read_bytes()))
    assert blobs[0] == blobs[1]


def test_report_formats_agree(tmp_path, capsys):
    assert main(["report", "--format", "csv",
                 "--output", str(tmp_path / "r.csv")]) == 0
    assert main(["report", "--format", "json",
                 "--output", str(tmp_path / "r.json")]) == 0
    csv_lines = (tmp_path / "r.csv").read_text().strip().split("\n")
    doc = json.loads((tmp_path / "r.json").read_text())
    header = csv_lines[0].split(",")
    for line, jrow in zip(csv_lines[1:], doc["rows"]):
        for key, cell in zip(header, line.split(",")):
            assert str(jrow[key]) == cell
    assert doc["meta"]["cost_table_sha256"]


def test_report_text_to_stdout(capsys):
    assert main(["report"]) == 0
    out = capsys.readouterr().out
    for name in ("original", "tmr", "ttr", "hfs"):
        assert name in out


def test_custom_cost_table_flows_through(tmp_path, capsys):
    from sboxsim.netlist import CostTable, DEFAULT_COSTS
    costs = CostTable(entries=dict(DEFAULT_COSTS.entries),
                      register_bit_ge=5.0)
    p = tmp_path / "costs.json"
    costs.save(p)
    assert main(["report", "--costs", str(p), "--format", "json",
                 "--output", str(tmp_path / "r.json")]) == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["meta"]["cost_table_sha256"] == costs.sha256()
    rows = {r["design"]: r for r in doc["rows"]}
    assert rows["original"]["area_ge"] < rows["ttr"]["area_ge"] \
        < rows["hfs"]["area_ge"] < rows["tmr"]["area_ge"]
