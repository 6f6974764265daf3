import json
import math

import pytest

from ghzcost import cli

LOG2_3 = math.log2(3.0)


def run(*args):
    return cli.main(list(args))


def test_discord_result_and_determinism(tmp_path):
    out1, out2 = str(tmp_path / "r1"), str(tmp_path / "r2")
    for out in (out1, out2):
        assert run("discord", "--state", "w3", "--restarts", "4", "--out-dir", out) == 0
    b1 = open(out1 + "/discord_result.json", "rb").read()
    b2 = open(out2 + "/discord_result.json", "rb").read()
    assert b1 == b2
    payload = json.loads(b1)
    assert payload["label"] == "w3"
    assert abs(payload["value_bits"] - LOG2_3) < 1e-7
    assert payload["converged"] is True
    manifest = json.load(open(out1 + "/discord_manifest.json"))
    assert manifest["outputs"]["discord_result.json"] in str(manifest["outputs"])
    assert manifest["config"]["seed"] == 7
    assert "timings_s" in manifest


def test_protocol_result_contents(tmp_path):
    out = str(tmp_path)
    assert (
        run("protocol", "--state", "w3", "--l", "2", "--epsilon", "0.01", "--out-dir", out)
        == 0
    )
    payload = json.load(open(out + "/protocol_result.json"))
    assert payload["set_size"] == 9
    assert payload["resource_qubits"] == 4
    assert payload["rate_qubits_per_copy"] == 2.0
    assert payload["report"]["min_fidelity"] >= 1 - 1e-9
    assert payload["report"]["mode"] == "enumerate"
    assert payload["fidelity_check"]["matches"] is True
    assert abs(payload["fidelity_check"]["sqrt_N_epsilon"] - 1.0) < 1e-12
    assert payload["trace"]["final_fidelity"] >= 1 - 1e-9
    assert payload["trace_skipped"] is None


def test_protocol_sample_mode_and_no_trace(tmp_path):
    out = str(tmp_path)
    code = run(
        "protocol", "--state", "gghz", "--p", "0.4", "--l", "3", "--epsilon", "0.5",
        "--mode", "sample", "--samples", "10", "--no-trace", "--out-dir", out,
    )
    assert code == 0
    payload = json.load(open(out + "/protocol_result.json"))
    assert payload["report"]["mode"] == "sample"
    assert payload["trace"] is None
    assert payload["trace_skipped"] == "disabled"


def test_typical_result_fields(tmp_path):
    out = str(tmp_path)
    assert run("typical", "--state", "w3", "--l", "2", "--epsilon", "0.01", "--out-dir", out) == 0
    payload = json.load(open(out + "/typical_result.json"))
    assert payload["member_count"] == 9
    assert abs(payload["N_epsilon"] - 1.0) < 1e-12
    assert abs(payload["entropy_bits"] - LOG2_3) < 1e-12
    assert payload["enumerated"] is True
    assert payload["enumeration"]["alphabet_sizes"] == [4, 4, 4]
    assert payload["aep"]["mass_ok"] is True


def test_typical_falls_back_to_stats_past_guard(tmp_path):
    out = str(tmp_path)
    args = ["typical", "--state", "gghz", "--p", "0.3", "--l", "40",
            "--epsilon", "0.1", "--out-dir", out]
    assert run(*args) == 0
    payload = json.load(open(out + "/typical_result.json"))
    assert payload["enumerated"] is False
    assert payload["member_count"] == 84485252104
    # the same request with enumeration required trips the guard
    assert run(*args, "--enumerate") == 2


def test_config_file_merge_and_flag_override(tmp_path):
    cfgfile = tmp_path / "exp.cfg"
    cfgfile.write_text("# demo\nstate=gghz\np=0.5\nl=3\nepsilon=0.2\nseed=11\n")
    out = str(tmp_path / "out")
    assert run("protocol", "--config", str(cfgfile), "--out-dir", out) == 0
    payload = json.load(open(out + "/protocol_result.json"))
    assert payload["label"] == "gghz(p=0.5)"
    assert payload["l"] == 3
    manifest = json.load(open(out + "/protocol_manifest.json"))
    assert manifest["config"]["seed"] == 11
    # a flag beats the file
    assert run("protocol", "--config", str(cfgfile), "--epsilon", "0.4", "--out-dir", out) == 0
    payload = json.load(open(out + "/protocol_result.json"))
    assert payload["epsilon"] == 0.4


def test_config_file_rejects_unknown_keys(tmp_path):
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("stat=w3\n")
    assert run("discord", "--config", str(cfgfile)) == 2
    cfgfile.write_text("l\n")
    assert run("discord", "--config", str(cfgfile)) == 2
    assert run("discord", "--config", str(tmp_path / "missing.cfg")) == 2


def test_out_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("GHZCOST_OUT_DIR", str(tmp_path / "envout"))
    assert run("typical", "--state", "ghz3", "--l", "2", "--epsilon", "0.5") == 0
    assert (tmp_path / "envout" / "typical_result.json").exists()


def test_exit_code_2_on_bad_config():
    assert run("discord", "--state", "nosuch") == 2
    assert run("discord", "--state", "werner-phi") == 2
    assert run("discord", "--state", "gghz", "--p", "1.5") == 2
    assert run("typical", "--state", "w3", "--l", "0", "--epsilon", "0.1") == 2
    assert run("protocol", "--state", "w3", "--l", "2") == 2
    assert run("discord", "--amps", "1,0,0,1") == 2
    assert run("discord", "--amps", "1,0,0", "--dims", "2,2") == 2
    assert run("rates", "--states", "w3", "--t-levels", "2") == 2


def test_exit_code_2_on_guard(tmp_path):
    code = run(
        "protocol", "--state", "w3", "--l", "4", "--epsilon", "1.0",
        "--branch-guard", "100", "--out-dir", str(tmp_path),
    )
    assert code == 2
    assert not (tmp_path / "protocol_result.json").exists()


def test_exit_code_3_when_gap_grows(tmp_path):
    out = str(tmp_path)
    assert run("rate-convergence", "--l-values", "16,8,2", "--out-dir", out) == 3
    # outputs still land so the failure can be inspected
    payload = json.load(open(out + "/rate_convergence.json"))
    assert payload["rows"][-1]["empty_set"] is True
    assert payload["rows"][-1]["gap"] is None


def test_rate_convergence_default_run(tmp_path):
    out = str(tmp_path)
    assert run("rate-convergence", "--out-dir", out) == 0
    payload = json.load(open(out + "/rate_convergence.json"))
    assert payload["label"] == "gghz(p=0.3)"
    assert payload["target_origin"] == "H2(0.3)"
    rows = payload["rows"]
    assert [r["l"] for r in rows] == [2, 4, 8, 16]
    assert rows[0]["empty_set"] is True and rows[0]["rate"] is None
    assert rows[3]["member_count"] == 14196
    assert abs(rows[3]["rate"] - 0.875) < 1e-12
    assert abs(rows[3]["gap"] - 0.0062908992306927) < 1e-12
    csv_lines = open(out + "/rate_convergence.csv").read().splitlines()
    assert csv_lines[0] == "l,copies,member_count,rate,sqrt_N_epsilon,gap"
    assert len(csv_lines) == 5


def test_rates_table_and_sweep(tmp_path):
    out = str(tmp_path)
    code = run(
        "rates", "--states", "w3,product-00", "--restarts", "2",
        "--counterexample-sweep", "0.1:0.3:0.1", "--out-dir", out,
    )
    assert code == 0
    lines = open(out + "/rates_table.csv").read().splitlines()
    assert lines[0] == "label,D_t1,D_t2,R_T,E_lower,E_c_known"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "w3"
    assert abs(float(first[1]) - LOG2_3) < 1e-6
    assert first[2] == ""
    assert abs(float(first[4]) - (2 * LOG2_3 - 2)) < 1e-12
    sweep = json.load(open(out + "/counterexample.json"))["sweep"]
    assert [r["p"] for r in sweep] == [0.1, 0.2, 0.3]
    assert all(r["violates"] for r in sweep)
    rows = json.load(open(out + "/rates_table.json"))["rows"]
    closed = {q: v for q, v, _ in map(tuple, rows[0]["closed_forms"])}
    assert abs(closed["discord_t1"] - LOG2_3) < 1e-15


def test_empty_rates_list_gives_header_only(tmp_path):
    out = str(tmp_path)
    assert run("rates", "--states", "", "--out-dir", out) == 0
    assert open(out + "/rates_table.csv").read() == "label,D_t1,D_t2,R_T,E_lower,E_c_known\n"
    assert json.load(open(out + "/rates_table.json"))["rows"] == []


def test_amps_normalization_warning(tmp_path, capsys):
    out = str(tmp_path)
    code = run(
        "discord", "--amps", "1,0,0,1", "--dims", "2,2",
        "--restarts", "2", "--out-dir", out,
    )
    assert code == 0
    assert "renormalizing" in capsys.readouterr().err
    payload = json.load(open(out + "/discord_result.json"))
    assert payload["label"] == "custom"
    assert abs(payload["value_bits"] - 1.0) < 1e-6
    # an already normalized list stays silent
    amp = 1.0 / math.sqrt(2.0)
    code = run(
        "discord", "--amps", f"{amp!r},0,0,{amp!r}", "--dims", "2,2",
        "--restarts", "2", "--out-dir", out,
    )
    assert code == 0
    assert "renormalizing" not in capsys.readouterr().err


def test_gghz_half_rate_is_exactly_one(tmp_path):
    out = str(tmp_path)
    assert run(
        "rate-convergence", "--state", "gghz", "--p", "0.5",
        "--l-values", "2,4,8", "--epsilon", "0.1", "--out-dir", out,
    ) == 0
    rows = json.load(open(out + "/rate_convergence.json"))["rows"]
    assert all(r["rate"] == 1.0 for r in rows)
    assert all(r["gap"] == 0.0 for r in rows)
