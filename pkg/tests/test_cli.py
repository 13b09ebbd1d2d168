import json
from importlib import resources

import jsonschema

from stpnc import cli


def run(args):
    return cli.main(args)


def load_schema(name):
    with resources.files("stpnc.schemas").joinpath(name).open() as f:
        return json.load(f)


def test_verify_twic_exit_zero(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify", "--scenario", "twic", "--seeds", "5", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    jsonschema.validate(doc, load_schema("verify_report.schema.json"))


def test_verify_case_scenarios(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify", "--scenario", "case1", "--k1", "4", "--relays", "3",
                "--seeds", "3", "--output", str(out)]) == 0
    assert run(["verify", "--scenario", "case2", "--k2", "5", "--relays", "3",
                "--seeds", "3", "--output", str(out)]) == 0


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    def fake_verify(*args, **kwargs):
        return {"passed": False, "failures": [0]}

    monkeypatch.setattr(cli, "verify_scenario", fake_verify)
    out = tmp_path / "v.json"
    code = run(["verify", "--scenario", "twic", "--seeds", "1", "--output", str(out)])
    assert code == cli.EXIT_VERIFY_FAILED


def test_simulate_json_schema_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["simulate", "--scenario", "twxc", "--seed", "9", "--trials", "2"]
    assert run(args + ["--output", str(a)]) == 0
    assert run(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    jsonschema.validate(doc, load_schema("sim_report.schema.json"))
    assert doc["trials"][0]["achieved_dof"] == "8/5"
    assert doc["trials"][0]["max_symbol_error"] < 1e-8


def test_simulate_csv(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["simulate", "--scenario", "twic", "--seed", "1", "--trials", "3",
                "--format", "csv", "--output", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("trial,seed,max_symbol_error")
    assert len(lines) == 4


def test_simulate_antenna_deficit_exit_three(tmp_path):
    code = run(["simulate", "--scenario", "case1", "--k1", "4", "--relays", "2",
                "--output", str(tmp_path / "x.json")])
    assert code == cli.EXIT_INFEASIBLE


def test_usage_errors_exit_two(tmp_path):
    assert run(["simulate", "--scenario", "nope"]) == cli.EXIT_USAGE
    assert run(["simulate", "--scenario", "case1", "--relays", "3"]) == cli.EXIT_USAGE  # no --k1
    assert run(["simulate", "--scenario", "case1", "--k1", "2", "--relays", "3"]) == cli.EXIT_USAGE
    assert run(["verify", "--scenario", "case2", "--k2", "4"]) == cli.EXIT_USAGE  # no --relays
    assert run(["rate-sweep", "--snr", "abc"]) == cli.EXIT_USAGE
    assert run(["rate-sweep", "--snr", "10:0:1"]) == cli.EXIT_USAGE
    assert run(["no-such-command"]) == cli.EXIT_USAGE


def test_dof_sweep_matches_library(tmp_path):
    import io

    from stpnc.dof import single_antenna_sweep, write_sweep_csv

    out = tmp_path / "dof.csv"
    assert run(["dof-sweep", "--k", "6", "--l-max", "30", "--output", str(out)]) == 0
    buf = io.StringIO()
    write_sweep_csv(single_antenna_sweep(6, 30), buf)
    assert out.read_text() == buf.getvalue()


def test_dof_sweep_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["dof-sweep", "--k", "5", "--l-max", "12", "--output", str(a)])
    run(["dof-sweep", "--k", "5", "--l-max", "12", "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_rate_sweep_csv_and_json(tmp_path, capsys):
    out = tmp_path / "r.csv"
    args = ["rate-sweep", "--snr", "0:10:5", "--trials", "300", "--seed", "2",
            "--output", str(out)]
    assert run(args) == 0
    printed = capsys.readouterr().out
    assert printed.startswith("crossover_db=")
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "snr_db,stpnc_rate,stpnc_stderr,tdma_rate,tdma_stderr"
    assert len(lines) == 4
    out2 = tmp_path / "r2.csv"
    assert run(["rate-sweep", "--snr", "0:10:5", "--trials", "300", "--seed", "2",
                "--output", str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()

    outj = tmp_path / "r.json"
    assert run(["rate-sweep", "--snr", "0:10:5", "--trials", "300", "--seed", "2",
                "--format", "json", "--output", str(outj)]) == 0
    doc = json.loads(outj.read_text())
    jsonschema.validate(doc, load_schema("rate_sweep.schema.json"))
    assert len(doc["points"]) == 3


def test_snr_grid_parsing():
    assert cli._parse_snr_grid("0:30:1") == tuple(float(x) for x in range(31))
    assert cli._parse_snr_grid("5") == (5.0,)
    assert cli._parse_snr_grid("0:1:0.25") == (0.0, 0.25, 0.5, 0.75, 1.0)


def test_env_seed_default(tmp_path, monkeypatch):
    monkeypatch.setenv("STPNC_SEED", "31")
    a = tmp_path / "a.json"
    assert run(["simulate", "--scenario", "twic", "--output", str(a)]) == 0
    b = tmp_path / "b.json"
    monkeypatch.delenv("STPNC_SEED")
    assert run(["simulate", "--scenario", "twic", "--seed", "31", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_defaults_and_flag_priority(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "twic", "seeds": 3, "seed": 7}))
    out1 = tmp_path / "o1.json"
    assert run(["verify", "--scenario", "twic", "--config", str(cfg),
                "--output", str(out1)]) == 0
    assert json.loads(out1.read_text())["seeds"] == 3
    # explicit flag beats the config value
    out2 = tmp_path / "o2.json"
    assert run(["verify", "--scenario", "twic", "--config", str(cfg),
                "--seeds", "4", "--output", str(out2)]) == 0
    assert json.loads(out2.read_text())["seeds"] == 4


def test_parallel_jobs_reproduce_sequential(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["rate-sweep", "--snr", "0:6:3", "--trials", "4100", "--seed", "3",
                "--jobs", "1", "--output", str(a)]) == 0
    assert run(["rate-sweep", "--snr", "0:6:3", "--trials", "4100", "--seed", "3",
                "--jobs", "2", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
