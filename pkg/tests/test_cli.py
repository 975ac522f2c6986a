import json

from mmwsim.cli import main


def test_codebook_command(capsys):
    assert main(["codebook", "--M", "2", "--B", "1"]) == 0
    out = capsys.readouterr().out
    assert "2 phases" in out
    assert "0.785398" in out  # pi/4


def test_codebook_warns_on_coarse_phases(capsys):
    main(["codebook", "--M", "8", "--B", "1"])
    assert "lower bound not asserted" in capsys.readouterr().out


def test_bound_command_with_overrides(capsys, tmp_path):
    out_csv = tmp_path / "row.csv"
    rc = main(["bound", "--set", "L=3", "--set", "K=4", "--set", "N=64",
               "--set", "M=2", "--set", "adc_bits=1", "--set", "p_t=1",
               "--set", "p_p=4", "--out", str(out_csv)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "R_LB   = 1.880025" in out
    assert out_csv.exists()
    text = out_csv.read_text()
    assert "1.88003" in text


def test_bound_command_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"L": 1, "K": 2, "N": 32, "M": 2,
                               "adc_bits": 3, "p_t": 0.1, "p_p": 1.0}))
    assert main(["bound", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "single-cell form" in out
    assert "+inf" in out


def test_bound_command_rejects_bad_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"L": 1, "K": 8, "tau": 2, "adc_bits": 3}))
    assert main(["bound", "--config", str(cfg)]) == 2
    assert "tau < K" in capsys.readouterr().err


def test_simulate_command(capsys):
    rc = main(["simulate", "--set", "L=2", "--set", "K=2", "--set", "N=16",
               "--set", "M=2", "--set", "adc_bits=2", "--set", "p_t=1",
               "--set", "p_p=2", "--trials", "30", "--seed", "5"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "ergodic rate" in out and "lower bound" in out


def test_simulate_symbol_mode_and_dump(capsys, tmp_path):
    prefix = str(tmp_path / "dbg")
    rc = main(["simulate", "--set", "L=2", "--set", "K=2", "--set", "N=16",
               "--set", "M=2", "--set", "adc_bits=3", "--set", "p_t=1",
               "--set", "p_p=2", "--trials", "20", "--mode", "symbol",
               "--debug-dump", prefix])
    assert rc == 0
    assert (tmp_path / "dbg_realization.csv").exists()
    assert (tmp_path / "dbg_error_power.csv").exists()


def test_sweep_preset_to_files(capsys, tmp_path):
    out_csv = tmp_path / "fig2.csv"
    out_gp = tmp_path / "fig2.gp"
    rc = main(["sweep", "--preset", "fig2", "--trials", "20",
               "--out", str(out_csv), "--plot-script", str(out_gp)])
    assert rc == 0
    text = out_csv.read_text()
    assert text.splitlines()[1].startswith("scenario_id,")
    assert len(text.strip().splitlines()) == 2 + 4  # comment + header + rows
    assert "plot" in out_gp.read_text()


def test_sweep_spec_file_stdout(capsys, tmp_path):
    spec = {"scenario_id": "t", "base": {"L": 1, "N": 8, "M": 2, "adc_bits": 2,
                                         "p_t": 1.0, "p_p": 1.0},
            "axis": "K", "values": [1], "trials": 10, "outputs": ["rate_lb"]}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(spec))
    assert main(["sweep", "--spec", str(path)]) == 0
    out = capsys.readouterr().out
    assert "scenario_id" in out and ",t," not in out  # id leads each row
    assert out.splitlines()[2].startswith("t,")


def test_sweep_requires_source(capsys):
    assert main(["sweep"]) == 2


def test_validate_suite_exit_codes(capsys):
    assert main(["validate", "--suite", "bounds"]) == 0
    out = capsys.readouterr().out
    assert "PASS bounds/single_cell_identity" in out
    assert "checks passed" in out
