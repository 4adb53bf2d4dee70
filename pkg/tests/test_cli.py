"""Experiment runner: report format, determinism, exit codes."""
import csv
import filecmp

import pytest

from privrep.cli import ExperimentConfig, emit_report, main, run_experiment


def _value_of(header, rows, metric):
    m = header.index("metric")
    v = header.index("value")
    hits = [r[v] for r in rows if r[m] == metric]
    assert hits, f"no row with metric {metric}"
    return hits[0]


def test_formulas_table_reproduces_sample_sizes():
    header, rows = run_experiment(ExperimentConfig(subcommand="formulas"))
    assert _value_of(header, rows, "m_six_alpha") == "102"
    assert _value_of(header, rows, "m_gamma") == "2448"


def test_report_header_shape():
    cfg = ExperimentConfig(subcommand="e3sat",
                           params={"n": 8, "m": 20, "trials": 150})
    header, rows = run_experiment(cfg)
    # schema params plus the derived per-row columns epsilon and t
    cols = sorted(["alpha", "beta", "m", "n", "toy_eps", "trials",
                   "epsilon", "t"])
    assert header == ["experiment", "trial", "seed", *cols,
                      "metric", "value", "bound", "pass"]
    assert all(len(r) == len(header) for r in rows)
    assert any(r[1] == "summary" for r in rows)
    assert all(r[0] == "e3sat" for r in rows)


def test_emit_report_formats(tmp_path, capsys):
    header = ["experiment", "trial", "metric"]
    out = tmp_path / "empty.csv"
    emit_report((header, []), out)
    assert out.read_text() == "experiment,trial,metric\n"
    emit_report((header, [["x", "0", "y"]]), tmp_path / "one.csv")
    assert (tmp_path / "one.csv").read_text() == \
        "experiment,trial,metric\nx,0,y\n"
    emit_report((header, [["x", "0", "y"]]), None)
    assert capsys.readouterr().out == "experiment,trial,metric\nx,0,y\n"


def test_reruns_are_byte_identical(tmp_path):
    args = ["e3sat", "--seed", "7", "--param", "trials=150",
            "--param", "n=8", "--param", "m=20"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert filecmp.cmp(a, b, shallow=False)


def test_parallelism_does_not_change_the_bytes(tmp_path):
    base = ["check-prep", "--seed", "3", "--param", "trials=400",
            "--param", "d=3"]
    a, b = tmp_path / "j1.csv", tmp_path / "j2.csv"
    assert main([*base, "--jobs", "1", "--out", str(a)]) == 0
    assert main([*base, "--jobs", "2", "--out", str(b)]) == 0
    assert filecmp.cmp(a, b, shallow=False)


def test_different_seeds_differ(tmp_path):
    a, b = tmp_path / "s0.csv", tmp_path / "s1.csv"
    for seed, path in (("0", a), ("1", b)):
        main(["e3sat", "--seed", seed, "--param", "trials=150",
              "--param", "n=8", "--param", "m=20", "--out", str(path)])
    assert not filecmp.cmp(a, b, shallow=False)


def test_config_file_overridden_by_param(tmp_path):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text("n=8\nm=20\ntrials=120  # overridden below\n")
    out = tmp_path / "run.csv"
    assert main(["e3sat", "--seed", "2", "--config", str(cfg_path),
                 "--param", "trials=140", "--out", str(out)]) == 0
    with open(out, newline="") as fh:
        header, *rows = list(csv.reader(fh))
    idx = header.index("trials")
    assert rows and all(row[idx] == "140" for row in rows)


def test_unknown_subcommand_and_param_rejected():
    with pytest.raises(ValueError):
        run_experiment(ExperimentConfig(subcommand="frobnicate"))
    with pytest.raises(ValueError):
        run_experiment(ExperimentConfig(subcommand="formulas",
                                        params={"bogus": 1}))


def test_main_exit_codes(tmp_path, capsys):
    assert main(["formulas", "--out", str(tmp_path / "f.csv")]) == 0
    assert main(["frobnicate"]) == 1
    assert main(["formulas", "--param", "bogus=1"]) == 1
    assert main(["formulas", "--param", "alpha=notafloat"]) == 1
    err = capsys.readouterr().err
    assert "privrep: error:" in err


def test_failing_summary_exits_two(tmp_path):
    # alpha far below what t=2 draws can reach: the 3/4 target fails
    code = main(["e3sat", "--seed", "0", "--param", "alpha=0.01",
                 "--param", "trials=200", "--param", "n=8",
                 "--param", "m=20", "--out", str(tmp_path / "fail.csv")])
    assert code == 2
    lines = (tmp_path / "fail.csv").read_text().splitlines()
    assert any(line.rsplit(",", 1)[1] == "0" for line in lines[1:])
