import json
from pathlib import Path

import pytest

from labelprop.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_karate_smoke(capsys, monkeypatch):
    monkeypatch.setenv("LPA_THREADS", "1")
    code, out, _ = run_cli(capsys, "run", "karate", "--timing", "semi-sync",
                           "--tie", "prec-max", "--seed", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["status"] == "converged"
    assert isinstance(doc["result"]["modularity"], float)


def test_run_c4_sync_c2_reports_period_two(capsys):
    code, out, _ = run_cli(capsys, "run", "c4", "--timing", "sync", "--tie", "max",
                           "--stop", "c2", "--seed", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["stop_reason"] == "c2-period-2"


def test_run_missing_file_exits_1(capsys):
    code, _, err = run_cli(capsys, "run", "missing.gml")
    assert code == 1
    assert "error" in err


def test_run_cap_exceeded_exits_2(capsys):
    code, out, _ = run_cli(capsys, "run", "c4", "--timing", "sync", "--tie", "random",
                           "--stop", "no-change", "--cap", "1", "--seed", "3")
    assert code == 2
    assert json.loads(out)["result"]["status"] == "cap_exceeded"


def test_unknown_flag_value_exits_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "c4", "--timing", "bogus"])
    assert exc.value.code == 64


def test_missing_command_exits_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 64


def test_invalid_lpa_threads_is_input_error(capsys, monkeypatch):
    monkeypatch.setenv("LPA_THREADS", "zero")
    code, _, err = run_cli(capsys, "run", "c4")
    assert code == 1
    assert "LPA_THREADS" in err


def test_run_output_is_byte_stable(capsys):
    args = ("run", "karate", "--timing", "semi-sync", "--tie", "lpa", "--seed", "7")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_run_csv_format(capsys):
    code, out, _ = run_cli(capsys, "run", "c4", "--timing", "semi-sync", "--tie", "max",
                           "--seed", "1", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# graph=c4 status=converged")
    assert "vertex,community" in lines
    assert lines[-1] == "3,0"


def test_run_plot_data_format(capsys):
    code, out, _ = run_cli(capsys, "run", "c4", "--timing", "semi-sync", "--tie", "max",
                           "--seed", "1", "--format", "plot-data")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,y,series"
    assert lines[1] == "0,0,f"        # identity labels: no monochromatic edges
    assert lines[-1].endswith(",f")


def test_experiment_summary_fields(capsys):
    code, out, _ = run_cli(capsys, "experiment", "karate", "--timing", "semi-sync",
                           "--tie", "lpa", "--trials", "5", "--seed", "7")
    assert code == 0
    doc = json.loads(out)
    (summary,) = doc["summaries"]
    assert summary["trials"] == 5
    assert summary["tie"] == "random"
    assert 0.0 <= summary["modularity"]["mean"] <= 1.0
    assert summary["convergence_rate"] == 1.0


def test_experiment_single_trial_zero_std(capsys):
    code, out, _ = run_cli(capsys, "experiment", "karate", "--trials", "1", "--seed", "3")
    assert code == 0
    (summary,) = json.loads(out)["summaries"]
    assert summary["modularity"]["std"] == 0.0
    assert summary["stages"]["std"] == 0.0


def test_experiment_matrix_mode(capsys):
    code, out, _ = run_cli(capsys, "experiment", "c4", "--all-ties", "--both-timings",
                           "--trials", "2", "--seed", "1")
    assert code == 0
    summaries = json.loads(out)["summaries"]
    assert len(summaries) == 8
    cells = {(s["timing"], s["tie"]) for s in summaries}
    assert len(cells) == 8


def test_experiment_writes_outputs(capsys, tmp_path: Path):
    outdir = tmp_path / "results"
    code, out, _ = run_cli(capsys, "experiment", "c4", "--tie", "max", "--trials", "3",
                           "--seed", "2", "--out", str(outdir))
    assert code == 0
    trials = (outdir / "trials_semi_sync_max.csv").read_text()
    assert trials.splitlines()[0] == "trial,seed,modularity,steps,stages,communities,largest,converged"
    assert len(trials.splitlines()) == 4
    assert (outdir / "summary.json").read_text() == out


def test_experiment_unwritable_out_exits_1(capsys, tmp_path: Path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run_cli(capsys, "experiment", "c4", "--trials", "1",
                           "--out", str(blocker / "sub"))
    assert code == 1
    assert "error" in err


def test_experiment_csv_format_byte_stable(capsys):
    args = ("experiment", "karate", "--tie", "prec", "--trials", "4", "--seed", "11",
            "--format", "csv")
    code, first, _ = run_cli(capsys, *args)
    assert code == 0
    header, row = first.splitlines()
    assert header.startswith("timing,tie,network,trials,base_seed,modularity_mean")
    assert row.startswith("semi-sync,prec,karate,4,11,")
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_experiment_plot_data(capsys):
    code, out, _ = run_cli(capsys, "experiment", "c4", "--tie", "max", "--trials", "2",
                           "--seed", "1", "--format", "plot-data")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,y,series"
    assert any(line.endswith(",modularity_mean") for line in lines[1:])


def test_info_karate(capsys):
    code, out, _ = run_cli(capsys, "info", "karate")
    assert code == 0
    doc = json.loads(out)
    assert (doc["n"], doc["m"]) == (34, 78)
    assert doc["max_degree"] == 17
    assert doc["components"] == 1


def test_info_c4(capsys):
    code, out, _ = run_cli(capsys, "info", "c4")
    assert code == 0
    doc = json.loads(out)
    assert (doc["n"], doc["m"], doc["max_degree"]) == (4, 4, 2)


def test_info_gml_path(capsys, tmp_path: Path):
    gml = tmp_path / "pair.gml"
    gml.write_text('graph [ node [ id 1 label "a" ] node [ id 2 label "b" ] '
                   "edge [ source 1 target 2 ] ]")
    code, out, _ = run_cli(capsys, "info", str(gml))
    assert code == 0
    doc = json.loads(out)
    assert (doc["n"], doc["m"]) == (2, 1)
    assert doc["name"] == "pair.gml"


def test_info_reports_components_and_load_report(capsys, tmp_path: Path):
    path = tmp_path / "two.edgelist"
    path.write_text("0 1\n1 0\n2 2\n")
    code, out, _ = run_cli(capsys, "info", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["components"] == 2
    assert doc["report"]["duplicate_edges_dropped"] == 1
    assert doc["report"]["self_loops_dropped"] == 1


def test_info_parse_error_location(capsys, tmp_path: Path):
    path = tmp_path / "bad.edgelist"
    path.write_text("0 1\noops\n")
    code, _, err = run_cli(capsys, "info", str(path))
    assert code == 1
    assert "line 2" in err


def test_info_csv_format(capsys):
    code, out, _ = run_cli(capsys, "info", "path3", "--format", "csv")
    assert code == 0
    assert "n,3" in out.splitlines()


def test_run_coloring_out(capsys, tmp_path: Path):
    target = tmp_path / "stages.csv"
    code, _, _ = run_cli(capsys, "run", "c4", "--timing", "semi-sync", "--tie", "max",
                         "--coloring-out", str(target))
    assert code == 0
    assert target.read_text() == "vertex,color\n0,0\n1,1\n2,0\n3,1\n"


def test_run_coloring_out_requires_semi_sync(capsys, tmp_path: Path):
    code, _, err = run_cli(capsys, "run", "c4", "--timing", "sync", "--tie", "max",
                           "--coloring-out", str(tmp_path / "x.csv"))
    assert code == 1
    assert "semi-sync" in err
