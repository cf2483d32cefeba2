import math

import pytest

from cvqkd_ps import (
    ExperimentConfig,
    QuadratureSpec,
    SchemeConfig,
    emit_csv,
    key_rate,
    parse_csv,
    run_experiment,
)
from cvqkd_ps.cli import main as cli_main


def small_base(**kw):
    kw.setdefault("trunc_n", 10)
    return SchemeConfig("nops", **kw)


def small_config(experiment, **kw):
    kw.setdefault("base", small_base())
    kw.setdefault("schemes", ("nops", "tps"))
    if experiment.startswith("satellite"):
        kw.setdefault("quad", QuadratureSpec(node_count=24))
        kw.setdefault("points", 3)
    else:
        kw.setdefault("points", 5)
    return ExperimentConfig(experiment=experiment, **kw)


# ---------------------------------------------------------------- experiments

def test_single_point_transmissivity_row():
    config = ExperimentConfig(
        experiment="transmissivity_sweep",
        schemes=("nops",),
        base=SchemeConfig("nops", trunc_n=40),
        start=1.0,
        stop=1.0,
        points=1,
    )
    result = run_experiment(config)
    assert len(result.rows) == 1
    row = dict(zip(result.columns, result.rows[0]))
    assert row["t_e"] == 1.0
    assert row["scheme"] == "nops"
    assert row["rate"] == pytest.approx(0.95 * math.log2(3.6), abs=1e-4)


def test_distance_sweep_maps_distances():
    config = small_config("distance_sweep", schemes=("nops",), start=0.0, stop=100.0,
                          points=3)
    result = run_experiment(config)
    rows = [dict(zip(result.columns, r)) for r in result.rows]
    assert [r["distance_km"] for r in rows] == [0.0, 50.0, 100.0]
    assert rows[1]["t_e"] == pytest.approx(0.1, rel=1e-12)
    assert rows[2]["t_e"] == pytest.approx(0.01, rel=1e-12)


def test_rows_match_direct_evaluation():
    config = small_config("transmissivity_sweep", start=0.2, stop=0.8, points=3)
    result = run_experiment(config)
    for row in result.rows:
        d = dict(zip(result.columns, row))
        kr = key_rate(SchemeConfig(d["scheme"], trunc_n=10), d["t_e"])
        assert d["rate"] == kr.rate
        assert d["i_g"] == kr.i_g


def test_grid_experiments_cover_layers():
    config = small_config(
        "noise_grid", schemes=("nops",), points=2, beta_sq_values=(0.001, 0.01)
    )
    result = run_experiment(config)
    assert len(result.rows) == 4
    layers = [row[0] for row in result.rows]
    assert layers == [0.001, 0.001, 0.01, 0.01]

    config = small_config(
        "photon_grid", schemes=("rps",), points=2, alpha_sq_values=(0.8, 1.3)
    )
    result = run_experiment(config)
    assert [row[0] for row in result.rows] == [0.8, 0.8, 1.3, 1.3]
    assert result.columns[0] == "alpha_sq"


def test_satellite_sweep_emits_both_averages():
    config = small_config("satellite_sweep", schemes=("nops",), start=0.5, stop=1.5)
    result = run_experiment(config)
    assert result.columns == ("sigma_b", "scheme", "k_avg", "k_avg_normalized")
    assert len(result.rows) == 3
    for row in result.rows:
        assert row[2] <= row[3] + 1e-12  # p_sub <= 1 makes the normalized one larger


def test_empty_scheme_set_rejected_before_output(tmp_path):
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="transmissivity_sweep", schemes=())
    assert list(tmp_path.iterdir()) == []


def test_invalid_experiment_rejected():
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="bogus")


# ------------------------------------------------------------------ emit/parse

def test_csv_round_trip(tmp_path):
    config = small_config("transmissivity_sweep", start=0.3, stop=0.9, points=3)
    result = run_experiment(config)
    path = tmp_path / "out.csv"
    emit_csv(result, path)
    text = path.read_text()
    assert text.startswith("# experiment=transmissivity_sweep\n")
    assert text.endswith("\n")

    back = parse_csv(path)
    assert back.columns == result.columns
    assert len(back.rows) == len(result.rows)
    for got, want in zip(back.rows, result.rows):
        for g, w in zip(got, want):
            if isinstance(w, str):
                assert g == w
            else:
                assert g == pytest.approx(w, rel=5e-12)

    # emitting the parsed result reproduces the file byte for byte
    path2 = tmp_path / "out2.csv"
    emit_csv(back, path2)
    assert path2.read_bytes() == path.read_bytes()


def test_emit_deterministic(tmp_path):
    config = small_config("transmissivity_sweep")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_experiment(config), a)
    emit_csv(run_experiment(config), b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("experiment", ["transmissivity_sweep", "satellite_sweep"])
def test_worker_count_does_not_change_bytes(tmp_path, experiment):
    paths = []
    for threads in (1, 4):
        config = small_config(experiment, threads=threads)
        p = tmp_path / f"{experiment}-{threads}.csv"
        emit_csv(run_experiment(config), p)
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_metadata_contents():
    config = small_config("satellite_closeup", schemes=("tps",))
    md = run_experiment(config).metadata
    assert md["experiment"] == "satellite_closeup"
    assert md["schemes"] == "tps"
    assert md["trunc_n"] == 10
    assert md["nodes"] == 24
    assert "threads" not in md  # execution detail, not part of the result


# ------------------------------------------------------------------------ CLI

def test_cli_writes_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = cli_main([
        "transmissivity-sweep",
        "--scheme", "nops",
        "--trunc", "8",
        "--start", "0.5", "--stop", "1.0", "--points", "3",
        "--out", str(out),
    ])
    assert rc == 0
    assert "wrote 3 rows" in capsys.readouterr().out
    result = parse_csv(out)
    assert result.metadata["trunc_n"] == "8"
    assert len(result.rows) == 3


def test_cli_satellite_flags(tmp_path):
    out = tmp_path / "sat.csv"
    cli_main([
        "satellite-sweep",
        "--scheme", "nops",
        "--trunc", "8",
        "--start", "0.5", "--stop", "1.0", "--points", "2",
        "--nodes", "16",
        "--no-clamp-negative",
        "--out", str(out),
    ])
    md = parse_csv(out).metadata
    assert md["nodes"] == "16"
    assert md["clamp_negative"] == "false"


def test_cli_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "# base setup\n"
        "scheme = nops,tps\n"
        "trunc = 8\n"
        "points = 3\n"
        "stop = 0.9\n"
    )
    out = tmp_path / "cfg.csv"
    cli_main([
        "transmissivity-sweep",
        "--config", str(cfg_file),
        "--points", "2",  # flag overrides the file
        "--start", "0.5",
        "--out", str(out),
    ])
    result = parse_csv(out)
    assert result.metadata["points"] == "2"
    assert result.metadata["schemes"] == "nops,tps"
    assert result.metadata["trunc_n"] == "8"
    assert len(result.rows) == 4  # 2 points x 2 schemes


def test_cli_rejects_unknown_config_key(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 1\n")
    with pytest.raises(ValueError):
        cli_main(["transmissivity-sweep", "--config", str(bad)])
