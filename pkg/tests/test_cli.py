import json
import subprocess
import sys

import numpy as np
import pytest

from ptqed.cli import ConfigError, ResultTable, dump_config, emit, load_config, parse_config
from ptqed.cli.config import SCHEMA
from ptqed.cli.main import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from ptqed.cli.table import data_section, read_csv, to_csv

SMALL_SPECTRUM = "experiment = spectrum\nnumerics.j_count = 21\n"


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def _run(tmp_path, experiment, text, *extra):
    cfg = _write(tmp_path, text)
    out = tmp_path / "out"
    code = main([experiment, "--config", str(cfg), "--out", str(out), "--jobs", "1", *extra])
    return code, out


# ---- config ---------------------------------------------------------------------


def test_minimal_config_applies_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, "experiment = spectrum\n"))
    assert cfg.experiment == "spectrum"
    for key, entry in SCHEMA.items():
        assert cfg[key] == entry.default
    assert cfg["moments.delta"] == 1.0 and cfg["moments.gamma_tilde_1"] == 0.1


def test_every_key_documented():
    assert all(entry.doc for entry in SCHEMA.values())


@pytest.mark.parametrize("text, fragment", [
    ("experiment = spectrum\n\nsystem.delta = abc\n", ":3:"),
    ("experiment = spectrum\nsystem.dleta = 1\n", "unknown key"),
    ("system.delta = 1\n", "missing 'experiment'"),
    ("experiment = spectrum\nsystem.delta = 1\nsystem.delta = 2\n", "duplicate"),
    ("experiment = plots\n", "unknown experiment"),
    ("experiment = spectrum\njust text\n", ":2:"),
    ("experiment = spectrum\nnumerics.j_count = 1.5\n", "numerics.j_count"),
])
def test_config_errors(tmp_path, text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        load_config(_write(tmp_path, text))


def test_experiment_mismatch(tmp_path):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "experiment = spectrum\n"), experiment="dynamics")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_dump_round_trip_idempotent(tmp_path):
    text = ("# comment\nexperiment = adiabatic\nnumerics.gammas = 1, 3.5, 10\n"
            "system.delta = 0.30000000000000004  # trailing\nmoments.mode = rwa\n"
            "numerics.step_doubling = no\n")
    cfg = parse_config(text)
    once = dump_config(cfg)
    twice = dump_config(parse_config(once))
    assert once == twice
    assert parse_config(once).values == cfg.values
    assert cfg["system.delta"] == 0.30000000000000004


def test_config_hash_ignores_output_settings():
    a = parse_config("experiment = spectrum\noutput.dir = /a\n")
    b = parse_config("experiment = spectrum\noutput.format = json\n")
    c = parse_config("experiment = spectrum\nmoments.delta = 2\n")
    assert a.config_hash() == b.config_hash() != c.config_hash()


# ---- tables ---------------------------------------------------------------------


def test_table_must_be_rectangular():
    with pytest.raises(ValueError):
        ResultTable("t", ["a", "b"], [[1, 2], [3]])


def test_float_round_trip_bitwise(tmp_path, rng):
    bits = rng.integers(0, 2**64, size=10_000, dtype=np.uint64)
    values = bits.view(np.float64)
    values = values[np.isfinite(values)]
    values = np.concatenate([values, [0.0, -0.0, 5e-324, 1.7976931348623157e308, 0.1]])
    table = ResultTable("floats", ["x"], [[float(v)] for v in values])
    path = emit(table, "csv", tmp_path / "f.csv")
    _, cols, rows = read_csv(path)
    assert cols == ["x"]
    back = np.array([float(r[0]) for r in rows])
    assert back.view(np.uint64).tolist() == values.view(np.uint64).tolist()


def test_csv_quoting_and_metadata():
    table = ResultTable("q", ["name", "v"], [['a,"b"', 1.5], ["plain", True]], {"note": "x"})
    text = to_csv(table)
    assert text.splitlines() == ["# note: x", "name,v", '"a,""b""",1.5', "plain,true"]


# ---- runs -------------------------------------------------------------------------


def test_spectrum_run_columns(tmp_path):
    code, out = _run(tmp_path, "spectrum", SMALL_SPECTRUM)
    assert code == EXIT_OK
    meta, cols, rows = read_csv(out / "spectrum.csv")
    assert cols == ["J", "re_w_pp", "re_w_pm", "im_w_pp", "im_w_pm", "phase", "is_ep", "mode"]
    assert len(rows) == 21
    assert {"tool", "config_hash", "wall_clock_s"} <= set(meta)
    assert meta["config_hash"] == load_config(tmp_path / "run.cfg").config_hash()
    assert {r[5] for r in rows} == {"BrokenPT", "ExactPT", "Unstable"}


def test_gcoeffs_ratio(tmp_path):
    code, out = _run(tmp_path, "gcoeffs", "experiment = gcoeffs\n")
    assert code == EXIT_OK
    _, cols, rows = read_csv(out / "gcoeffs.csv")
    assert len(rows) == 1
    assert float(rows[0][cols.index("ratio")]) == pytest.approx(0.58, abs=0.01)
    assert float(rows[0][cols.index("g_plus")]) > float(rows[0][cols.index("g_minus")])


def test_empty_grid_fails_without_files(tmp_path):
    code, out = _run(tmp_path, "spectrum", "experiment = spectrum\nnumerics.j_count = 0\n")
    assert code == EXIT_CONFIG
    assert not out.exists()


def test_invalid_physics_fails_fast(tmp_path):
    code, out = _run(tmp_path, "gcoeffs", "experiment = gcoeffs\nsystem.lambda_plus_1 = 40\n")
    assert code == EXIT_CONFIG
    assert not out.exists()


def test_config_error_exit_code(tmp_path):
    code, out = _run(tmp_path, "spectrum", "experiment = spectrum\nbogus.key = 1\n")
    assert code == EXIT_CONFIG and not out.exists()


def test_numerical_failure_writes_sidecar(tmp_path):
    text = "experiment = dynamics\nnumerics.dt = 3\nnumerics.n_fock = 3\nnumerics.t_end = 30\n"
    code, out = _run(tmp_path, "dynamics", text)
    assert code == EXIT_NUMERIC
    assert [p.name for p in out.iterdir()] == ["dynamics.err"]
    assert "StateError" in (out / "dynamics.err").read_text()


def test_deterministic_runs_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, SMALL_SPECTRUM)
    files = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        assert main(["spectrum", "--config", str(cfg), "--out", str(out), "--deterministic"]) == 0
        files.append((out / "spectrum.csv").read_bytes())
    assert files[0] == files[1]
    assert b"wall_clock_s" not in files[0]


def test_jobs_do_not_change_output(tmp_path):
    cfg = _write(tmp_path, "experiment = transmission\nnumerics.j_count = 9\nnumerics.wd_count = 31\n")
    texts = []
    for jobs in ("1", "3"):
        out = tmp_path / f"j{jobs}"
        assert main(["transmission", "--config", str(cfg), "--out", str(out), "--jobs", jobs,
                     "--deterministic"]) == 0
        texts.append([(out / n).read_bytes() for n in ("transmission.csv", "transmission_ridges.csv")])
    assert texts[0] == texts[1]


def test_json_format(tmp_path):
    code, out = _run(tmp_path, "spectrum", SMALL_SPECTRUM, "--format", "json")
    assert code == EXIT_OK
    doc = json.loads((out / "spectrum.json").read_text())
    assert set(doc) == {"metadata", "columns", "rows"}
    assert len(doc["rows"]) == 21 and doc["metadata"]["experiment"] == "spectrum"


def test_plot_script_references_csv_relatively(tmp_path):
    code, out = _run(tmp_path, "spectrum", SMALL_SPECTRUM, "--emit-plot-script")
    assert code == EXIT_OK
    script = (out / "spectrum_plot.py").read_text()
    assert "'spectrum.csv'" in script
    assert str(out) not in script and str(tmp_path) not in script
    compile(script, "spectrum_plot.py", "exec")


def test_plot_script_requires_csv(tmp_path):
    code, out = _run(tmp_path, "spectrum", SMALL_SPECTRUM, "--emit-plot-script", "--format", "json")
    assert code == EXIT_CONFIG and not out.exists()


def test_console_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "ptqed.cli.main", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("gcoeffs", "dynamics", "adiabatic", "spectrum", "phase-diagram", "transmission"):
        assert name in res.stdout


def test_data_section_strips_metadata():
    assert data_section("# a: 1\nx\n1\n") == "x\n1\n"
