import json
from pathlib import Path

import pytest

from reinfanneal.harness import cli
from reinfanneal.harness.config import ConfigError, SweepSpec, dump_config, parse_config, parse_grid
from reinfanneal.harness.presets import FIGURE_IDS, preset_specs
from reinfanneal.harness.records import RUN_FIELDS, SCHEMA_VERSION, SchemaError, format_value, read_csv
from reinfanneal.harness.summarize import summarize, summarize_rows
from reinfanneal.harness.sweep import expected_row_count, run_sweep, sweep_points, write_outputs

GOLDEN = Path(__file__).parent / "golden" / f"header_v{SCHEMA_VERSION}.csv"

SMALL = """\
model = teacher
noise = depolarizing
grid.r = 0, 1
grid.epsilon = 0, 0.4
grid.l_t = 10
realizations = 3
"""


def test_defaults():
    spec = parse_config("")
    assert spec.l_t == (50,) and spec.p0 == 2.0**-10 and spec.lambda_floor == 1e-12 and spec.delta_l == (0,)


def test_r_grid_expansion():
    grid = parse_grid("-1:1:0.1")
    assert len(grid) == 21 and grid[0] == -1.0 and grid[10] == 0.0 and grid[-1] == 1.0


@pytest.mark.parametrize("text,key", [
    ("grid.r = 0\ngrid.r = 1\n", "grid.r"),
    ("bogus = 3\n", "bogus"),
    ("grid.r = 2\n", "grid.r"),
    ("grid.epsilon = -0.1\n", "grid.epsilon"),
    ("noise = thermal\n", "noise"),
])
def test_config_errors_name_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key


def test_duplicate_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config("model = teacher\ngrid.r = 0\ngrid.r = 1\n")
    assert info.value.line == 3


def test_config_roundtrip():
    spec = parse_config(SMALL + "learn.eta = 0.5\n")
    assert parse_config(dump_config(spec)) == spec


def test_golden_header():
    assert GOLDEN.read_text().strip().split(",") == list(RUN_FIELDS)


def test_format_value():
    assert format_value(None) == "" and format_value(float("inf")) == "inf"
    assert float(format_value(0.1 + 0.2)) == 0.1 + 0.2


def test_row_count_and_determinism(tmp_path):
    spec = parse_config(SMALL)
    res = run_sweep(spec)
    assert len(res.rows) == 120 == expected_row_count(spec)
    a = write_outputs(spec, res, tmp_path / "a")
    b = write_outputs(spec, run_sweep(spec), tmp_path / "b")
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads((tmp_path / "a" / "custom.meta.json").read_text())
    assert meta["schema_version"] == SCHEMA_VERSION and "grid.r = 0.0, 1.0" in meta["config"]


def test_shuffled_parallel_matches_serial(tmp_path):
    spec = parse_config(SMALL.replace("model = teacher", "model = both") + "grid.l_s = 5\n")
    serial = write_outputs(spec, run_sweep(spec), tmp_path / "s")
    par = write_outputs(spec, run_sweep(spec, threads=3, shuffle_seed=4), tmp_path / "p")
    assert serial.read_bytes() == par.read_bytes()


def test_point_enumeration_is_stable():
    spec = parse_config(SMALL)
    pts = sweep_points(spec)
    assert [p.index for p in pts] == list(range(4))
    assert (pts[1].epsilon, pts[1].r) == (0.0, 1.0)


def test_failures_go_to_sidecar(tmp_path, monkeypatch):
    from reinfanneal.harness import sweep

    real = sweep.run_point

    def flaky(spec, pt, k):
        if pt.index == 1 and k == 0:
            raise ValueError("boom")
        return real(spec, pt, k)

    monkeypatch.setattr(sweep, "run_point", flaky)
    spec = parse_config(SMALL)
    res = run_sweep(spec)
    assert res.partial and len(res.rows) == 110
    write_outputs(spec, res, tmp_path)
    lines = (tmp_path / "custom.errors.txt").read_text().splitlines()
    assert lines == ["point=1 realization=0 error=ValueError: boom"]


def test_summary_standard_errors():
    spec = parse_config(SMALL)
    rows = _as_text(run_sweep(spec).rows)
    one = summarize_rows([r for r in rows if r["realization"] == "0"])
    assert all(rec["final_p_se"] is None for rec in one)
    dup = summarize_rows(rows)  # depolarizing: realizations identical
    assert all(rec["final_p_se"] == 0.0 for rec in dup)
    assert sum(rec["best_r"] for rec in dup) == 2


def _as_text(rows):
    return [{k: format_value(r.get(k)) for k in RUN_FIELDS} for r in rows]


def test_summary_schema_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(",".join(RUN_FIELDS).replace("epsilon", "eps") + "\n")
    with pytest.raises(SchemaError, match="'eps'"):
        summarize(bad)
    with pytest.raises(SchemaError):
        read_csv(bad)


def test_presets():
    assert len(FIGURE_IDS) == 10
    paper, desk = preset_specs("fig2", "paper")[0], preset_specs("fig2", "desk")[0]
    assert (paper.n_qubits, paper.realizations, desk.n_qubits, desk.realizations) == (10, 100, 6, 20)
    fig5 = preset_specs("fig5")
    assert {s.noise for s in fig5} == {"depolarizing", "bitflip"}
    assert all(s.l_t == (50,) and s.l_s == (50,) and s.epsilon == (0.4,) for s in fig5)
    a1 = preset_specs("A1")
    assert all(s.l_t == (10,) and s.l_s == (5,) for s in a1)
    assert preset_specs("B1", "desk") == preset_specs("B1", "paper")
    with pytest.raises(KeyError, match="fig2"):
        preset_specs("fig9")


def test_cli_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(SMALL)
    assert cli.main(["teacher", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "custom.csv").exists()
    assert cli.main(["summarize", str(tmp_path / "custom.csv")]) == 0
    cfg.write_text("bogus = 1\n")
    assert cli.main(["sweep", "--config", str(cfg)]) == 1
    assert cli.main(["reproduce", "fig9"]) == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["nonsense"])
    assert info.value.code == 1


def test_cli_partial_exit(tmp_path, monkeypatch):
    from reinfanneal.harness import sweep

    def always_fail(spec, pt, k):
        raise ArithmeticError("no")

    monkeypatch.setattr(sweep, "run_point", always_fail)
    cfg = tmp_path / "s.cfg"
    cfg.write_text(SMALL)
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_spec_validation_direct():
    with pytest.raises(ConfigError):
        SweepSpec(model="student", instance="n_qubit", n_qubits=3)
