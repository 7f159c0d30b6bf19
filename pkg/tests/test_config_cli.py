"""Config validation and the command-line front end."""
import pytest

from zqchain.cli import main
from zqchain.config import (
    ConfigError,
    ScenarioConfig,
    config_from_overrides,
    load_config,
    validate,
)

FIG6C_YAML = """\
model: xy
n: 4
couplings: {J: 5.0}
initial: {flips: [1]}
observe: [1]
"""

ALIPHATIC_YAML = """\
model: aliphatic
n: 4
couplings: {J_gem: -14.0, J_gauche: 7.5, J_anti: 2.5}
initial:
  t0_sites: [1, 2, 3, 4]
  signs: [1, 1, 1, -1]
observe: [S0S0S0T0]
engine: restricted
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_xy_config(tmp_path):
    cfg = load_config(write(tmp_path, "fig6c.yaml", FIG6C_YAML))
    assert cfg.model == "xy"
    assert cfg.flips == (1,)
    assert cfg.dt == 0.005 and cfg.horizon == 20.0 and cfg.tau == 5.0
    assert cfg.zero_pad == 4
    assert cfg.observables() == [("site1", 1)]


def test_load_aliphatic_config(tmp_path):
    cfg = load_config(write(tmp_path, "a.yaml", ALIPHATIC_YAML))
    assert cfg.t0_sites == (1, 2, 3, 4)
    assert cfg.signs == (1.0, 1.0, 1.0, -1.0)
    obs_id, label = cfg.observables()[0]
    assert obs_id == "S0S0S0T0"
    assert cfg.aliphatic_params().delta_j == pytest.approx(5.0)


def test_overrides_beat_file_values(tmp_path):
    path = write(tmp_path, "fig6c.yaml", FIG6C_YAML)
    cfg = load_config(path, {"tau": 2.0, "observe": ["all"]})
    assert cfg.tau == 2.0
    assert len(cfg.observables()) == 4


def test_site_zero_rejected(tmp_path):
    text = FIG6C_YAML.replace("flips: [1]", "flips: [0]")
    path = write(tmp_path, "bad.yaml", text)
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert "flips" in str(err.value)
    assert "bad.yaml" in str(err.value)


def test_error_message_carries_line_number(tmp_path):
    text = FIG6C_YAML.replace("n: 4", "n: 1")
    path = write(tmp_path, "bad.yaml", text)
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert ":2: n:" in str(err.value)


def test_unknown_field_rejected(tmp_path):
    path = write(tmp_path, "bad.yaml", FIG6C_YAML + "bogus: 1\n")
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert "bogus" in str(err.value)


def test_size_guards():
    with pytest.raises(ConfigError) as err:
        validate(ScenarioConfig(model="xy", n=13, couplings={"J": 5.0}))
    assert "4096" in str(err.value)
    with pytest.raises(ConfigError) as err:
        validate(ScenarioConfig(model="aliphatic", n=7, engine="full",
                                couplings={"J_gem": -14, "J_gauche": 7.5,
                                           "J_anti": 2.5},
                                t0_sites=(1,), signs=(1.0,)))
    assert "full-engine" in str(err.value)
    with pytest.raises(ConfigError) as err:
        validate(ScenarioConfig(model="aliphatic", n=15,
                                couplings={"J_gem": -14, "J_gauche": 7.5,
                                           "J_anti": 2.5},
                                t0_sites=(1,), signs=(1.0,)))
    assert "restricted-engine" in str(err.value)


def test_observe_label_needs_matching_length():
    with pytest.raises(ConfigError) as err:
        validate(ScenarioConfig(model="aliphatic", n=4,
                                couplings={"J_gem": -14, "J_gauche": 7.5,
                                           "J_anti": 2.5},
                                t0_sites=(1,), signs=(1.0,),
                                observe=("S0T0",)))
    assert "observe" in str(err.value)


def test_config_from_overrides_minimal():
    cfg = config_from_overrides({"model": "xy", "n": 2,
                                 "couplings": {"J": 5.0}, "flips": [1],
                                 "observe": [1]})
    assert cfg.n == 2


def test_cli_simulate_writes_trajectories(tmp_path, capsys):
    rc = main(["simulate", "--model", "xy", "--n", "2", "--j", "5",
               "--flips", "1", "--observe", "1", "--horizon", "2",
               "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "conserved" in out
    path = tmp_path / "scenario.site1.traj.csv"
    assert path.exists()
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t_seconds,value"
    assert len(lines) == 402  # 2 s at dt=0.005, plus t=0 and header
    # first zero crossing of the flip-flop at 1/(4J) = 0.05 s
    rows = [line.split(",") for line in lines[1:]]
    first_nonneg = next(float(t) for t, v in rows if float(v) >= 0)
    assert first_nonneg == pytest.approx(0.05, abs=0.005)


def test_cli_spectrum_fig6c(tmp_path):
    rc = main(["spectrum", "--model", "xy", "--n", "4", "--j", "5",
               "--flips", "1", "--observe", "1", "--out", str(tmp_path)])
    assert rc == 0
    report = (tmp_path / "scenario.site1.report.txt").read_text()
    assert report.count("matched") >= 4
    assert "suppressed" not in report
    assert "spurious" not in report
    spec_lines = (tmp_path / "scenario.site1.spec.csv").read_text().splitlines()
    assert spec_lines[0] == "freq_hz,magnitude"


def test_cli_config_file_stem_used(tmp_path):
    path = write(tmp_path, "myrun.yaml", FIG6C_YAML)
    rc = main(["spectrum", "--config", path, "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "myrun.site1.spec.csv").exists()


def test_cli_invalid_config_exit_code(tmp_path, capsys):
    path = write(tmp_path, "bad.yaml", FIG6C_YAML.replace("n: 4", "n: 0"))
    rc = main(["simulate", "--config", path, "--out", str(tmp_path)])
    assert rc != 0
    assert "n:" in capsys.readouterr().err


def test_cli_analytic_xy_n3(tmp_path):
    rc = main(["analytic", "--model", "xy", "--n", "3", "--j", "5",
               "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "analytic-xy-n3.analytic.txt").read_text()
    assert "nu_12 = 3.5355" in text
    assert "nu_23 = 3.5355" in text
    assert "nu_13 = 7.0711" in text


def test_cli_analytic_aliphatic_order2(tmp_path):
    rc = main(["analytic", "--model", "aliphatic", "--n", "4",
               "--j-gem", "-14", "--j-gauche", "7.5", "--j-anti", "2.5",
               "--order", "2", "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "analytic-aliphatic-n4-order2.analytic.txt").read_text()
    assert "-0.4464" in text            # pt2 estimate
    assert "0.5909" in text             # exact splitting alongside it


def test_cli_blocks_xy(tmp_path):
    rc = main(["blocks", "--model", "xy", "--n", "4", "--j", "5",
               "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "blocks-xy-n4.blocks.txt").read_text()
    for k, size in ((0, 1), (1, 4), (2, 6), (3, 4), (4, 1)):
        assert f"block k={k}  size={size}" in text
    assert "inter-block couplings: 0" in text


def test_cli_blocks_aliphatic(tmp_path):
    rc = main(["blocks", "--model", "aliphatic", "--n", "2",
               "--j-gem", "-14", "--j-gauche", "7.5", "--j-anti", "2.5",
               "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "blocks-aliphatic-n2.blocks.txt").read_text()
    assert "nonzero off-diagonal couplings: 2" in text
    assert text.count("2.5000 Hz") >= 2
    assert "type-I" in text and "type-II" in text


def test_cli_preset_dss(tmp_path, capsys):
    rc = main(["preset", "dss-additivity", "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "dss-additivity.report.txt").read_text()
    assert "additivity" in text
    assert "0.0000 Hz" in text


def test_cli_preset_fig6a_report_flags_splits(tmp_path):
    rc = main(["preset", "fig6a", "--out", str(tmp_path)])
    assert rc == 0
    text = (tmp_path / "fig6a.S0S0S0T0.report.txt").read_text()
    assert "nu_12/nu_34: split by 0.5909 Hz" in text
    assert "nu_13/nu_24: split by 0.5909 Hz" in text
    assert "nu_23: single line" in text
    assert "nu_14: single line" in text
    assert "pt2 splitting estimate (1/4 dJ^2/J_gem): -0.4464 Hz" in text


def test_cli_preset_fig7_grid_and_mirror_pairs(tmp_path):
    rc = main(["preset", "fig7", "--threads", "4", "--out", str(tmp_path)])
    assert rc == 0
    specs = sorted(tmp_path.glob("fig7-*.spec.csv"))
    assert len(specs) == 2 * (2 + 3 + 4 + 5)

    def magnitudes(name):
        rows = (tmp_path / name).read_text().strip().splitlines()[1:]
        return [float(r.split(",")[1]) for r in rows]

    for n in (2, 4):
        for site in range(1, n + 1):
            a = magnitudes(f"fig7-n{n}-inv1.site{site}.spec.csv")
            b = magnitudes(f"fig7-n{n}-inv{n}.site{n + 1 - site}.spec.csv")
            assert max(abs(x - y) for x, y in zip(a, b)) < 1e-8


def test_cli_preset_blocks(tmp_path):
    rc = main(["preset", "blocks-fig3", "--out", str(tmp_path)])
    assert rc == 0
    xy_text = (tmp_path / "blocks-fig3-xy.blocks.txt").read_text()
    assert "inter-block couplings: 0" in xy_text
    ali_text = (tmp_path / "blocks-fig3-aliphatic.blocks.txt").read_text()
    assert "inter-block couplings: 12" in ali_text
    assert "type-II" in ali_text
    assert "full singlet-triplet basis matrix (256 states)" in ali_text
    rc = main(["preset", "blocks-fig5", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "blocks-fig5-aliphatic.blocks.txt").exists()


def test_cli_spectrum_full_engine_matches_restricted(tmp_path):
    base = ["spectrum", "--model", "aliphatic", "--n", "2",
            "--j-gem", "-14", "--j-gauche", "7.5", "--j-anti", "2.5",
            "--t0-sites", "1,2", "--signs", "1,-1", "--observe", "T0S0"]
    for engine in ("restricted", "full"):
        rc = main(base + ["--engine", engine, "--out", str(tmp_path / engine)])
        assert rc == 0

    def magnitudes(engine):
        path = tmp_path / engine / "scenario.T0S0.spec.csv"
        rows = path.read_text().strip().splitlines()[1:]
        return [float(r.split(",")[1]) for r in rows]

    a, b = magnitudes("restricted"), magnitudes("full")
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-8


def test_cli_preset_fig1_output_count(tmp_path, capsys):
    rc = main(["preset", "fig1", "--out", str(tmp_path)])
    assert rc == 0
    files = sorted(tmp_path.glob("fig1.site*.traj.csv"))
    assert len(files) == 8
    out = capsys.readouterr().out
    assert "conserved <total_Iz>" in out


def test_cli_deterministic_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        rc = main(["spectrum", "--model", "xy", "--n", "3", "--j", "5",
                   "--flips", "1", "--observe", "all", "--threads", "2",
                   "--out", str(out)])
        assert rc == 0
    for name in ("scenario.site1.spec.csv", "scenario.site2.spec.csv",
                 "scenario.site3.spec.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cli_unknown_preset(capsys):
    with pytest.raises(SystemExit):
        main(["preset", "nope"])
