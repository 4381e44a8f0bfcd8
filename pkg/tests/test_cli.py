import math

import numpy as np
import pytest

from cheb_bernstein import ConfigError, ExperimentConfig, parse_config
from cheb_bernstein.cli import (EXIT_CONFIG, EXIT_INTERLACING, EXIT_NONEXISTENCE, EXIT_NOT_ECT,
                                EXIT_OK, cmd_chain, run)
from cheb_bernstein.config import parse_number, select_function


def read_csv(path):
    lines = path.read_text().splitlines()
    meta = {}
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value
    body = [line for line in lines if not line.startswith("#")]
    header = body[0].split(",")
    rows = [line.split(",") for line in body[1:]]
    return meta, header, rows


def column(header, rows, name):
    i = header.index(name)
    return np.array([float(r[i]) for r in rows])


@pytest.fixture
def run_cli(tmp_path):
    def _run(verb, text, *extra):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(text)
        out = tmp_path / "out.csv"
        code = run([verb, "--config", str(cfg), "--out", str(out), *extra])
        return code, out
    return _run


@pytest.mark.parametrize("text, value", [("2.5", 2.5), ("pi", math.pi), ("3*pi/2", 1.5 * math.pi),
                                         ("-1e-3", -1e-3), ("2*(pi-1)", 2 * (math.pi - 1))])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["__import__('os')", "pi**2", "1/0", "abc"])
def test_parse_number_rejects(text):
    with pytest.raises(ConfigError):
        parse_number(text)


def test_parse_config_roundtrip():
    cfg = parse_config("""
        # comment
        kind = exponential
        lambdas = 0, 1, 2   # trailing comment
        interval = 0, 2
        experiment = arama
        force = true
        levels = 1,2
    """)
    assert cfg.lambdas == (0.0, 1.0, 2.0) and cfg.interval == (0.0, 2.0)
    assert cfg.force and cfg.levels == (1, 2) and cfg.top_degree() == 2
    assert cfg.pair().f1.name == "exp(1x)"


@pytest.mark.parametrize("text", ["kind = spline", "degree = two", "colour = red", "degree",
                                  "degree = 2\ndegree = 3", "grid = 2", "interval = 0,1,2",
                                  "experiment = nothing", "force = maybe"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_default_pairs():
    assert ExperimentConfig(kind="exponential", lambdas=(2.0, 2.0)).pair().f1.name == "x^1*exp(2x)"
    pair = ExperimentConfig(kind="exponential", lambdas=(1.0, -1.0)).pair()
    assert pair.f0.name == "exp(-1x)" and pair.f1.name == "exp(1x)"
    with pytest.raises(ConfigError):
        ExperimentConfig(degree=2, f0="identity", f1="constant-one").pair()


def test_selectors():
    x = np.linspace(0.1, 1, 5)
    np.testing.assert_allclose(select_function("power-2")(x), x ** 2)
    np.testing.assert_allclose(select_function("power-0.5")(x), np.sqrt(x))
    np.testing.assert_allclose(select_function("exponential--1.5")(x), np.exp(-1.5 * x))
    np.testing.assert_allclose(select_function("x-exponential-2")(x), x * np.exp(2 * x))
    with pytest.raises(ConfigError):
        select_function("gamma")


def test_chain_levels_validated():
    with pytest.raises(ConfigError):
        ExperimentConfig(degree=4, levels=(1, 3, 2)).chain_levels()
    with pytest.raises(ConfigError):
        ExperimentConfig(degree=2, levels=(1, 2, 3)).chain_levels()
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="trig", b=2.0).chain_levels()


def test_build_classical(run_cli):
    code, out = run_cli("build", "kind = polynomial\ndegree = 3\n")
    assert code == EXIT_OK
    meta, header, rows = read_csv(out)
    assert header == ["k", "t_k", "alpha_k"]
    np.testing.assert_allclose(column(header, rows, "t_k"), [0, 1 / 3, 2 / 3, 1], atol=1e-12)
    assert meta["node_order"] == "strictly-increasing"
    assert float(meta["fixing_residual_f1"]) < 1e-9


def test_build_power_pair(run_cli):
    code, out = run_cli("build", "degree = 4\nf1 = power-2\n")
    meta, header, rows = read_csv(out)
    t = column(header, rows, "t_k")
    assert code == EXIT_OK and meta["node_order"] == "nondecreasing"
    assert t[0] == t[1] == 0.0


def test_build_trig_nonexistence(run_cli, capsys):
    code, _ = run_cli("build", "kind = trig\nb = 5\n")
    assert code == EXIT_NONEXISTENCE
    assert "index" in capsys.readouterr().err


def test_build_not_ect(run_cli):
    code, _ = run_cli("build", "kind = exponential\nlambdas = 0,1,2,3,4,5,6,7,8,9,10,11,12\n")
    assert code == EXIT_NOT_ECT


def test_missing_config_file(tmp_path):
    assert run(["build", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG


@pytest.mark.parametrize("text", ["kind = polynomial\ndegree = 6\n",
                                  "kind = exponential\nlambdas = 0,1,2,3,4,5\n"])
def test_chain_all_interlaced(run_cli, text):
    code, out = run_cli("chain", text)
    assert code == EXIT_OK
    meta, header, rows = read_csv(out.with_name("out-interlacing.csv"))
    assert meta["all_interlaced"] == "true"
    assert all(v in ("true", "") for r in rows for v in r[1:])


def test_chain_misordered(run_cli):
    code, _ = run_cli("chain", "degree = 4\nlevels = 1,3,2\n")
    assert code == EXIT_CONFIG


def test_chain_violation_exit_code(monkeypatch, run_cli):
    import cheb_bernstein.cli as cli
    real = cli.interlacing_matrix

    def broken(chain):
        M = real(chain)
        M[0, 0] = False
        return M

    monkeypatch.setattr(cli, "interlacing_matrix", broken)
    code, out = run_cli("chain", "degree = 3\n")
    assert code == EXIT_INTERLACING
    meta, _, _ = read_csv(out.with_name("out-interlacing.csv"))
    assert meta["all_interlaced"] == "false"


def test_shape_monotone_sequence(run_cli):
    code, out = run_cli("shape", "experiment = monotone-sequence\ndegree = 6\nfunction = exp\n")
    meta, header, rows = read_csv(out)
    assert code == EXIT_OK and meta["verdict"] == "decreasing to f"
    f = column(header, rows, "f")
    cols = [column(header, rows, f"B_{n} f") for n in range(1, 7)]
    for hi, lo in zip(cols, cols[1:]):
        assert np.all(hi - lo >= -1e-12) and np.all(lo - f >= -1e-12)


def test_shape_trig_counterexample(run_cli):
    code, out = run_cli("shape", "experiment = trig-counterexample\nb = 4\n")
    meta, header, rows = read_csv(out)
    assert code == EXIT_OK and meta["verdict"] == "not convex"
    np.testing.assert_allclose(column(header, rows, "F''(0)"), math.sin(4), atol=1e-10)


def test_shape_majorization_span(run_cli):
    code, out = run_cli("shape", "experiment = majorization\ndegree = 4\nfunction = span:2,-3\n")
    meta, header, rows = read_csv(out)
    assert code == EXIT_OK
    assert np.abs(column(header, rows, "diff")).max() < 1e-10


@pytest.mark.parametrize("text", [
    "experiment = arama\ndegree = 5\nfunction = abs-center",
    "experiment = preserve-convexity\nkind = trig\nb = 2\nfunction = exp",
    "experiment = preserve-monotone\ndegree = 4\nfunction = power-3",
    "experiment = sign-consistency\nkind = trig\nb = 2\norder = 3\ntrials = 300",
])
def test_shape_experiments_run(run_cli, text):
    code, out = run_cli("shape", text + "\n")
    meta, _, rows = read_csv(out)
    assert code == EXIT_OK and rows
    assert meta["verdict"] in ("non-negative decomposition", "convex", "preserved", "sign consistent")


def test_preserve_convexity_refuses_nonmonotone(run_cli):
    code, _ = run_cli("shape", "experiment = preserve-convexity\nkind = trig\nb = 4\n")
    assert code == 1
    code, out = run_cli("shape", "experiment = preserve-convexity\nkind = trig\nb = 4\nforce = true\n")
    assert code == EXIT_OK


def test_trig_scan(run_cli):
    code, out = run_cli("trig-scan", "b_values = 1, 2, 3, pi, 4, 4.4, 4.6, 5\n")
    meta, header, rows = read_csv(out)
    assert code == EXIT_OK and len(rows) == 8
    regimes = [r[header.index("regime")] for r in rows]
    assert regimes == ["strict-increasing"] * 3 + ["coalesced", "reversed", "reversed",
                                                   "nonexistent", "nonexistent"]
    assert [r[header.index("pipeline_exists")] for r in rows] == ["true"] * 6 + ["false"] * 2
    assert float(meta["rho0"]) == pytest.approx(4.4934, abs=5e-4)


def test_trig_scan_grid(run_cli):
    code, out = run_cli("trig-scan", "", "--grid", "12")
    _, header, rows = read_csv(out)
    b = column(header, rows, "b")
    assert code == EXIT_OK and len(b) == 12 and 0 < b.min() and b.max() < 2 * math.pi


@pytest.mark.parametrize("verb, text", [
    ("shape", "experiment = preserve-convexity\ndegree = 5\nfunction = abs-center\n"),
    ("shape", "experiment = sign-consistency\ndegree = 4\norder = 3\ntrials = 200\n"),
    ("chain", "kind = exponential\nlambdas = 0,1,2,3\n"),
])
def test_byte_identical_output(tmp_path, verb, text):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(text)
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        assert run([verb, "--config", str(cfg), "--out", str(out), "--seed", "11"]) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_seed_changes_sampled_output(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("experiment = sign-consistency\ndegree = 4\ntrials = 50\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["shape", "--config", str(cfg), "--out", str(a), "--seed", "1"])
    run(["shape", "--config", str(cfg), "--out", str(b), "--seed", "2"])
    assert a.read_bytes() != b.read_bytes()


def test_stdout_output(capsys):
    assert run(["trig-scan", "--grid", "3"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("# verb: trig-scan")
