import json
import os
import subprocess

import jsonschema
import numpy as np
import pytest

import roughw

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "schemas")


def load_schema(name):
    with open(os.path.join(SCHEMA_DIR, name)) as f:
        return json.load(f)


def test_driver_roundtrip(tmp_path):
    p = roughw.make_driver("brownian", dim=2, n=128, seed=3, alpha=0.45)
    assert p.n_steps == 128
    assert p.dim == 2
    f = tmp_path / "p.json"
    roughw.save_path(p, str(f))
    q = roughw.load_path(str(f))
    assert np.array_equal(p.values, q.values)
    assert np.array_equal(p.times, q.times)
    with open(f) as fh:
        jsonschema.validate(json.load(fh), load_schema("rough_path.schema.json"))


def test_compatibility_and_geometrization():
    p = roughw.make_driver("brownian", 2, 256, 5, 0.45)
    assert p.chen_residual(10, 100, 200) < 1e-12
    assert not p.is_weak_geometric()
    g = roughw.geometrize(p)
    assert g.is_weak_geometric()
    assert np.array_equal(g.values, p.values)
    dt = p.times[20] - p.times[10]
    assert np.max(np.abs(p.bracket(10, 20) - dt * np.eye(2))) < 1e-12


def test_constant_integrand_is_exact():
    p = roughw.make_driver("pwl-line", 1, 64, 0, 0.5)
    vals = 2.0 * np.ones((65, 1))
    gub = [np.zeros((1, 1)) for _ in range(65)]
    res = roughw.rough_integral(roughw.RowControlledPath(p, vals, gub))
    expect = 2.0 * (p.values[-1, 0] - p.values[0, 0])
    assert abs(res.path.values[-1, 0] - expect) < 1e-12
    assert all(d < 1e-13 for _, d in res.defects)


def test_conversion_check_is_exact():
    p = roughw.make_driver("brownian", 2, 512, 9, 0.45)
    vals = np.stack([np.sin(p.values[:, 0]), np.cos(p.values[:, 1])], axis=1)
    gub = [np.diag([np.cos(p.values[i, 0]), -np.sin(p.values[i, 1])]) for i in range(513)]
    check = roughw.ito_strato_check_path(roughw.RowControlledPath(p, vals, gub))
    assert check.residual_max < 1e-12 * check.scale


def test_rde_against_closed_form():
    p = roughw.make_driver("smooth-tt2", 2, 256, 0, 0.5)
    sol = roughw.solve_rde(roughw.linear_field(0.7, 2), np.array([1.0]), p)
    drift = np.sum(p.values[-1] - p.values[0])
    assert abs(sol.values[-1, 0] - np.exp(0.7 * drift)) < 1e-3


def test_python_field_diverges():
    p = roughw.make_driver("pwl-line", 1, 128, 0, 0.5)
    f = roughw.make_field(1, 1, lambda y: np.exp(y).reshape(1, 1))
    assert f.fd_jacobian
    with pytest.raises(roughw.DivergenceError):
        roughw.solve_rde(f, np.array([10.0]), p)


def test_wentzell_scenarios():
    p = roughw.make_driver("brownian", 2, 256, 3, 0.45)
    rep = roughw.run_wentzell_scenario("h_zero_quadratic", p)
    assert rep.residual_max < 1e-12 * rep.scale
    ladder, reports = roughw.wentzell_scenario_ladder("h_linear", p, 3)
    assert ladder.passed and ladder.exact
    assert len(reports) == 3


def test_transport_translate():
    p = roughw.make_driver("brownian-geo", 1, 256, 3, 0.5)
    solver = roughw.TransportSolver("translate", p)
    xs = np.linspace(-0.4, 0.4, 5)
    sl = solver.slice(256, xs)
    shift = 0.7 * (p.values[256, 0] - p.values[0, 0])
    assert np.max(np.abs(sl.u - (xs + shift) ** 2)) < 1e-8
    assert np.max(np.abs(sl.inversion_residual)) < 1e-10


def test_error_types():
    with pytest.raises(ValueError):
        roughw.make_driver("nope", 1, 16, 0, 0.5)
    with pytest.raises(ValueError):
        roughw.make_driver("brownian", 1, 16, 0, 0.2)
    ito = roughw.make_driver("brownian", 1, 64, 3, 0.45)
    with pytest.raises(roughw.PreconditionError):
        roughw.TransportSolver("translate", ito)


def test_cli_reports_match_schemas(tmp_path):
    cli = os.environ.get("ROUGHW_CLI")
    if not cli or not os.path.exists(cli):
        pytest.skip("CLI binary not supplied via ROUGHW_CLI")
    out = tmp_path / "chen.json"
    subprocess.run(
        [cli, "verify-chen", "--driver", "pwl-line", "--dim", "2", "--n", "128",
         "--triples", "200", "--out", str(out)],
        check=True, capture_output=True)
    with open(out) as fh:
        report = json.load(fh)
    envelope = load_schema("report.schema.json")
    envelope["properties"]["config"] = load_schema("run_config.schema.json")
    jsonschema.validate(report, envelope)
    assert report["pass"] is True
