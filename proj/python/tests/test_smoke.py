import math

import numpy as np
import pytest

import gpsens


def test_se_kernel_values():
    k = gpsens.Kernel.se(1.0, 1.0)
    assert k(np.array([0.0]), np.array([0.0])) == 1.0
    assert k(np.array([0.0]), np.array([1.0])) == pytest.approx(math.exp(-0.5), rel=1e-14)
    g = k.gram(np.array([[0.0], [1.0], [2.5]]))
    assert g.shape == (3, 3)
    assert np.allclose(g, g.T)


def test_parse_and_json_round_trip():
    k = gpsens.Kernel.parse("se(2, 0.5!) + matern52(1, 1)")
    again = gpsens.Kernel.from_json(k.to_json())
    x = np.linspace(0, 3, 5).reshape(-1, 1)
    assert np.array_equal(k.gram(x), again.gram(x))
    assert "1.se.lengthscale" in k.hyperparameters()


def test_posterior_one_point():
    gp = gpsens.FittedGp(np.array([[0.4]]), np.array([1.0]), gpsens.Kernel.se(1, 1), 1.0)
    mean, var = gp.posterior(np.array([0.4]))
    assert mean == pytest.approx(0.5)
    assert var == pytest.approx(0.5)


def test_fit_and_spectral_search():
    x, y = gpsens.generate_synthetic(0)
    assert x.shape == (35, 1)
    gp = gpsens.fit_mmle(x, y, gpsens.Kernel.parse("se(1!, 1)"), restarts=2)
    assert gp.gradient_norm < 1e-4
    f = gpsens.Functional.relative_change(gp, np.array([5.29]))
    assert f(gp) == 0.0
    value, k1, w, s = gpsens.maximize_spectral(gp, f, 0.3, grid_size=40, steps=30, restarts=2)
    assert value > 0.0
    assert f(gp.with_kernel(k1)) == pytest.approx(value, rel=1e-12)
    s0 = gpsens.density_of_kernel(gp.kernel, w)
    assert np.all(s <= 1.3 * s0 + 1e-15)
    assert np.all(s >= 0.7 * s0 - 1e-15)
    cmp = gpsens.frobenius_comparison(gp, gp.kernel, samples=20)
    assert cmp["candidate"] == 0.0
    assert cmp["interchangeable"]


def test_errors_are_typed():
    with pytest.raises(gpsens.ValidationError):
        gpsens.Kernel.se(-1.0, 1.0).gram(np.zeros((2, 1)))
    with pytest.raises(gpsens.Error):
        gpsens.Kernel.parse("nope(1)")


def test_run_small_config():
    config = {
        "data": {"source": "synthetic", "seed": 1},
        "kernel": "se(1!, 1)",
        "functional": {"kind": "relative-change", "x_star": [5.29]},
        "delta": 2.0,
        "engine": {"type": "spectral", "schedule": [0.2, 0.5],
                   "spectral": {"grid_size": 30, "steps": 20, "restarts": 2}},
        "diagnostics": {"samples": 20, "draw_points": 20},
    }
    report, code = gpsens.run(config)
    assert report["schema"] == "gpsens-report/1"
    assert code in (0, 10)
    assert gpsens.reassemble_verdict(report) == report["verdict"]
    with pytest.raises(gpsens.ConfigError):
        gpsens.run({**config, "engine": {"type": "spectral", "schedule": [-0.1]}})
