import math

import numpy as np
import pytest

import cimeter


def test_two_point_dcov_and_hsic_agree():
    x = np.array([0.0, 1.0])
    y = np.array([0.0, 1.0])
    d = cimeter.dcov_v(x, y)
    h = cimeter.hsic_v(x, y, kernel_x="distance", kernel_y="distance")
    assert d["value"] == pytest.approx(0.25, abs=1e-14)
    assert h["value"] == pytest.approx(0.25, abs=1e-14)


def test_gram_matrix_gaussian_diagonal():
    pts = np.random.default_rng(0).normal(size=(5, 2))
    k = cimeter.gram_matrix("gaussian:1", pts)
    assert k.shape == (5, 5)
    assert np.allclose(np.diag(k), 1.0)
    assert np.allclose(k, k.T)


def test_hscic_equals_gcdcov_with_distance_kernels():
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(12, 2)), rng.normal(size=12)
    w = rng.random(12)
    w /= w.sum()
    h = cimeter.hscic_at(x, y, w, kernel_x="distance@1,-1", kernel_y="distance@0.5")["value"]
    g = cimeter.gcdcov_at(x, y, w)["value"]
    assert h == pytest.approx(g, rel=1e-10)


def test_conditional_weights_rows_sum_to_one():
    z = np.linspace(0.0, 1.0, 7)
    w = cimeter.conditional_weights(z, "box", 10.0)
    assert np.allclose(w.sum(axis=1), 1.0)
    assert np.allclose(w, 1.0 / 7.0)


def test_estimators_on_generated_data():
    d = cimeter.generate("gaussian_ci", n=60, seed=3)
    for fn in (cimeter.avg_hscic, cimeter.hscic_vstat, cimeter.hscic_trace, cimeter.gcdcov_avg):
        r = fn(d["x"], d["y"], d["z"])
        assert math.isfinite(r["value"]) and r["value"] >= 0.0
    assert cimeter.hscic_trace(d["x"], d["y"], d["z"])["params"]["lambda"] == pytest.approx(1e-3)


def test_trace_matches_operator_oracle():
    d = cimeter.generate("gaussian_ci", n=16, seed=4)
    kx = cimeter.gram_matrix("gaussian:1", d["x"])
    ky = cimeter.gram_matrix("gaussian:1", d["y"])
    kz = cimeter.gram_matrix("gaussian:1", d["z"])
    t = cimeter.hscic_trace(d["x"], d["y"], d["z"], "gaussian:1", "gaussian:1", "gaussian:1", lam=0.1)["value"]
    assert t == pytest.approx(cimeter.operator_hs_oracle(kx, ky, kz, 0.1), rel=1e-8)


def test_permutation_test_is_deterministic_and_detects_dependence():
    d = cimeter.generate("gaussian_dep", n=100, seed=5, coupling=1.0)
    a = cimeter.local_permutation_test(d["x"], d["y"], d["z"], B=99, seed=9)
    b = cimeter.local_permutation_test(d["x"], d["y"], d["z"], B=99, seed=9)
    assert a == b
    assert a["p_value"] <= 0.05


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        cimeter.gram_matrix("no-such-kernel", np.zeros((2, 1)))
    with pytest.raises(cimeter.InputError):
        cimeter.hscic_trace(np.zeros(3), np.zeros(3), np.zeros(3), lam=-1.0)


def test_verify_suite_passes():
    checks = cimeter.verify(seed=2)
    assert checks and all(c["passed"] for c in checks)


def test_cp_constant():
    assert cimeter.cp_constant(1) == pytest.approx(math.pi, rel=1e-12)
    assert cimeter.cp_constant(2) == pytest.approx(2 * math.pi, rel=1e-12)
