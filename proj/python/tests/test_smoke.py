"""End-to-end smoke tests of the Python bindings and the CLI binary.

Run via ctest with PYTHONPATH pointing at the source ``python/`` directory,
PRFOPT_CORE_DIR at the built extension, and PRFOPT_CLI at the CLI binary.
"""

import itertools
import json
import os
import subprocess

import numpy as np
import pytest

import prfopt


def enumerate_pm1(n):
    for bits in itertools.product([-1.0, 1.0], repeat=n):
        yield np.array(bits)


def outcome_weight(x, y):
    return float(np.prod(np.where(x > 0, (1 + y) / 2, (1 - y) / 2)))


def test_moments_match_numpy_enumeration():
    rng = np.random.default_rng(7)
    n = 5
    g = rng.normal(size=(n, n))
    g = (g + g.T) / 2
    z = rng.normal(size=n)
    y = rng.uniform(-0.9, 0.9, size=n)

    qf = ql = qs = 0.0
    for x in enumerate_pm1(n):
        w = outcome_weight(x, y)
        quad = float(x @ g @ x)
        lin = float(z @ x)
        qf += w * (quad + lin)
        ql += w * quad * lin
        qs += w * quad * quad

    assert prfopt.mean_qf(g, z, y) == pytest.approx(qf, rel=1e-10)
    assert prfopt.mean_ql(g, z, y) == pytest.approx(ql, rel=1e-10)
    assert prfopt.mean_qs(g, y) == pytest.approx(qs, rel=1e-10)
    assert prfopt.mean_qs(g, y, impl="literal_kron") == pytest.approx(
        qs, rel=1e-10
    )


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(11)
    n = 4
    g = rng.normal(size=(n, n))
    g = (g + g.T) / 2
    z = rng.normal(size=n)
    y = rng.uniform(-0.8, 0.8, size=n)
    h = 1e-6
    for fn, grad in [
        (lambda v: prfopt.mean_qf(g, z, v), prfopt.grad_qf(g, z, y)),
        (lambda v: prfopt.mean_ql(g, z, v), prfopt.grad_ql(g, z, y)),
        (lambda v: prfopt.mean_qs(g, v), prfopt.grad_qs(g, y)),
    ]:
        fd = np.array(
            [
                (fn(y + h * e) - fn(y - h * e)) / (2 * h)
                for e in np.eye(n)
            ]
        )
        assert np.allclose(grad, fd, rtol=1e-6, atol=1e-6)


def test_expectation_exact_against_manual_sum():
    values = [-1.0, 0.0, 1.0]
    probs = np.array([[0.2, 0.5, 0.3], [0.6, 0.1, 0.3]])
    f = lambda x: float(3.0 * x[0] - x[0] * x[1] + 0.5)
    manual = sum(
        probs[0][i] * probs[1][j] * f(np.array([values[i], values[j]]))
        for i in range(3)
        for j in range(3)
    )
    assert prfopt.expectation_exact(f, probs, values) == pytest.approx(
        manual, rel=1e-14
    )


def test_sampling_is_seeded_and_respects_the_alphabet():
    values = [-1.0, 1.0]
    probs = np.array([[0.25, 0.75], [0.9, 0.1], [0.5, 0.5]])
    a = prfopt.sample_categorical(probs, values, seed=42, draws=256)
    b = prfopt.sample_categorical(probs, values, seed=42, draws=256)
    c = prfopt.sample_categorical(probs, values, seed=43, draws=256)
    assert a.shape == (256, 3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert set(np.unique(a)) <= set(values)
    assert abs(a[:, 0].mean() - 0.5) < 0.2  # E[x0] = -0.25+0.75 = 0.5


def test_boxqp_transform_identity():
    rng = np.random.default_rng(13)
    w = rng.normal(size=(4, 4))
    w = (w + w.T) / 2
    w_wd, tr = prfopt.boxqp_transform(w)
    assert tr == pytest.approx(np.trace(w), rel=1e-14)
    for x in enumerate_pm1(4):
        assert float(x @ w @ x) == pytest.approx(
            float(x @ w_wd @ x) + tr, rel=1e-12, abs=1e-12
        )


def test_derive_seed_children_are_distinct():
    seeds = {
        prfopt.derive_seed(1, a, b) for a in range(8) for b in range(8)
    }
    assert len(seeds) == 64


def test_sinr_instance_shapes_and_surrogate_vertex_identity():
    inst = prfopt.sinr_instance(N=6, N_I=1, seed=3)
    r0, c0, k, s = inst["R0"], inst["c0"], inst["K"], inst["s"]
    assert r0.shape == (6, 6) and k.shape == (6, 6)
    assert np.allclose(r0, r0.T) and np.allclose(k, k.T)
    theta = np.sign(np.random.default_rng(5).normal(size=6))
    sinr = (theta @ r0 @ theta + c0 @ theta) / (theta @ k @ theta + s @ theta)
    t1 = prfopt.taylor_surrogate(theta, r0, c0, k, s, order=1)
    t2 = prfopt.taylor_surrogate(theta, r0, c0, k, s, order=2)
    # At a +-1 vertex the distribution is degenerate: both surrogates equal
    # the true ratio.
    assert t1 == pytest.approx(sinr, rel=1e-10)
    assert t2 == pytest.approx(sinr, rel=1e-8)


def test_solvers_return_signs_and_beat_the_aligned_start():
    totals = {}
    for solver in ["E-GD-1", "SSA-B", "SA"]:
        total = 0.0
        for seed in range(5):
            theta, cap = prfopt.solve_sinr(
                8, 1, channel_seed=100 + seed, solver=solver, solver_seed=7
            )
            assert set(np.unique(theta)) <= {-1.0, 1.0}
            total += cap
        totals[solver] = total
    assert totals["E-GD-1"] >= totals["SA"]
    assert totals["SSA-B"] >= totals["SA"]

    theta_a, cap_a = prfopt.solve_sinr(8, 1, 100, "E-GD-1", 7)
    theta_b, cap_b = prfopt.solve_sinr(8, 1, 100, "E-GD-1", 7)
    assert np.array_equal(theta_a, theta_b) and cap_a == cap_b

    theta_opt, cap_opt = prfopt.exhaustive_capacity(8, 1, 100)
    assert cap_opt >= cap_a - 1e-12


def test_ternary_solver_returns_ternary_and_tracks_the_scan():
    theta_ua, ee_ua = prfopt.solve_ee(12, 0, channel_seed=9, solver="UA")
    theta_st, ee_st = prfopt.solve_ee(
        12, 0, channel_seed=9, solver="SSA-T", solver_seed=3
    )
    assert set(np.unique(theta_ua)) <= {-1.0, 0.0, 1.0}
    assert set(np.unique(theta_st)) <= {-1.0, 0.0, 1.0}
    assert ee_ua > 0 and ee_st > 0


def test_cli_reruns_are_byte_identical(tmp_path):
    cli = os.environ.get("PRFOPT_CLI")
    if not cli:
        pytest.skip("PRFOPT_CLI not set")
    spec = {
        "experiment": "capacity_vs_N",
        "sweep": [4, 6],
        "realizations": 2,
        "seed": 5,
        "solvers": ["SA", "E-GD-1"],
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))

    outputs = []
    for name in ["a", "b"]:
        out = tmp_path / name / "res"
        r = subprocess.run(
            [cli, "run", str(spec_path), "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert r.returncode == 0, r.stderr
        outputs.append((out.with_suffix(".csv")).read_bytes())
        sidecar = json.loads((out.with_suffix(".json")).read_text())
        assert sidecar["failures"] == 0
        assert sidecar["rows"] == 4
    assert outputs[0] == outputs[1]
    header = outputs[0].decode().splitlines()[0]
    assert header == "experiment,solver,sweep_var,sweep_value,metric,mean,stderr,R,seed"
