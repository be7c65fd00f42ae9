import cmath
import json
import math

import numpy as np
import pytest

import iqpflow


def statevector_energy(problem, amps):
    n = problem.n
    total = 0.0
    for x, a in enumerate(amps):
        s = [-1 if (x >> i) & 1 else 1 for i in range(n)]
        e = sum(problem.h[i] * s[i] for i in range(n))
        e += sum(v * s[i] * s[j] for i, j, v in problem.J)
        total += abs(a) ** 2 * e
    return total


def random_params(n, seed):
    rng = np.random.default_rng(seed)
    p = iqpflow.IqpParams(n)
    p.phi = list(rng.uniform(-2, 2, n))
    p.theta_lin = list(rng.uniform(-2, 2, n))
    p.theta_quad = [(i, j, float(rng.uniform(-2, 2))) for i in range(n) for j in range(i + 1, n)]
    return p


def test_energy_matches_amplitudes():
    problem = iqpflow.sk_random(5, 3, True)
    p = random_params(5, 1)
    amps = iqpflow.iqp_state(p)
    assert amps.shape == (32,)
    assert abs(np.vdot(amps, amps) - 1) < 1e-12
    assert iqpflow.energy(problem, p) == pytest.approx(statevector_energy(problem, amps), abs=1e-12)


def test_gradient_and_gram_shapes():
    problem = iqpflow.sk_random(4, 2, False)
    p = random_params(4, 2)
    e, g = iqpflow.energy_and_gradient(problem, p)
    assert len(g) == 4 * 7 // 2
    h = 1e-6
    v = p.flatten()
    up, dn = list(v), list(v)
    up[3] += h
    dn[3] -= h
    fd = (iqpflow.energy(problem, iqpflow.IqpParams.unflatten(4, up))
          - iqpflow.energy(problem, iqpflow.IqpParams.unflatten(4, dn))) / (2 * h)
    assert g[3] == pytest.approx(fd, abs=1e-7)
    a = iqpflow.gram(p)
    assert a.shape == (14, 14)
    assert np.allclose(a[4:, 4:], np.eye(10) / 4)


def test_qaoa_embedding():
    problem = iqpflow.sk_random(6, 7, True)
    q, e = iqpflow.optimize_qaoa(problem)
    a = iqpflow.qaoa_state(problem, q.gamma, q.beta)
    b = iqpflow.iqp_state(iqpflow.embed_qaoa(problem, q))
    assert abs(np.vdot(a, b)) == pytest.approx(1.0, abs=1e-10)
    assert iqpflow.energy(problem, iqpflow.embed_qaoa(problem, q)) == pytest.approx(e, abs=1e-12)


def test_flow_descends():
    problem = iqpflow.sk_random(5, 4, False)
    q, _ = iqpflow.optimize_qaoa(problem)
    records, termination = iqpflow.flow(problem, iqpflow.embed_qaoa(problem, q),
                                        json.dumps({"tau_max": 5.0, "mode": "varqite"}))
    assert termination in ("tau_max", "converged", "gram_singular")
    energies = [r["energy"] for r in records]
    assert energies[-1] <= energies[0]
    assert all(r["gram_condition"] is not None for r in records)


def test_run_report_and_fit():
    problem = iqpflow.sk_random(7, 11, True)
    report = iqpflow.run(problem, {"flow": {"tau_max": 10.0}})
    assert len(report["circuits"]) == 4
    assert 0.0 <= report["best_approximation_ratio"] <= 1.0
    p = iqpflow.boltzmann(problem, 0.8)
    fit = iqpflow.fit_beta(problem, p)
    assert fit.beta_eff == pytest.approx(0.8, rel=1e-6)


def test_counterexample():
    report = iqpflow.counterexample()
    assert report["passed"]
    assert all(abs(c["energy"] + 2) < 1e-10 for c in report["checks"])


def test_json_round_trip_and_errors():
    problem = iqpflow.sk_random(4, 9, True)
    back = iqpflow.IsingProblem.from_json(problem.to_json())
    assert back.h == problem.h and back.J == problem.J
    with pytest.raises(ValueError):
        iqpflow.IqpParams.unflatten(3, [0.0] * 5)
    with pytest.raises(ValueError):
        iqpflow.sk_random(1, 0)
