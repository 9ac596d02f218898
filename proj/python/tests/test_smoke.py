"""Smoke tests for the _qram extension module.

Usage: python3 test_smoke.py <dir-containing-_qram.so>
"""

import json
import sys

if len(sys.argv) > 1:
    sys.path.insert(0, sys.argv[1])

import _qram


def test_compile_and_report():
    report = _qram.step_report("parallel", 4, 3, scheme="qutrit")
    assert report["address_setting"] == 11
    assert report["uncomputing"] == 11
    assert report["total"] == 8 * 4 + 2 * 3 - 3

    prog = json.loads(_qram.compile_json("nonparallel", 2, 1, scheme="qutrit"))
    assert prog["protocol"] == "nonparallel"
    assert sum(1 for s in prog["steps"] if s["phase"] == "address_setting") == 5
    assert _qram.validate_json(json.dumps(prog)) == []


def test_verify_semantics():
    for proto, kwargs in [
        ("parallel", {}),
        ("nonparallel", {}),
        ("hb-parallel", {"c": 2}),
        ("hybrid-parallel", {"m": 1}),
    ]:
        out = _qram.verify(proto, 2, 2, scheme="qutrit", **kwargs)
        assert out["pass"], (proto, out)


def test_fidelity_estimate():
    est = _qram.estimate_fidelity("parallel", 3, 2, gamma=0.0, p=0.0, trajectories=200)
    assert abs(est["mean"] - 1.0) < 1e-12
    assert est["stderr"] == 0.0

    noisy = _qram.estimate_fidelity(
        "parallel", 3, 2, gamma=1e-3, p=1e-3, trajectories=500, threads=2
    )
    assert 0.0 < noisy["mean"] < 1.0
    assert noisy["lambda_mean"] <= 1.0


def test_metrics():
    assert _qram.cost_factor("parallel", 32, 32) == 4096
    assert _qram.cost_factor("nonparallel", 32, 32) == 1048576
    assert _qram.optimal_bandwidth(4, 16) == 4

    samples = []
    for n in range(3, 7):
        for k in range(3, 7):
            eps = 2e-5
            samples.append((n, k, eps, 1.0 - 0.5 * (2.0 * n * n + n * k) * eps))
    fit = _qram.fit_error_model(samples)
    assert abs(fit["A"] - 0.5) < 1e-6
    assert abs(fit["C"] - 2.0) < 1e-6


if __name__ == "__main__":
    test_compile_and_report()
    test_verify_semantics()
    test_fidelity_estimate()
    test_metrics()
    print("python smoke tests passed")
