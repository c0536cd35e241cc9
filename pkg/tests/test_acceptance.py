"""Acceptance gate: one test per numbered criterion, at the stated
tolerances and runtime budgets, each printing a PASS/FAIL line.

Budgets (seconds) where stated: psi certification 30, pairing 60,
iteration ODE 60, map simulation 120, ODE simulation 600, omega ODEs 300,
sphere 600.
"""

import pytest

from tmflow import verify


def _announce(num, rep, budget=None):
    status = "PASS" if rep["pass"] else "FAIL"
    line = (f"[criterion {num}] {status} suite={rep['suite']} "
            f"cases={rep['cases']} failures={rep['failures']} "
            f"worst_margin={rep['worst_margin']:.3e} "
            f"elapsed={rep['elapsed_s']}s")
    print(line)
    assert rep["pass"], line
    if budget is not None:
        assert rep["elapsed_s"] < budget, f"criterion {num} over budget: {line}"


def test_criterion_1_psi_contraction_interval_certified():
    rep = verify.suite_psi_contraction(samples=100_000)
    _announce(1, rep, budget=30)
    assert rep["cases"] == 100_000


def test_criterion_2_sigma_contraction():
    rep = verify.suite_sigma_contraction(samples=10_000)
    _announce(2, rep)
    assert rep["cases"] == 10_000


def test_criterion_3_pairing_bijectivity_and_robustness():
    rep = verify.suite_pairing(limit=50, perturbed=10_000)
    _announce(3, rep, budget=60)
    assert rep["cases"] == 50 ** 3 + 10_000


def test_criterion_4_targeting_lemmas():
    rep = verify.suite_targeting(instances=200)
    _announce(4, rep)
    assert rep["cases"] == 200


def test_criterion_5_iteration_ode_staircase():
    rep = verify.suite_iteration_ode()
    _announce(5, rep, budget=60)
    assert [w[1] for w in rep["windows"]] == [2, 4, 16, 65536]


def test_criterion_6_map_simulation_three_noise_modes():
    rep = verify.suite_map_simulation(steps=20, delta="0.1", offset="0.19")
    _announce(6, rep, budget=120)
    # 2 machines x 3 modes x 21 iterates
    assert rep["cases"] == 2 * 3 * 21


def test_criterion_7_ode_simulation_windows_and_halting():
    rep = verify.suite_ode_simulation(steps=10)
    _announce(7, rep, budget=600)
    assert len(rep["runs"]) == 4


def test_criterion_8_omega_odes():
    rep = verify.suite_omega_ode(zmax=30)
    _announce(8, rep, budget=300)
    assert rep["cases"] == 2 * 31 * 2


def test_criterion_9_sphere_transport():
    rep = verify.suite_sphere(samples=10_000, steps=5)
    _announce(9, rep, budget=600)
    assert rep["decoded_steps"] == 6


def test_criterion_10_growth_probe_is_flagged_evidence():
    rep = verify.suite_growth_probe(degree=4)
    _announce(10, rep)
    assert rep["evidence_not_proof"] is True
    assert rep["degree"] <= 8
