"""Slower randomized checks live in the acceptance module; these keep
the oracle plumbing honest at small trial counts."""
import numpy as np
import pytest

from rsplab.channels import apply_local, depolarizing, phase_flip
from rsplab.measures import gmqd, rsp_fidelity
from rsplab.oracles import (
    OracleConfig,
    OracleReport,
    bounded_purity_state,
    discord_raising_check,
    fibonacci_sphere,
    ginibre_state,
    gmqd_search_oracle,
    gmqd_suite,
    nonunital_increase_witness,
    protocol_fidelity_oracle,
    protocol_suite,
    random_bell_params,
    random_unitary,
    unital_monotonicity_suite,
)
from rsplab.states import bell_diagonal, bell_eigenvalues

FAST = OracleConfig(seed=7, n_beta=24, n_target=12, n_alpha=64,
                    refine_iters=4)


def test_config_rejects_small_counts():
    for field in ("n_beta", "n_target", "n_alpha", "refine_iters"):
        with pytest.raises(ValueError):
            OracleConfig(**{field: 3})


def test_report_checks_abs_err():
    with pytest.raises(ValueError):
        OracleReport(estimate=1.0, reference=0.5, abs_err=0.1,
                     trials=1, seed=0, config={})


def test_report_as_dict_keys():
    rep = OracleReport(estimate=1.0, reference=0.5, abs_err=0.5,
                       trials=3, seed=9, config={"n_beta": 24})
    assert sorted(rep.as_dict()) == ["abs_err", "config", "estimate",
                                     "reference", "seed", "trials"]


def test_fibonacci_sphere_is_unit_and_spread():
    pts = fibonacci_sphere(200)
    assert pts.shape == (200, 3)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    # mean of a well spread set sits near the origin
    assert np.linalg.norm(pts.mean(axis=0)) < 0.02


def test_protocol_oracle_named_states():
    rep = protocol_fidelity_oracle(bell_diagonal(-1.0, -1.0, -1.0), FAST)
    assert rep.reference == pytest.approx(1.0, abs=1e-12)
    assert rep.abs_err <= 5e-3

    rep = protocol_fidelity_oracle(bell_diagonal(0.0, 0.0, 0.0), FAST)
    assert rep.reference == 0.0
    assert rep.estimate <= 5e-3

    rep = protocol_fidelity_oracle(bell_diagonal(0.5, 0.0, -0.5), FAST)
    assert rep.reference == pytest.approx(0.125, abs=1e-12)
    assert rep.abs_err <= 5e-3


def test_protocol_oracle_random_states():
    # the alpha grid undershoots each payoff while the beta grid can
    # overshoot the minimum, so the error is two sided
    rng = np.random.default_rng(5)
    for _ in range(5):
        s = bounded_purity_state(rng)
        rep = protocol_fidelity_oracle(s, FAST)
        assert rep.abs_err <= 2e-2


def test_gmqd_oracle_named_states():
    rep = gmqd_search_oracle(bell_diagonal(-1.0, -1.0, -1.0), FAST)
    assert rep.reference == pytest.approx(1.0, abs=1e-12)
    assert rep.abs_err <= 1e-3

    rep = gmqd_search_oracle(bell_diagonal(0.5, 0.0, -0.5), FAST)
    assert rep.reference == pytest.approx(0.125, abs=1e-12)
    assert rep.abs_err <= 1e-3


def test_gmqd_oracle_upper_bounds():
    # restricting the minimization leaves the estimate above the true value
    rng = np.random.default_rng(11)
    for _ in range(5):
        s = ginibre_state(rng)
        rep = gmqd_search_oracle(s, FAST)
        assert rep.estimate >= rep.reference - 1e-9


def test_monotonicity_small_run():
    rep = unital_monotonicity_suite(n_trials=300, seed=42)
    assert rep.passed
    assert rep.trials == 300
    assert rep.estimate <= 1e-9  # worst fidelity increase seen


def test_unital_pair_decreases_fidelity():
    before = bell_diagonal(-1.0, -1.0, -1.0)
    after = apply_local(phase_flip(0.3), depolarizing(0.5), before)
    # E' = diag(1, 1, -1) scaled by (0.4 on x/y, 1 on z) and 0.5 overall
    assert rsp_fidelity(after) == pytest.approx(0.04, abs=1e-12)
    assert rsp_fidelity(after) < rsp_fidelity(before)
    assert gmqd(after) >= rsp_fidelity(after) - 1e-12


def test_nonunital_witness():
    rep = nonunital_increase_witness()
    assert rep.passed
    assert rep.estimate == pytest.approx(0.072949, abs=1e-6)
    assert rep.abs_err <= 1e-9


def test_discord_raising_check():
    rep = discord_raising_check()
    assert rep.passed
    assert rep.reference == 0.25
    assert rep.abs_err <= 1e-10


def test_suites_are_deterministic():
    a = protocol_suite(n_trials=2, seed=3, cfg=FAST).as_dict()
    b = protocol_suite(n_trials=2, seed=3, cfg=FAST).as_dict()
    assert a == b

    a = gmqd_suite(n_trials=3, seed=3, cfg=FAST).as_dict()
    b = gmqd_suite(n_trials=3, seed=3, cfg=FAST).as_dict()
    assert a == b


def test_protocol_suite_small():
    rep = protocol_suite(n_trials=2, seed=0, cfg=FAST)
    assert rep.passed
    assert rep.trials == 6  # four named states plus the random draws
    assert rep.abs_err <= 5e-3


def test_gmqd_suite_small():
    rep = gmqd_suite(n_trials=4, seed=0, cfg=FAST)
    assert rep.passed
    assert rep.abs_err <= 1e-3


def test_random_state_generators():
    rng = np.random.default_rng(0)
    for _ in range(50):
        s = ginibre_state(rng)
        evals = np.linalg.eigvalsh(s.rho)
        assert evals.min() >= -1e-12
        assert abs(np.trace(s.rho).real - 1.0) <= 1e-12

    for _ in range(50):
        s = bounded_purity_state(rng, max_purity=0.99)
        assert np.trace(s.rho @ s.rho).real <= 0.99 + 1e-12

    for _ in range(50):
        u = random_unitary(rng)
        assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12)

    for _ in range(200):
        params = random_bell_params(rng)
        assert bell_eigenvalues(*params.as_tuple()).min() >= 0.0
