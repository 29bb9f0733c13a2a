import numpy as np
import pytest

from rsplab.linalg import ID2, SIGMA_X, kron, su2_axis_angle
from rsplab.states import (
    BellDiagonalParams,
    PauliDecomposition,
    TwoQubitState,
    bell_diagonal,
    bell_eigenvalues,
    compose,
    decompose,
    local_unitary,
    state_from_json,
    state_to_json,
)

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
SINGLET_KET = (np.kron(KET0, KET1) - np.kron(KET1, KET0)) / np.sqrt(2.0)
SINGLET = np.outer(SINGLET_KET, SINGLET_KET.conj())

RNG = np.random.default_rng(77)


def random_state(rng):
    g = rng.normal(size=(4, 4)) + 1.0j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return TwoQubitState(rho / np.trace(rho).real)


def test_decompose_maximally_mixed():
    d = decompose(np.eye(4, dtype=complex) / 4)
    assert np.allclose(d.a, 0.0)
    assert np.allclose(d.b, 0.0)
    assert np.allclose(d.e, 0.0)


def test_decompose_singlet():
    d = decompose(SINGLET)
    assert np.allclose(d.a, 0.0, atol=1e-12)
    assert np.allclose(d.b, 0.0, atol=1e-12)
    assert np.allclose(d.e, -np.eye(3), atol=1e-12)


def test_decompose_classical_mixture():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.5
    rho[3, 3] = 0.5
    d = decompose(rho)
    assert np.allclose(d.a, 0.0)
    assert np.allclose(d.b, 0.0)
    assert np.allclose(d.e, np.diag([0.0, 0.0, 1.0]))


def test_decompose_rejects_bad_trace():
    with pytest.raises(ValueError):
        decompose(np.eye(4, dtype=complex))


def test_decompose_rejects_non_psd():
    rho = np.diag([0.75, 0.75, -0.25, -0.25]).astype(complex)
    with pytest.raises(ValueError):
        decompose(rho)


def test_compose_zero_is_maximally_mixed():
    d = PauliDecomposition(a=np.zeros(3), b=np.zeros(3), e=np.zeros((3, 3)))
    assert np.allclose(compose(d).rho, np.eye(4) / 4)


def test_compose_singlet_matrix():
    d = PauliDecomposition(a=np.zeros(3), b=np.zeros(3), e=-np.eye(3))
    assert np.allclose(compose(d).rho, SINGLET, atol=1e-12)


def test_compose_damped_decomposition_is_valid():
    # closed-form image of (0.5, 0, -0.5) under symmetric damping p=0.3
    p, q = 0.3, 0.7
    c1, c2, c3 = 0.5, 0.0, -0.5
    d = PauliDecomposition(
        a=np.array([0.0, 0.0, p]), b=np.array([0.0, 0.0, p]),
        e=np.diag([q * c1, q * c2, c3 * q * q + p * p]))
    s = compose(d)
    assert s.purity <= 1.0 + 1e-12


def test_round_trip_decompose_compose():
    for _ in range(200):
        s = random_state(RNG)
        d = s.decomposition
        assert np.allclose(compose(d).rho, s.rho, atol=1e-10)
        d2 = decompose(s.rho)
        assert np.allclose(d2.a, d.a, atol=1e-10)
        assert np.allclose(d2.b, d.b, atol=1e-10)
        assert np.allclose(d2.e, d.e, atol=1e-10)


def test_bell_eigenvalues_formula():
    vals = bell_eigenvalues(0.5, 0.0, -0.5)
    expected = [(1 - 0.5 - 0 + 0.5) / 4, (1 - 0.5 + 0 - 0.5) / 4,
                (1 + 0.5 - 0 - 0.5) / 4, (1 + 0.5 + 0 + 0.5) / 4]
    assert np.allclose(sorted(vals), sorted(expected))


def test_bell_diagonal_corners_and_center():
    assert np.allclose(bell_diagonal(0.0, 0.0, 0.0).rho, np.eye(4) / 4)
    assert np.allclose(bell_diagonal(-1.0, -1.0, -1.0).rho, SINGLET,
                       atol=1e-12)
    s = bell_diagonal(0.5, 0.0, -0.5)
    assert np.allclose(s.e, np.diag([0.5, 0.0, -0.5]))


def test_bell_diagonal_rejects_outside_with_eigenvalue():
    with pytest.raises(ValueError, match="eigenvalue"):
        bell_diagonal(1.0, 1.0, 1.0)


def test_bell_params_accept_reject_matches_eigenvalues():
    # membership of random cube points must follow the four linear forms
    rng = np.random.default_rng(123)
    n_ok = 0
    for _ in range(10000):
        c = rng.uniform(-1.0, 1.0, size=3)
        inside = bell_eigenvalues(*c).min() >= -1e-12
        try:
            bell_diagonal(*c)
            constructed = True
            n_ok += 1
        except ValueError:
            constructed = False
        assert constructed == inside
    assert 0 < n_ok < 10000  # both branches exercised


def test_purity_range():
    for _ in range(100):
        s = random_state(RNG)
        assert 0.25 - 1e-10 <= s.purity <= 1.0 + 1e-10
    assert bell_diagonal(0, 0, 0).purity == pytest.approx(0.25, abs=1e-12)
    assert bell_diagonal(-1, -1, -1).purity == pytest.approx(1.0, abs=1e-12)


def test_local_unitary_identity():
    s = bell_diagonal(0.5, 0.0, -0.5)
    t = local_unitary(s, ID2, ID2)
    assert np.allclose(t.rho, s.rho)


def test_local_unitary_transforms_decomposition():
    rng = np.random.default_rng(5)
    from rsplab.linalg import unitary_to_rotation
    for _ in range(30):
        s = random_state(rng)
        ax1 = rng.normal(size=3)
        ax1 /= np.linalg.norm(ax1)
        ax2 = rng.normal(size=3)
        ax2 /= np.linalg.norm(ax2)
        u1 = su2_axis_angle(ax1, rng.uniform(0, 2 * np.pi))
        u2 = su2_axis_angle(ax2, rng.uniform(0, 2 * np.pi))
        r1 = unitary_to_rotation(u1)
        r2 = unitary_to_rotation(u2)
        t = local_unitary(s, u1, u2)
        assert np.allclose(t.a, r1 @ s.a, atol=1e-10)
        assert np.allclose(t.b, r2 @ s.b, atol=1e-10)
        assert np.allclose(t.e, r1 @ s.e @ r2.T, atol=1e-10)


def test_local_unitary_sigma_x_on_demo_state():
    s = bell_diagonal(0.5, 0.0, -0.5)
    t = local_unitary(s, SIGMA_X, ID2)
    # sigma_x rotation is diag(1,-1,-1): E -> diag(0.5, 0, 0.5)
    assert np.allclose(t.e, np.diag([0.5, 0.0, 0.5]), atol=1e-12)


def test_local_unitary_rejects_non_unitary():
    s = bell_diagonal(0, 0, 0)
    with pytest.raises(ValueError):
        local_unitary(s, np.array([[1, 1], [0, 1]], dtype=complex), ID2)


def test_state_validation():
    with pytest.raises(ValueError):
        TwoQubitState(np.eye(4, dtype=complex))  # trace 4
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.3  # not Hermitian
    with pytest.raises(ValueError):
        TwoQubitState(bad)


def test_decomposition_bounds_enforced():
    with pytest.raises(ValueError):
        PauliDecomposition(a=np.array([1.5, 0.0, 0.0]), b=np.zeros(3),
                           e=np.zeros((3, 3)))


def test_json_bell_and_dense_round_trip():
    s = state_from_json({"type": "bell_diagonal", "c": [0.5, 0.0, -0.5]})
    assert np.allclose(s.e, np.diag([0.5, 0.0, -0.5]))
    obj = state_to_json(s)
    assert obj["type"] == "dense"
    t = state_from_json(obj)
    assert np.allclose(t.rho, s.rho, atol=1e-15)


def test_json_rejects_unknown_type():
    with pytest.raises(ValueError):
        state_from_json({"type": "pure", "ket": [1, 0, 0, 0]})
    with pytest.raises(ValueError):
        state_from_json({"type": "bell_diagonal", "c": [0.5, 0.0]})


def test_states_are_immutable():
    s = bell_diagonal(0.5, 0.0, -0.5)
    with pytest.raises(ValueError):
        s.rho[0, 0] = 9.0
    with pytest.raises(ValueError):
        s.e[0, 0] = 9.0
