"""Eigendecomposition, norms, and Bloch helpers on small Hermitian matrices."""
import numpy as np
import pytest

from mcdisc import qmath
from mcdisc.errors import NonHermitianError, NotPsdError

RNG = np.random.default_rng(20250811)


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2.0


def test_eig_identity():
    values, vectors = qmath.eig_hermitian(np.eye(2))
    assert np.allclose(values, [1.0, 1.0])
    assert np.allclose(vectors @ vectors.conj().T, np.eye(2))


def test_eig_diagonal_sorted_ascending():
    values, _ = qmath.eig_hermitian(np.diag([0.75, 0.25]))
    assert np.allclose(values, [0.25, 0.75])


def test_eig_pauli_x_matches_bloch_closed_form():
    # Independent route: t I + v.sigma has eigenvalues t +/- |v|.
    values, _ = qmath.eig_hermitian(qmath.PAULI_X)
    assert np.allclose(values, [-1.0, 1.0], atol=1e-14)


def test_eig_2x2_against_closed_form_bulk():
    # 10^4 random qubit operators: eigh must agree with t +/- |v| to 1e-12.
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(10_000):
        t = rng.normal()
        v = rng.normal(size=3)
        a = qmath.bloch_op(t, v)
        values, _ = qmath.eig_hermitian(a)
        r = np.linalg.norm(v)
        worst = max(worst, abs(values[0] - (t - r)), abs(values[1] - (t + r)))
    assert worst <= 1e-12


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_eig_reconstructs_input(dim):
    rng = np.random.default_rng(11 + dim)
    for _ in range(300):
        a = random_hermitian(rng, dim)
        values, vectors = qmath.eig_hermitian(a)
        rebuilt = (vectors * values) @ vectors.conj().T
        scale = max(1.0, np.linalg.norm(a))
        assert np.linalg.norm(a - rebuilt) <= 1e-12 * scale
        assert np.linalg.norm(vectors.conj().T @ vectors - np.eye(dim)) <= 1e-12
        assert np.all(np.diff(values) >= 0)


def test_trace_norm_zero_matrix():
    assert qmath.trace_norm(np.zeros((2, 2))) == 0.0


def test_trace_norm_sums_absolute_eigenvalues():
    assert qmath.trace_norm(np.diag([0.5, -0.5])) == pytest.approx(1.0, abs=1e-14)


def test_trace_norm_of_weighted_state_difference():
    # Equal-prior pure pair with squared overlap 0.5: the weighted difference
    # has trace norm sqrt(1 - c) = sqrt(0.5).
    from mcdisc import PairSpec, make_pure_pair

    e = make_pure_pair(PairSpec(0.5))
    diff = 0.5 * e.states[0].matrix - 0.5 * e.states[1].matrix
    assert qmath.trace_norm(diff) == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_op_norm_identity():
    assert qmath.op_norm(np.eye(3)) == pytest.approx(1.0, abs=1e-14)


def test_norm_inequalities():
    rng = np.random.default_rng(23)
    for dim in (2, 3, 4):
        for _ in range(200):
            a = random_hermitian(rng, dim)
            tn = qmath.trace_norm(a)
            on = qmath.op_norm(a)
            assert tn >= abs(np.trace(a).real) - 1e-12
            assert on <= tn + 1e-12
            assert tn <= dim * on + 1e-12


def test_trace_norm_equals_abs_trace_iff_sign_definite():
    psd = np.diag([0.3, 0.7])
    assert qmath.trace_norm(psd) == pytest.approx(abs(np.trace(psd).real), abs=1e-14)
    indefinite = np.diag([0.5, -0.2])
    assert qmath.trace_norm(indefinite) > abs(np.trace(indefinite).real) + 0.1


def test_psd_floor_clips_negative_eigenvalues():
    a = np.diag([0.5, -0.3])
    floored = qmath.psd_floor(a, 0.0)
    assert qmath.min_eig(floored) >= -1e-15
    assert np.allclose(floored, np.diag([0.5, 0.0]))
    # Already-PSD input passes through unchanged.
    assert np.allclose(qmath.psd_floor(np.diag([0.1, 0.9]), 0.0), np.diag([0.1, 0.9]))


def test_psd_floor_respects_eps():
    floored = qmath.psd_floor(np.diag([1.0, 1e-8]), 1e-6)
    assert qmath.min_eig(floored) >= 1e-6 - 1e-18


def test_inv_sqrt_diagonal():
    out = qmath.inv_sqrt(np.diag([4.0, 1.0]))
    assert np.allclose(out, np.diag([0.5, 1.0]), atol=1e-14)


def test_inv_sqrt_projects_onto_support():
    rng = np.random.default_rng(31)
    for _ in range(100):
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        v /= np.linalg.norm(v)
        a = np.outer(v, v.conj())          # rank one, eigenvalues (0, 0, 1)
        s = qmath.inv_sqrt(a)
        assert np.linalg.norm(s @ a @ s - a) <= 1e-10


def test_inv_sqrt_max_confidence_operator_value():
    # Operator-norm route to the maximum confidence of the noisy pair at
    # c = 0.5, p = 0.5; frozen against an independent measurement search.
    from mcdisc import PairSpec, average_state, make_noisy_pair

    e = make_noisy_pair(PairSpec(0.5, 0.5))
    rho = average_state(e).matrix
    s = qmath.inv_sqrt(rho)
    value = qmath.op_norm(s @ (0.5 * e.states[0].matrix) @ s)
    assert value == pytest.approx(0.6889822365046137, abs=1e-12)


def test_inv_sqrt_rejects_negative_matrix():
    with pytest.raises(NotPsdError):
        qmath.inv_sqrt(np.diag([1.0, -0.5]))


def test_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        qmath.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_rejects_unsupported_shapes():
    with pytest.raises(ValueError):
        qmath.eig_hermitian(np.eye(5))
    with pytest.raises(ValueError):
        qmath.eig_hermitian(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        qmath.eig_hermitian(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_bloch_round_trip():
    rng = np.random.default_rng(41)
    for _ in range(200):
        t = rng.normal()
        v = rng.normal(size=3)
        a = qmath.bloch_op(t, v)
        assert np.allclose(qmath.bloch_vector(a), v, atol=1e-13)
        assert np.trace(a).real / 2.0 == pytest.approx(t, abs=1e-13)
