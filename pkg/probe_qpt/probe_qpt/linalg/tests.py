import math

import numpy as np
from django.test import SimpleTestCase, override_settings
from scipy.linalg import expm

from .exceptions import CapacityError, DomainError
from .operators import (
    DenseOperator, StateVector, apply_local, embed_local, eigh, evolve, identity,
    kron, overlap, partial_trace, pauli, propagator, sigma_plus, site_product,
)


def random_hermitian(rng: np.random.Generator, dim: int, labels=None) -> DenseOperator:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    if labels is None:
        labels = range(int(math.log2(dim)))
    return DenseOperator((a + a.conj().T) / 2, tuple(labels), hermitian=True)


def random_state(rng: np.random.Generator, dim: int, labels=None) -> StateVector:
    if labels is None:
        labels = range(int(math.log2(dim)))
    return StateVector.normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim), tuple(labels))


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def taylor_expm(a: np.ndarray, order: int = 4, squarings: int = 12) -> np.ndarray:
    """Series exponential with scaling and squaring, independent of any eigensolver."""
    scaled = a / 2 ** squarings
    result = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, order + 1):
        term = term @ scaled / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


class KronTests(SimpleTestCase):

    def test_identity_product(self):
        result = kron(identity((0,)), identity((1,)))
        np.testing.assert_array_equal(result.matrix, np.eye(4))
        self.assertEqual(result.labels, (0, 1))
        self.assertTrue(result.hermitian)

    def test_zz_eigenvalue_on_01(self):
        zz = kron(pauli('z', 0), pauli('z', 1))
        psi = StateVector.basis('01')
        np.testing.assert_allclose(zz.matrix @ psi.amplitudes, -psi.amplitudes)

    def test_bit_flip_on_first_label(self):
        x0 = kron(pauli('x', 0), identity((1,)))
        result = x0.apply(StateVector.basis('00'))
        self.assertAlmostEqual(overlap(result, StateVector.basis('10')), 1.0, places=12)

    def test_shared_label_rejected(self):
        with self.assertRaises(DomainError):
            kron(pauli('z', 1), pauli('z', 1))

    @override_settings(QPT_PROBE={'MAX_DIM': 8})
    def test_capacity_cap(self):
        three = site_product({}, (0, 1, 2))
        with self.assertRaises(CapacityError):
            kron(three, pauli('x', 3))

    def test_associativity(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            a, b, c = (
                DenseOperator(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)), (label,))
                for label in range(3)
            )
            left = kron(kron(a, b), c)
            right = kron(a, kron(b, c))
            self.assertLess(np.max(np.abs(left.matrix - right.matrix)), 1e-12)
            self.assertEqual(left.labels, right.labels)


class OperatorValidationTests(SimpleTestCase):

    def test_hermitian_flag_checked(self):
        with self.assertRaises(DomainError):
            DenseOperator(np.array([[0, 1], [0, 0]]), (0,), hermitian=True)

    def test_dimension_must_match_labels(self):
        with self.assertRaises(DomainError):
            DenseOperator(np.eye(4), (0,))

    def test_non_finite_rejected(self):
        with self.assertRaises(DomainError):
            DenseOperator(np.array([[np.nan, 0], [0, 1]]), (0,))

    def test_state_must_be_normalised(self):
        with self.assertRaises(DomainError):
            StateVector(np.array([1.0, 1.0]), (0,))

    def test_matrix_is_read_only(self):
        op = pauli('x', 0)
        with self.assertRaises(ValueError):
            op.matrix[0, 0] = 5


class OperatorArithmeticTests(SimpleTestCase):

    def test_raising_operator_and_its_adjoint(self):
        raising = sigma_plus(0)
        lowering = raising.dagger()
        np.testing.assert_array_equal(lowering.matrix, [[0, 0], [1, 0]])
        np.testing.assert_array_equal((raising + lowering).matrix, pauli('x', 0).matrix)
        np.testing.assert_allclose((raising - lowering).matrix, 1j * pauli('y', 0).matrix, atol=1e-15)
        self.assertFalse(lowering.hermitian)

    def test_hermitian_flag_propagation(self):
        difference = pauli('x', 0) - pauli('z', 0)
        self.assertTrue(difference.hermitian)
        self.assertTrue(difference.dagger().hermitian)
        self.assertTrue((2.0 * difference).hermitian)
        self.assertFalse((1j * difference).hermitian)

    def test_difference_requires_same_register(self):
        with self.assertRaises(DomainError):
            pauli('x', 0) - pauli('x', 1)


class EighTests(SimpleTestCase):

    def test_pauli_z_spectrum(self):
        values, _ = eigh(pauli('z'))
        np.testing.assert_allclose(values, [-1, 1])

    def test_pauli_x_ground_state(self):
        values, vectors = eigh(pauli('x'))
        np.testing.assert_allclose(values, [-1, 1], atol=1e-12)
        ground = StateVector(vectors.matrix[:, 0], (0,))
        minus = StateVector.normalized([1, -1], (0,))
        self.assertAlmostEqual(overlap(ground, minus), 1.0, places=12)

    def test_diagonal_ising_spectrum(self):
        h = site_product({1: 'z', 2: 'z'}, (1, 2))
        values, _ = eigh(h)
        np.testing.assert_allclose(values, [-1, -1, 1, 1], atol=1e-12)

    def test_non_hermitian_rejected(self):
        with self.assertRaises(DomainError):
            eigh(DenseOperator(np.array([[0, 1], [0, 0]]), (0,)))

    def test_spectral_reconstruction(self):
        rng = np.random.default_rng(3)
        for dim in (2, 4, 8, 16, 32, 64):
            h = random_hermitian(rng, dim)
            values, vectors = eigh(h)
            v = vectors.matrix
            self.assertTrue(np.all(np.diff(values) >= 0))
            self.assertLess(np.max(np.abs(v.conj().T @ v - np.eye(dim))), 1e-10)
            rebuilt = v @ np.diag(values) @ v.conj().T
            self.assertLess(np.max(np.abs(rebuilt - h.matrix)), 1e-9)


class EvolveTests(SimpleTestCase):

    def test_zero_time_is_identity(self):
        rng = np.random.default_rng(5)
        h = random_hermitian(rng, 8)
        psi = random_state(rng, 8)
        np.testing.assert_allclose(evolve(h, 0.0, psi).amplitudes, psi.amplitudes, atol=1e-14)

    def test_global_phase_on_basis_state(self):
        result = evolve(pauli('z'), math.pi / 2, StateVector.basis('0'))
        np.testing.assert_allclose(result.amplitudes, [np.exp(-1j * math.pi / 2), 0], atol=1e-14)

    def test_label_mismatch(self):
        with self.assertRaises(DomainError):
            evolve(pauli('z', 0), 1.0, StateVector.basis('0', (1,)))

    def test_unitarity(self):
        rng = np.random.default_rng(7)
        for dim in (2, 4, 8, 16, 32, 64):
            h = random_hermitian(rng, dim)
            psi = random_state(rng, dim)
            t = rng.uniform(0, 10)
            self.assertAlmostEqual(evolve(h, t, psi).norm(), 1.0, delta=1e-10)

    def test_matches_series_and_pade_oracles(self):
        rng = np.random.default_rng(13)
        h = random_hermitian(rng, 4, labels=(1, 2))
        psi = random_state(rng, 4, labels=(1, 2))
        tau = 1.6
        expected_series = taylor_expm(-1j * tau * h.matrix) @ psi.amplitudes
        expected_pade = expm(-1j * tau * h.matrix) @ psi.amplitudes
        result = evolve(h, tau, psi).amplitudes
        self.assertLess(np.max(np.abs(result - expected_series)), 1e-8)
        self.assertLess(np.max(np.abs(result - expected_pade)), 1e-10)

    def test_propagator_is_unitary(self):
        rng = np.random.default_rng(17)
        u = propagator(random_hermitian(rng, 16), 2.5).matrix
        self.assertLess(np.max(np.abs(u.conj().T @ u - np.eye(16))), 1e-12)


class PartialTraceTests(SimpleTestCase):

    def test_probe_coherence_from_branch_overlap(self):
        rng = np.random.default_rng(19)
        a = random_state(rng, 4, labels=(1, 2))
        b = random_state(rng, 4, labels=(1, 2))
        s = np.vdot(a.amplitudes, b.amplitudes)
        psi = StateVector(np.concatenate([a.amplitudes, b.amplitudes]) / math.sqrt(2), (0, 1, 2))
        rho = partial_trace(psi, {0}).matrix
        np.testing.assert_allclose(rho, 0.5 * np.array([[1, np.conj(s)], [s, 1]]), atol=1e-12)

    def test_product_state(self):
        rho = partial_trace(StateVector.basis('00'), {1})
        np.testing.assert_allclose(rho.matrix, [[1, 0], [0, 0]], atol=1e-14)
        self.assertEqual(rho.labels, (1,))

    def test_invalid_keep_sets(self):
        psi = StateVector.basis('00')
        with self.assertRaises(DomainError):
            partial_trace(psi, set())
        with self.assertRaises(DomainError):
            partial_trace(psi, {5})

    def test_state_and_density_paths_agree(self):
        rng = np.random.default_rng(23)
        psi = random_state(rng, 16)
        for keep in ({0}, {1, 3}, {0, 2, 3}):
            from_state = partial_trace(psi, keep).matrix
            from_density = partial_trace(psi.density(), keep).matrix
            self.assertLess(np.max(np.abs(from_state - from_density)), 1e-12)

    def test_trace_preservation_and_linearity(self):
        rng = np.random.default_rng(29)
        labels = (0, 1, 2, 3)
        for _ in range(10):
            rho_a = random_density(rng, 16)
            rho_b = random_density(rng, 16)
            p = rng.uniform()
            mixed = DenseOperator(p * rho_a + (1 - p) * rho_b, labels, hermitian=True)
            keep = {1, 2}
            reduced = partial_trace(mixed, keep).matrix
            expected = (
                p * partial_trace(DenseOperator(rho_a, labels, hermitian=True), keep).matrix
                + (1 - p) * partial_trace(DenseOperator(rho_b, labels, hermitian=True), keep).matrix
            )
            self.assertLess(np.max(np.abs(reduced - expected)), 1e-12)
            self.assertAlmostEqual(np.trace(reduced).real, 1.0, delta=1e-10)
            self.assertGreater(np.min(np.linalg.eigvalsh(reduced)), -1e-10)


class OverlapTests(SimpleTestCase):

    def test_self_overlap(self):
        rng = np.random.default_rng(31)
        psi = random_state(rng, 8)
        self.assertAlmostEqual(overlap(psi, psi), 1.0, places=12)

    def test_orthogonal_and_half(self):
        phi_plus = StateVector.normalized([0, 1, 1, 0], (0, 1))
        self.assertEqual(overlap(StateVector.basis('00'), phi_plus), 0.0)
        self.assertAlmostEqual(overlap(phi_plus, StateVector.basis('01')), 0.5, places=12)

    def test_symmetric(self):
        rng = np.random.default_rng(37)
        a, b = random_state(rng, 8), random_state(rng, 8)
        self.assertAlmostEqual(overlap(a, b), overlap(b, a), places=14)


class LocalEmbeddingTests(SimpleTestCase):

    def test_embed_matches_site_product(self):
        embedded = embed_local(np.kron(np.diag([1, -1]), np.diag([1, -1])), (2, 0), (0, 1, 2))
        expected = site_product({0: 'z', 2: 'z'}, (0, 1, 2))
        np.testing.assert_allclose(embedded.matrix, expected.matrix, atol=1e-14)

    def test_apply_local_matches_embedding(self):
        rng = np.random.default_rng(41)
        psi = random_state(rng, 16)
        u = propagator(random_hermitian(rng, 4, labels=(0, 1)), 0.7).matrix
        direct = embed_local(u, (3, 1), psi.labels).apply(psi)
        local = apply_local(u, (3, 1), psi)
        np.testing.assert_allclose(local.amplitudes, direct.amplitudes, atol=1e-12)
