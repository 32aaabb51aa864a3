import math

import numpy as np
from django.test import SimpleTestCase

from linalg.exceptions import DegeneracyError, DomainError
from linalg.operators import DenseOperator, StateVector, eigh, kron, overlap
from .chain import (
    ChainSpec, branch_hamiltonian, hamiltonian_longitudinal, hamiltonian_total,
    hamiltonian_transverse, spectrum,
)
from .entanglement import concurrence, ground_state_concurrence
from .ground_states import TripletAmplitudes, ground_state_analytic, ground_state_numeric
from .two_level import effective_hamiltonian, effective_two_level, mixing_angle, sensitivity

PHI_PLUS = StateVector.normalized([0, 1, 1, 0], (1, 2))


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


class ChainSpecTests(SimpleTestCase):

    def test_registers(self):
        spec = ChainSpec(n=3, with_probe=True)
        self.assertEqual(spec.system_labels, (1, 2, 3))
        self.assertEqual(spec.labels, (0, 1, 2, 3))
        self.assertEqual(spec.system_only().labels, (1, 2, 3))

    def test_shifted_fields(self):
        spec = ChainSpec(bz=1.0, eps=0.2, with_probe=True)
        self.assertAlmostEqual(spec.shifted(+1).bz, 1.2)
        self.assertAlmostEqual(spec.shifted(-1).bz, 0.8)
        self.assertFalse(spec.shifted(-1).with_probe)

    def test_invalid_parameters(self):
        for kwargs in ({'n': 1}, {'bx': -0.1}, {'eps': -0.2}, {'bz': math.nan}):
            with self.subTest(**kwargs), self.assertRaises(DomainError):
                ChainSpec(**kwargs)


class HamiltonianTests(SimpleTestCase):

    def test_longitudinal_at_zero_field(self):
        h = hamiltonian_longitudinal(ChainSpec(bz=0.0))
        np.testing.assert_allclose(h.matrix, np.diag([1, -1, -1, 1]), atol=1e-14)
        self.assertTrue(h.hermitian)

    def test_longitudinal_ground_states(self):
        _values, vectors = eigh(hamiltonian_longitudinal(ChainSpec(bz=-1.5)))
        ground = StateVector(vectors.matrix[:, 0], (1, 2))
        self.assertAlmostEqual(overlap(ground, StateVector.basis('00', (1, 2))), 1.0, places=12)

        h = hamiltonian_longitudinal(ChainSpec(bz=2.0))
        diagonal = np.diag(h.matrix).real
        self.assertEqual(int(np.argmin(diagonal)), 3)
        self.assertAlmostEqual(diagonal[3], -3.0)

    def test_longitudinal_rejects_transverse_field(self):
        with self.assertRaises(DomainError):
            hamiltonian_longitudinal(ChainSpec(bx=0.1))

    def test_transverse_reduces_to_longitudinal(self):
        spec = ChainSpec(bz=0.7)
        np.testing.assert_array_equal(
            hamiltonian_transverse(spec).matrix, hamiltonian_longitudinal(spec).matrix
        )

    def test_level_repulsion_lowers_ground_energy(self):
        self.assertLess(spectrum(ChainSpec(bz=0.0, bx=0.1))[0], -1.0)

    def test_avoided_crossing_gap(self):
        ground = ground_state_numeric(ChainSpec(bz=1.0, bx=0.1), sector='triplet')
        self.assertAlmostEqual(ground.gap, 2 * math.sqrt(2) * 0.1, delta=1e-3)

    def test_total_block_structure(self):
        spec = ChainSpec(bz=0.3, bx=0.1, eps=0.2, with_probe=True)
        h = hamiltonian_total(spec).matrix
        np.testing.assert_allclose(h[:4, :4], branch_hamiltonian(spec, +1).matrix, atol=1e-14)
        np.testing.assert_allclose(h[4:, 4:], branch_hamiltonian(spec, -1).matrix, atol=1e-14)
        np.testing.assert_allclose(h[:4, 4:], 0, atol=1e-14)

    def test_total_without_coupling_is_doubly_degenerate(self):
        values = spectrum(ChainSpec(bz=0.4, bx=0.1, eps=0.0, with_probe=True))
        np.testing.assert_allclose(values[0::2], values[1::2], atol=1e-12)

    def test_total_branch_ground_states_at_criticality(self):
        spec = ChainSpec(bz=1.0, eps=0.2, with_probe=True)
        upper = ground_state_numeric(spec.shifted(+1), sector='triplet')
        lower = ground_state_numeric(spec.shifted(-1), sector='triplet')
        self.assertAlmostEqual(overlap(upper.state, StateVector.basis('11', (1, 2))), 1.0, places=12)
        self.assertAlmostEqual(overlap(lower.state, PHI_PLUS), 1.0, places=12)

    def test_total_requires_probe(self):
        with self.assertRaises(DomainError):
            hamiltonian_total(ChainSpec(eps=0.2))

    def test_longer_chain(self):
        spec = ChainSpec(n=3, eps=0.1, with_probe=True)
        self.assertEqual(hamiltonian_total(spec).dim, 16)
        self.assertAlmostEqual(spectrum(ChainSpec(n=3))[0], -2.0)


class SpectrumTests(SimpleTestCase):

    def test_zero_field(self):
        np.testing.assert_allclose(spectrum(ChainSpec()), [-1, -1, 1, 1], atol=1e-12)

    def test_critical_degeneracy(self):
        for bz in (-1.0, 1.0):
            values = spectrum(ChainSpec(bz=bz))
            self.assertLess(values[1] - values[0], 1e-12)
            self.assertAlmostEqual(values[0], -1.0, places=12)

    def test_crossing_at_positive_critical_field(self):
        self.assertAlmostEqual(spectrum(ChainSpec(bz=0.9))[0], -1.0, places=12)
        self.assertAlmostEqual(spectrum(ChainSpec(bz=1.1))[0], -1.2, places=12)


class GroundStateTests(SimpleTestCase):

    def test_analytic_phases(self):
        cases = {-1.5: '00', 1.5: '11'}
        for bz, bits in cases.items():
            ground = ground_state_analytic(bz)
            self.assertAlmostEqual(overlap(ground.state, StateVector.basis(bits, (1, 2))), 1.0)
            self.assertFalse(ground.degenerate)
        self.assertAlmostEqual(overlap(ground_state_analytic(0.0).state, PHI_PLUS), 1.0)

    def test_analytic_critical_points_flagged(self):
        for bz in (-1.0, 1.0):
            ground = ground_state_analytic(bz)
            self.assertTrue(ground.degenerate)
            self.assertAlmostEqual(overlap(ground.state, PHI_PLUS), 1.0)

    def test_triplet_amplitudes_at_zero_field(self):
        ground = ground_state_numeric(ChainSpec(), sector='triplet')
        np.testing.assert_allclose(ground.amplitudes.as_array(), [0, 1, 0], atol=1e-12)

    def test_equal_mixing_at_criticality(self):
        amplitudes = ground_state_numeric(ChainSpec(bz=1.0, bx=0.1), sector='triplet').amplitudes
        self.assertAlmostEqual(abs(amplitudes.c_plus), 1 / math.sqrt(2), delta=0.03)
        self.assertAlmostEqual(abs(amplitudes.c1), 1 / math.sqrt(2), delta=0.03)
        self.assertAlmostEqual(amplitudes.c0, 0.0, delta=0.03)
        self.assertLess(amplitudes.c_plus * amplitudes.c1, 0)

    def test_largest_component_positive(self):
        for bz in (-1.3, -0.2, 0.9, 1.6):
            amplitudes = ground_state_numeric(ChainSpec(bz=bz, bx=0.1), sector='triplet').amplitudes
            values = amplitudes.as_array()
            self.assertGreater(values[np.argmax(np.abs(values))], 0)

    def test_full_and_triplet_sectors_agree(self):
        for bz in np.linspace(-2, 2, 21):
            spec = ChainSpec(bz=bz, bx=0.1)
            full = ground_state_numeric(spec, sector='full')
            triplet = ground_state_numeric(spec, sector='triplet')
            self.assertGreater(overlap(full.state, triplet.state), 1 - 1e-10)
            self.assertIsNotNone(full.amplitudes)

    def test_numeric_matches_analytic_away_from_critical_points(self):
        for bz in np.linspace(-2, 2, 401):
            if abs(abs(bz) - 1) < 1e-9:
                continue
            numeric = ground_state_numeric(ChainSpec(bz=bz), sector='triplet')
            self.assertGreater(overlap(numeric.state, ground_state_analytic(bz).state), 1 - 1e-10)

    def test_full_sector_flags_singlet_degeneracy(self):
        ground = ground_state_numeric(ChainSpec(bz=0.2), sector='full')
        self.assertTrue(ground.degenerate)

    def test_triplet_sector_requires_two_spins(self):
        with self.assertRaises(DomainError):
            ground_state_numeric(ChainSpec(n=3), sector='triplet')
        with self.assertRaises(DomainError):
            ground_state_numeric(ChainSpec(), sector='singlet')

    def test_amplitudes_must_be_normalised(self):
        with self.assertRaises(DomainError):
            TripletAmplitudes(0.5, 0.5, 0.5)


class TwoLevelTests(SimpleTestCase):

    def test_mixing_angle_at_critical_fields(self):
        for bz in (-1.0, 1.0):
            for bx in (0.01, 0.1, 0.3):
                self.assertEqual(mixing_angle(bz, bx), math.pi / 2)

    def test_mixing_angle_matches_effective_ground_state(self):
        _values, vectors = np.linalg.eigh(effective_hamiltonian(0.0, 0.1))
        ground = vectors[:, 0]
        phi = mixing_angle(0.0, 0.1)
        self.assertAlmostEqual(abs(ground[1]) ** 2, math.sin(phi / 2) ** 2, places=12)
        self.assertAlmostEqual(abs(ground[0]) ** 2, math.cos(phi / 2) ** 2, places=12)

    def test_weak_transverse_field_limit(self):
        state = effective_two_level(0.3, 1e-8).ground_state()
        self.assertAlmostEqual(overlap(state, PHI_PLUS), 1.0, places=12)

    def test_exact_crossing_is_degenerate(self):
        with self.assertRaises(DegeneracyError):
            mixing_angle(1.0, 0.0)

    def test_gap_at_criticality(self):
        self.assertAlmostEqual(effective_two_level(-1.0, 0.1).splitting_gap, 2 * math.sqrt(2) * 0.1)

    def test_lifted_hamiltonian_ground_state(self):
        model = effective_two_level(0.8, 0.1)
        values, vectors = eigh(model.hamiltonian())
        ground = StateVector(vectors.matrix[:, 0], (1, 2))
        self.assertAlmostEqual(values[0], -0.8 - model.splitting_gap / 2, places=12)
        self.assertAlmostEqual(overlap(ground, model.ground_state()), 1.0, places=12)

    def test_two_level_validity_near_criticality(self):
        for magnitude in np.linspace(0.5, 1.5, 21):
            for bz in (-magnitude, magnitude):
                exact = ground_state_numeric(ChainSpec(bz=bz, bx=0.1), sector='full')
                approx = effective_two_level(bz, 0.1).ground_state()
                self.assertGreater(overlap(exact.state, approx), 0.99)


class SensitivityTests(SimpleTestCase):

    def test_peak(self):
        for bz in (-1.0, 1.0):
            self.assertAlmostEqual(sensitivity(bz, 0.1), 1 / (math.sqrt(2) * 0.1), delta=1e-9)

    def test_half_width(self):
        bx = 0.1
        peak = sensitivity(1.0, bx)
        self.assertAlmostEqual(sensitivity(1 + math.sqrt(2) * bx, bx), peak / 2, places=12)
        self.assertAlmostEqual(sensitivity(-1 + math.sqrt(2) * bx, bx), peak / 2, places=12)

    def test_full_width_on_fine_grid(self):
        bx = 0.1
        grid = np.linspace(0.5, 1.5, 100001)
        values = np.array([sensitivity(bz, bx) for bz in grid])
        above = grid[values >= sensitivity(1.0, bx) / 2]
        self.assertAlmostEqual(above[-1] - above[0], 2 * math.sqrt(2) * bx, delta=1e-3)

    def test_tail(self):
        self.assertLess(sensitivity(1e6, 0.1), 1e-10)
        self.assertLess(sensitivity(-1e6, 0.1), 1e-10)

    def test_matches_finite_difference(self):
        rng = np.random.default_rng(43)
        h = 1e-6
        for _ in range(50):
            bx = rng.uniform(0.05, 0.3)
            bz = rng.uniform(0.1, 2.0) * rng.choice([-1, 1])
            step = h * np.sign(bz)
            derivative = (mixing_angle(bz + step, bx) - mixing_angle(bz - step, bx)) / (2 * h)
            expected = sensitivity(bz, bx)
            self.assertLess(abs(abs(derivative) - expected) / expected, 1e-4)

    def test_requires_transverse_field(self):
        with self.assertRaises(DomainError):
            sensitivity(1.0, 0.0)


class ConcurrenceTests(SimpleTestCase):

    def test_bell_and_product_states(self):
        self.assertAlmostEqual(concurrence(PHI_PLUS), 1.0, places=12)
        self.assertEqual(concurrence(StateVector.basis('00')), 0.0)

    def test_ground_state_at_criticality(self):
        ground = ground_state_numeric(ChainSpec(bz=1.0, bx=0.1), sector='triplet')
        c = ground.amplitudes
        expected = abs(2 * c.c0 * c.c1 - c.c_plus ** 2)
        value = concurrence(ground.state)
        self.assertGreater(value, 0.0)
        self.assertLess(value, 1.0)
        self.assertAlmostEqual(value, expected, places=10)

    def test_bounds_on_random_states(self):
        rng = np.random.default_rng(47)
        for _ in range(1000):
            rho = DenseOperator(random_density(rng, 4), (1, 2), hermitian=True)
            value = concurrence(rho)
            self.assertGreaterEqual(value, 0.0)
            self.assertLessEqual(value, 1.0)

    def test_product_states_are_unentangled(self):
        rng = np.random.default_rng(53)
        for _ in range(100):
            a = DenseOperator(random_density(rng, 2), (1,), hermitian=True)
            b = DenseOperator(random_density(rng, 2), (2,), hermitian=True)
            self.assertLess(concurrence(kron(a, b)), 1e-6)

    def test_invalid_density_rejected(self):
        with self.assertRaises(DomainError):
            concurrence(DenseOperator(np.diag([1.5, -0.5, 0, 0]), (1, 2), hermitian=True))
        with self.assertRaises(DomainError):
            concurrence(StateVector.basis('000'))

    def test_longer_chain_pair(self):
        value, degenerate = ground_state_concurrence(ChainSpec(n=3, bz=0.5, bx=0.2))
        self.assertGreaterEqual(value, 0.0)
        self.assertLessEqual(value, 1.0)
        self.assertFalse(degenerate)
