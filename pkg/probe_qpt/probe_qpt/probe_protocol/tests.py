import time

import numpy as np
from django.test import SimpleTestCase
from scipy.linalg import expm

from linalg.exceptions import DomainError
from linalg.operators import PAULI, StateVector, kron, overlap, partial_trace
from spin_model.chain import ChainSpec
from .avoided_crossing import (
    Branch, Method, ProtocolRun, branch_fidelities, initial_ground_state, overlap_at,
    overlap_avoided, split_evolution, split_evolution_full, trotter_amplitude_error,
)
from .level_crossing import (
    build_network_state, network_state, overlap_level_crossing, probe_readout,
)
from .trotter import gate_fidelity, trotter_evolution, trotter_factors

PLUS = StateVector.normalized([1, 1], (0,))
PHI_PLUS = StateVector.normalized([0, 1, 1, 0], (1, 2))
GRID = np.linspace(-2, 2, 81)


def random_state(rng: np.random.Generator, labels=(1, 2)) -> StateVector:
    dim = 2 ** len(labels)
    return StateVector.normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim), labels)


def phase_of(bz: float) -> int:
    return -1 if bz < -1 else (1 if bz > 1 else 0)


def two_spin_hamiltonian(bz: float, bx: float) -> np.ndarray:
    i, x, z = PAULI['i'], PAULI['x'], PAULI['z']
    return np.kron(z, z) + bz * (np.kron(z, i) + np.kron(i, z)) + bx * (np.kron(x, i) + np.kron(i, x))


def run_at(bz, bx=0.1, eps=0.2, tau=1.6, method=Method.EXACT, trotter_steps=1) -> ProtocolRun:
    return ProtocolRun(ChainSpec(bz=bz, bx=bx, eps=eps), tau, method, trotter_steps)


class LevelCrossingOverlapTests(SimpleTestCase):

    def test_reference_points(self):
        self.assertEqual(overlap_level_crossing(0.0, 0.2).value, 1.0)
        self.assertEqual(overlap_level_crossing(1.0, 0.2).value, 0.0)
        self.assertEqual(overlap_level_crossing(-1.5, 0.2).value, 1.0)

    def test_reference_field_values(self):
        values = [overlap_level_crossing(bz, 0.2).value for bz in (-1.5, -1.0, 0.0, 1.0, 1.5)]
        self.assertEqual(values, [1.0, 0.0, 1.0, 0.0, 1.0])

    def test_step_function(self):
        eps = 0.2
        grid = np.linspace(-2, 2, 401)
        start = time.perf_counter()
        values = [overlap_level_crossing(bz, eps).value for bz in grid]
        self.assertLess(time.perf_counter() - start, 1.0)
        for bz, value in zip(grid, values):
            upper, lower = bz + eps, bz - eps
            if min(abs(abs(upper) - 1), abs(abs(lower) - 1)) < 1e-9:
                continue
            expected = 1.0 if phase_of(upper) == phase_of(lower) else 0.0
            self.assertAlmostEqual(value, expected, delta=1e-12)

    def test_effective_field_on_critical_point_is_flagged(self):
        result = overlap_level_crossing(0.8, 0.2)
        self.assertTrue(result.degenerate)
        self.assertFalse(overlap_level_crossing(0.0, 0.2).degenerate)

    def test_requires_positive_coupling(self):
        with self.assertRaises(DomainError):
            overlap_level_crossing(0.0, 0.0)


class NetworkStateTests(SimpleTestCase):

    def test_equal_branches(self):
        psi = build_network_state(0.0, 0.2)
        self.assertEqual(psi.labels, (0, 1, 2))
        self.assertAlmostEqual(overlap(psi, kron(PLUS, PHI_PLUS)), 1.0, places=12)

    def test_branches_at_critical_point(self):
        psi = build_network_state(1.0, 0.2)
        expected = network_state(StateVector.basis('11', (1, 2)), PHI_PLUS)
        self.assertAlmostEqual(overlap(psi, expected), 1.0, places=12)

    def test_normalised(self):
        rng = np.random.default_rng(59)
        for _ in range(20):
            psi = build_network_state(rng.uniform(-2, 2), rng.uniform(0.01, 0.5))
            self.assertAlmostEqual(psi.norm(), 1.0, delta=1e-10)

    def test_branch_registers_must_match(self):
        with self.assertRaises(DomainError):
            network_state(StateVector.basis('0', (1,)), StateVector.basis('0', (2,)))


class ProbeReadoutTests(SimpleTestCase):

    def test_factorised_probe(self):
        rng = np.random.default_rng(61)
        result = probe_readout(kron(PLUS, random_state(rng)))
        self.assertAlmostEqual(result.l_probe, 1.0, places=12)
        self.assertAlmostEqual(result.l_direct, 1.0, places=12)

    def test_orthogonal_branches(self):
        psi = network_state(StateVector.basis('00', (1, 2)), StateVector.basis('11', (1, 2)))
        result = probe_readout(psi)
        self.assertAlmostEqual(result.l_probe, 0.0, places=12)
        np.testing.assert_allclose(result.probe_rho.matrix, np.eye(2) / 2, atol=1e-12)

    def test_critical_network_state_leaves_probe_mixed(self):
        rho = partial_trace(build_network_state(1.0, 0.2), {0})
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-12)

    def test_readout_identity(self):
        rng = np.random.default_rng(67)
        for _ in range(200):
            a, b = random_state(rng), random_state(rng)
            result = probe_readout(network_state(a, b))
            self.assertLess(abs(result.l_probe - result.l_direct), 1e-10)
            self.assertLess(abs(result.l_probe - overlap(a, b)), 1e-10)
            eigenvalues = np.linalg.eigvalsh(result.probe_rho.matrix)
            self.assertAlmostEqual(np.trace(result.probe_rho.matrix).real, 1.0, delta=1e-10)
            self.assertGreater(eigenvalues[0], -1e-10)
            self.assertLess(eigenvalues[-1], 1 + 1e-10)

    def test_requires_probe(self):
        with self.assertRaises(DomainError):
            probe_readout(PHI_PLUS)


class ProtocolRunTests(SimpleTestCase):

    def test_invalid_runs(self):
        spec = ChainSpec(bx=0.1, eps=0.2)
        for kwargs in ({'tau': -1.0}, {'trotter_steps': 0}, {'method': 'bogus'}):
            with self.subTest(**kwargs), self.assertRaises(DomainError):
                ProtocolRun(spec, **kwargs)

    def test_method_coerced(self):
        run = ProtocolRun(ChainSpec(), method='trotter')
        self.assertIs(run.method, Method.TROTTER)


class SplitEvolutionTests(SimpleTestCase):

    def test_without_coupling(self):
        psi0, psi1 = split_evolution(run_at(0.7, eps=0.0))
        np.testing.assert_allclose(psi0.amplitudes, psi1.amplitudes, atol=1e-14)
        self.assertAlmostEqual(overlap_at(run_at(0.7, eps=0.0)), 1.0, places=12)

    def test_zero_time(self):
        self.assertAlmostEqual(overlap_at(run_at(1.0, tau=0.0)), 1.0, places=12)

    def test_matches_matrix_exponential_oracle(self):
        bz, bx, eps, tau = 1.0, 0.1, 0.2, 1.6
        psi = initial_ground_state(ChainSpec(bz=bz, bx=bx)).amplitudes
        expected0 = expm(-1j * tau * two_spin_hamiltonian(bz + eps, bx)) @ psi
        expected1 = expm(-1j * tau * two_spin_hamiltonian(bz - eps, bx)) @ psi
        psi0, psi1 = split_evolution(run_at(bz, bx, eps, tau))
        np.testing.assert_allclose(psi0.amplitudes, expected0, atol=1e-10)
        np.testing.assert_allclose(psi1.amplitudes, expected1, atol=1e-10)
        self.assertAlmostEqual(overlap_at(run_at(bz, bx, eps, tau)), abs(np.vdot(expected0, expected1)) ** 2, places=10)

    def test_branch_substitution_matches_full_register(self):
        rng = np.random.default_rng(71)
        for _ in range(50):
            run = run_at(
                rng.uniform(-2, 2), bx=rng.uniform(0.01, 0.3), eps=rng.uniform(0, 0.4),
                tau=rng.uniform(0, 2), method=(Method.EXACT, Method.TROTTER)[rng.integers(2)],
            )
            for branch, full in zip(split_evolution(run), split_evolution_full(run)):
                self.assertLess(np.max(np.abs(branch.amplitudes - full.amplitudes)), 1e-12)

    def test_longer_chain(self):
        run = ProtocolRun(ChainSpec(n=3, bz=1.0, bx=0.1, eps=0.2), 1.6)
        value = overlap_at(run)
        self.assertGreaterEqual(value, 0.0)
        self.assertLessEqual(value, 1.0)
        full = split_evolution_full(run)
        for branch, expected in zip(split_evolution(run), full):
            self.assertLess(np.max(np.abs(branch.amplitudes - expected.amplitudes)), 1e-12)


class AvoidedCrossingCurveTests(SimpleTestCase):

    def curve(self, eps, method=Method.EXACT, trotter_steps=1):
        result = overlap_avoided(run_at(0.0, eps=eps, method=method, trotter_steps=trotter_steps), GRID)
        return np.array(result.column('L'))

    def test_minima_at_critical_points(self):
        for eps in (0.2, 0.3):
            curve = self.curve(eps)
            negative, positive = GRID < 0, GRID > 0
            self.assertAlmostEqual(GRID[negative][np.argmin(curve[negative])], -1.0, places=12)
            self.assertAlmostEqual(GRID[positive][np.argmin(curve[positive])], 1.0, places=12)
            self.assertGreater(curve[0], 0.99)
            self.assertGreater(curve[-1], 0.99)

    def test_stronger_coupling_deepens_dip(self):
        dips = [overlap_at(run_at(1.0, eps=eps)) for eps in (0.1, 0.2, 0.3)]
        self.assertGreater(dips[0], dips[1])
        self.assertGreater(dips[1], dips[2])
        self.assertLess(overlap_at(run_at(-1.0, eps=0.3)), overlap_at(run_at(-1.0, eps=0.2)))

    def test_symmetric_in_longitudinal_field(self):
        for method in (Method.EXACT, Method.TROTTER):
            curve = self.curve(0.2, method)
            np.testing.assert_allclose(curve, curve[::-1], atol=1e-10)

    def test_trotter_curve_follows_exact(self):
        for eps in (0.2, 0.3):
            exact = self.curve(eps)
            trotter = self.curve(eps, Method.TROTTER, trotter_steps=4)
            self.assertLess(np.max(np.abs(exact - trotter)), 0.03)

    def test_single_block_trotter_minima(self):
        negative, positive = GRID < 0, GRID > 0
        for eps in (0.2, 0.3):
            curve = self.curve(eps, Method.TROTTER)
            self.assertAlmostEqual(GRID[negative][np.argmin(curve[negative])], -1.0, places=12)
            self.assertAlmostEqual(GRID[positive][np.argmin(curve[positive])], 1.0, places=12)

    def test_parallel_matches_sequential(self):
        run = run_at(0.0)
        sequential = overlap_avoided(run, GRID[::8])
        parallel = overlap_avoided(run, GRID[::8], parallel=True)
        self.assertEqual(sequential.rows, parallel.rows)
        self.assertEqual(sequential.columns, ('bz', 'L'))

    def test_empty_grid(self):
        with self.assertRaises(DomainError):
            overlap_avoided(run_at(0.0), [])


class TrotterTests(SimpleTestCase):

    def test_factor_layout(self):
        factors = trotter_factors(ChainSpec(bz=0.5, bx=0.1, eps=0.2), 1.6)
        self.assertEqual(
            [(factor.kind, factor.targets) for factor in factors],
            [('x', (1, 2)), ('z', (1, 2)), ('zz', (0, 2)), ('zz', (0, 1)), ('zz', (1, 2)), ('x', (1, 2))],
        )
        self.assertAlmostEqual(factors[0].theta, 0.08)
        self.assertAlmostEqual(factors[2].theta, 0.32)

    def test_commuting_case_is_exact(self):
        for bz in (-1.5, 0.3, 1.0):
            run = run_at(bz, bx=0.0, eps=0.3)
            psi = initial_ground_state(run.spec)
            exact = split_evolution(run)
            for branch, expected in zip((Branch.PLUS, Branch.MINUS), exact):
                approx = trotter_evolution(run, psi, branch)
                np.testing.assert_allclose(approx.amplitudes, expected.amplitudes, atol=1e-12)
            self.assertAlmostEqual(gate_fidelity(run), 1.0, places=12)

    def test_fidelity_over_experimental_grid(self):
        for eps in (0.2, 0.3):
            for bz in GRID:
                single = branch_fidelities(run_at(bz, eps=eps), with_gate=False)
                self.assertGreater(single.worst, 0.9)
                refined = branch_fidelities(run_at(bz, eps=eps, trotter_steps=4), with_gate=False)
                self.assertGreaterEqual(refined.worst, 0.986)

    def test_refined_fidelity_grid_runtime(self):
        start = time.perf_counter()
        for eps in (0.2, 0.3):
            for bz in GRID:
                branch_fidelities(run_at(bz, eps=eps, trotter_steps=4), with_gate=False)
        self.assertLess(time.perf_counter() - start, 5.0)

    def test_gate_fidelity_bounds(self):
        value = branch_fidelities(run_at(1.0, eps=0.3)).gate
        self.assertGreater(value, 0.0)
        self.assertLessEqual(value, 1.0 + 1e-12)

    def test_third_order_error(self):
        taus = np.array([0.05, 0.1, 0.2, 0.4])
        errors = [
            trotter_amplitude_error(run_at(0.5, bx=0.1, eps=0.2, tau=tau, method=Method.TROTTER), Branch.PLUS)
            for tau in taus
        ]
        slope = np.polyfit(np.log(taus), np.log(errors), 1)[0]
        self.assertGreater(slope, 2.6)
        self.assertLess(slope, 3.4)
        self.assertLess(errors[0], 1e-3)

    def test_more_steps_reduce_error(self):
        coarse = trotter_amplitude_error(run_at(1.0, eps=0.3), Branch.MINUS)
        fine = trotter_amplitude_error(run_at(1.0, eps=0.3, trotter_steps=8), Branch.MINUS)
        self.assertLess(fine, coarse / 10)
