import math

import numpy as np
from django.test import SimpleTestCase

from linalg.exceptions import DomainError
from linalg.operators import StateVector, kron, overlap
from probe_protocol.avoided_crossing import Method, ProtocolRun, initial_ground_state, overlap_at, split_evolution
from probe_protocol.level_crossing import build_network_state, network_state, probe_readout
from probe_protocol.trotter import trotter_unitary
from spin_model.chain import ChainSpec
from spin_model.ground_states import TripletAmplitudes, ground_state_analytic, ground_state_numeric
from .gates import HADAMARD, Circuit, Gate, GateKind, run_circuit
from .networks import build_ac_circuit, build_lc_network, prep_angles, state_preparation_unitary

ZERO3 = StateVector.basis('000')
PLUS = StateVector.normalized([1, 1], (0,))
PHI_PLUS = StateVector.normalized([0, 1, 1, 0], (1, 2))


def assert_unitary(test, matrix, tol=1e-12):
    test.assertLess(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))), tol)


class GateTests(SimpleTestCase):

    def test_empty_circuit_is_identity(self):
        psi = StateVector.normalized([1, 2j, 3, -1], (0, 1))
        result = run_circuit(Circuit((0, 1)), psi)
        np.testing.assert_array_equal(result.amplitudes, psi.amplitudes)

    def test_walsh_hadamard(self):
        result = run_circuit(Circuit((0,), (Gate(GateKind.WALSH_HADAMARD, (0,)),)), StateVector.basis('0'))
        np.testing.assert_allclose(result.amplitudes, PLUS.amplitudes, atol=1e-15)

    def test_zz_additivity(self):
        quarter = Gate(GateKind.ZZ, (0, 1), angle=math.pi / 4)
        twice = Circuit((0, 1), (quarter, quarter)).unitary().matrix
        half = Circuit((0, 1), (Gate(GateKind.ZZ, (0, 1), angle=math.pi / 2),)).unitary().matrix
        np.testing.assert_allclose(twice, half, atol=1e-14)

    def test_rotation_convention(self):
        gate = Gate(GateKind.ROT_Y, (0,), angle=0.3)
        expected = math.cos(0.3) * np.eye(2) - 1j * math.sin(0.3) * np.array([[0, -1j], [1j, 0]])
        np.testing.assert_allclose(gate.local_matrix(), expected, atol=1e-15)

    def test_rotation_on_several_targets(self):
        pair = Gate(GateKind.ROT_X, (1, 2), angle=0.4).local_matrix()
        single = Gate(GateKind.ROT_X, (1,), angle=0.4).local_matrix()
        np.testing.assert_allclose(pair, np.kron(single, single), atol=1e-15)

    def test_malformed_gates(self):
        cases = [
            {'kind': GateKind.ZZ, 'targets': (0,), 'angle': 0.1},
            {'kind': GateKind.ROT_X, 'targets': (0,)},
            {'kind': GateKind.CONTROLLED_UNITARY, 'targets': (0,), 'control': 0, 'unitary': np.eye(2)},
            {'kind': GateKind.UNITARY, 'targets': (0,), 'unitary': np.array([[1, 1], [0, 1]])},
            {'kind': GateKind.UNITARY, 'targets': (0, 1), 'unitary': np.eye(2)},
            {'kind': 'SWAP', 'targets': (0, 1)},
        ]
        for kwargs in cases:
            with self.subTest(kind=kwargs['kind']), self.assertRaises(DomainError):
                Gate(**kwargs)

    def test_gate_outside_register(self):
        with self.assertRaises(DomainError):
            Circuit((0, 1), (Gate(GateKind.WALSH_HADAMARD, (2,)),))

    def test_register_mismatch(self):
        with self.assertRaises(DomainError):
            run_circuit(Circuit((0, 1)), StateVector.basis('00', (1, 2)))

    def test_controlled_unitary_acts_on_selected_branch(self):
        flip = np.array([[0, 1], [1, 0]])
        gate = Gate(GateKind.CONTROLLED_UNITARY, (1,), control=0, control_value=0, unitary=flip)
        circuit = Circuit((0, 1), (gate,))
        self.assertAlmostEqual(overlap(run_circuit(circuit, StateVector.basis('00')), StateVector.basis('01')), 1.0)
        self.assertAlmostEqual(overlap(run_circuit(circuit, StateVector.basis('10')), StateVector.basis('10')), 1.0)


class TextFormatTests(SimpleTestCase):

    def test_listing(self):
        circuit = Circuit((0, 1, 2), (
            Gate(GateKind.WALSH_HADAMARD, (0,)),
            Gate(GateKind.ROT_X, (1, 2), angle=0.08),
            Gate(GateKind.ZZ, (0, 1), angle=0.32),
            Gate(GateKind.ROT_Z, (2,), angle=math.pi),
        ))
        self.assertEqual(
            circuit.to_text(),
            'REGISTER 0 1 2\nW 0\nRX 1,2 0.08\nZZ 0,1 0.32\nRZ 2 3.14159265359\n',
        )

    def test_controlled_unitary_line(self):
        gate = Gate(GateKind.CONTROLLED_UNITARY, (1,), control=0, control_value=1, unitary=np.array([[0, 1j], [1j, 0]]))
        self.assertEqual(gate.to_text(), 'CU 1 control=0:1 u=0+0j,0+1j;0+1j,0+0j')


class StatePreparationTests(SimpleTestCase):

    def test_first_column_is_target(self):
        rng = np.random.default_rng(73)
        for dim in (2, 4, 8):
            target = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            target /= np.linalg.norm(target)
            unitary = state_preparation_unitary(target)
            assert_unitary(self, unitary)
            np.testing.assert_allclose(unitary[:, 0], target, atol=1e-12)

    def test_basis_target(self):
        unitary = state_preparation_unitary(StateVector.basis('11'))
        assert_unitary(self, unitary)
        np.testing.assert_allclose(unitary[:, 0], [0, 0, 0, 1], atol=1e-14)


class LevelCrossingNetworkTests(SimpleTestCase):

    def test_equal_branches(self):
        output = run_circuit(build_lc_network(0.0, 0.2), ZERO3)
        self.assertAlmostEqual(overlap(output, kron(PLUS, PHI_PLUS)), 1.0, places=12)

    def test_readout_at_reference_fields(self):
        for bz, expected in ((1.0, 0.0), (-1.5, 1.0)):
            output = run_circuit(build_lc_network(bz, 0.2), ZERO3)
            self.assertAlmostEqual(probe_readout(output).l_probe, expected, places=12)

    def test_reproduces_network_state(self):
        for bz in np.linspace(-2, 2, 41):
            output = run_circuit(build_lc_network(bz, 0.2), ZERO3)
            self.assertGreater(overlap(output, build_network_state(bz, 0.2)), 1 - 1e-10)

    def test_unitary_matches_direct_construction(self):
        bz, eps = 0.9, 0.2
        circuit = build_lc_network(bz, eps)
        u0 = state_preparation_unitary(ground_state_analytic(bz + eps).state)
        u1 = state_preparation_unitary(ground_state_analytic(bz - eps).state)
        branches = np.kron(np.diag([1, 0]), u0) + np.kron(np.diag([0, 1]), u1)
        expected = branches @ np.kron(HADAMARD, np.eye(4))
        self.assertLess(np.max(np.abs(circuit.unitary().matrix - expected)), 1e-10)

    def test_gates_are_unitary(self):
        for gate in build_lc_network(0.3, 0.2).gates:
            assert_unitary(self, gate.local_matrix())


class PrepAnglesTests(SimpleTestCase):

    def test_mid_phase_state(self):
        angles = prep_angles(TripletAmplitudes(0.0, 1.0, 0.0))
        self.assertEqual(angles.alpha, 0.0)
        self.assertEqual(angles.beta, -math.pi)
        self.assertAlmostEqual(angles.theta, -math.pi / 2, places=12)
        self.assertEqual(angles.saturated, frozenset({'beta'}))

    def test_polarised_state_saturates_alpha(self):
        angles = prep_angles(TripletAmplitudes(1.0, 0.0, 0.0))
        self.assertIn('alpha', angles.saturated)

    def test_identities_at_criticality(self):
        c = ground_state_numeric(ChainSpec(bz=1.0, bx=0.1), sector='triplet').amplitudes
        angles = prep_angles(c)
        self.assertFalse(angles.saturated)
        self.assertAlmostEqual(math.tan(angles.alpha / 2) * c.c_plus, -math.sqrt(2) * c.c1, delta=1e-10)
        self.assertAlmostEqual(math.tan(angles.beta / 2) * math.sqrt(2) * c.c0, -c.c_plus, delta=1e-10)
        self.assertAlmostEqual(
            math.tan(angles.theta / 2) * math.cos(angles.alpha / 2), math.sin(angles.beta / 2), delta=1e-10
        )
        for angle in (angles.alpha, angles.beta, angles.theta):
            self.assertGreater(angle, -math.pi)
            self.assertLessEqual(angle, math.pi)


class AvoidedCrossingCircuitTests(SimpleTestCase):

    def make_run(self, **changes):
        params = {'bz': 1.0, 'bx': 0.1, 'eps': 0.2}
        params.update(changes)
        return ProtocolRun(ChainSpec(**params), 1.6, Method.TROTTER)

    def test_gate_count(self):
        self.assertEqual(len(build_ac_circuit(self.make_run())), 2 + 6)
        run = self.make_run().replace(trotter_steps=2)
        self.assertEqual(len(build_ac_circuit(run)), 2 + 12)

    def test_uncoupled_probe_stays_coherent(self):
        output = run_circuit(build_ac_circuit(self.make_run(eps=0.0)), ZERO3)
        self.assertAlmostEqual(probe_readout(output).l_probe, 1.0, places=12)

    def test_readout_matches_protocol(self):
        run = self.make_run()
        output = run_circuit(build_ac_circuit(run), ZERO3)
        self.assertAlmostEqual(probe_readout(output).l_probe, overlap_at(run), delta=1e-12)

    def test_reproduces_trotter_branches(self):
        rng = np.random.default_rng(79)
        for _ in range(10):
            run = self.make_run(bz=rng.uniform(-2, 2), eps=rng.uniform(0, 0.4))
            output = run_circuit(build_ac_circuit(run), ZERO3)
            expected = network_state(*split_evolution(run))
            self.assertLess(np.max(np.abs(output.amplitudes - expected.amplitudes)), 1e-12)

    def test_unitary_matches_direct_construction(self):
        run = self.make_run(bz=-0.6)
        preparation = state_preparation_unitary(initial_ground_state(run.spec))
        expected = trotter_unitary(run).matrix @ np.kron(HADAMARD, preparation)
        actual = build_ac_circuit(run).unitary().matrix
        self.assertLess(np.max(np.abs(actual - expected)), 1e-10)
        for gate in build_ac_circuit(run).gates:
            assert_unitary(self, gate.local_matrix())
