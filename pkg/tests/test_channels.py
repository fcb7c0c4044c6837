import itertools
import math
import unittest

import numpy as np
from pydantic import ValidationError

from channels import (
    DerivedSgadRates,
    OhmicBathParams,
    SgadBathParams,
    asymptotic_state,
    coherent_qubit,
    gamma_t,
    lindblad_evolve,
    lindblad_operators,
    liouvillian,
    maximally_mixed_qubit,
    pd_phase_distribution,
    phase_damping_evolve,
    phase_damping_state,
    sgad_evolve_closed_form,
    sgad_number_distribution,
    sgad_number_prob,
    sgad_phase_distribution,
    sgad_rates,
)
from distributions import density_on_grid, number_distribution, phase_distribution
from errors import NumericalInstabilityError, SpinDomainError
from knowledge import knowledge_discrete, knowledge_phase
from spin_states import DensityMatrix, SpinSystem

FIG2_BATH = OhmicBathParams(gamma0=0.025, omega_c=100.0, T=2.0, r=1.0, a=0.0)

# (T, r, Phi, gamma0, t) points where the closed forms are checked against the master equation
ORACLE_SWEEP = [
    (0.0, 0.0, 0.0, 0.05, 5.0),
    (0.0, 0.5, 0.0, 0.05, 5.0),
    (2.0, 0.5, np.pi / 8, 0.05, 3.0),
    (300.0, 0.0, 0.0, 0.01, 0.1),
    (300.0, 1.0, np.pi / 8, 0.01, 0.1),
]


def sup_gap(coeffs_a, coeffs_b):
    return float(np.max(np.abs(density_on_grid(coeffs_a, 256) - density_on_grid(coeffs_b, 256))))


class TestPhaseDamping(unittest.TestCase):

    def test_gamma_t_domain(self):
        self.assertEqual(gamma_t(FIG2_BATH, 0.0), 0.0)
        squeezed = OhmicBathParams(gamma0=0.025, omega_c=100.0, T=2.0, r=1.0, a=0.5)
        with self.assertRaises(SpinDomainError):
            gamma_t(squeezed, 1.0)
        with self.assertRaises(SpinDomainError):
            gamma_t(FIG2_BATH, -1.0)
        with self.assertRaises(ValidationError):
            OhmicBathParams(gamma0=0.025, omega_c=100.0, T=-1.0)

    def test_gamma_t_grows(self):
        for regime in ("zeroT", "highT"):
            values = [gamma_t(FIG2_BATH, t, regime) for t in np.linspace(0.0, 10.0, 100)]
            self.assertTrue(all(b >= a for a, b in zip(values, values[1:])))

    def test_south_pole_is_ground_state(self):
        rho = phase_damping_state(0.0, 0.0, FIG2_BATH, 1.0, 3.0)
        np.testing.assert_allclose(rho.entries, np.diag([0.0, 1.0]), atol=1e-15)

    def test_populations_are_invariant(self):
        rho0 = coherent_qubit(1.1, 0.4)
        for t in np.linspace(0.0, 10.0, 11):
            rho = phase_damping_evolve(rho0, FIG2_BATH, 1.0, t)
            np.testing.assert_allclose(np.diag(rho.entries), np.diag(rho0.entries), atol=1e-15)

    def test_closed_form_matches_evolved_state(self):
        for t in (0.0, 0.5, 4.0):
            closed = pd_phase_distribution(0.9, 0.3, FIG2_BATH, 1.0, t)
            evolved = phase_distribution(phase_damping_state(0.9, 0.3, FIG2_BATH, 1.0, t))
            self.assertLess(sup_gap(closed.coeffs, evolved.coeffs), 1e-12)

    def test_fig2_knowledge_trends(self):
        times = np.linspace(0.0, 10.0, 100)
        r_m, r_phi = [], []
        for t in times:
            rho = phase_damping_state(np.pi / 2, np.pi / 4, FIG2_BATH, 1.0, t)
            r_m.append(knowledge_discrete(number_distribution(rho)))
            r_phi.append(knowledge_phase(pd_phase_distribution(np.pi / 2, np.pi / 4, FIG2_BATH, 1.0, t)))
        self.assertLess(max(r_m) - min(r_m), 1e-12)
        self.assertTrue(all(b <= a + 1e-12 for a, b in zip(r_phi, r_phi[1:])))
        self.assertLess(r_phi[-1], r_phi[0])

    def test_fig2_knowledge_independent_of_beta(self):
        for t in (1.0, 5.0):
            values = [
                knowledge_phase(pd_phase_distribution(1.0, beta, FIG2_BATH, 1.0, t))
                for beta in np.linspace(0.0, 2 * np.pi, 9)
            ]
            self.assertLess(max(values) - min(values), 1e-9)


class TestSgadRates(unittest.TestCase):

    def test_vacuum(self):
        rates = sgad_rates(SgadBathParams(gamma0=0.025, omega=1.0))
        self.assertEqual((rates.n_th, rates.n_eff, rates.m_mag), (0.0, 0.0, 0.0))
        self.assertEqual(rates.gamma_beta, 0.025)
        self.assertEqual(rates.alpha_branch, "imaginary")

    def test_thermal_occupation(self):
        rates = sgad_rates(SgadBathParams(gamma0=0.01, omega=1.0, T=300.0))
        self.assertAlmostEqual(rates.n_th, 1.0 / math.expm1(1.0 / 300.0), places=9)
        self.assertAlmostEqual(rates.excited_fraction, rates.n_eff / (2 * rates.n_eff + 1), places=15)

    def test_squeezed_relations(self):
        rates = sgad_rates(SgadBathParams(gamma0=0.05, omega=1.0, T=2.0, r=1.0, Phi=np.pi / 8))
        self.assertAlmostEqual(rates.m_mag**2, (rates.n_eff + 0.5) ** 2 - (rates.n_th + 0.5) ** 2, places=9)
        self.assertEqual(rates.chi, -rates.m_mag)
        self.assertAlmostEqual(abs(rates.m), rates.m_mag, places=14)
        self.assertAlmostEqual(rates.gamma_minus, 0.05 * rates.n_eff, places=15)

    def test_real_branch(self):
        rates = sgad_rates(SgadBathParams(gamma0=0.5, omega=0.1, T=2.0, r=1.0))
        self.assertEqual(rates.alpha_branch, "real")
        c, s = rates.propagators(2.0)
        self.assertAlmostEqual(c, math.cosh(rates.alpha_abs * 2.0), places=12)
        self.assertAlmostEqual(s, math.sinh(rates.alpha_abs * 2.0) / rates.alpha_abs, places=12)

    def test_inconsistent_rates_rejected(self):
        rates = sgad_rates(SgadBathParams(gamma0=0.05, omega=1.0, T=2.0, r=0.5))
        with self.assertRaises(ValidationError):
            DerivedSgadRates(**{**rates.model_dump(), "gamma_beta": 2 * rates.gamma_beta})


class TestSgadClosedForms(unittest.TestCase):

    def test_populations_at_start(self):
        bath = SgadBathParams(gamma0=0.01, omega=1.0, T=300.0, r=1.0)
        self.assertAlmostEqual(sgad_number_prob(0.7, bath, 0.0), math.sin(0.35) ** 2, places=14)
        self.assertAlmostEqual(sgad_number_distribution(0.7, bath, 0.0).prob(-0.5), math.cos(0.35) ** 2, places=14)

    def test_phase_reduces_to_coherent_at_start(self):
        bath = SgadBathParams(gamma0=0.01, omega=1.0, T=300.0, r=1.0, Phi=np.pi / 8)
        closed = sgad_phase_distribution(1.2, 0.5, bath, 0.0)
        self.assertLess(sup_gap(closed.coeffs, phase_distribution(coherent_qubit(1.2, 0.5)).coeffs), 1e-14)

    def test_closed_form_state_matches_distributions(self):
        bath = SgadBathParams(gamma0=0.05, omega=1.0, T=2.0, r=0.5, Phi=np.pi / 8)
        rho = sgad_evolve_closed_form(coherent_qubit(1.0, 0.7), bath, 3.0)
        self.assertAlmostEqual(float(rho.entries[0, 0].real), sgad_number_prob(1.0, bath, 3.0), places=12)
        closed = sgad_phase_distribution(1.0, 0.7, bath, 3.0)
        self.assertLess(sup_gap(closed.coeffs, phase_distribution(rho).coeffs), 1e-12)

    def test_negative_time(self):
        with self.assertRaises(SpinDomainError):
            sgad_number_prob(1.0, SgadBathParams(gamma0=0.05, omega=1.0), -0.1)


class TestMasterEquationOracle(unittest.TestCase):

    def test_operator_form_matches_master_equation(self):
        for T, r, phi, gamma0, _ in ORACLE_SWEEP:
            bath = SgadBathParams(gamma0=gamma0, omega=1.0, T=T, r=r, Phi=phi)
            for frame in ("lab", "interaction"):
                master = liouvillian(bath, "master", frame)
                operators = liouvillian(bath, "operators", frame)
                np.testing.assert_allclose(master, operators, atol=1e-12 * max(1.0, np.abs(master).max()))

    def test_trace_preserving(self):
        bath = SgadBathParams(gamma0=0.05, omega=1.0, T=2.0, r=0.5, Phi=0.3)
        trace = np.array([1.0, 0.0, 0.0, 1.0])
        np.testing.assert_allclose(trace @ liouvillian(bath), 0.0, atol=1e-15)

    def test_lindblad_operator_scales(self):
        bath = SgadBathParams(gamma0=0.05, omega=1.0, T=0.0, r=0.0)
        r1, r2 = lindblad_operators(bath)
        np.testing.assert_allclose(r1, math.sqrt(0.025) * np.array([[0, 0], [1, 0]]), atol=1e-15)
        np.testing.assert_allclose(r2, 0.0, atol=1e-15)

    def test_closed_forms_match_integrator(self):
        for T, r, phi, gamma0, t in ORACLE_SWEEP:
            bath = SgadBathParams(gamma0=gamma0, omega=1.0, T=T, r=r, Phi=phi)
            for alpha_p, beta_p in ((np.pi / 4, np.pi / 4), (np.pi / 2, 1.0), (2.5, 4.0)):
                with self.subTest(T=T, r=r, t=t, alpha_p=alpha_p):
                    rho = lindblad_evolve(coherent_qubit(alpha_p, beta_p), bath, t)
                    self.assertAlmostEqual(
                        float(rho.entries[0, 0].real), sgad_number_prob(alpha_p, bath, t), delta=1e-6
                    )
                    closed = sgad_phase_distribution(alpha_p, beta_p, bath, t)
                    self.assertLess(sup_gap(closed.coeffs, phase_distribution(rho).coeffs), 1e-4)

    def test_closed_forms_match_integrator_on_full_grid(self):
        for T, r, t in itertools.product((0.0, 5.0, 300.0), (0.0, 0.5, 1.0), (0.05, 0.1, 0.5)):
            bath = SgadBathParams(gamma0=0.01, omega=1.0, T=T, r=r, Phi=np.pi / 8 if r else 0.0)
            for alpha_p, beta_p in ((np.pi / 4, np.pi / 4), (2.5, 4.0)):
                with self.subTest(T=T, r=r, t=t, alpha_p=alpha_p):
                    rho = lindblad_evolve(coherent_qubit(alpha_p, beta_p), bath, t)
                    self.assertAlmostEqual(
                        float(rho.entries[0, 0].real), sgad_number_prob(alpha_p, bath, t), delta=1e-6
                    )
                    closed = sgad_phase_distribution(alpha_p, beta_p, bath, t)
                    self.assertLess(sup_gap(closed.coeffs, phase_distribution(rho).coeffs), 1e-4)

    def test_opposite_squeezing_sign_is_falsified(self):
        bath = SgadBathParams(gamma0=0.05, omega=1.0, T=0.0, r=0.5, Phi=0.0)
        rho = lindblad_evolve(coherent_qubit(np.pi / 2, np.pi / 4), bath, 5.0)
        oracle = phase_distribution(rho).coeffs
        chi = sgad_rates(bath).chi
        derived = sgad_phase_distribution(np.pi / 2, np.pi / 4, bath, 5.0, chi=chi)
        flipped = sgad_phase_distribution(np.pi / 2, np.pi / 4, bath, 5.0, chi=-chi)
        self.assertLess(sup_gap(derived.coeffs, oracle), 1e-6)
        self.assertGreater(sup_gap(flipped.coeffs, oracle), 1e-3)

    def test_vacuum_asymptote(self):
        bath = SgadBathParams(gamma0=0.5, omega=1.0, T=0.0, r=0.0)
        start = coherent_qubit(np.pi / 3, 0.2)
        rho = lindblad_evolve(start, bath, 80.0, steps=80_000)
        np.testing.assert_allclose(rho.entries, np.diag([0.0, 1.0]), atol=1e-6)
        np.testing.assert_allclose(rho.entries, sgad_evolve_closed_form(start, bath, 80.0).entries, atol=1e-9)
        np.testing.assert_allclose(asymptotic_state(bath).entries, np.diag([0.0, 1.0]), atol=1e-15)

    def test_thermal_asymptote(self):
        bath = SgadBathParams(gamma0=0.05, omega=1.0, T=2.0, r=0.5)
        rho = sgad_evolve_closed_form(maximally_mixed_qubit(), bath, 2000.0)
        np.testing.assert_allclose(rho.entries, asymptotic_state(bath).entries, atol=1e-12)

    def test_interaction_frame_drops_precession(self):
        bath = SgadBathParams(gamma0=0.05, omega=1.0, T=0.0, r=0.0)
        start = coherent_qubit(np.pi / 2, 0.6)
        rho = lindblad_evolve(start, bath, 2.0, frame="interaction")
        self.assertAlmostEqual(float(np.angle(rho.entries[0, 1])), float(np.angle(start.entries[0, 1])), places=9)

    def test_step_floor_and_instability(self):
        bath = SgadBathParams(gamma0=0.05, omega=1.0, T=300.0, r=0.0)
        with self.assertRaises(SpinDomainError):
            lindblad_evolve(coherent_qubit(1.0, 0.0), bath, 1.0, steps=10)
        fast = SgadBathParams(gamma0=0.01, omega=1000.0)
        with self.assertRaises(NumericalInstabilityError) as ctx:
            lindblad_evolve(coherent_qubit(np.pi / 2, 0.0), fast, 1.0, steps=2)
        self.assertGreater(ctx.exception.suggested_steps, 2)

    def test_channels_act_on_qubits_only(self):
        with self.assertRaises(SpinDomainError):
            sgad_evolve_closed_form(DensityMatrix(SpinSystem(1.0), np.eye(3) / 3), SgadBathParams(gamma0=0.05, omega=1.0), 1.0)


if __name__ == '__main__':
    unittest.main()
