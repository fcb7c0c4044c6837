"""
Open-system evolution of a qubit.

Two channels are modelled:

* phase damping (pure dephasing from a QND coupling to a squeezed Ohmic bath),
  which keeps populations and damps coherences by exp(-omega^2 gamma(t));
* squeezed generalized amplitude damping (SGAD), available both as closed
  forms for the populations and P(phi) and as a Lindblad master equation
  integrated with a fixed-step RK4 scheme that serves as an oracle.

Storage order follows spin_states: index 0 is m = +1/2, so
sigma_z = diag(1, -1), sigma_- = |-1/2><+1/2| and sigma_+ = |+1/2><-1/2|.
Units are hbar = k_B = 1.
"""

from __future__ import annotations

import logging
import math
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import settings
from distributions import TWO_PI, NumberDistribution, PhaseDistribution
from errors import (
    ClosedFormBreakdownError,
    InvariantViolationError,
    NumericalInstabilityError,
    SpinDomainError,
)
from spin_states import CoherentParams, DensityMatrix, SpinSystem, coherent_amplitudes

logger = logging.getLogger(__name__)

QUBIT = SpinSystem(0.5)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
IDENTITY_REL_TOL = 1e-12
TRACE_DRIFT_LIMIT = 1e-6
MIN_STEPS_PER_RATE = 100

Regime = Literal["zeroT", "highT"]
Frame = Literal["lab", "interaction"]


class OhmicBathParams(BaseModel):
    """Ohmic bath seen by the phase damping channel; the squeezing phase is Phi(omega) = a * omega."""

    model_config = ConfigDict(frozen=True)

    gamma0: float = Field(gt=0)
    omega_c: float = Field(gt=0)
    T: float = Field(default=0.0, ge=0)
    r: float = Field(default=0.0, ge=0)
    a: float = Field(default=0.0, ge=0)


class SgadBathParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma0: float = Field(gt=0)
    omega: float = Field(gt=0)
    T: float = Field(default=0.0, ge=0)
    r: float = Field(default=0.0, ge=0)
    Phi: float = 0.0


class DerivedSgadRates(BaseModel):
    """Rates and amplitudes derived from an SgadBathParams."""

    model_config = ConfigDict(frozen=True)

    gamma0: float
    omega: float
    n_th: float = Field(ge=0)
    n_eff: float = Field(ge=0)
    m_mag: float = Field(ge=0)
    m_phase: float
    gamma_beta: float = Field(gt=0)
    gamma_minus: float = Field(ge=0)
    alpha_sq: float
    alpha_branch: Literal["real", "imaginary", "zero"]
    chi: float

    @model_validator(mode="after")
    def check_relations(self) -> "DerivedSgadRates":
        if self.gamma_beta != self.gamma0 * (2 * self.n_eff + 1):
            raise ValueError("gamma_beta must equal gamma0 (2N + 1)")
        if self.n_eff < self.n_th:
            raise ValueError(f"N = {self.n_eff} is below N_th = {self.n_th}")
        squeezed_thermal = (self.n_eff + 0.5) ** 2 - (self.n_th + 0.5) ** 2
        if abs(self.m_mag**2 - squeezed_thermal) > IDENTITY_REL_TOL * (self.n_eff + 0.5) ** 2:
            raise ValueError("|M|^2 violates the squeezed-thermal relation")
        if self.m_mag > self.n_eff + 0.5 + IDENTITY_REL_TOL * (self.n_eff + 0.5):
            raise ValueError("|M| exceeds N + 1/2")
        return self

    @property
    def m(self) -> complex:
        """M = -(1/2) sinh(2r) e^{i Phi} (2 N_th + 1)."""
        return -self.m_mag * complex(np.exp(1j * self.m_phase))

    @property
    def alpha_abs(self) -> float:
        return math.sqrt(abs(self.alpha_sq))

    @property
    def alpha(self) -> complex:
        if self.alpha_branch == "imaginary":
            return 1j * self.alpha_abs
        return complex(self.alpha_abs)

    @property
    def excited_fraction(self) -> float:
        """Asymptotic population of m = +1/2, N / (2N + 1)."""
        return self.n_eff / (2 * self.n_eff + 1)

    def propagators(self, t: float) -> Tuple[float, float]:
        """(cosh(alpha t), sinh(alpha t) / alpha) continued to the imaginary branch and alpha -> 0."""
        x = self.alpha_abs * t
        if self.alpha_branch == "imaginary":
            return math.cos(x), t * float(np.sinc(x / math.pi))
        if self.alpha_branch == "zero" or x < 1e-8:
            return math.cosh(x), t
        return math.cosh(x), math.sinh(x) / self.alpha_abs


def _check_time(t: float) -> None:
    if t < 0 or not np.isfinite(t):
        raise SpinDomainError(f"Time must be finite and non-negative, got t = {t}")


def gamma_t(bath: OhmicBathParams, t: float, regime: Regime = "highT") -> float:
    """Decoherence function gamma(t) of the squeezed Ohmic bath in the zero-T or high-T closed form."""
    _check_time(t)
    if bath.a > 0 and t <= 2 * bath.a:
        raise SpinDomainError(f"gamma(t) is undefined for t = {t} <= 2a = {2 * bath.a}")
    g0, wc, a = bath.gamma0, bath.omega_c, bath.a
    ch, sh = math.cosh(2 * bath.r), math.sinh(2 * bath.r)

    if regime == "zeroT":
        value = (g0 / TWO_PI) * ch * math.log1p(wc**2 * t**2)
        if sh:
            value -= (g0 / (2 * TWO_PI)) * sh * (
                math.log1p(4 * wc**2 * (t - a) ** 2) - 2 * math.log1p(wc**2 * (t - 2 * a) ** 2)
            )
            value -= (g0 / (2 * TWO_PI)) * sh * math.log1p(4 * a**2 * wc**2)
        return value

    if regime == "highT":
        prefactor = g0 * bath.T / (math.pi * wc)
        value = prefactor * ch * (2 * wc * t * math.atan(wc * t) - math.log1p(wc**2 * t**2))
        if sh:
            value -= (prefactor / 2) * sh * (
                4 * wc * (t - a) * math.atan(2 * wc * (t - a))
                - 4 * wc * (t - 2 * a) * math.atan(wc * (t - 2 * a))
                + 4 * a * wc * math.atan(2 * a * wc)
                + 2 * math.log1p(wc**2 * (t - 2 * a) ** 2)
                - math.log1p(4 * wc**2 * (t - a) ** 2)
                - math.log1p(4 * a**2 * wc**2)
            )
        return value

    raise SpinDomainError(f"Unknown temperature regime '{regime}'")


def _require_qubit(rho: DensityMatrix) -> None:
    if rho.system.d != 2:
        raise SpinDomainError(f"Channels act on qubits only, got d = {rho.system.d}")


def phase_damping_evolve(
    rho0: DensityMatrix,
    bath: OhmicBathParams,
    omega: float,
    t: float,
    regime: Regime = "highT",
    gamma_value: Optional[float] = None,
) -> DensityMatrix:
    """Free precession at omega plus dephasing: rho_01 -> rho_01 exp(-i omega t) exp(-omega^2 gamma(t))."""
    _require_qubit(rho0)
    decoherence = gamma_t(bath, t, regime) if gamma_value is None else gamma_value
    entries = np.array(rho0.entries)
    coherence = entries[0, 1] * np.exp(-1j * omega * t) * np.exp(-(omega**2) * decoherence)
    entries[0, 1] = coherence
    entries[1, 0] = np.conj(coherence)
    return DensityMatrix(QUBIT, entries)


def coherent_qubit(alpha_p: float, beta_p: float) -> DensityMatrix:
    """Coherent qubit start |alpha', beta'>."""
    params = CoherentParams(theta=alpha_p, phi=beta_p)
    vector = coherent_amplitudes(QUBIT, params.theta, params.phi)
    return DensityMatrix(QUBIT, np.outer(vector, vector.conj()))


def phase_damping_state(
    theta0: float,
    phi0: float,
    bath: OhmicBathParams,
    omega: float,
    t: float,
    regime: Regime = "highT",
) -> DensityMatrix:
    """Reduced state at time t for a coherent start |theta0, phi0>."""
    return phase_damping_evolve(coherent_qubit(theta0, phi0), bath, omega, t, regime)


def _qubit_phase(first_harmonic: complex) -> PhaseDistribution:
    return PhaseDistribution(
        QUBIT, np.array([np.conj(first_harmonic), 1.0 / TWO_PI, first_harmonic])
    )


def pd_phase_distribution(
    alpha_p: float,
    beta_p: float,
    bath: OhmicBathParams,
    omega: float,
    t: float,
    regime: Regime = "highT",
) -> PhaseDistribution:
    """P(phi) = (1/2pi)[1 + (pi/4) sin(alpha') cos(beta' + omega t - phi) exp(-omega^2 gamma(t))]."""
    damping = math.exp(-(omega**2) * gamma_t(bath, t, regime))
    harmonic = (math.sin(alpha_p) / 16) * damping * np.exp(-1j * (beta_p + omega * t))
    return _qubit_phase(harmonic)


def sgad_rates(bath: SgadBathParams) -> DerivedSgadRates:
    n_th = 0.0 if bath.T == 0 else 1.0 / math.expm1(bath.omega / bath.T)
    n_eff = n_th * math.cosh(2 * bath.r) + math.sinh(bath.r) ** 2
    m_mag = 0.5 * math.sinh(2 * bath.r) * (2 * n_th + 1)
    alpha_sq = (bath.gamma0 * m_mag) ** 2 - bath.omega**2
    if alpha_sq > 0:
        branch = "real"
    elif alpha_sq < 0:
        branch = "imaginary"
    else:
        branch = "zero"
    rates = DerivedSgadRates(
        gamma0=bath.gamma0,
        omega=bath.omega,
        n_th=n_th,
        n_eff=n_eff,
        m_mag=m_mag,
        m_phase=bath.Phi,
        gamma_beta=bath.gamma0 * (2 * n_eff + 1),
        gamma_minus=bath.gamma0 * n_eff,
        alpha_sq=alpha_sq,
        alpha_branch=branch,
        # M = chi e^{i Phi}; the master equation fixes the sign
        chi=-m_mag,
    )
    logger.debug(
        "SGAD rates: N_th=%.6g N=%.6g |M|=%.6g gamma_beta=%.6g alpha^2=%.6g (%s)",
        n_th, n_eff, m_mag, rates.gamma_beta, alpha_sq, branch,
    )
    return rates


def sgad_number_prob(alpha_p: float, bath: SgadBathParams, t: float) -> float:
    """Population p(m = +1/2, t) for a coherent start with polar angle alpha'."""
    _check_time(t)
    rates = sgad_rates(bath)
    ratio = rates.gamma0 / rates.gamma_beta
    decay = math.exp(-rates.gamma_beta * t)
    up = 0.5 * ((1 - ratio) + (1 + ratio) * decay) * math.sin(alpha_p / 2) ** 2
    down = (rates.gamma_minus / rates.gamma_beta) * (1 - decay) * math.cos(alpha_p / 2) ** 2
    return min(max(up + down, 0.0), 1.0)


def sgad_number_distribution(alpha_p: float, bath: SgadBathParams, t: float) -> NumberDistribution:
    p_up = sgad_number_prob(alpha_p, bath, t)
    return NumberDistribution(QUBIT, np.array([p_up, 1.0 - p_up]))


def sgad_phase_distribution(
    alpha_p: float,
    beta_p: float,
    bath: SgadBathParams,
    t: float,
    chi: Optional[float] = None,
) -> PhaseDistribution:
    """P(phi) for a coherent start |alpha', beta'> under SGAD noise.

    ``chi`` overrides the squeezing amplitude (defaults to the derived rates).
    Raises ClosedFormBreakdownError if the resulting P goes negative.
    """
    _check_time(t)
    rates = sgad_rates(bath)
    chi = rates.chi if chi is None else chi
    c, s = rates.propagators(t)
    w = (c - 1j * rates.omega * s) * np.exp(-1j * beta_p) - rates.gamma0 * chi * s * np.exp(
        1j * (bath.Phi + beta_p)
    )
    harmonic = (math.sin(alpha_p) / 16) * math.exp(-rates.gamma_beta * t / 2) * w
    try:
        return _qubit_phase(harmonic)
    except InvariantViolationError as exc:
        parameters = {"alpha_p": alpha_p, "beta_p": beta_p, "t": t, "chi": chi, **bath.model_dump()}
        logger.error("Closed-form SGAD phase distribution broke down at %s", parameters)
        raise ClosedFormBreakdownError(str(exc), parameters) from exc


def sgad_evolve_closed_form(rho0: DensityMatrix, bath: SgadBathParams, t: float) -> DensityMatrix:
    """Closed-form SGAD state at time t for any qubit start (lab frame)."""
    _require_qubit(rho0)
    _check_time(t)
    rates = sgad_rates(bath)
    decay = math.exp(-rates.gamma_beta * t)
    fraction = rates.excited_fraction
    p_up = fraction + (float(np.real(rho0.entries[0, 0])) - fraction) * decay
    c, s = rates.propagators(t)
    u0 = rho0.entries[0, 1]
    coherence = math.exp(-rates.gamma_beta * t / 2) * (
        (c - 1j * rates.omega * s) * u0 - rates.gamma0 * rates.m * s * np.conj(u0)
    )
    entries = np.array([[p_up, coherence], [np.conj(coherence), 1.0 - p_up]], dtype=complex)
    return DensityMatrix(QUBIT, entries)


def lindblad_operators(bath: SgadBathParams) -> Tuple[np.ndarray, np.ndarray]:
    """R1 = sqrt(gamma0 (N_th + 1) / 2) R and R2 = sqrt(gamma0 N_th / 2) R^dagger."""
    rates = sgad_rates(bath)
    base = SIGMA_MINUS * math.cosh(bath.r) + np.exp(1j * bath.Phi) * SIGMA_PLUS * math.sinh(bath.r)
    r1 = math.sqrt(bath.gamma0 * (rates.n_th + 1) / 2) * base
    r2 = math.sqrt(bath.gamma0 * rates.n_th / 2) * base.conj().T
    return r1, r2


def _master_generator(bath: SgadBathParams, rates: DerivedSgadRates):
    g0, n, m = bath.gamma0, rates.n_eff, rates.m
    sp_sm = SIGMA_PLUS @ SIGMA_MINUS
    sm_sp = SIGMA_MINUS @ SIGMA_PLUS

    def generator(rho: np.ndarray) -> np.ndarray:
        return (
            g0 * (n + 1) * (SIGMA_MINUS @ rho @ SIGMA_PLUS - 0.5 * sp_sm @ rho - 0.5 * rho @ sp_sm)
            + g0 * n * (SIGMA_PLUS @ rho @ SIGMA_MINUS - 0.5 * sm_sp @ rho - 0.5 * rho @ sm_sp)
            - g0 * m * SIGMA_PLUS @ rho @ SIGMA_PLUS
            - g0 * np.conj(m) * SIGMA_MINUS @ rho @ SIGMA_MINUS
        )

    return generator


def _operator_generator(bath: SgadBathParams):
    operators = lindblad_operators(bath)

    def generator(rho: np.ndarray) -> np.ndarray:
        total = np.zeros_like(rho)
        for op in operators:
            number = op.conj().T @ op
            total += 2 * op @ rho @ op.conj().T - number @ rho - rho @ number
        return total

    return generator


def liouvillian(
    bath: SgadBathParams,
    form: Literal["master", "operators"] = "master",
    frame: Frame = "lab",
) -> np.ndarray:
    """4x4 superoperator acting on row-major vec(rho).

    ``form`` selects the master-equation terms or the two-operator Lindblad form;
    ``frame="lab"`` adds the free Hamiltonian (omega / 2) sigma_z.
    """
    rates = sgad_rates(bath)
    if form == "master":
        dissipator = _master_generator(bath, rates)
    elif form == "operators":
        dissipator = _operator_generator(bath)
    else:
        raise SpinDomainError(f"Unknown Liouvillian form '{form}'")
    if frame not in ("lab", "interaction"):
        raise SpinDomainError(f"Unknown frame '{frame}'")
    hamiltonian = 0.5 * bath.omega * SIGMA_Z

    columns = []
    for index in range(4):
        unit = np.zeros(4, dtype=complex)
        unit[index] = 1.0
        rho = unit.reshape(2, 2)
        image = dissipator(rho)
        if frame == "lab":
            image = image - 1j * (hamiltonian @ rho - rho @ hamiltonian)
        columns.append(image.reshape(-1))
    return np.stack(columns, axis=1)


def default_steps(bath: SgadBathParams, t: float) -> int:
    rates = sgad_rates(bath)
    scale = max(1.0, rates.gamma_beta * t, bath.omega * t)
    return int(math.ceil(settings.ode_steps_per_unit * scale))


def lindblad_evolve(
    rho0: DensityMatrix,
    bath: SgadBathParams,
    t: float,
    steps: Optional[int] = None,
    frame: Frame = "lab",
) -> DensityMatrix:
    """Integrate the SGAD master equation with fixed-step classical RK4."""
    _require_qubit(rho0)
    _check_time(t)
    rates = sgad_rates(bath)
    steps = default_steps(bath, t) if steps is None else steps
    minimum = max(1, math.ceil(MIN_STEPS_PER_RATE * rates.gamma_beta * t))
    if steps < minimum:
        raise SpinDomainError(f"steps = {steps} is below {minimum} (100 per unit gamma_beta t)")
    if t == 0:
        return rho0

    h = t / steps
    generator = liouvillian(bath, frame=frame) * h
    # one RK4 step of a linear ODE is the 4th-order Taylor polynomial of exp(hL)
    step = np.eye(4, dtype=complex)
    term = np.eye(4, dtype=complex)
    for order in range(1, 5):
        term = term @ generator / order
        step = step + term

    state = np.array(rho0.entries, dtype=complex)
    drift = 0.0
    for _ in range(steps):
        state = (step @ state.reshape(-1)).reshape(2, 2)
        state = 0.5 * (state + state.conj().T)
        trace = np.real(np.trace(state))
        drift += abs(trace - 1.0)
        state /= trace
    finite = bool(np.all(np.isfinite(state)))
    smallest = float(np.linalg.eigvalsh(state)[0]) if finite else -math.inf
    if not finite or drift > TRACE_DRIFT_LIMIT or smallest < -TRACE_DRIFT_LIMIT:
        suggested = max(default_steps(bath, t), 4 * steps)
        raise NumericalInstabilityError(
            f"Integration unstable over {steps} steps (trace drift {drift:.3e}, "
            f"smallest eigenvalue {smallest:.3e})",
            suggested_steps=suggested,
        )
    logger.debug("Integrated SGAD master equation to t=%.4g in %d steps (drift %.2e)", t, steps, drift)
    return DensityMatrix(QUBIT, state)


def asymptotic_state(bath: SgadBathParams) -> DensityMatrix:
    """diag(1 - p, p) with p = (1/2)[1 + 1/(2N + 1)] on m = -1/2."""
    rates = sgad_rates(bath)
    p = 0.5 * (1.0 + 1.0 / (2 * rates.n_eff + 1))
    return DensityMatrix(QUBIT, np.diag([1.0 - p, p]).astype(complex))


def maximally_mixed_qubit() -> DensityMatrix:
    return DensityMatrix(QUBIT, np.eye(2, dtype=complex) / 2)

