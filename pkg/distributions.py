"""
Number and phase distributions of spin-j states.

The phase distribution is obtained from the Q-function by integrating over
the polar angle. The theta integral is done analytically, which turns P(phi)
into a trigonometric polynomial

    P(phi) = sum_{n,m} K_nm rho_nm exp(i (n - m) phi),

with K the Beta-function kernel returned by :func:`beta_kernel` (n, m are
m-values, not storage indices).
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import betaln, gammaln

from errors import InvariantViolationError, SpinDomainError
from spin_states import DensityMatrix, SpinSystem, coherent_amplitudes

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
NORMALIZATION_TOL = 1e-10
NEGATIVITY_TOL = 1e-9
CHECK_GRID = 4096
PROB_CLAMP = 1e-12
PROB_SUM_TOL = 1e-10

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True, eq=False)
class NumberDistribution:
    """p(m) in storage order (index 0 is m = +j)."""

    system: SpinSystem
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if probs.size != self.system.d:
            raise SpinDomainError(f"Expected {self.system.d} probabilities, got {probs.size}")
        if np.any(probs < -PROB_CLAMP):
            raise SpinDomainError(f"Negative probability {probs.min():.3e}")
        probs = np.clip(probs, 0.0, None)
        if abs(probs.sum() - 1.0) > PROB_SUM_TOL:
            raise SpinDomainError(f"Probabilities sum to {probs.sum()!r}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def prob(self, m: float) -> float:
        return float(self.probs[self.system.index_of(m)])


@dataclass(frozen=True, eq=False)
class BetaKernel:
    system: SpinSystem
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-14):
            raise InvariantViolationError("Beta kernel is not symmetric")
        if np.max(np.abs(np.diag(matrix) - 1.0 / TWO_PI)) > NORMALIZATION_TOL:
            raise InvariantViolationError("Beta kernel diagonal differs from 1/(2 pi)")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True, eq=False)
class PhaseDistribution:
    """P(phi) = sum_k c_k exp(i k phi) for k = -2j..2j; ``coeffs[k + 2j]`` holds c_k."""

    system: SpinSystem
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        band = self.bandwidth
        if coeffs.size != 2 * band + 1:
            raise SpinDomainError(f"Expected {2 * band + 1} Fourier coefficients, got {coeffs.size}")
        if np.max(np.abs(coeffs - coeffs[::-1].conj())) > 1e-12:
            raise InvariantViolationError("Fourier coefficients are not conjugate-symmetric")
        if abs(coeffs[band] - 1.0 / TWO_PI) > NORMALIZATION_TOL:
            raise InvariantViolationError(f"c_0 = {coeffs[band]!r}, expected 1/(2 pi)")
        minimum = float(density_on_grid(coeffs, CHECK_GRID).min())
        if minimum < -NEGATIVITY_TOL:
            raise InvariantViolationError(f"P(phi) dips to {minimum:.3e}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def bandwidth(self) -> int:
        return self.system.d - 1

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.bandwidth:
            return 0j
        return complex(self.coeffs[k + self.bandwidth])

    def shifted(self, delta: float) -> "PhaseDistribution":
        """Distribution of phi + delta, i.e. phi -> P(phi + delta)."""
        k = np.arange(-self.bandwidth, self.bandwidth + 1)
        return PhaseDistribution(self.system, self.coeffs * np.exp(1j * k * delta))

    def is_uniform(self, tol: float = 1e-12) -> bool:
        harmonics = np.delete(self.coeffs, self.bandwidth)
        return bool(np.all(np.abs(harmonics) < tol))


def uniform_phase(system: SpinSystem) -> PhaseDistribution:
    coeffs = np.zeros(2 * system.d - 1, dtype=complex)
    coeffs[system.d - 1] = 1.0 / TWO_PI
    return PhaseDistribution(system, coeffs)


def density_on_grid(coeffs: np.ndarray, n_points: int) -> np.ndarray:
    """Evaluate P on the uniform grid 2 pi q / n_points; ``coeffs`` may be stacked (..., 2B+1)."""
    coeffs = np.asarray(coeffs)
    band = (coeffs.shape[-1] - 1) // 2
    k = np.arange(-band, band + 1)
    phi = TWO_PI * np.arange(n_points) / n_points
    basis = np.exp(1j * np.outer(k, phi))
    return np.real(coeffs @ basis)


@functools.lru_cache(maxsize=64)
def _kernel_matrix(twice_j: int) -> np.ndarray:
    j = twice_j / 2
    m = j - np.arange(twice_j + 1)
    log_binom = gammaln(2 * j + 1) - gammaln(j + m + 1) - gammaln(j - m + 1)
    half_sum = (m[:, None] + m[None, :]) / 2
    log_kernel = (
        np.log((2 * j + 1) / TWO_PI)
        + 0.5 * (log_binom[:, None] + log_binom[None, :])
        + betaln(j + half_sum + 1, j - half_sum + 1)
    )
    matrix = np.exp(log_kernel)
    return 0.5 * (matrix + matrix.T)


def beta_kernel(system: SpinSystem) -> BetaKernel:
    """Kernel K_nm = ((2j+1)/(2 pi)) sqrt(C_n C_m) B(j + (n+m)/2 + 1, j - (n+m)/2 + 1), storage order."""
    return BetaKernel(system, _kernel_matrix(system.d - 1))


def fourier_coefficients(rho_entries: np.ndarray, kernel: BetaKernel) -> np.ndarray:
    """c_k for k = -2j..2j from (stacked) density matrices in storage order."""
    weighted = np.asarray(rho_entries) * kernel.matrix
    band = kernel.system.d - 1
    # storage column minus row index equals n - m in m-values
    return np.stack(
        [np.trace(weighted, offset=k, axis1=-2, axis2=-1) for k in range(-band, band + 1)],
        axis=-1,
    )


def phase_distribution(rho: DensityMatrix) -> PhaseDistribution:
    """P(phi) of a density matrix through the Beta kernel."""
    coeffs = fourier_coefficients(rho.entries, beta_kernel(rho.system))
    # conjugate symmetry holds exactly for a Hermitian rho; symmetrize round-off
    coeffs = 0.5 * (coeffs + coeffs[::-1].conj())
    try:
        return PhaseDistribution(rho.system, coeffs)
    except InvariantViolationError:
        logger.error("Phase distribution of a validated density matrix broke its invariants")
        raise


def q_function(rho: DensityMatrix, theta: ArrayLike, phi: ArrayLike) -> ArrayLike:
    """Husimi function <theta, phi| rho |theta, phi>; broadcasts over theta and phi."""
    theta_b, phi_b = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    system = rho.system
    j = system.j
    m = system.m_values
    upper = np.rint(j + m).astype(int)
    lower = np.rint(j - m).astype(int)
    log_binom = gammaln(2 * j + 1) - gammaln(upper + 1) - gammaln(lower + 1)
    sin_half = np.sin(theta_b[..., None] / 2)
    cos_half = np.cos(theta_b[..., None] / 2)
    amplitudes = (
        np.exp(0.5 * log_binom)
        * sin_half**upper
        * cos_half**lower
        * np.exp(-1j * upper * phi_b[..., None])
    )
    values = np.real(np.einsum("...i,ij,...j->...", amplitudes.conj(), rho.entries, amplitudes))
    if values.ndim == 0:
        return float(values)
    return values


def number_distribution(rho: DensityMatrix) -> NumberDistribution:
    diagonal = np.diag(rho.entries)
    if np.max(np.abs(diagonal.imag)) > 1e-12:
        raise InvariantViolationError("Diagonal of rho has an imaginary part")
    return NumberDistribution(rho.system, diagonal.real)


def eval_phase(pd: PhaseDistribution, phi: ArrayLike) -> ArrayLike:
    """P(phi), clamped at zero within the negativity tolerance."""
    phi_arr = np.asarray(phi, dtype=float)
    k = np.arange(-pd.bandwidth, pd.bandwidth + 1)
    values = np.exp(1j * phi_arr[..., None] * k) @ pd.coeffs
    if np.max(np.abs(values.imag)) > 1e-12:
        raise InvariantViolationError("P(phi) has an imaginary part")
    density = values.real
    if np.min(density) < -NEGATIVITY_TOL:
        raise InvariantViolationError(f"P(phi) = {np.min(density):.3e} is negative")
    density = np.clip(density, 0.0, None)
    if density.ndim == 0:
        return float(density)
    return density


def phase_table(pd: PhaseDistribution, n_grid: int) -> tuple[np.ndarray, np.ndarray]:
    """(phi, density) columns on an n_grid-point uniform grid of [0, 2 pi)."""
    phi = TWO_PI * np.arange(n_grid) / n_grid
    return phi, eval_phase(pd, phi)


def coherent_density(system: SpinSystem, theta: float, phi: float) -> DensityMatrix:
    vector = coherent_amplitudes(system, theta, phi)
    return DensityMatrix(system, np.outer(vector, vector.conj()))
