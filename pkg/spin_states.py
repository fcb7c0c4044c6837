"""
Spin-j state construction: Wigner-Dicke basis states, atomic coherent states,
the four-level ansatz and generic pure or mixed density matrices.

Storage order is fixed: index 0 holds m = +j and the index runs down to
m = -j at index d - 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.linalg import sqrtm
from scipy.spatial.transform import Rotation
from scipy.special import comb

from errors import InvariantViolationError, SpinDomainError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_SLACK = 1e-10
# Negative eigenvalues above this floor are round-off and left untouched.
ROUNDOFF_FLOOR = 1e-13
FOUR_LEVEL_NORM_TOL = 1e-9


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SpinSystem:
    """A spin-j system of dimension d = 2j + 1."""

    j: float

    def __post_init__(self) -> None:
        twice = 2 * self.j
        if twice < 1 or abs(twice - round(twice)) > 1e-12:
            raise SpinDomainError(f"j must be a positive half-integer, got {self.j}")
        object.__setattr__(self, "j", round(twice) / 2)

    @property
    def d(self) -> int:
        return int(round(2 * self.j)) + 1

    @classmethod
    def from_dimension(cls, d: int) -> "SpinSystem":
        return cls((d - 1) / 2)

    @property
    def m_values(self) -> np.ndarray:
        """m values in storage order (+j first)."""
        return self.j - np.arange(self.d)

    def index_of(self, m: float) -> int:
        offset = self.j - m
        if abs(offset - round(offset)) > 1e-12 or not 0 <= round(offset) < self.d:
            raise SpinDomainError(f"m = {m} is not in {{-{self.j}, ..., +{self.j}}}")
        return int(round(offset))


@dataclass(frozen=True, eq=False)
class PureState:
    system: SpinSystem
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.size != self.system.d:
            raise SpinDomainError(
                f"Expected {self.system.d} amplitudes for j = {self.system.j}, got {amplitudes.size}"
            )
        norm = float(np.sum(np.abs(amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise SpinDomainError(f"State is not normalised: sum |a|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    system: SpinSystem
    entries: np.ndarray
    clamped: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        rho = np.asarray(self.entries, dtype=complex)
        d = self.system.d
        if rho.shape != (d, d):
            raise SpinDomainError(f"Density matrix must be {d}x{d}, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvariantViolationError("Density matrix is not Hermitian")
        trace = np.trace(rho)
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvariantViolationError(f"Density matrix trace is {trace!r}, expected 1")

        hermitized = 0.5 * (rho + rho.conj().T)
        eigenvalues, eigenvectors = np.linalg.eigh(hermitized)
        smallest = float(eigenvalues[0])
        if smallest < -POSITIVITY_SLACK:
            raise InvariantViolationError(f"Density matrix has negative eigenvalue {smallest:.3e}")
        if smallest < -ROUNDOFF_FLOOR:
            clipped = np.clip(eigenvalues, 0.0, None)
            clipped /= clipped.sum()
            hermitized = (eigenvectors * clipped) @ eigenvectors.conj().T
            logger.warning("Clamped density matrix with smallest eigenvalue %.3e", smallest)
            object.__setattr__(self, "clamped", True)
        object.__setattr__(self, "entries", _frozen(hermitized))

    @classmethod
    def from_array(cls, entries: np.ndarray) -> "DensityMatrix":
        entries = np.asarray(entries, dtype=complex)
        return cls(SpinSystem.from_dimension(entries.shape[0]), entries)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(np.trace(self.entries @ operator))


class CoherentParams(BaseModel):
    """Angles of an atomic coherent state (alpha', beta' when labelling initial states)."""

    model_config = ConfigDict(frozen=True)

    theta: float = Field(ge=0.0, le=np.pi)
    phi: float = 0.0

    @field_validator("phi", mode="after")
    @classmethod
    def reduce_phi(cls, v: float) -> float:
        return float(np.mod(v, 2 * np.pi))


def make_wigner_dicke(system: SpinSystem, m: float) -> PureState:
    """Return the Wigner-Dicke state |j, m>."""
    amplitudes = np.zeros(system.d, dtype=complex)
    amplitudes[system.index_of(m)] = 1.0
    return PureState(system, amplitudes)


def coherent_amplitudes(system: SpinSystem, theta: float, phi: float) -> np.ndarray:
    j = system.j
    m = system.m_values
    upper = np.rint(j + m).astype(int)
    lower = np.rint(j - m).astype(int)
    magnitudes = (
        np.sqrt(comb(2 * j, upper))
        * np.sin(theta / 2) ** upper
        * np.cos(theta / 2) ** lower
    )
    amplitudes = magnitudes * np.exp(-1j * upper * phi)
    # binomial theorem makes this 1 up to round-off
    return amplitudes / np.linalg.norm(amplitudes)


def make_coherent(system: SpinSystem, params: CoherentParams) -> PureState:
    """Atomic coherent state |theta, phi> expanded over the Wigner-Dicke basis."""
    return PureState(system, coherent_amplitudes(system, params.theta, params.phi))


def make_four_level(
    r_alpha: float,
    r_beta: float,
    r_gamma: float,
    r_delta: float,
    theta_alpha: float,
    theta_beta: float,
    theta_gamma: float,
    auto_normalize: bool = False,
) -> PureState:
    """Spin-3/2 ansatz state; r_alpha weights m = -3/2 and r_delta (zero phase) weights m = +3/2."""
    radii = np.array([r_delta, r_gamma, r_beta, r_alpha], dtype=float)
    if np.any(radii < 0):
        raise SpinDomainError("Ansatz radii must be non-negative")
    norm = float(np.sum(radii**2))
    if auto_normalize:
        if norm == 0:
            raise SpinDomainError("Cannot normalise an all-zero ansatz")
        radii = radii / np.sqrt(norm)
    elif abs(norm - 1.0) > FOUR_LEVEL_NORM_TOL:
        raise SpinDomainError(f"Ansatz radii must satisfy sum r^2 = 1, got {norm!r}")
    else:
        radii = radii / np.sqrt(norm)
    phases = np.array([0.0, theta_gamma, theta_beta, theta_alpha])
    return PureState(SpinSystem(1.5), radii * np.exp(1j * phases))


def density_from_pure(psi: PureState) -> DensityMatrix:
    vector = psi.amplitudes
    return DensityMatrix(psi.system, np.outer(vector, vector.conj()))


def random_state(system: SpinSystem, kind: Literal["pure", "mixed"], seed: int) -> DensityMatrix:
    """Seeded random state: Haar-like pure vector or Ginibre mixed state."""
    rng = np.random.default_rng(seed)
    d = system.d
    if kind == "pure":
        vector = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        vector /= np.linalg.norm(vector)
        return density_from_pure(PureState(system, vector))
    if kind == "mixed":
        ginibre = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rho = ginibre @ ginibre.conj().T
        return DensityMatrix(system, rho / np.trace(rho))
    raise SpinDomainError(f"Unknown random state kind '{kind}'")


def angular_momentum_matrices(system: SpinSystem) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Jx, Jy, Jz in the fixed storage order."""
    j = system.j
    m = system.m_values
    jz = np.diag(m).astype(complex)
    # J+ |j, m> lands one index lower in storage
    raising = np.zeros((system.d, system.d), dtype=complex)
    for index in range(1, system.d):
        m_from = m[index]
        raising[index - 1, index] = np.sqrt(j * (j + 1) - m_from * (m_from + 1))
    lowering = raising.conj().T
    jx = (raising + lowering) / 2
    jy = (raising - lowering) / 2j
    return jx, jy, jz


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2; insensitive to global phases."""
    root = sqrtm(a.entries)
    inner = sqrtm(root @ b.entries @ root)
    return float(np.real(np.trace(inner)) ** 2)


def uncertainty_moments(rho: DensityMatrix, theta: float, phi: float) -> Tuple[float, float, float]:
    """Second moments <J_xi^2>, <J_eta^2>, <J_zeta^2> in the frame rotated by theta about (sin phi, -cos phi, 0)."""
    jx, jy, jz = angular_momentum_matrices(rho.system)
    axis = np.array([np.sin(phi), -np.cos(phi), 0.0])
    frame = Rotation.from_rotvec(theta * axis).as_matrix()
    stacked = np.stack([jx, jy, jz])
    rotated = np.tensordot(frame.T, stacked, axes=1)
    return tuple(float(np.real(rho.expectation(op @ op))) for op in rotated)


def robertson_check(rho: DensityMatrix, a: np.ndarray, b: np.ndarray) -> Tuple[float, float]:
    """Return (Delta A * Delta B, |<[A, B]>| / 2) for the variance-form uncertainty relation."""
    def spread(op: np.ndarray) -> float:
        mean = np.real(rho.expectation(op))
        return float(np.sqrt(max(np.real(rho.expectation(op @ op)) - mean**2, 0.0)))

    commutator = a @ b - b @ a
    return spread(a) * spread(b), 0.5 * abs(rho.expectation(commutator))
