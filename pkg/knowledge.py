"""
Entropies and relative-entropy knowledge measures (all in bits).

Knowledge of a variable is its relative entropy with respect to the uniform
distribution: for d outcomes R = sum p log2(d p) = log2 d - H(p); for the
phase R_phi = int P log2(2 pi P) dphi over [0, 2 pi).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import entr, rel_entr

from config import settings
from distributions import (
    TWO_PI,
    PhaseDistribution,
    NumberDistribution,
    density_on_grid,
    number_distribution,
    phase_distribution,
)
from errors import PropertyViolationError, SpinDomainError
from spin_states import DensityMatrix

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)
DISTRIBUTION_TOL = 1e-9
NEGATIVE_CLAMP = 1e-12
DENSITY_FLOOR = 1e-15
UNITARY_TOL = 1e-10
BOUND_SLACK = 1e-9
IDENTITY_TOL = 1e-12
CONTINUOUS_NORM_TOL = 1e-6

Distribution = Union[Sequence[float], np.ndarray, NumberDistribution]


def _as_distribution(p: Distribution) -> np.ndarray:
    values = p.probs if isinstance(p, NumberDistribution) else np.asarray(p, dtype=float)
    values = values.reshape(-1)
    if values.size == 0:
        raise SpinDomainError("Empty distribution")
    if np.any(values < -NEGATIVE_CLAMP):
        raise SpinDomainError(f"Distribution has negative entry {values.min():.3e}")
    total = values.sum()
    if abs(total - 1.0) > DISTRIBUTION_TOL:
        raise SpinDomainError(f"Distribution sums to {total!r}, expected 1")
    return np.clip(values, 0.0, None)


def shannon(p: Distribution) -> float:
    """H(p) = -sum p log2 p with 0 log 0 = 0."""
    values = _as_distribution(p)
    return float(np.sum(entr(values)) / LN2)


def rel_entropy_discrete(f: Distribution, g: Distribution) -> float:
    """Relative entropy sum f log2(f / g); g must not vanish where f does not."""
    f_values = _as_distribution(f)
    g_values = _as_distribution(g)
    if f_values.shape != g_values.shape:
        raise SpinDomainError(f"Support sizes differ: {f_values.size} vs {g_values.size}")
    if np.any((g_values == 0) & (f_values > 0)):
        raise SpinDomainError("f is not absolutely continuous with respect to g")
    value = float(np.sum(rel_entr(f_values, g_values)) / LN2)
    return max(value, 0.0)


def knowledge_discrete(p: Distribution) -> float:
    """R = sum p log2(d p), in [0, log2 d]."""
    values = _as_distribution(p)
    return knowledge_discrete_batch(values)


def knowledge_discrete_batch(probs: np.ndarray) -> Union[float, np.ndarray]:
    """Unchecked R over the last axis of stacked probability vectors."""
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    d = probs.shape[-1]
    values = np.sum(rel_entr(probs, 1.0 / d), axis=-1) / LN2
    values = np.clip(values, 0.0, np.log2(d))
    if np.ndim(values) == 0:
        return float(values)
    return values


def _check_quadrature(n_quad: int, bandwidth: int) -> None:
    if n_quad < 8 * (bandwidth + 1):
        raise SpinDomainError(f"n_quad = {n_quad} is below 8(2j+1) = {8 * (bandwidth + 1)}")


def phase_knowledge_batch(coeffs: np.ndarray, n_quad: int) -> Union[float, np.ndarray]:
    """R_phi for stacked Fourier coefficient vectors (..., 4j+1), periodic trapezoid rule."""
    coeffs = np.asarray(coeffs)
    _check_quadrature(n_quad, (coeffs.shape[-1] - 1) // 2)
    density = np.clip(density_on_grid(coeffs, n_quad), 0.0, None)
    safe = np.where(density > DENSITY_FLOOR, density, 1.0)
    integrand = np.where(density > DENSITY_FLOOR, density * np.log2(TWO_PI * safe), 0.0)
    values = integrand.sum(axis=-1) * (TWO_PI / n_quad)
    if np.ndim(values) == 0:
        return float(values)
    return values


def knowledge_phase(pd: PhaseDistribution, n_quad: Optional[int] = None) -> float:
    """R_phi = int P log2(2 pi P) dphi on n_quad uniform points."""
    n_quad = n_quad or settings.n_quad
    _check_quadrature(n_quad, pd.bandwidth)
    total = float(np.sum(density_on_grid(pd.coeffs, n_quad)) * TWO_PI / n_quad)
    if abs(total - 1.0) > DISTRIBUTION_TOL:
        raise SpinDomainError(f"Phase distribution integrates to {total!r}")
    value = phase_knowledge_batch(pd.coeffs, n_quad)
    if value < -BOUND_SLACK:
        logger.warning("R_phi = %.3e is negative beyond tolerance", value)
    return max(value, 0.0)


def phase_entropy(pd: PhaseDistribution, n_quad: Optional[int] = None) -> float:
    """Continuous Shannon entropy of P(phi): log2(2 pi) - R_phi. Its sign is not asserted."""
    return float(np.log2(TWO_PI) - knowledge_phase(pd, n_quad))


def rel_entropy_continuous(
    f_samples: np.ndarray, interval: Tuple[float, float], g_value: float
) -> float:
    """int f log2(f / g) over ``interval`` from midpoint samples of f against a constant density g."""
    a, b = interval
    if not b > a:
        raise SpinDomainError(f"Empty interval [{a}, {b}]")
    if g_value <= 0:
        raise SpinDomainError("Reference density must be positive")
    samples = np.asarray(f_samples, dtype=float).reshape(-1)
    if np.any(samples < 0):
        raise SpinDomainError("Density samples must be non-negative")
    width = (b - a) / samples.size
    if abs(samples.sum() * width - 1.0) > CONTINUOUS_NORM_TOL:
        raise SpinDomainError(f"Density integrates to {samples.sum() * width!r}, expected 1")
    return float(np.sum(rel_entr(samples, g_value)) * width / LN2)


def box_density(x0: float, n_points: int = 4096) -> Tuple[np.ndarray, Tuple[float, float]]:
    """Midpoint samples on [0, 1] of p(x) = x0 on [0, 1/x0] and 0 elsewhere."""
    if x0 < 1:
        raise SpinDomainError("Box height x0 must be at least 1")
    midpoints = (np.arange(n_points) + 0.5) / n_points
    return np.where(midpoints < 1.0 / x0, float(x0), 0.0), (0.0, 1.0)


@dataclass(frozen=True, eq=False)
class HermitianPair:
    """Eigenbases (as unitary column matrices) of two observables A and B."""

    basis_a: np.ndarray
    basis_b: np.ndarray

    def __post_init__(self) -> None:
        for name in ("basis_a", "basis_b"):
            basis = np.array(getattr(self, name), dtype=complex)
            if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
                raise SpinDomainError(f"{name} must be a square matrix")
            if np.max(np.abs(basis.conj().T @ basis - np.eye(basis.shape[0]))) > UNITARY_TOL:
                raise SpinDomainError(f"{name} is not unitary")
            basis.setflags(write=False)
            object.__setattr__(self, name, basis)
        if self.basis_a.shape != self.basis_b.shape:
            raise SpinDomainError("Bases act on different dimensions")

    @property
    def d(self) -> int:
        return self.basis_a.shape[0]

    @classmethod
    def from_observables(cls, a: np.ndarray, b: np.ndarray) -> "HermitianPair":
        _, vectors_a = np.linalg.eigh(np.asarray(a, dtype=complex))
        _, vectors_b = np.linalg.eigh(np.asarray(b, dtype=complex))
        return cls(vectors_a, vectors_b)


def spin_half_axis_basis(theta: float) -> np.ndarray:
    """Eigenbasis of n.sigma, n = (sin theta, 0, cos theta); +1 eigenvector first."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def mub_overlap(pair: HermitianPair) -> float:
    """f(A, B) = max |<a|b>|."""
    return float(np.max(np.abs(pair.basis_a.conj().T @ pair.basis_b)))


def born_probabilities(basis: np.ndarray, rho: DensityMatrix) -> np.ndarray:
    probs = np.real(np.diag(basis.conj().T @ rho.entries @ basis))
    return np.clip(probs, 0.0, None)


class EntropicBoundReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    h_a: float
    h_b: float
    r_a: float
    r_b: float
    overlap: float
    is_mub: bool
    maassen_uffink_bound: float

    @property
    def knowledge_sum(self) -> float:
        return self.r_a + self.r_b


def check_entropic_bounds(pair: HermitianPair, rho: DensityMatrix) -> EntropicBoundReport:
    """Evaluate H and R for both observables and assert the entropic relations they must obey."""
    if rho.system.d != pair.d:
        raise SpinDomainError(f"State dimension {rho.system.d} does not match pair dimension {pair.d}")
    d = pair.d
    probs_a = born_probabilities(pair.basis_a, rho)
    probs_b = born_probabilities(pair.basis_b, rho)
    h_a, h_b = shannon(probs_a), shannon(probs_b)
    r_a, r_b = knowledge_discrete(probs_a), knowledge_discrete(probs_b)
    log_d = np.log2(d)

    mismatch = abs((r_a + r_b) - (2 * log_d - h_a - h_b))
    if mismatch > IDENTITY_TOL:
        raise PropertyViolationError(f"Knowledge/entropy identity off by {mismatch:.3e}")

    overlap = mub_overlap(pair)
    bound = float(-2.0 * np.log2(overlap))
    if h_a + h_b < bound - BOUND_SLACK:
        raise PropertyViolationError(
            f"H(A) + H(B) = {h_a + h_b:.12f} is below the overlap bound {bound:.12f}"
        )

    is_mub = abs(overlap - d ** -0.5) < UNITARY_TOL
    if is_mub and r_a + r_b > log_d + BOUND_SLACK:
        raise PropertyViolationError(
            f"Knowledge sum {r_a + r_b:.12f} exceeds log2 d = {log_d:.12f} for a mutually unbiased pair"
        )
    return EntropicBoundReport(
        h_a=h_a, h_b=h_b, r_a=r_a, r_b=r_b, overlap=overlap, is_mub=is_mub, maassen_uffink_bound=bound
    )


class KnowledgeReport(BaseModel):
    """Number and phase knowledge of one state, with R_T and the weighted sum R_S(mu)."""

    model_config = ConfigDict(frozen=True)

    r_m: float = Field(ge=0.0)
    r_phi: float = Field(ge=0.0)
    r_t: float
    r_s: float
    mu: float = Field(gt=0.0)
    d: int = Field(ge=2)

    @model_validator(mode="after")
    def check_identities(self) -> "KnowledgeReport":
        if self.r_m > np.log2(self.d) + IDENTITY_TOL:
            raise ValueError(f"r_m = {self.r_m} exceeds log2 d")
        if self.r_t != self.r_m + self.r_phi:
            raise ValueError("r_t must equal r_m + r_phi")
        if self.r_s != self.mu * self.r_phi + self.r_m:
            raise ValueError("r_s must equal mu * r_phi + r_m")
        return self

    @classmethod
    def assemble(cls, r_m: float, r_phi: float, mu: float, d: int) -> "KnowledgeReport":
        return cls(r_m=r_m, r_phi=r_phi, r_t=r_m + r_phi, r_s=mu * r_phi + r_m, mu=mu, d=d)


def knowledge_report(rho: DensityMatrix, mu: float, n_quad: Optional[int] = None) -> KnowledgeReport:
    if mu <= 0:
        raise SpinDomainError(f"mu must be positive, got {mu}")
    r_m = knowledge_discrete(number_distribution(rho))
    r_phi = knowledge_phase(phase_distribution(rho), n_quad)
    return KnowledgeReport.assemble(r_m, r_phi, mu, rho.system.d)
