"""
Searches over state space for the extremal phase knowledge and the largest
weights mu (qubit) and mu_2 (spin-3/2) that keep mu R_phi + R_m <= log2 d.

Spin-3/2 pure states use the four-level ansatz with radii written in
hyperspherical angles (a1, a2, a3):

    r_alpha = |cos a1|, r_beta = |sin a1 cos a2|,
    r_gamma = |sin a1 sin a2 cos a3|, r_delta = |sin a1 sin a2 sin a3|,

so every real 6-vector (a1, a2, a3, theta_alpha, theta_beta, theta_gamma) is a
valid normalised state and Nelder-Mead can run unconstrained.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import minimize, minimize_scalar

from config import settings
from distributions import beta_kernel, fourier_coefficients
from errors import BoundFalsificationError, PropertyViolationError, SpinDomainError
from knowledge import knowledge_discrete_batch, phase_knowledge_batch
from spin_states import SpinSystem, make_four_level, make_wigner_dicke
from utils import ordered_map, timer_decorator

logger = logging.getLogger(__name__)

QUBIT = SpinSystem(0.5)
SPIN32 = SpinSystem(1.5)
COARSE_QUAD = 64
RATIO_PENALTY = 1e6
QUBIT_SLACK = 1e-6
SPIN32_SLACK = 1e-5
MU_CONSISTENCY = 0.05
ANSATZ_KEYS = ("r_alpha", "r_beta", "r_gamma", "r_delta", "theta_alpha", "theta_beta", "theta_gamma")


class SearchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    grid_density: int = Field(default_factory=lambda: settings.grid_density, ge=16)
    multistarts: int = Field(default_factory=lambda: settings.multistarts, ge=1)
    local_tol: float = Field(default_factory=lambda: settings.local_tol, gt=0)
    exclusion_eps: float = Field(default_factory=lambda: settings.exclusion_eps, gt=0)
    seed: int = Field(default_factory=lambda: settings.seed)
    n_quad: int = Field(default_factory=lambda: settings.n_quad, ge=32)
    verify_samples: int = Field(default=10_000, ge=0)
    max_workers: int = Field(default_factory=lambda: settings.max_workers, ge=1)


class BoundResult(BaseModel):
    """Extremal value of a search with its argmax and the per-restart objective trace."""

    model_config = ConfigDict(frozen=True)

    kind: str
    value: float
    argmax: Dict[str, float]
    trace: List[float] = Field(default_factory=list)
    extras: Dict[str, float] = Field(default_factory=dict)
    config: SearchConfig

    def to_record(self) -> Dict[str, object]:
        record: Dict[str, object] = {"kind": self.kind, "value": self.value}
        record.update({f"argmax_{key}": value for key, value in self.argmax.items()})
        record.update(self.extras)
        record.update({f"cfg_{key}": value for key, value in self.config.model_dump().items()})
        return record


class UnbiasednessReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    j: float
    max_wigner_dicke_r_phi: float
    mxk_r_phi: float
    mxk_r_m: float
    mutual: bool


# ---------------------------------------------------------------------------
# Objective evaluation


def qubit_knowledge(alpha: np.ndarray, n_quad: int):
    """(R_m, R_phi) of coherent qubit states |alpha, 0>, vectorised over alpha."""
    alpha = np.asarray(alpha, dtype=float)
    harmonic = np.sin(alpha) / 16
    coeffs = np.stack([harmonic, np.full_like(harmonic, 1 / (2 * np.pi)), harmonic], axis=-1)
    p_up = np.sin(alpha / 2) ** 2
    r_m = knowledge_discrete_batch(np.stack([p_up, 1 - p_up], axis=-1))
    return r_m, phase_knowledge_batch(coeffs.astype(complex), n_quad)


def ansatz_amplitudes(params: np.ndarray) -> np.ndarray:
    """Storage-order amplitudes (m = +3/2 first) for stacked 6-parameter vectors."""
    params = np.asarray(params, dtype=float)
    a1, a2, a3 = params[..., 0], params[..., 1], params[..., 2]
    r_alpha = np.abs(np.cos(a1))
    r_beta = np.abs(np.sin(a1) * np.cos(a2))
    r_gamma = np.abs(np.sin(a1) * np.sin(a2) * np.cos(a3))
    r_delta = np.abs(np.sin(a1) * np.sin(a2) * np.sin(a3))
    return np.stack(
        [
            r_delta.astype(complex),
            r_gamma * np.exp(1j * params[..., 5]),
            r_beta * np.exp(1j * params[..., 4]),
            r_alpha * np.exp(1j * params[..., 3]),
        ],
        axis=-1,
    )


def pure_state_knowledge(amplitudes: np.ndarray, system: SpinSystem, n_quad: int):
    """(R_m, R_phi) for stacked pure-state amplitude vectors of one spin system."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    rho = amplitudes[..., :, None] * amplitudes[..., None, :].conj()
    coeffs = fourier_coefficients(rho, beta_kernel(system))
    return knowledge_discrete_batch(np.abs(amplitudes) ** 2), phase_knowledge_batch(coeffs, n_quad)


def mixed_state_knowledge(rho: np.ndarray, system: SpinSystem, n_quad: int):
    rho = np.asarray(rho, dtype=complex)
    coeffs = fourier_coefficients(rho, beta_kernel(system))
    probs = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    return knowledge_discrete_batch(probs), phase_knowledge_batch(coeffs, n_quad)


def random_mixed_batch(system: SpinSystem, count: int, rng: np.random.Generator) -> np.ndarray:
    """Ginibre-ensemble density matrices, shape (count, d, d)."""
    d = system.d
    ginibre = rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))
    rho = ginibre @ np.conj(np.swapaxes(ginibre, -1, -2))
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]


def params_to_ansatz(params: Sequence[float]) -> Dict[str, float]:
    """Radii and phases (theta_delta removed as a global phase, angles in [0, 2 pi))."""
    amplitudes = ansatz_amplitudes(np.asarray(params))
    return amplitudes_to_ansatz(amplitudes)


def amplitudes_to_ansatz(amplitudes: np.ndarray) -> Dict[str, float]:
    amplitudes = np.asarray(amplitudes, dtype=complex)
    radii = np.abs(amplitudes)
    reference = np.angle(amplitudes[0]) if radii[0] > 0 else 0.0
    phases = np.mod(np.angle(amplitudes) - reference, 2 * np.pi)
    phases = np.where(radii > 0, phases, 0.0)
    return {
        "r_alpha": float(radii[3]),
        "r_beta": float(radii[2]),
        "r_gamma": float(radii[1]),
        "r_delta": float(radii[0]),
        "theta_alpha": float(phases[3]),
        "theta_beta": float(phases[2]),
        "theta_gamma": float(phases[1]),
    }


def ansatz_to_amplitudes(state: Dict[str, float]) -> np.ndarray:
    return make_four_level(*(state[key] for key in ANSATZ_KEYS), auto_normalize=True).amplitudes


def ansatz_knowledge(state: Dict[str, float], n_quad: Optional[int] = None):
    """(R_m, R_phi) of an ansatz state given by its radii and phases."""
    r_m, r_phi = pure_state_knowledge(ansatz_to_amplitudes(state), SPIN32, n_quad or settings.n_quad)
    return float(r_m), float(r_phi)


# ---------------------------------------------------------------------------
# Multistart driver


def _candidates(cfg: SearchConfig) -> np.ndarray:
    """grid_density**2 * 4 seeded uniform random samples of the box, extended (not reshuffled) as it grows."""
    rng = np.random.default_rng(cfg.seed)
    unit = rng.random((cfg.grid_density**2 * 4, 6))
    scale = np.array([np.pi / 2] * 3 + [2 * np.pi] * 3)
    return unit * scale


def _refine_all(
    objective: Callable[[np.ndarray], float],
    starts: np.ndarray,
    cfg: SearchConfig,
    label: str,
) -> List[tuple]:
    """Nelder-Mead from every start; results come back in submission order."""
    options = {"xatol": cfg.local_tol, "fatol": cfg.local_tol, "maxiter": 4000}

    def refine(start: np.ndarray) -> tuple:
        outcome = minimize(objective, start, method="Nelder-Mead", options=options)
        logger.debug("%s: objective %.9f after %d evaluations", label, outcome.fun, outcome.nfev)
        return float(outcome.fun), np.asarray(outcome.x)

    return ordered_map(refine, list(starts), cfg.max_workers, label)


def _falsify(excess: np.ndarray, witnesses: Callable[[int], Dict[str, float]], bound: float, label: str) -> float:
    worst = int(np.argmax(excess))
    if excess[worst] > 0:
        witness = witnesses(worst)
        logger.error("%s bound falsified by %.3e at %s", label, excess[worst], witness)
        raise BoundFalsificationError(
            f"{label}: weighted knowledge sum exceeds {bound} by {excess[worst]:.3e}",
            witness=witness,
            excess=float(excess[worst]),
        )
    return float(excess[worst])


# ---------------------------------------------------------------------------
# Qubit


@timer_decorator
def max_phase_knowledge_qubit(
    cfg: Optional[SearchConfig] = None, alpha_candidates: Optional[Sequence[float]] = None
) -> BoundResult:
    """Maximise R_phi over coherent qubit states; beta' = 0 by translation invariance."""
    cfg = cfg or SearchConfig()
    if alpha_candidates is not None:
        alphas = np.asarray(alpha_candidates, dtype=float)
        _, r_phi = qubit_knowledge(alphas, cfg.n_quad)
        best = int(np.argmax(r_phi))
        return BoundResult(
            kind="qubit_rphi_max",
            value=float(r_phi[best]),
            argmax={"alpha_p": float(alphas[best]), "beta_p": 0.0},
            trace=[float(v) for v in r_phi],
            config=cfg,
        )

    alphas = np.linspace(0.0, np.pi, cfg.grid_density + 1)
    _, r_phi = qubit_knowledge(alphas, cfg.n_quad)
    best = int(np.argmax(r_phi))
    step = alphas[1] - alphas[0]
    bounds = (max(alphas[best] - step, 0.0), min(alphas[best] + step, np.pi))
    refined = minimize_scalar(
        lambda a: -float(qubit_knowledge(a, cfg.n_quad)[1]),
        bounds=bounds,
        method="bounded",
        options={"xatol": cfg.local_tol},
    )
    alpha_star, value = float(refined.x), -float(refined.fun)
    if value < r_phi[best]:
        alpha_star, value = float(alphas[best]), float(r_phi[best])
    logger.info("Qubit max R_phi = %.6f at alpha' = %.6f", value, alpha_star)
    return BoundResult(
        kind="qubit_rphi_max",
        value=value,
        argmax={"alpha_p": alpha_star, "beta_p": 0.0},
        trace=[float(r_phi[best]), value],
        config=cfg,
    )


@timer_decorator
def find_mu_qubit(cfg: Optional[SearchConfig] = None) -> BoundResult:
    """Largest mu with mu R_phi + R_m <= 1 for every qubit state."""
    cfg = cfg or SearchConfig()
    r_phi_max = max_phase_knowledge_qubit(cfg)

    def ratio(alpha: float) -> float:
        r_m, r_phi = qubit_knowledge(alpha, cfg.n_quad)
        return (1 - r_m) / r_phi if r_phi > cfg.exclusion_eps else RATIO_PENALTY

    alphas = np.linspace(0.0, np.pi, cfg.grid_density + 1)
    r_m, r_phi = qubit_knowledge(alphas, cfg.n_quad)
    ratios = np.where(r_phi > cfg.exclusion_eps, (1 - r_m) / np.where(r_phi > 0, r_phi, 1.0), np.inf)
    best = int(np.argmin(ratios))
    step = alphas[1] - alphas[0]
    refined = minimize_scalar(
        ratio,
        bounds=(max(alphas[best] - step, 0.0), min(alphas[best] + step, np.pi)),
        method="bounded",
        options={"xatol": cfg.local_tol},
    )
    alpha_star, mu = float(refined.x), float(refined.fun)
    if mu > ratios[best]:
        alpha_star, mu = float(alphas[best]), float(ratios[best])
    r_m_star, r_phi_star = (float(v) for v in qubit_knowledge(alpha_star, cfg.n_quad))

    # verification: pure states over an (alpha', beta') grid, then random mixed states
    grid_alpha, grid_beta = np.meshgrid(
        np.linspace(0.0, np.pi, cfg.grid_density + 1),
        np.linspace(0.0, 2 * np.pi, cfg.grid_density, endpoint=False),
        indexing="ij",
    )
    amplitudes = np.stack(
        [np.sin(grid_alpha / 2) * np.exp(-1j * grid_beta), np.cos(grid_alpha / 2) + 0j], axis=-1
    ).reshape(-1, 2)
    pure_m, pure_phi = pure_state_knowledge(amplitudes, QUBIT, cfg.n_quad)
    pure_excess = mu * pure_phi + pure_m - 1 - QUBIT_SLACK
    flat_alpha, flat_beta = grid_alpha.reshape(-1), grid_beta.reshape(-1)
    max_pure = _falsify(
        pure_excess,
        lambda i: {"alpha_p": float(flat_alpha[i]), "beta_p": float(flat_beta[i])},
        1.0,
        "Qubit pure-state",
    )

    mu_with_mixed = mu
    max_mixed = -np.inf
    if cfg.verify_samples:
        rho = random_mixed_batch(QUBIT, cfg.verify_samples, np.random.default_rng(cfg.seed))
        mixed_m, mixed_phi = mixed_state_knowledge(rho, QUBIT, cfg.n_quad)
        max_mixed = _falsify(
            mu * mixed_phi + mixed_m - 1 - QUBIT_SLACK,
            lambda i: {"sample": float(i), "seed": float(cfg.seed)},
            1.0,
            "Qubit mixed-state",
        )
        eligible = mixed_phi > cfg.exclusion_eps
        if np.any(eligible):
            mu_with_mixed = min(mu, float(np.min((1 - mixed_m[eligible]) / mixed_phi[eligible])))

    if abs(mu - 1 / r_phi_max.value) >= MU_CONSISTENCY:
        raise PropertyViolationError(
            f"mu = {mu:.6f} is inconsistent with 1/r_phi = {1 / r_phi_max.value:.6f}"
        )
    logger.info("Qubit mu = %.6f at alpha' = %.6f (mu r_phi = %.6f)", mu, alpha_star, mu * r_phi_max.value)
    return BoundResult(
        kind="qubit_mu",
        value=mu,
        argmax={"alpha_p": alpha_star, "beta_p": 0.0},
        trace=[float(ratios[best]), mu],
        extras={
            "r_m": r_m_star,
            "r_phi": r_phi_star,
            "r_phi_max": r_phi_max.value,
            "mu_times_r_phi_max": mu * r_phi_max.value,
            "mu_with_mixed": mu_with_mixed,
            "max_pure_excess": max_pure + QUBIT_SLACK,
            "max_mixed_excess": float(max_mixed + QUBIT_SLACK),
        },
        config=cfg,
    )


# ---------------------------------------------------------------------------
# Spin-3/2


@timer_decorator
def max_phase_knowledge_spin32(cfg: Optional[SearchConfig] = None) -> BoundResult:
    """Maximise R_phi over the four-level ansatz."""
    cfg = cfg or SearchConfig()
    candidates = _candidates(cfg)
    _, coarse = pure_state_knowledge(ansatz_amplitudes(candidates), SPIN32, COARSE_QUAD)
    order = np.argsort(-coarse, kind="stable")[: cfg.multistarts]
    logger.info("Refining %d of %d spin-3/2 candidates for max R_phi", len(order), len(candidates))

    def objective(x: np.ndarray) -> float:
        return -float(pure_state_knowledge(ansatz_amplitudes(x), SPIN32, cfg.n_quad)[1])

    refined = _refine_all(objective, candidates[order], cfg, "max R_phi (spin-3/2)")
    trace = [-value for value, _ in refined]
    best = int(np.argmax(trace))
    argmax = params_to_ansatz(refined[best][1])
    r_m, r_phi = ansatz_knowledge(argmax, cfg.n_quad)
    logger.info("Spin-3/2 max R_phi = %.6f at %s", trace[best], argmax)
    return BoundResult(
        kind="spin32_rphi_max",
        value=trace[best],
        argmax=argmax,
        trace=trace,
        extras={"r_m": r_m, "r_phi": r_phi},
        config=cfg,
    )


@timer_decorator
def find_mu2_spin32(cfg: Optional[SearchConfig] = None) -> BoundResult:
    """Largest mu_2 with mu_2 R_phi + R_m <= 2 over the ansatz; argmax is where the sum reaches 2."""
    cfg = cfg or SearchConfig()
    candidates = _candidates(cfg)
    amplitudes = ansatz_amplitudes(candidates)
    coarse_m, coarse_phi = pure_state_knowledge(amplitudes, SPIN32, COARSE_QUAD)
    coarse_ratio = np.where(
        coarse_phi > cfg.exclusion_eps, (2 - coarse_m) / np.where(coarse_phi > 0, coarse_phi, 1.0), RATIO_PENALTY
    )
    order = np.argsort(coarse_ratio, kind="stable")[: cfg.multistarts]
    logger.info("Refining %d of %d spin-3/2 candidates for mu_2", len(order), len(candidates))

    def objective(x: np.ndarray) -> float:
        r_m, r_phi = pure_state_knowledge(ansatz_amplitudes(x), SPIN32, cfg.n_quad)
        if r_phi <= cfg.exclusion_eps:
            return RATIO_PENALTY
        return float((2 - r_m) / r_phi)

    refined = _refine_all(objective, candidates[order], cfg, "mu_2 (spin-3/2)")
    trace = [value for value, _ in refined]
    best = int(np.argmin(trace))
    mu2 = trace[best]
    argmax = params_to_ansatz(refined[best][1])
    r_m, r_phi = ansatz_knowledge(argmax, cfg.n_quad)

    # verification on the full candidate set, the refined optima and fresh ansatz samples
    verify_rng = np.random.default_rng(cfg.seed + 1)
    fresh = verify_rng.random((cfg.verify_samples, 6)) * np.array([np.pi / 2] * 3 + [2 * np.pi] * 3)
    points = np.concatenate([candidates, np.stack([x for _, x in refined]), fresh])
    check_m, check_phi = pure_state_knowledge(ansatz_amplitudes(points), SPIN32, cfg.n_quad)
    max_pure = _falsify(
        mu2 * check_phi + check_m - 2 - SPIN32_SLACK,
        lambda i: params_to_ansatz(points[i]),
        2.0,
        "Spin-3/2 ansatz",
    )

    # mixed states are reported, never merged into mu_2
    max_mixed_r_s = float("nan")
    if cfg.verify_samples:
        rho = random_mixed_batch(SPIN32, cfg.verify_samples, np.random.default_rng(cfg.seed))
        mixed_m, mixed_phi = mixed_state_knowledge(rho, SPIN32, cfg.n_quad)
        max_mixed_r_s = float(np.max(mu2 * mixed_phi + mixed_m))

    logger.info("Spin-3/2 mu_2 = %.6f at %s", mu2, argmax)
    return BoundResult(
        kind="spin32_mu2",
        value=mu2,
        argmax=argmax,
        trace=trace,
        extras={
            "r_m": r_m,
            "r_phi": r_phi,
            "r_s": mu2 * r_phi + r_m,
            "max_pure_r_s": max_pure + SPIN32_SLACK + 2.0,
            "max_mixed_r_s": max_mixed_r_s,
        },
        config=cfg,
    )


def check_unbiasedness_direction(
    system: SpinSystem, cfg: Optional[SearchConfig] = None, mxk: Optional[BoundResult] = None
) -> UnbiasednessReport:
    """Number states carry no phase knowledge; test whether phase-MXK states carry no number knowledge."""
    cfg = cfg or SearchConfig()
    if system.d not in (2, 4):
        raise SpinDomainError(f"Unbiasedness check supports j = 1/2 and 3/2, got j = {system.j}")

    basis = np.stack([make_wigner_dicke(system, m).amplitudes for m in system.m_values])
    _, wd_phi = pure_state_knowledge(basis, system, cfg.n_quad)
    max_wd = float(np.max(wd_phi))
    if max_wd >= 1e-9:
        raise PropertyViolationError(f"A Wigner-Dicke state has R_phi = {max_wd:.3e}")

    if system.d == 2:
        mxk = mxk or max_phase_knowledge_qubit(cfg)
        r_m, r_phi = (float(v) for v in qubit_knowledge(mxk.argmax["alpha_p"], cfg.n_quad))
        if r_m >= 1e-6:
            raise PropertyViolationError(f"Qubit MXK-phase state has R_m = {r_m:.3e}; expected mutual unbiasedness")
        mutual = True
    else:
        mxk = mxk or max_phase_knowledge_spin32(cfg)
        r_m, r_phi = ansatz_knowledge(mxk.argmax, cfg.n_quad)
        if r_m <= 0.01:
            raise PropertyViolationError(f"Spin-3/2 MXK-phase state has R_m = {r_m:.3e}; expected one-way biasedness")
        mutual = False
    logger.info("j = %s: max Wigner-Dicke R_phi = %.2e, MXK R_m = %.6f", system.j, max_wd, r_m)
    return UnbiasednessReport(
        j=system.j, max_wigner_dicke_r_phi=max_wd, mxk_r_phi=r_phi, mxk_r_m=r_m, mutual=mutual
    )


# ---------------------------------------------------------------------------
# Symmetries and the full Hilbert space


def _symmetry_images(state: Dict[str, float]) -> List[np.ndarray]:
    """(radii, phases) under conjugation and m -> -m reflection; phases relative to theta_delta = 0."""
    radii = np.array([state["r_alpha"], state["r_beta"], state["r_gamma"], state["r_delta"]])
    phases = np.array([state["theta_alpha"], state["theta_beta"], state["theta_gamma"]])
    images = []
    for reflect in (False, True):
        if reflect:
            r = radii[::-1]
            # new theta_delta is the old theta_alpha; re-reference to zero
            p = np.array([-phases[0], phases[2] - phases[0], phases[1] - phases[0]])
        else:
            r, p = radii, phases
        for conjugate in (False, True):
            images.append(np.concatenate([r, -p if conjugate else p]))
    return images


def _wrapped(delta: np.ndarray) -> np.ndarray:
    return (delta + np.pi) % (2 * np.pi) - np.pi


def ansatz_distance(a: Dict[str, float], b: Dict[str, float]) -> float:
    """Euclidean distance in (r, theta/pi) coordinates, minimised over the symmetries of R_phi.

    The symmetries are phase translation (theta_x shifts by (m_x - 3/2) delta),
    complex conjugation and the reflection m -> -m.
    """
    target = np.array([b[key] for key in ANSATZ_KEYS])
    # translation offsets for theta_alpha (m=-3/2), theta_beta (m=-1/2), theta_gamma (m=+1/2)
    offsets = np.array([-3.0, -2.0, -1.0])

    def distance(image: np.ndarray, delta: float) -> float:
        radius_gap = image[:4] - target[:4]
        phase_gap = _wrapped(image[4:] + offsets * delta - target[4:]) / np.pi
        return float(np.sqrt(np.sum(radius_gap**2) + np.sum(phase_gap**2)))

    deltas = np.linspace(0.0, 2 * np.pi, 721)
    best = np.inf
    for image in _symmetry_images(a):
        coarse = [distance(image, delta) for delta in deltas]
        index = int(np.argmin(coarse))
        refined = minimize_scalar(
            lambda delta: distance(image, delta),
            bounds=(deltas[max(index - 1, 0)], deltas[min(index + 1, len(deltas) - 1)]),
            method="bounded",
        )
        best = min(best, coarse[index], float(refined.fun))
    return best


@timer_decorator
def sample_full_hilbert_space(
    cfg: Optional[SearchConfig] = None, n_samples: int = 100_000, mu: Optional[float] = None
) -> BoundResult:
    """Random pure spin-3/2 states beyond the ansatz parametrisation; reported on their own."""
    cfg = cfg or SearchConfig()
    rng = np.random.default_rng(cfg.seed)
    vectors = rng.standard_normal((n_samples, 4)) + 1j * rng.standard_normal((n_samples, 4))
    vectors /= np.linalg.norm(vectors, axis=-1, keepdims=True)
    r_m, r_phi = pure_state_knowledge(vectors, SPIN32, cfg.n_quad)
    best = int(np.argmax(r_phi))
    extras = {"samples": float(n_samples), "r_m": float(r_m[best])}
    if mu is not None:
        r_s = mu * r_phi + r_m
        extras.update({"mu": float(mu), "max_r_s": float(np.max(r_s))})
    logger.info("Full Hilbert space sample: max R_phi = %.6f over %d states", r_phi[best], n_samples)
    return BoundResult(
        kind="spin32_full_space_sample",
        value=float(r_phi[best]),
        argmax=amplitudes_to_ansatz(vectors[best]),
        extras=extras,
        config=cfg,
    )


def ansatz_with_implied_delta(r_alpha: float, r_beta: float, r_gamma: float, thetas: Sequence[float]) -> Dict[str, float]:
    """Complete an ansatz state whose r_delta follows from normalisation."""
    r_delta_sq = 1.0 - r_alpha**2 - r_beta**2 - r_gamma**2
    if r_delta_sq < -1e-12:
        raise SpinDomainError("Radii exceed unit norm")
    return dict(
        zip(ANSATZ_KEYS, (r_alpha, r_beta, r_gamma, math.sqrt(max(r_delta_sq, 0.0)), *thetas))
    )
