"""
Knowledge sweeps over initial states and bath exposure time, used by the
``evolve`` and ``reproduce`` commands.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from channels import (
    coherent_qubit,
    pd_phase_distribution,
    phase_damping_evolve,
    phase_damping_state,
    sgad_evolve_closed_form,
    sgad_number_distribution,
    sgad_phase_distribution,
)
from config import settings
from config_loader import BathSection, FigurePreset, RunConfig, StateSection
from distributions import (
    NumberDistribution,
    PhaseDistribution,
    eval_phase,
    number_distribution,
    phase_distribution,
)
from errors import ConfigError, SpinDomainError
from knowledge import KnowledgeReport, knowledge_discrete, knowledge_phase
from manifest import RunManifest
from results_writer import ResultsWriter
from spin_states import (
    CoherentParams,
    DensityMatrix,
    SpinSystem,
    density_from_pure,
    make_coherent,
    make_four_level,
    make_wigner_dicke,
)
from utils import ordered_map, timer_decorator

logger = logging.getLogger(__name__)

Row = Dict[str, float]


def initial_state(section: StateSection) -> DensityMatrix:
    """Density matrix described by a [state] section."""
    system = SpinSystem(section.j)
    if section.kind == "wigner-dicke":
        if section.m is None:
            raise SpinDomainError("A Wigner-Dicke state needs m")
        return density_from_pure(make_wigner_dicke(system, section.m))
    if section.kind == "coherent":
        return density_from_pure(make_coherent(system, CoherentParams(theta=section.theta, phi=section.phi)))
    if section.kind == "four-level":
        radii = (section.r_alpha, section.r_beta, section.r_gamma, section.r_delta)
        if any(r is None for r in radii):
            raise SpinDomainError("A four-level state needs r_alpha, r_beta, r_gamma and r_delta")
        if system.d != 4:
            raise SpinDomainError("The four-level ansatz is a j = 3/2 state")
        psi = make_four_level(
            *radii,
            section.theta_alpha,
            section.theta_beta,
            section.theta_gamma,
            auto_normalize=section.auto_normalize,
        )
        return density_from_pure(psi)
    return DensityMatrix(system, np.eye(system.d, dtype=complex) / system.d)


def _distributions_at(
    run: RunConfig, alpha_p: float, beta_p: float, t: float
) -> Tuple[NumberDistribution, PhaseDistribution]:
    bath = run.bath
    coherent = run.state.kind == "coherent"
    if bath.channel is None:
        rho = coherent_qubit(alpha_p, beta_p) if coherent else initial_state(run.state)
        return number_distribution(rho), phase_distribution(rho)

    if bath.channel == "pd":
        params = bath.ohmic_params()
        if coherent:
            rho = phase_damping_state(alpha_p, beta_p, params, bath.omega, t, bath.regime)
            phase = pd_phase_distribution(alpha_p, beta_p, params, bath.omega, t, bath.regime)
            return number_distribution(rho), phase
        rho = phase_damping_evolve(initial_state(run.state), params, bath.omega, t, bath.regime)
        return number_distribution(rho), phase_distribution(rho)

    params = bath.sgad_params()
    if coherent:
        return (
            sgad_number_distribution(alpha_p, params, t),
            sgad_phase_distribution(alpha_p, beta_p, params, t),
        )
    rho = sgad_evolve_closed_form(initial_state(run.state), params, t)
    return number_distribution(rho), phase_distribution(rho)


def knowledge_row(run: RunConfig, alpha_p: float, beta_p: float, t: float) -> Row:
    """Knowledge values for one (alpha', beta', t) point of a sweep."""
    number, phase = _distributions_at(run, alpha_p, beta_p, t)
    n_quad = run.search.n_quad or settings.n_quad
    report = KnowledgeReport.assemble(
        knowledge_discrete(number), knowledge_phase(phase, n_quad), run.search.mu, number.system.d
    )
    return {
        "r_m": report.r_m,
        "r_phi": report.r_phi,
        "r_t": report.r_t,
        "r_s": report.r_s,
        "mu_r_phi": report.mu * report.r_phi,
        "p_up": float(number.probs[0]),
    }


def time_grid(run: RunConfig) -> np.ndarray:
    return np.linspace(run.output.t_min, run.output.t_max, run.output.n_times)


@timer_decorator
def time_trajectory(run: RunConfig) -> Dict[str, List[float]]:
    """Columns t plus the requested observables along one trajectory."""
    times = time_grid(run)
    alpha_p, beta_p = run.state.theta, run.state.phi
    rows = ordered_map(
        lambda t: knowledge_row(run, alpha_p, beta_p, float(t)),
        list(times),
        settings.max_workers,
        "time sweep",
    )
    columns: Dict[str, List[float]] = {"t": [float(t) for t in times]}
    for name in run.output.observables:
        columns[name] = [row[name] for row in rows]
    return columns


def phase_snapshots(run: RunConfig) -> Dict[str, List[float]]:
    """Long-format (t, phi, density) table of P(phi) at every time of the trajectory."""
    phi = 2 * np.pi * np.arange(run.output.snapshots) / run.output.snapshots
    columns: Dict[str, List[float]] = {"t": [], "phi": [], "density": []}
    for t in time_grid(run):
        _, phase = _distributions_at(run, run.state.theta, run.state.phi, float(t))
        columns["t"].extend([float(t)] * len(phi))
        columns["phi"].extend(phi.tolist())
        columns["density"].extend(np.atleast_1d(eval_phase(phase, phi)).tolist())
    return columns


def _grid_sweep(run: RunConfig, points: List[Tuple[float, float, float]], label: str) -> Dict[str, List[float]]:
    rows = ordered_map(lambda p: knowledge_row(run, *p), points, settings.max_workers, label)
    columns: Dict[str, List[float]] = {
        "alpha_p": [p[0] for p in points],
        "beta_p": [p[1] for p in points],
        "t": [p[2] for p in points],
    }
    for name in ("r_m", "r_phi", "mu_r_phi", "r_s"):
        columns[name] = [row[name] for row in rows]
    return columns


@timer_decorator
def alpha_time_sweep(run: RunConfig) -> Dict[str, List[float]]:
    """Surface over (alpha', t) at the configured beta'."""
    alphas = np.linspace(0.0, np.pi, run.output.n_alpha)
    points = [(float(a), run.state.phi, float(t)) for a in alphas for t in time_grid(run)]
    return _grid_sweep(run, points, "alpha-time sweep")


@timer_decorator
def alpha_beta_sweep(run: RunConfig) -> Dict[str, List[float]]:
    """Surface over (alpha', beta') at the fixed time output.t."""
    t = run.output.t if run.output.t is not None else run.output.t_max
    alphas = np.linspace(0.0, np.pi, run.output.n_alpha)
    betas = np.linspace(0.0, 2 * np.pi, run.output.n_beta, endpoint=False)
    points = [(float(a), float(b), float(t)) for a in alphas for b in betas]
    return _grid_sweep(run, points, "alpha-beta sweep")


@timer_decorator
def coherent_knowledge_curve(run: RunConfig) -> Dict[str, List[float]]:
    """Noiseless R_phi, R_m, R_T and R_S(mu) over coherent qubit states, alpha' in [0, pi]."""
    alphas = np.linspace(0.0, np.pi, run.output.n_alpha)
    noiseless = run.model_copy(update={"bath": BathSection(), "state": StateSection(kind="coherent")})
    rows = [knowledge_row(noiseless, float(a), 0.0, 0.0) for a in alphas]
    return {
        "alpha_p": alphas.tolist(),
        "r_phi": [row["r_phi"] for row in rows],
        "r_m": [row["r_m"] for row in rows],
        "r_t": [row["r_t"] for row in rows],
        "r_s": [row["r_s"] for row in rows],
    }


def sweep(run: RunConfig) -> Dict[str, List[float]]:
    if run.output.sweep == "alpha":
        return coherent_knowledge_curve(run)
    if run.output.sweep == "alpha-time":
        return alpha_time_sweep(run)
    if run.output.sweep == "alpha-beta":
        return alpha_beta_sweep(run)
    return time_trajectory(run)


def record_run(manifest: RunManifest, run: RunConfig, prefix: str = "") -> None:
    """Echo every run parameter plus the numerics taken from settings."""
    for section in ("state", "bath", "search", "output"):
        values = getattr(run, section).model_dump()
        manifest.record_section(f"{prefix}{section}", values)
    manifest.record_section(
        f"{prefix}settings",
        {"n_quad": settings.n_quad, "phase_grid": settings.phase_grid, "seed": settings.seed},
    )


def reproduce(
    figure: str,
    presets: Mapping[str, FigurePreset],
    writer: ResultsWriter,
    *layers: Optional[Mapping[str, Mapping[str, Any]]],
) -> List[Path]:
    """Write the CSV bundle of every preset belonging to ``figure`` plus one manifest."""
    selected = [preset for preset in presets.values() if preset.figure == figure]
    if not selected:
        raise ConfigError(f"No presets for figure '{figure}'; choose from {sorted({p.figure for p in presets.values()})}")

    manifest = RunManifest(writer.path_for(f"{figure}/manifest.txt"))
    manifest.record("figure", figure)
    written: List[Path] = []
    for preset in selected:
        run = preset.run_config(*layers)
        logger.info("Reproducing %s with preset %s (%s sweep)", figure, preset.name, run.output.sweep)
        written.append(writer.write_table(f"{figure}/{preset.name}.csv", sweep(run)))
        if run.output.snapshots:
            written.append(writer.write_table(f"{figure}/{preset.name}_phase.csv", phase_snapshots(run)))
        record_run(manifest, run, prefix=f"{preset.name}.")
    written.append(manifest.write())
    return written
