"""Command-line entry point: distributions, knowledge, bound searches, channel sweeps and figure data."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
from pydantic import ValidationError

import figures
from bound_search import (
    BoundResult,
    find_mu2_spin32,
    find_mu_qubit,
    max_phase_knowledge_qubit,
    max_phase_knowledge_spin32,
)
from config import settings
from config_loader import FigurePreset, PresetLoader, RunConfig, load_run_config
from distributions import number_distribution, phase_distribution, phase_table
from errors import (
    BoundFalsificationError,
    ComplementarityError,
    ConfigError,
    InvariantViolationError,
    PropertyViolationError,
    SpinDomainError,
)
from knowledge import knowledge_report
from manifest import RunManifest
from results_writer import ResultsWriter
from utils import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PROPERTY = 4

FIGURES = ("fig1", "fig2", "fig3a", "fig3b", "fig4a", "fig4b")

# positional state tokens after the kind, in order
STATE_GRAMMAR: Dict[str, Sequence[str]] = {
    "wigner-dicke": ("j", "m"),
    "coherent": ("j", "theta", "phi"),
    "four-level": ("r_alpha", "r_beta", "r_gamma", "r_delta", "theta_alpha", "theta_beta", "theta_gamma"),
    "mixed": ("j",),
}


def parse_state_tokens(tokens: Optional[Sequence[str]]) -> Dict[str, Any]:
    """Turn ``coherent 0.5 pi/2 0`` style tokens into a [state] section."""
    if not tokens:
        return {}
    kind, values = tokens[0], list(tokens[1:])
    if kind not in STATE_GRAMMAR:
        raise ConfigError(f"Unknown state kind '{kind}'; choose from {sorted(STATE_GRAMMAR)}")
    names = STATE_GRAMMAR[kind]
    if len(values) != len(names):
        raise ConfigError(f"State '{kind}' expects {len(names)} values ({' '.join(names)}), got {len(values)}")
    section: Dict[str, Any] = {"kind": kind, **dict(zip(names, values))}
    if kind == "four-level":
        section["j"] = "3/2"
    return section


def _flag_layer(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    """Command-line overrides; unset flags are None and dropped by RunConfig.from_layers."""
    layer: Dict[str, Dict[str, Any]] = {
        "state": parse_state_tokens(getattr(args, "state", None)),
        "bath": {
            "channel": getattr(args, "channel", None),
            "temperature": getattr(args, "temperature", None),
            "gamma0": getattr(args, "gamma0", None),
            "omega_c": getattr(args, "omega_c", None),
            "omega": getattr(args, "omega", None),
            "r": getattr(args, "squeezing", None),
            "a": getattr(args, "a", None),
            "phi": getattr(args, "squeeze_phase", None),
            "regime": getattr(args, "regime", None),
        },
        "search": {
            "system": getattr(args, "system", None),
            "target": getattr(args, "target", None),
            "mu": getattr(args, "mu", None),
            "grid_density": getattr(args, "grid_density", None),
            "multistarts": getattr(args, "multistarts", None),
            "local_tol": getattr(args, "local_tol", None),
            "exclusion_eps": getattr(args, "exclusion_eps", None),
            "seed": getattr(args, "seed", None),
            "n_quad": getattr(args, "n_quad", None),
            "verify_samples": getattr(args, "verify_samples", None),
        },
        "output": {
            "sweep": getattr(args, "sweep", None),
            "n_grid": getattr(args, "n_grid", None),
            "t_max": getattr(args, "t_max", None),
            "n_times": getattr(args, "n_times", None),
            "observables": getattr(args, "observables", None),
            "snapshots": getattr(args, "snapshots", None),
            "trace": True if getattr(args, "trace", False) else None,
        },
    }
    return layer


def _load_presets(path: Optional[str]) -> Dict[str, FigurePreset]:
    try:
        return PresetLoader().load_presets(Path(path) if path else settings.presets_file)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge preset, config file and flags (in that order of precedence, lowest first)."""
    layers: List[Mapping[str, Mapping[str, Any]]] = []
    preset_name = getattr(args, "preset", None)
    if preset_name:
        presets = _load_presets(getattr(args, "presets", None))
        if preset_name not in presets:
            raise ConfigError(f"Unknown preset '{preset_name}'; choose from {sorted(presets)}")
        layers.append(presets[preset_name].sections)
    if args.config:
        layers.append(load_run_config(Path(args.config)))
    layers.append(_flag_layer(args))
    return RunConfig.from_layers(*layers)


def _writer(args: argparse.Namespace) -> ResultsWriter:
    return ResultsWriter(Path(args.out) if args.out else settings.output_dir)


def _write_manifest(writer: ResultsWriter, command: str, run: RunConfig) -> Path:
    manifest = RunManifest(writer.path_for("manifest.txt"))
    manifest.record("command", command)
    figures.record_run(manifest, run)
    return manifest.write()


def cmd_dist(args: argparse.Namespace) -> int:
    run = build_run_config(args)
    rho = figures.initial_state(run.state)
    phi, density = phase_table(phase_distribution(rho), run.output.n_grid)
    number = number_distribution(rho)
    writer = _writer(args)
    writer.write_table("phase.csv", {"phi": phi, "density": density})
    writer.write_table("number.csv", {"m": rho.system.m_values, "prob": number.probs})
    _write_manifest(writer, "dist", run)
    print(f"Wrote phase.csv and number.csv to {writer.output_dir}")
    return EXIT_OK


def cmd_knowledge(args: argparse.Namespace) -> int:
    run = build_run_config(args)
    rho = figures.initial_state(run.state)
    report = knowledge_report(rho, run.search.mu, run.search.n_quad)
    print(f"R_m = {report.r_m:.6f}")
    print(f"R_phi = {report.r_phi:.6f}")
    print(f"R_T = {report.r_t:.6f}")
    print(f"R_S({report.mu:g}) = {report.r_s:.6f}")
    return EXIT_OK


def _print_bound(result: BoundResult) -> None:
    print(f"{result.kind} = {result.value:.6f}")
    for key, value in result.argmax.items():
        print(f"argmax.{key} = {value:.6f}")
    for key, value in result.extras.items():
        print(f"{key} = {value:.6f}")
    for key, value in result.config.model_dump().items():
        print(f"config.{key} = {value}")


def cmd_bound_search(args: argparse.Namespace) -> int:
    run = build_run_config(args)
    cfg = run.search.search_config()
    searches = {
        ("qubit", "rphi-max"): max_phase_knowledge_qubit,
        ("qubit", "mu"): find_mu_qubit,
        ("spin32", "rphi-max"): max_phase_knowledge_spin32,
        ("spin32", "mu"): find_mu2_spin32,
    }
    result = searches[(run.search.system, run.search.target)](cfg)
    _print_bound(result)

    writer = _writer(args)
    stem = f"bound_{run.search.system}_{run.search.target}"
    writer.write_json(f"{stem}.json", result.to_record())
    if run.output.trace:
        writer.write_table(
            f"{stem}_trace.csv",
            {"restart": np.arange(len(result.trace)), "objective": result.trace},
        )
    _write_manifest(writer, "bound-search", run)
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace) -> int:
    run = build_run_config(args)
    if run.bath.channel is None:
        raise ConfigError("evolve needs a channel (--channel pd|sgad or a preset)")
    writer = _writer(args)
    writer.write_table("evolve.csv", figures.sweep(run))
    if run.output.snapshots:
        writer.write_table("evolve_phase.csv", figures.phase_snapshots(run))
    _write_manifest(writer, "evolve", run)
    print(f"Wrote {run.output.sweep} sweep to {writer.path_for('evolve.csv')}")
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace) -> int:
    presets = _load_presets(args.presets)
    layers = [load_run_config(Path(args.config))] if args.config else []
    written = figures.reproduce(args.figure, presets, _writer(args), *layers)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    for preset in _load_presets(args.presets).values():
        print(f"{preset.name:<14} {preset.figure:<6} {preset.description}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, help="key=value run file with [state], [bath], [search], [output].")
    parser.add_argument("--out", type=str, help=f"Output directory. Overrides OUTPUT_DIR: {settings.output_dir}")
    parser.add_argument("--n-quad", type=int, help=f"Quadrature points for R_phi (default {settings.n_quad}).")


def _add_state(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "state",
        nargs="*",
        help="wigner-dicke J M | coherent J THETA PHI | four-level RA RB RG RD TA TB TG | mixed J",
    )


def _add_bath(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", type=str, help="Start from a named figure preset.")
    parser.add_argument("--presets", type=str, help=f"Presets YAML file (default {settings.presets_file}).")
    parser.add_argument("--channel", choices=["pd", "sgad"])
    parser.add_argument("--temperature", type=float)
    parser.add_argument("--gamma0", type=float)
    parser.add_argument("--omega-c", type=float)
    parser.add_argument("--omega", type=float)
    parser.add_argument("--squeezing", type=float, help="Bath squeezing r.")
    parser.add_argument("--a", type=float, help="Squeezing phase slope a (phase damping).")
    parser.add_argument("--squeeze-phase", type=str, help="Squeezing phase Phi (SGAD); accepts pi/8 style tokens.")
    parser.add_argument("--regime", choices=["zeroT", "highT"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Number-phase complementarity of spin-j systems")
    parser.add_argument("--log-level", type=str, help=f"Overrides LOG_LEVEL: {settings.log_level}")
    sub = parser.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("dist", help="Write P(phi) and p(m) of a state.")
    _add_common(dist)
    _add_state(dist)
    dist.add_argument("--n-grid", type=int, help=f"Uniform phi points (default {settings.phase_grid}).")
    dist.set_defaults(handler=cmd_dist)

    knowledge = sub.add_parser("knowledge", help="Print R_m, R_phi, R_T and R_S(mu) of a state.")
    _add_common(knowledge)
    _add_state(knowledge)
    knowledge.add_argument("--mu", type=float, help=f"Weight of R_phi in R_S (default {settings.mu_qubit}).")
    knowledge.set_defaults(handler=cmd_knowledge)

    search = sub.add_parser("bound-search", help="Search state space for max R_phi or the weight mu.")
    _add_common(search)
    search.add_argument("--system", choices=["qubit", "spin32"])
    search.add_argument("--target", choices=["rphi-max", "mu"])
    search.add_argument("--grid-density", type=int)
    search.add_argument("--multistarts", type=int)
    search.add_argument("--local-tol", type=float)
    search.add_argument("--exclusion-eps", type=float)
    search.add_argument("--seed", type=int)
    search.add_argument("--verify-samples", type=int)
    search.add_argument("--trace", action="store_true", help="Also write the per-restart objective trace CSV.")
    search.set_defaults(handler=cmd_bound_search)

    evolve = sub.add_parser("evolve", help="Knowledge under a noise channel over time or a parameter grid.")
    _add_common(evolve)
    _add_state(evolve)
    _add_bath(evolve)
    evolve.add_argument("--mu", type=float)
    evolve.add_argument("--sweep", choices=["time", "alpha", "alpha-time", "alpha-beta"])
    evolve.add_argument("--t-max", type=float)
    evolve.add_argument("--n-times", type=int)
    evolve.add_argument("--observables", type=str, help="Comma-separated subset of r_m,r_phi,r_t,r_s,p_up.")
    evolve.add_argument("--snapshots", type=int, help="Also write P(phi) on this many points per time.")
    evolve.set_defaults(handler=cmd_evolve)

    reproduce = sub.add_parser("reproduce", help="Write the data bundle of one figure.")
    reproduce.add_argument("figure", choices=FIGURES)
    reproduce.add_argument("--config", type=str)
    reproduce.add_argument("--out", type=str, help=f"Output directory. Overrides OUTPUT_DIR: {settings.output_dir}")
    reproduce.add_argument("--presets", type=str)
    reproduce.set_defaults(handler=cmd_reproduce)

    presets = sub.add_parser("presets", help="List the shipped figure presets.")
    presets.add_argument("--presets", type=str)
    presets.set_defaults(handler=cmd_presets)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch the command and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    setup_logging(args.log_level or settings.log_level, settings.log_file)
    logger.info("--- Running %s ---", args.command)
    try:
        return args.handler(args)
    except BoundFalsificationError as exc:
        logger.error("Bound falsified: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        for key, value in exc.witness.items():
            print(f"witness.{key} = {value}", file=sys.stderr)
        print(f"excess = {exc.excess:.3e}", file=sys.stderr)
        return EXIT_PROPERTY
    except (PropertyViolationError, InvariantViolationError) as exc:
        logger.error("Property check failed: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except (SpinDomainError, ConfigError, ValidationError) as exc:
        logger.error("Invalid input: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ComplementarityError as exc:
        logger.error("Run failed: %s", exc, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
