"""
Command Line Component

Argument parsing and the ``verify``, ``demo`` and ``export`` commands.
Exit codes: 0 all reports passed, 1 some report failed, 2 usage or input error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, TextIO

from pydantic import BaseModel, Field, ValidationError, field_validator

from .report_view import format_amplitudes, format_matrix, render_reports
from ..services.linalg import DEFAULT_TOL
from ..services.masking import PairId, decode, mask, operator_table
from ..services.quantum import MeasurementBasis, StateVector, clamp_unit, fidelity_pure, measure_discard
from ..services.reports import reports_to_json, suite_passed
from ..services.scenarios import SCENARIOS, RunConfig, check_trials, run_all
from ..services.teleportation import teleportation_demo
from ..utils.errors import MaskcorrError
from ..utils.helpers import get_default_seed, get_default_workers, normalize_qubit, parse_inline_state
from ..utils.serialization import pairs_to_complex, read_json, save_operator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

DEMOS = ("mask", "decode", "dispatch", "teleport")


class CliConfig(BaseModel):
    """Validated command line settings."""
    command: Literal["verify", "demo", "export"]
    scenario: str = "all"
    trials: int = Field(100, ge=1)
    tol: float = Field(DEFAULT_TOL, gt=0)
    seed: int = 42
    workers: int = Field(1, ge=1)
    format: Literal["json", "text"] = "text"
    details: bool = False
    demo: Optional[Literal["mask", "decode", "dispatch", "teleport"]] = None
    state: Optional[str] = None
    state_file: Optional[Path] = None
    pair: Optional[str] = None
    theta: float = 0.0
    phi: float = 0.0
    out: Optional[Path] = None

    @field_validator("scenario")
    @classmethod
    def _known_scenario(cls, name: str) -> str:
        if name != "all" and name not in SCENARIOS:
            raise ValueError(f"unknown scenario '{name}'")
        return name

    def scenario_names(self) -> List[str]:
        return list(SCENARIOS) if self.scenario == "all" else [self.scenario]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskcorr",
        description="Simulate and verify three-party masking of a qubit into correlations.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-vv for debug output)")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="run verification scenarios and report pass/fail")
    verify.add_argument("--scenario", choices=["all", *SCENARIOS], default="all")
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--tol", type=float, default=DEFAULT_TOL)
    verify.add_argument("--seed", type=int, default=None, help="master seed (default: $MASKCORR_SEED or 42)")
    verify.add_argument("--workers", type=int, default=None, help="scenarios run in parallel")
    verify.add_argument("--format", choices=["json", "text"], default="text")
    verify.add_argument("--details", action="store_true", help="include per-trial records")

    demo = commands.add_parser("demo", help="show one scheme run on a chosen input")
    demos = demo.add_subparsers(dest="demo", required=True)
    for name in DEMOS:
        sub = demos.add_parser(name)
        source = sub.add_mutually_exclusive_group(required=True)
        source.add_argument("--state", help="inline qubit as re0,im0,re1,im1")
        source.add_argument("--state-file", type=Path, help="JSON state file")
        sub.add_argument("--format", choices=["json", "text"], default="text")
        sub.add_argument("--out", type=Path, help="write the resulting state as JSON")
        sub.add_argument("--seed", type=int, default=None)
        if name == "decode":
            sub.add_argument("--pair", choices=[p.value for p in PairId], required=True)
        if name == "dispatch":
            sub.add_argument("--theta", type=float, default=0.0)
            sub.add_argument("--phi", type=float, default=0.0)

    export = commands.add_parser("export", help="write every scheme operator as JSON")
    export.add_argument("--out", type=Path, required=True, help="output directory")

    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    """Fill environment defaults and validate."""
    values: Dict[str, Any] = {k: v for k, v in vars(args).items() if v is not None and k != "verbose"}
    values.setdefault("seed", get_default_seed())
    values.setdefault("workers", get_default_workers())
    return CliConfig(**values)


def load_input_state(config: CliConfig) -> StateVector:
    """The demo input qubit from --state or --state-file."""
    if config.state is not None:
        amps = parse_inline_state(config.state)
    elif config.state_file is not None:
        try:
            data = read_json(config.state_file)
            amps = normalize_qubit(pairs_to_complex(data["amplitudes"]))
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise MaskcorrError(f"Could not read state file {config.state_file}: {exc}") from exc
    else:
        raise MaskcorrError("A demo needs --state or --state-file")
    return StateVector(num_qubits=1, amplitudes=amps)


def cmd_verify(config: CliConfig, stdout: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    names = config.scenario_names()
    check_trials(names, config.trials)

    run_config = RunConfig(
        trials=config.trials,
        tol=config.tol,
        seed=config.seed,
        workers=config.workers,
        scenarios=names,
    )
    reports = run_all(run_config)

    if config.format == "json":
        stdout.write(reports_to_json(reports, include_details=config.details))
    else:
        stdout.write(render_reports(reports, show_details=config.details))
    return EXIT_OK if suite_passed(reports) else EXIT_FAILED


def _demo_mask(psi: StateVector, config: CliConfig) -> Dict[str, Any]:
    gamma = mask(psi)
    if config.out:
        gamma.save(config.out)
    return {
        "demo": "mask",
        "state": gamma,
        "text": "masked state (A S1 N1 S2 N2):\n" + format_amplitudes(gamma.amplitudes, gamma.num_qubits),
    }


def _demo_decode(psi: StateVector, config: CliConfig) -> Dict[str, Any]:
    pair = PairId.parse(config.pair or "")
    result = decode(pair, mask(psi))
    fidelity = clamp_unit(fidelity_pure(psi, result.recovered))
    if config.out:
        result.recovered.save(config.out)
    return {
        "demo": "decode",
        "pair": pair.value,
        "output_qubit": result.output_qubit,
        "fidelity": fidelity,
        "state": result.recovered,
        "text": (
            f"pair: {pair.value} (output qubit {result.output_qubit})\n"
            f"recovered:\n{format_matrix(result.recovered.matrix)}\n"
            f"fidelity: {round(fidelity, 12)}"
        ),
    }


def _demo_dispatch(psi: StateVector, config: CliConfig) -> Dict[str, Any]:
    basis = MeasurementBasis(theta=config.theta, phi=config.phi)
    dispatched = measure_discard(mask(psi), 0, basis)
    yz = decode(PairId.YZ, dispatched)
    xy = decode(PairId.XY, dispatched)
    yz_fidelity = clamp_unit(fidelity_pure(psi, yz.recovered))
    xy_fidelity = clamp_unit(fidelity_pure(psi, xy.recovered))
    if config.out:
        yz.recovered.save(config.out)
    return {
        "demo": "dispatch",
        "theta": config.theta,
        "phi": config.phi,
        "yz_fidelity": yz_fidelity,
        "xy_fidelity": xy_fidelity,
        "state": yz.recovered,
        "text": (
            f"measured A in basis theta={config.theta:g} phi={config.phi:g}\n"
            f"YZ recovered:\n{format_matrix(yz.recovered.matrix)}\n"
            f"yz fidelity: {round(yz_fidelity, 12)}\n"
            f"xy fidelity after dispatch: {xy_fidelity:.6f}"
        ),
    }


def _demo_teleport(psi: StateVector, config: CliConfig) -> Dict[str, Any]:
    record = teleportation_demo(psi, seed=config.seed)
    if config.out:
        record.pre_correction_bob.save(config.out)
    fidelities = ", ".join(f"{round(f, 12)}" for f in record.per_outcome_fidelity)
    return {
        "demo": "teleport",
        "record": record,
        "state": record.pre_correction_bob,
        "text": (
            f"Bob before correction:\n{format_matrix(record.pre_correction_bob.matrix)}\n"
            f"corrected fidelity per outcome: {fidelities}\n"
            f"average corrected fidelity: {round(record.average_post_fidelity, 12)}\n"
            f"sampled outcome: {record.sampled_outcome}"
        ),
    }


_DEMO_HANDLERS = {
    "mask": _demo_mask,
    "decode": _demo_decode,
    "dispatch": _demo_dispatch,
    "teleport": _demo_teleport,
}


def cmd_demo(config: CliConfig, stdout: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    psi = load_input_state(config)
    logger.info("Running %s demo", config.demo)
    result = _DEMO_HANDLERS[config.demo](psi, config)

    if config.format == "json":
        payload = {k: v for k, v in result.items() if k not in ("text", "state", "record")}
        if "record" in result:
            payload.update(result["record"].to_dict())
        else:
            payload["state"] = result["state"].to_dict()
        stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        stdout.write(result["text"] + "\n")
    return EXIT_OK


def cmd_export(config: CliConfig, stdout: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    for name, matrix in operator_table().items():
        path = save_operator(matrix, config.out / f"{name}.json")
        stdout.write(f"wrote {path}\n")
    return EXIT_OK


_COMMANDS = {
    "verify": cmd_verify,
    "demo": cmd_demo,
    "export": cmd_export,
}


def run_cli(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None,
            stderr: Optional[TextIO] = None) -> int:
    """Parse, validate and dispatch; never raises for user errors."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = config_from_args(args)
    except ValidationError as exc:
        stderr.write(f"maskcorr: invalid arguments:\n{exc}\n")
        return EXIT_USAGE

    try:
        return _COMMANDS[config.command](config, stdout)
    except MaskcorrError as exc:
        stderr.write(f"maskcorr: {exc}\n")
        return EXIT_USAGE
