"""Command-line front end.

Commands::

    fringe       detection probabilities at C and D over a phase grid
    sensitivity  best phase uncertainty for n = 1..n_max
    loss         visibility, best uncertainty, entropy and regime vs transmission
    state        amplitudes of the full interferometer state

Settings are resolved with precedence command-line flag > ``--config`` file >
built-in default. The config file holds ``key = value`` lines whose keys are
flag names without the leading dashes (``n = 5``, ``t = 0.9, 0.8``).

Exit status: 0 success, 1 usage error, 2 domain error, 3 ``--check`` failure.
Errors print one line to stderr: ``error[<code>]: <message>``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from . import reference as ref
from .elements import Port
from .entanglement import sensing_entropy
from .experiment import ExperimentConfig, build_state, detection_probability, visibility
from .fock import Statistics, norm
from .metrology import NoPhaseInformation, feasibility, min_phase_uncertainty, sensitivity_row

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CHECK = 0, 1, 2, 3

TOLERANCES = {
    "fringe": {"abs_error": 1e-10},
    "sensitivity": {"abs_error": 1e-6},
    "loss": {"visibility_error": 1e-10, "delta_phi_error": 1e-6, "entropy_error": 1e-10},
    "state": {"norm_error": 1e-12},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _points(text: str) -> int:
    v = _positive_int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 points, got {v}")
    return v


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty transmission list")
    return vals


def _stats(text: str) -> Statistics:
    try:
        return Statistics(text.strip().lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--stats must be boson or fermion, got {text!r}") from None


def _flag(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


# dest -> (flag, converter, default)
OPTIONS: dict[str, tuple[str, Callable[[str], Any], Any]] = {
    "n": ("--n", _positive_int, 2),
    "n_max": ("--n-max", _positive_int, 10),
    "xi": ("--xi", float, 0.0),
    "gamma": ("--gamma", float, 0.0),
    "phi": ("--phi", float, 0.0),
    "t": ("--t", _float_list, (1.0,)),
    "stats": ("--stats", _stats, Statistics.BOSON),
    "phi_min": ("--phi-min", float, 0.0),
    "phi_max": ("--phi-max", float, 2 * math.pi),
    "points": ("--points", _points, None),
    "t_min": ("--t-min", float, 0.0),
    "t_max": ("--t-max", float, 1.0),
    "format": ("--format", str, "csv"),
    "check": ("--check", _flag, False),
    "deg": ("--deg", _flag, False),
    "stamp": ("--stamp", _flag, False),
    "oracle_tolerance": ("--oracle-tolerance", float, None),
}

COMMAND_OPTIONS = {
    "fringe": ["n", "xi", "gamma", "t", "stats", "phi_min", "phi_max", "points"],
    "sensitivity": ["n_max", "xi", "gamma", "t", "stats"],
    "loss": ["n", "xi", "gamma", "phi", "stats", "t_min", "t_max", "points"],
    "state": ["n", "xi", "gamma", "phi", "t", "stats"],
}
DEFAULT_POINTS = {"fringe": 101, "loss": 11}
ANGLES = ("xi", "gamma", "phi", "phi_min", "phi_max")
COMMON = ["format", "check", "deg", "stamp", "oracle_tolerance"]

SUMMARY = {
    "fringe": "detection probabilities at C and D over a phase grid",
    "sensitivity": "best phase uncertainty for n = 1..n_max",
    "loss": "visibility, best uncertainty, entropy and regime vs transmission",
    "state": "amplitudes of the full interferometer state",
}

HELP = {
    "fringe": "columns: phi, P_C, P_D, oracle_P_C, oracle_P_D, abs_error",
    "sensitivity": (
        "columns: n, visibility, phi_optimal, delta_phi_min, heisenberg, shot_noise, "
        "feasible, regime, degenerate, oracle_delta_phi_min, abs_error"
    ),
    "loss": (
        "columns: transmission, visibility, oracle_visibility, visibility_error, "
        "delta_phi_min, oracle_delta_phi_min, delta_phi_error, entropy, oracle_entropy, "
        "entropy_error, regime"
    ),
    "state": "columns: occupation, occupied_modes, re, im, norm_error",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="separable-metrology", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for command, dests in COMMAND_OPTIONS.items():
        p = sub.add_parser(command, help=SUMMARY[command],
                           description=f"{SUMMARY[command]}. {HELP[command]}")
        p.add_argument("--config", type=Path, default=None, help="key = value settings file")
        for dest in dests:
            flag, conv, _ = OPTIONS[dest]
            p.add_argument(flag, dest=dest, type=conv, default=None)
        p.add_argument("--format", dest="format", choices=("csv", "json"), default=None)
        p.add_argument("--check", dest="check", action="store_const", const=True, default=None,
                       help="exit 3 if any engine column disagrees with its oracle")
        p.add_argument("--deg", dest="deg", action="store_const", const=True, default=None,
                       help="read angle flags in degrees")
        p.add_argument("--stamp", dest="stamp", action="store_const", const=True, default=None,
                       help="add a UTC timestamp to the manifest")
        p.add_argument("--oracle-tolerance", dest="oracle_tolerance", type=float, default=None,
                       help=argparse.SUPPRESS)
    return parser


def _read_config(path: Path, allowed: Sequence[str]) -> dict[str, Any]:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    try:
        cp.read_string("[settings]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config file {path}: {exc}") from None
    out = {}
    for key, raw in cp["settings"].items():
        dest = key.strip().lstrip("-").replace("-", "_")
        if dest not in allowed:
            raise UsageError(f"config key {key!r} is not valid for this command")
        conv = OPTIONS[dest][1]
        try:
            out[dest] = conv(raw) if dest != "format" else raw.strip()
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
    if out.get("format", "csv") not in ("csv", "json"):
        raise UsageError(f"config format must be csv or json, got {out['format']!r}")
    return out


def resolve_settings(args: argparse.Namespace) -> dict[str, Any]:
    dests = COMMAND_OPTIONS[args.command] + COMMON
    from_file = _read_config(args.config, dests) if args.config else {}
    settings = {}
    for dest in dests:
        v = getattr(args, dest, None)
        if v is None:
            v = from_file.get(dest)
        if v is None:
            v = OPTIONS[dest][2]
        settings[dest] = v
    if "points" in settings and settings["points"] is None:
        settings["points"] = DEFAULT_POINTS[args.command]
    if settings["deg"]:
        for a in ANGLES:
            if a in settings:
                settings[a] = math.radians(settings[a])
    return settings


def _transmissions(settings: dict, n: int) -> tuple[float, ...]:
    t = settings["t"]
    if len(t) == 1:
        return t * n
    if len(t) != n:
        raise UsageError(f"--t lists {len(t)} transmissions but n={n}")
    return t


def _tolerances(command: str, settings: dict) -> dict[str, float]:
    override = settings["oracle_tolerance"]
    base = TOLERANCES[command]
    return {k: (override if override is not None else v) for k, v in base.items()}


def _finite_or_none(x: float) -> float | None:
    return x if math.isfinite(x) else None


def cmd_fringe(settings: dict) -> list[dict]:
    n = settings["n"]
    cfg = ExperimentConfig(
        n, xi=settings["xi"], gamma=settings["gamma"],
        transmissions=_transmissions(settings, n), statistics=settings["stats"],
    )
    points = settings["points"]
    lo, hi = settings["phi_min"], settings["phi_max"]
    if not hi > lo:
        raise UsageError(f"--phi-max ({hi}) must exceed --phi-min ({lo})")
    rows = []
    for k in range(points):
        phi = lo + (hi - lo) * k / (points - 1)
        c = cfg.at_phase(phi)
        inputs = ref.ClosedFormInputs(n, phi, c.zeta0, c.transmissions)
        pc, pd = detection_probability(c, Port.C), detection_probability(c, Port.D)
        oc, od = ref.cf_detection(inputs, "C"), ref.cf_detection(inputs, "D")
        rows.append({
            "phi": phi, "P_C": pc, "P_D": pd, "oracle_P_C": oc, "oracle_P_D": od,
            "abs_error": max(abs(pc - oc), abs(pd - od)),
        })
    return rows


def cmd_sensitivity(settings: dict) -> list[dict]:
    t = settings["t"]
    if len(t) != 1:
        raise UsageError("sensitivity takes a single --t value shared by every probe")
    rows = []
    for n in range(1, settings["n_max"] + 1):
        cfg = ExperimentConfig(
            n, xi=settings["xi"], gamma=settings["gamma"], transmissions=t[0],
            statistics=settings["stats"],
        )
        row = sensitivity_row(cfg).as_dict()
        inputs = ref.ClosedFormInputs(n, 0.0, cfg.zeta0, cfg.transmissions)
        oracle = ref.cf_delta_phi_min(inputs)
        row["oracle_delta_phi_min"] = oracle
        row["abs_error"] = abs(row["delta_phi_min"] - oracle)
        rows.append(row)
    return rows


def cmd_loss(settings: dict) -> list[dict]:
    n, points = settings["n"], settings["points"]
    lo, hi = settings["t_min"], settings["t_max"]
    if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0 and hi > lo):
        raise UsageError(f"need 0 <= --t-min < --t-max <= 1, got {lo}, {hi}")
    rows = []
    for k in range(points):
        t = lo + (hi - lo) * k / (points - 1)
        cfg = ExperimentConfig(
            n, xi=settings["xi"], gamma=settings["gamma"], phi=settings["phi"],
            transmissions=t, statistics=settings["stats"],
        )
        inputs = ref.ClosedFormInputs(n, cfg.phi, cfg.zeta0, cfg.transmissions)
        vis = visibility(cfg).measured
        oracle_vis = ref.cf_visibility(inputs)
        try:
            delta = min_phase_uncertainty(cfg).delta_phi
        except NoPhaseInformation:
            delta = math.inf
        try:
            oracle_delta = ref.cf_delta_phi_min(inputs)
        except ref.DivergentUncertainty:
            oracle_delta = math.inf
        entropy = sensing_entropy(build_state(cfg))
        oracle_entropy = ref.cf_sensing_entropy(inputs)
        if math.isinf(delta) and math.isinf(oracle_delta):
            delta_err = 0.0
        else:
            delta_err = abs(delta - oracle_delta)
        rows.append({
            "transmission": t,
            "visibility": vis,
            "oracle_visibility": oracle_vis,
            "visibility_error": abs(vis - oracle_vis),
            "delta_phi_min": delta,
            "oracle_delta_phi_min": oracle_delta,
            "delta_phi_error": delta_err,
            "entropy": entropy,
            "oracle_entropy": oracle_entropy,
            "entropy_error": abs(entropy - oracle_entropy),
            "regime": feasibility(n, min(max(vis, 0.0), 1.0)).value,
        })
    return rows


def cmd_state(settings: dict) -> list[dict]:
    n = settings["n"]
    cfg = ExperimentConfig(
        n, xi=settings["xi"], gamma=settings["gamma"], phi=settings["phi"],
        transmissions=_transmissions(settings, n), statistics=settings["stats"],
    )
    psi = build_state(cfg)
    labels = psi.registry.modes
    rows = []
    for occ, amp in sorted(psi.terms.items(), reverse=True):
        rows.append({
            "occupation": " ".join(str(k) for k in occ),
            "occupied_modes": " ".join(m for m, k in zip(labels, occ) if k),
            "re": amp.real,
            "im": amp.imag,
        })
    norm_error = abs(norm(psi) - 1.0)
    for r in rows:
        r["norm_error"] = norm_error
    return rows


COMMANDS = {
    "fringe": cmd_fringe,
    "sensitivity": cmd_sensitivity,
    "loss": cmd_loss,
    "state": cmd_state,
}


def _manifest(command: str, settings: dict) -> dict:
    config = {}
    for k, v in settings.items():
        if k in ("format", "check", "stamp", "oracle_tolerance"):
            continue
        if isinstance(v, Statistics):
            v = v.value
        elif isinstance(v, tuple):
            v = list(v)
        config[k] = v
    m = {
        "command": command,
        "config": config,
        "version": __version__,
        "deterministic": not settings["stamp"],
        "format": settings["format"],
        "angle_unit": "rad",
    }
    if settings["stamp"]:
        m["timestamp"] = datetime.now(timezone.utc).isoformat()
    return m


def _csv_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, float):
        return _finite_or_none(v)
    return v


def render(rows: list[dict], manifest: dict, fmt: str) -> str:
    if fmt == "json":
        payload = {
            "manifest": manifest,
            "rows": [{k: _json_value(v) for k, v in r.items()} for r in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(rows[0].keys())
        for r in rows:
            writer.writerow(_csv_cell(v) for v in r.values())
    return buf.getvalue()


def check_rows(rows: list[dict], tolerances: dict[str, float]) -> list[int]:
    bad = []
    for i, r in enumerate(rows):
        for col, tol in tolerances.items():
            if not r[col] <= tol:
                bad.append(i)
                break
    return bad


def _fail(code: str, message: str, status: int) -> int:
    msg = " ".join(str(message).split())
    print(f"error[{code}]: {msg}", file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        settings = resolve_settings(args)
        rows = COMMANDS[args.command](settings)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except (ValueError, ArithmeticError) as exc:
        return _fail("domain", exc, EXIT_DOMAIN)

    stdout.write(render(rows, _manifest(args.command, settings), settings["format"]))
    if settings["check"]:
        bad = check_rows(rows, _tolerances(args.command, settings))
        if bad:
            return _fail(
                "check",
                f"{len(bad)} of {len(rows)} rows exceed the oracle tolerance (first row {bad[0]})",
                EXIT_CHECK,
            )
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
