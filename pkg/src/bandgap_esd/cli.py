"""Command-line entry point: ``bandgap-esd <subcommand> [flags]``.

Widths are given as half-widths (``--gamma1-half 10`` means Gamma1 = 20).
Exit codes: 0 success, 1 runtime failure, 2 bad arguments.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import experiments as ex
from .dynamics import DEFAULT_POINTS, DEFAULT_RK_TOL, DEFAULT_T_MAX, SystemParams
from .dynamics import default_times, propagate_eigen, propagate_rk
from .entanglement import QubitPairInit
from .errors import DomainError, InvalidParameters, StiffnessError
from .master_equation import QUBIT, projector, propagate_lindblad
from .spectral import (
    SpectralDensity,
    critical_detuning_numeric,
    critical_detuning_paper,
    density_at_detuning,
    validate,
)
from .table import Table, to_csv, write_text

GAP_DEFAULTS = {"w1": 1.1, "w2": 0.1, "gamma1_half": 10.0, "gamma2_half": 1.0}


class UsageError(Exception):
    pass


def parse_values(text: str) -> list:
    """``"1,2,9"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + k * step for k in range(max(n, 0))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse value list {text!r}") from None


def _beta(text: str):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--beta takes a number or 'auto'") from None


# --- argument groups --------------------------------------------------------------


def _add_density_flags(p, list_gamma2=False):
    g = p.add_argument_group("spectral density")
    g.add_argument("--w1", type=float, help="weight of the first Lorentzian (default 1.1)")
    g.add_argument("--w2", type=float, help="weight of the negative Lorentzian (default 0.1)")
    g.add_argument("--gamma1-half", type=float, help="half-width Gamma1/2 in units of Omega0 (default 10)")
    if list_gamma2:
        g.add_argument(
            "--gamma2-half",
            type=parse_values,
            help="half-width(s) Gamma2/2: a list '1,2,9' or range 'a:b:step' (default 1)",
        )
    else:
        g.add_argument("--gamma2-half", type=float, help="half-width Gamma2/2 in units of Omega0 (default 1)")
    g.add_argument(
        "--one-lorentzian",
        action="store_true",
        help="single Lorentzian (W1=1, W2=0, Gamma2=0); conflicts with --w1/--w2/--gamma2-half",
    )


def _add_system_flags(p, list_delta=False):
    g = p.add_argument_group("qubit and initial state")
    if list_delta:
        g.add_argument("--delta", type=parse_values, default=[0.0], help="detuning(s) omega_c - omega0 (default 0)")
    else:
        g.add_argument("--delta", type=float, default=0.0, help="detuning omega_c - omega0 (default 0)")
    g.add_argument("--rabi", type=float, default=1.0, help="qubit/pseudomode coupling Omega0 (default 1)")
    g.add_argument("--omega0", type=float, default=0.0, help="qubit frequency; sets the rotating frame (default 0)")
    g.add_argument("--alpha", type=float, default=0.5, help="amplitude of |00> (default 0.5)")
    g.add_argument("--beta", type=_beta, default="auto", help="amplitude of |11>, or 'auto' for sqrt(1-alpha^2)")
    g.add_argument("--t-max", type=float, default=DEFAULT_T_MAX, help="end time in units of 1/Omega0 (default 50)")
    g.add_argument("--points", type=int, default=DEFAULT_POINTS, help="uniform grid points (default 2001)")


def _add_output_flags(p, jobs=False):
    g = p.add_argument_group("output")
    g.add_argument("--out", help="write CSV to this path atomically (default: stdout)")
    g.add_argument("--manifest", action="store_true", help="prefix '# key=value' parameter lines")
    if jobs:
        g.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandgap-esd",
        description="Two-qubit entanglement dynamics in band-gap reservoirs (pseudomode method).",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="amplitudes c1, b1, b2 on a time grid")
    _add_density_flags(p)
    _add_system_flags(p)
    p.add_argument("--method", choices=("eigen", "rk"), default="eigen", help="propagator (default eigen)")
    p.add_argument("--tol", type=float, default=DEFAULT_RK_TOL, help="RK tolerance (default 1e-10)")
    p.add_argument(
        "--oracle",
        action="store_true",
        help="append rho_ee from the Lindblad master-equation oracle",
    )
    _add_output_flags(p)

    p = sub.add_parser("spectrum", help="spectral density D against detuning")
    _add_density_flags(p)
    p.add_argument("--delta-min", type=float, default=-10.0, help="first detuning (default -10)")
    p.add_argument("--delta-max", type=float, default=10.0, help="last detuning (default 10)")
    p.add_argument("--delta-step", type=float, default=0.025, help="detuning step (default 0.025)")
    _add_output_flags(p)

    p = sub.add_parser("esd-time", help="ESD onset and trapped concurrence per (Gamma2/2, delta)")
    _add_density_flags(p, list_gamma2=True)
    _add_system_flags(p, list_delta=True)
    _add_output_flags(p, jobs=True)

    p = sub.add_parser("sweep", help="concurrence surface over Gamma2/2 or |delta|")
    _add_density_flags(p)
    _add_system_flags(p)
    p.add_argument("--axis", choices=ex.AXES, required=True, help="swept parameter")
    p.add_argument("--values", type=parse_values, required=True, help="list '1,2,9' or range 'a:b:step'")
    _add_output_flags(p, jobs=True)

    p = sub.add_parser("preset", help="regenerate a figure dataset")
    p.add_argument("name", choices=ex.PRESET_NAMES, help="preset name")
    _add_output_flags(p, jobs=True)

    sub.add_parser("check", help="evaluate the qualitative ordering claims; exit 0 iff all pass")
    return parser


# --- flag resolution ----------------------------------------------------------------


def density_from_args(args, gamma2_half=None) -> SpectralDensity:
    g2 = args.gamma2_half if gamma2_half is None else gamma2_half
    if args.one_lorentzian:
        clash = [n for n, v in (("--w1", args.w1), ("--w2", args.w2), ("--gamma2-half", args.gamma2_half)) if v is not None]
        if clash:
            raise UsageError(f"--one-lorentzian conflicts with {', '.join(clash)}")
        g1h = GAP_DEFAULTS["gamma1_half"] if args.gamma1_half is None else args.gamma1_half
        return SpectralDensity.from_half_widths(1.0, 0.0, g1h, 0.0)
    pick = lambda name, v: GAP_DEFAULTS[name] if v is None else v  # noqa: E731
    sd = SpectralDensity.from_half_widths(
        pick("w1", args.w1), pick("w2", args.w2), pick("gamma1_half", args.gamma1_half), pick("gamma2_half", g2)
    )
    res = validate(sd)
    if not res.ok:
        raise UsageError(f"invalid spectral density: {res.summary()}")
    return sd


def init_from_args(args) -> QubitPairInit:
    beta = math.sqrt(max(0.0, 1.0 - args.alpha**2)) if args.beta == "auto" else args.beta
    try:
        return QubitPairInit(args.alpha, beta)
    except InvalidParameters as exc:
        raise UsageError(str(exc)) from None


def _check_grid(args):
    if not args.t_max > 0:
        raise UsageError("--t-max must be positive")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if args.rabi < 0:
        raise UsageError("--rabi must be non-negative")


def scenario_from_args(args, name="cli", delta=None, gamma2_half=None) -> ex.Scenario:
    _check_grid(args)
    return ex.Scenario(
        name,
        density_from_args(args, gamma2_half),
        delta=args.delta if delta is None else delta,
        init=init_from_args(args),
        t_max=args.t_max,
        grid_points=args.points,
        rabi=args.rabi,
    )


# --- commands -------------------------------------------------------------------------


def cmd_simulate(args) -> Table:
    s = scenario_from_args(args)
    if not (1e-13 <= args.tol <= 1e-3):
        raise UsageError("--tol must lie in [1e-13, 1e-3]")
    p = SystemParams.from_density(s.sd, s.delta, s.rabi, args.omega0)
    times = default_times(s.t_max, s.grid_points)
    traj = propagate_rk(p, tol=args.tol, times=times) if args.method == "rk" else propagate_eigen(p, times)
    cols = ["t", "re_c1", "im_c1", "abs2_c1", "abs2_b1", "abs2_b2", "norm"]
    data = [
        traj.times,
        traj.c1.real,
        traj.c1.imag,
        np.abs(traj.c1) ** 2,
        np.abs(traj.b1) ** 2,
        np.abs(traj.b2) ** 2,
        traj.norm,
    ]
    if args.oracle:
        rhos = propagate_lindblad(projector("e;00"), p, times, tol=args.tol)
        cols.append("rho_ee")
        data.append(rhos[:, QUBIT, QUBIT].real)
    comments = s.manifest() + [("omega0", args.omega0), ("method", traj.meta["method"])]
    return Table(cols, data, comments)


def cmd_spectrum(args) -> Table:
    sd = density_from_args(args)
    if args.delta_step <= 0 or args.delta_max < args.delta_min:
        raise UsageError("need --delta-step > 0 and --delta-max >= --delta-min")
    n = int(math.floor((args.delta_max - args.delta_min) / args.delta_step + 1e-9)) + 1
    deltas = args.delta_min + args.delta_step * np.arange(n)
    comments = [
        ("w1", sd.w1),
        ("w2", sd.w2),
        ("gamma1_half", sd.gamma1 / 2),
        ("gamma2_half", sd.gamma2 / 2),
        ("critical_detuning_numeric", critical_detuning_numeric(sd)),
    ]
    try:
        comments.append(("critical_detuning_paper", critical_detuning_paper(sd)))
    except DomainError:
        comments.append(("critical_detuning_paper", None))
    return Table(("delta", "density"), [deltas, density_at_detuning(sd, deltas)], comments)


def cmd_esd_time(args) -> Table:
    g2s = args.gamma2_half if args.gamma2_half is not None else [None]
    if args.one_lorentzian and args.gamma2_half is not None:
        raise UsageError("--one-lorentzian conflicts with --gamma2-half")
    scenarios = [
        scenario_from_args(args, f"esd:{g!r}:{d!r}", delta=d, gamma2_half=g)
        for g in g2s
        for d in args.delta
    ]
    table = ex.esd_table(scenarios, jobs=args.jobs)
    table.comments = [(k, v) for k, v in scenarios[0].manifest() if k not in ("scenario", "gamma2_half", "delta")]
    return table


def cmd_sweep(args) -> Table:
    base = scenario_from_args(args, "sweep")
    sw = ex.SweepSpec(base, args.axis, tuple(args.values))
    try:
        sw.validate()
    except InvalidParameters as exc:
        raise UsageError(str(exc)) from None
    table = ex.run_surface(sw, jobs=args.jobs)
    table.comments = sw.manifest()
    return table


def cmd_preset(args) -> Table:
    return ex.run_preset(args.name, jobs=args.jobs)


def cmd_check(args) -> int:
    results = ex.check_orderings()
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "esd-time": cmd_esd_time,
    "sweep": cmd_sweep,
    "preset": cmd_preset,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args)
        table = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (StiffnessError, DomainError, InvalidParameters) as exc:
        print(f"{parser.prog} {args.command}: runtime error: {exc}", file=sys.stderr)
        print(f"parameters: {vars(args)}", file=sys.stderr)
        return 1
    if not getattr(args, "manifest", False):
        table.comments = []
    try:
        write_text(to_csv(table), args.out)
    except BrokenPipeError:
        sys.stderr.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
