"""Preset scenarios, sweep drivers and the qualitative ordering checks.

Presets reproduce the parameter sets of the published figures:

========  =====================================================================
fig1a     gamma2/2 in {1, 2, 9} at delta = 0 (gamma1/2 = 10, W1 = 1.1, W2 = 0.1)
fig1b     same, delta = 10
fig2a/b   D(w0) against gamma2/2 in [1, 9] (33 samples) at delta = 0 / 10
fig3      perfect gaps in the weak, intermediate and strong coupling regimes
fig4      |delta| sweep 0..10 (step 0.25), one Lorentzian, gamma1/2 = 10
fig5      |delta| sweep 0..10 (step 0.25), gap model gamma1/2 = 10, gamma2/2 = 1
fig6      D(delta) for the fig4 and fig5 spectral densities
========  =====================================================================

All time-domain presets use alpha = 1/2, beta = sqrt(3)/2 and t in [0, 50].
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import DEFAULT_POINTS, DEFAULT_T_MAX, SystemParams, default_times, propagate_eigen
from .entanglement import (
    DEFAULT_INIT,
    QubitPairInit,
    analyze,
    concurrence_series,
    find_esd_onset,
)
from .errors import InvalidParameters
from .spectral import SpectralDensity, density_at_detuning, require_valid
from .table import Table

AXES = ("gamma2_half", "delta_abs")
DETUNING_GRID = tuple(0.25 * k for k in range(41))
GAMMA2_GRID = tuple(np.linspace(1.0, 9.0, 33).tolist())


@dataclass(frozen=True)
class Scenario:
    name: str
    sd: SpectralDensity
    delta: float = 0.0
    init: QubitPairInit = DEFAULT_INIT
    t_max: float = DEFAULT_T_MAX
    grid_points: int = DEFAULT_POINTS
    rabi: float = 1.0

    def validate(self) -> None:
        require_valid(self.sd)
        if not (self.t_max > 0 and self.grid_points >= 2):
            raise InvalidParameters(f"{self.name}: need t_max > 0 and grid_points >= 2")
        self.system_params().validate()

    def system_params(self) -> SystemParams:
        return SystemParams.from_density(self.sd, self.delta, self.rabi)

    def times(self) -> np.ndarray:
        return default_times(self.t_max, self.grid_points)

    def manifest(self) -> list:
        return [
            ("scenario", self.name),
            ("w1", self.sd.w1),
            ("w2", self.sd.w2),
            ("gamma1_half", self.sd.gamma1 / 2),
            ("gamma2_half", self.sd.gamma2 / 2),
            ("delta", self.delta),
            ("rabi", self.rabi),
            ("alpha", self.init.alpha),
            ("beta", self.init.beta),
            ("t_max", self.t_max),
            ("grid_points", self.grid_points),
        ]


def with_axis_value(base: Scenario, axis: str, value: float) -> Scenario:
    if axis == "gamma2_half":
        sd = replace(base.sd, gamma2=2.0 * value)
        return replace(base, name=f"{base.name}:gamma2_half={value!r}", sd=sd)
    if axis == "delta_abs":
        return replace(base, name=f"{base.name}:delta_abs={value!r}", delta=float(value))
    raise InvalidParameters(f"unknown sweep axis {axis!r}; expected one of {AXES}")


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    axis: str
    values: tuple

    def validate(self) -> None:
        if self.axis not in AXES:
            raise InvalidParameters(f"unknown sweep axis {self.axis!r}; expected one of {AXES}")
        vals = list(self.values)
        if not vals or any(b <= a for a, b in zip(vals, vals[1:])):
            raise InvalidParameters("sweep values must be non-empty and strictly increasing")
        for s in self.scenarios():
            s.validate()

    def scenarios(self) -> list:
        return [with_axis_value(self.base, self.axis, v) for v in self.values]

    def manifest(self) -> list:
        swept = {"gamma2_half": "gamma2_half", "delta_abs": "delta"}.get(self.axis)
        head = [(k, v) for k, v in self.base.manifest() if k != swept]
        return head + [("axis", self.axis), ("values", " ".join(repr(float(v)) for v in self.values))]


@dataclass(frozen=True)
class DensityScan:
    """D(w0) at fixed detuning as the second width gamma2/2 varies."""

    base: Scenario
    values: tuple

    def manifest(self) -> list:
        keep = ("w1", "w2", "gamma1_half", "delta")
        return [("scenario", self.base.name)] + [
            (k, v) for k, v in self.base.manifest() if k in keep
        ] + [("values", " ".join(repr(float(v)) for v in self.values))]


@dataclass(frozen=True)
class DensityProfile:
    """D(omega_c - delta) for several spectral densities on a shared detuning grid."""

    name: str
    models: tuple  # ((label, SpectralDensity), ...)
    deltas: tuple = field(default=tuple(np.linspace(-10.0, 10.0, 801).tolist()))

    def manifest(self) -> list:
        out = [("scenario", self.name)]
        for label, sd in self.models:
            out += [
                (f"{label}.w1", sd.w1),
                (f"{label}.w2", sd.w2),
                (f"{label}.gamma1_half", sd.gamma1 / 2),
                (f"{label}.gamma2_half", sd.gamma2 / 2),
            ]
        return out


# --- preset registry ------------------------------------------------------------


def _gap(gamma1_half, gamma2_half, w1=1.1, w2=0.1):
    return SpectralDensity.from_half_widths(w1, w2, gamma1_half, gamma2_half)


def _build_presets():
    fig1 = lambda name, delta: SweepSpec(  # noqa: E731
        Scenario(name, _gap(10.0, 1.0), delta=delta), "gamma2_half", (1.0, 2.0, 9.0)
    )
    fig2 = lambda name, delta: DensityScan(  # noqa: E731
        Scenario(name, _gap(10.0, 1.0), delta=delta), GAMMA2_GRID
    )
    one = SpectralDensity.one_lorentzian(20.0)
    gap = _gap(10.0, 1.0)
    return {
        "fig1a": fig1("fig1a", 0.0),
        "fig1b": fig1("fig1b", 10.0),
        "fig2a": fig2("fig2a", 0.0),
        "fig2b": fig2("fig2b", 10.0),
        "fig3": (
            Scenario("fig3:weak", _gap(11.0, 1.0)),
            Scenario("fig3:intermediate", _gap(1.1, 0.1)),
            Scenario("fig3:strong", _gap(0.11, 0.01)),
        ),
        "fig4": SweepSpec(Scenario("fig4", one), "delta_abs", DETUNING_GRID),
        "fig5": SweepSpec(Scenario("fig5", gap), "delta_abs", DETUNING_GRID),
        "fig6": DensityProfile("fig6", (("one_lorentzian", one), ("gap", gap))),
    }


PRESETS = _build_presets()
PRESET_NAMES = tuple(PRESETS)


def preset(name: str):
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; valid names: {', '.join(PRESET_NAMES)}") from None


def preset_scenarios(names=PRESET_NAMES) -> list:
    """Every time-domain scenario reachable from the named presets."""
    out = []
    for name in names:
        obj = preset(name)
        if isinstance(obj, SweepSpec):
            out.extend(obj.scenarios())
        elif isinstance(obj, Scenario):
            out.append(obj)
        elif isinstance(obj, tuple):
            out.extend(obj)
    return out


# --- drivers --------------------------------------------------------------------


def run_concurrence(s: Scenario) -> Table:
    s.validate()
    traj = propagate_eigen(s.system_params(), s.times())
    return Table(("t", "concurrence"), [traj.times, concurrence_series(traj, s.init)])


def _map(fn, items, jobs=1):
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def run_scenarios(scenarios, jobs=1) -> Table:
    scenarios = list(scenarios)
    tables = _map(run_concurrence, scenarios, jobs)
    return Table.concat(tables, prefix=("scenario", [s.name for s in scenarios]))


def run_surface(sw: SweepSpec, jobs=1) -> Table:
    """Long-format (axis_value, t, concurrence), ordered by axis value then time."""
    sw.validate()
    tables = _map(run_concurrence, sw.scenarios(), jobs)
    return Table.concat(tables, prefix=("axis_value", [float(v) for v in sw.values]))


def run_density_profile(models, deltas) -> Table:
    deltas = np.asarray(deltas, dtype=float)
    cols, data = ["delta"], [deltas]
    for label, sd in models:
        require_valid(sd)
        cols.append(f"density_{label}")
        data.append(density_at_detuning(sd, deltas))
    return Table(tuple(cols), data)


def run_density_scan(scan: DensityScan) -> Table:
    dens = []
    for v in scan.values:
        s = with_axis_value(scan.base, "gamma2_half", v)
        require_valid(s.sd)
        dens.append(float(density_at_detuning(s.sd, s.delta)))
    return Table(("gamma2_half", "density"), [np.asarray(scan.values, dtype=float), dens])


def _onset_of(s: Scenario):
    s.validate()
    return find_esd_onset(s.system_params(), s.init, s.t_max, s.grid_points)


def sweep_onsets(sw: SweepSpec, jobs=1) -> list:
    """ESD onset (or None) per axis value."""
    sw.validate()
    return _map(_onset_of, sw.scenarios(), jobs)


def esd_table(scenarios, jobs=1) -> Table:
    """Columns gamma2_half, delta, esd_onset, trapped_value."""
    scenarios = list(scenarios)
    reports = _map(_analyze_scenario, scenarios, jobs)
    return Table(
        ("gamma2_half", "delta", "esd_onset", "trapped_value"),
        [
            [s.sd.gamma2 / 2 for s in scenarios],
            [s.delta for s in scenarios],
            [r.onset for r in reports],
            [r.trapped_value for r in reports],
        ],
    )


def _analyze_scenario(s: Scenario):
    s.validate()
    return analyze(s.system_params(), s.init, s.t_max, s.grid_points)


def run_preset(name: str, jobs=1) -> Table:
    """The CSV table behind a preset, with its manifest attached as comments."""
    obj = preset(name)
    if isinstance(obj, SweepSpec) and obj.axis == "gamma2_half":
        table = run_scenarios(obj.scenarios(), jobs)
    elif isinstance(obj, SweepSpec):
        table = run_surface(obj, jobs)
    elif isinstance(obj, tuple):
        table = run_scenarios(obj, jobs)
    elif isinstance(obj, DensityScan):
        table = run_density_scan(obj)
    else:
        table = run_density_profile(obj.models, obj.deltas)
    table.comments = manifest(obj)
    return table


def manifest(obj) -> list:
    if isinstance(obj, tuple):
        out = []
        for s in obj:
            out += s.manifest()
        return out
    return obj.manifest()


# --- ordering checks --------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _fmt(x):
    return "none" if x is None else f"{x:.6g}"


def _strict(values, onsets, label, decreasing):
    """Check onsets are finite and strictly monotone; name the first violating pair."""
    for v, o in zip(values, onsets):
        if o is None:
            return False, f"no ESD onset for {label}={v!r}"
    for (va, oa), (vb, ob) in zip(zip(values, onsets), zip(values[1:], onsets[1:])):
        ok = ob < oa if decreasing else ob > oa
        if not ok:
            return False, f"t({label}={va!r})={_fmt(oa)} vs t({label}={vb!r})={_fmt(ob)}"
    pairs = ", ".join(f"t({v!r})={_fmt(o)}" for v, o in zip(values, onsets))
    return True, pairs


def _guard(name, fn):
    try:
        return fn()
    except (InvalidParameters, ValueError) as exc:
        return CheckResult(name, False, f"invalid input: {exc}")


def check_fig1(sw: SweepSpec, reversed_order: bool, name: str) -> CheckResult:
    def run():
        onsets = sweep_onsets(sw)
        ok, detail = _strict(list(sw.values), onsets, "gamma2_half", decreasing=not reversed_order)
        return CheckResult(name, ok, detail)

    return _guard(name, run)


def check_fig2(at_resonance: DensityScan, detuned: DensityScan, name="fig2_monotonicity"):
    def run():
        up = np.asarray(run_density_scan(at_resonance).column("density"))
        down = np.asarray(run_density_scan(detuned).column("density"))
        bad_up = np.nonzero(np.diff(up) <= 0)[0]
        bad_down = np.nonzero(np.diff(down) >= 0)[0]
        if bad_up.size:
            i = int(bad_up[0])
            v = at_resonance.values
            return CheckResult(name, False, f"D not increasing between gamma2_half={v[i]!r} and {v[i + 1]!r}")
        if bad_down.size:
            i = int(bad_down[0])
            v = detuned.values
            return CheckResult(name, False, f"D not decreasing between gamma2_half={v[i]!r} and {v[i + 1]!r}")
        return CheckResult(
            name,
            True,
            f"increasing at delta={at_resonance.base.delta!r}, decreasing at delta={detuned.base.delta!r} "
            f"over {len(at_resonance.values)} samples",
        )

    return _guard(name, run)


def classify_regimes(scenarios) -> list:
    """(scenario, report, Gamma1') for each scenario."""
    out = []
    for s in scenarios:
        s.validate()
        out.append((s, _analyze_scenario(s), s.system_params().pm.gamma1_prime))
    return out


def check_fig3(scenarios, name="fig3_regimes") -> CheckResult:
    def run():
        res = classify_regimes(scenarios)
        if len(res) != 3:
            return CheckResult(name, False, f"expected 3 regimes, got {len(res)}")
        (s1, r1, g1), (s2, r2, _), (s3, r3, _) = res
        problems = []
        if not (r1.onset is None and r1.trapped_value is not None and r1.trapped_value > 0 and g1 == 0.0):
            problems.append(f"{s1.name}: onset={_fmt(r1.onset)} trapped={_fmt(r1.trapped_value)} gamma1'={g1!r}")
        if not (r2.onset is not None and not r2.revivals):
            problems.append(f"{s2.name}: onset={_fmt(r2.onset)} revivals={len(r2.revivals)}")
        if not (r3.onset is not None and r3.revivals):
            problems.append(f"{s3.name}: onset={_fmt(r3.onset)} revivals={len(r3.revivals)}")
        if problems:
            return CheckResult(name, False, "; ".join(problems))
        return CheckResult(
            name,
            True,
            f"trap={r1.trapped_value:.6g}, die at {r2.onset:.6g}, "
            f"revive at {r3.onset:.6g} with {len(r3.revivals)} revival(s)",
        )

    return _guard(name, run)


def check_fig4(sw: SweepSpec, name="fig4_monotone") -> CheckResult:
    def run():
        onsets = sweep_onsets(sw)
        vals = list(sw.values)
        for v, o in zip(vals, onsets):
            if o is None:
                return CheckResult(name, False, f"no ESD onset at |delta|={v!r}")
        for a, b, oa, ob in zip(vals, vals[1:], onsets, onsets[1:]):
            if ob < oa:
                return CheckResult(name, False, f"t(|delta|={a!r})={oa:.6g} > t(|delta|={b!r})={ob:.6g}")
        return CheckResult(name, True, f"onset rises from {onsets[0]:.6g} to {onsets[-1]:.6g}")

    return _guard(name, run)


def interior_minima(values) -> list:
    """Indices i (0 < i < n-1) where values[i] is a strict local minimum."""
    v = list(values)
    return [i for i in range(1, len(v) - 1) if v[i - 1] > v[i] < v[i + 1]]


def check_fig5(sw: SweepSpec, bracket=(3.0, 4.0), name="fig5_turning_point") -> CheckResult:
    def run():
        onsets = sweep_onsets(sw)
        vals = list(sw.values)
        for v, o in zip(vals, onsets):
            if o is None:
                return CheckResult(name, False, f"no ESD onset at |delta|={v!r}")
        d = np.sign(np.diff(onsets))
        minima = interior_minima(onsets)
        if len(minima) != 1:
            return CheckResult(name, False, f"{len(minima)} interior minima (at |delta|={[vals[i] for i in minima]})")
        k = minima[0]
        if not (np.all(d[:k] < 0) and np.all(d[k:] > 0)):
            return CheckResult(name, False, "onset is not strictly decreasing then increasing")
        lo, hi = bracket
        ok = lo < vals[k] < hi
        return CheckResult(
            name, ok, f"minimum onset {onsets[k]:.6g} at |delta|={vals[k]!r} (bracket {lo!r}..{hi!r})"
        )

    return _guard(name, run)


CHECKS = (
    ("fig1a_ordering", ("fig1a",), lambda p: check_fig1(p["fig1a"], False, "fig1a_ordering")),
    ("fig1b_ordering", ("fig1b",), lambda p: check_fig1(p["fig1b"], True, "fig1b_ordering")),
    ("fig2_monotonicity", ("fig2a", "fig2b"), lambda p: check_fig2(p["fig2a"], p["fig2b"])),
    ("fig3_regimes", ("fig3",), lambda p: check_fig3(p["fig3"])),
    ("fig4_monotone", ("fig4",), lambda p: check_fig4(p["fig4"])),
    ("fig5_turning_point", ("fig5",), lambda p: check_fig5(p["fig5"])),
)


def check_orderings(presets=None) -> list:
    """Run each ordering check whose presets are available.

    ``presets`` maps preset names to (possibly perturbed) preset objects and
    defaults to the full registry. Failures are reported, never raised.
    """
    presets = PRESETS if presets is None else presets
    return [fn(presets) for _, needs, fn in CHECKS if all(n in presets for n in needs)]
