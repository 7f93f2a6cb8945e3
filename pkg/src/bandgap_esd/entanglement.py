"""Two-qubit state, concurrence and sudden-death analysis.

Each qubit decays into its own reservoir, so the joint state factorises and
everything is fixed by the single-qubit amplitude c1(t). Starting from
``alpha|00> + beta|11>`` the reduced two-qubit state is an X-state with

    diag = (a^2 + b^2 (1-p)^2, b^2 p (1-p), b^2 p (1-p), b^2 p^2),
    rho[00,11] = a b c1^2,        p = |c1|^2,

and its concurrence is ``2 max(0, a b p - b^2 p (1 - p))``. Entanglement dies
exactly when ``p`` drops to ``1 - alpha/beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    CLAMP_TOL,
    DEFAULT_POINTS,
    DEFAULT_T_MAX,
    SystemParams,
    Trajectory,
    amplitude_function,
    default_times,
    propagate_eigen,
)
from .errors import DomainError, InvalidParameters

NORM_TOL = 1e-12
X_FORM_TOL = 1e-12
ONSET_TIME_TOL = 1e-10
REVIVAL_THRESHOLD = 1e-12
TRAP_WINDOW = 0.2
TRAP_RTOL = 1e-4
TRAP_MIN = 1e-6

_SIGMA_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex
)


@dataclass(frozen=True)
class QubitPairInit:
    """Initial state ``alpha|00> + beta|11>`` with real, non-negative amplitudes."""

    alpha: float
    beta: float

    def __post_init__(self):
        a, b = self.alpha, self.beta
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidParameters(f"non-finite amplitudes alpha={a!r}, beta={b!r}")
        if a < 0 or b < 0:
            raise InvalidParameters("alpha and beta must be non-negative")
        if abs(a * a + b * b - 1.0) > NORM_TOL:
            raise InvalidParameters(f"alpha^2 + beta^2 = {a * a + b * b!r}, expected 1")

    @classmethod
    def from_alpha(cls, alpha: float) -> "QubitPairInit":
        return cls(float(alpha), math.sqrt(max(0.0, 1.0 - alpha * alpha)))

    @property
    def esd_threshold(self) -> float:
        """Value of |c1|^2 at which concurrence vanishes (<= 0 means never)."""
        return 1.0 - self.alpha / self.beta if self.beta > 0 else -math.inf


DEFAULT_INIT = QubitPairInit(0.5, math.sqrt(3.0) / 2.0)


@dataclass
class EsdReport:
    onset: float | None
    revivals: list = field(default_factory=list)
    trapped_value: float | None = None


def _clamped_abs2(c1) -> np.ndarray:
    p = np.abs(np.asarray(c1)) ** 2
    if np.any(p > 1.0 + CLAMP_TOL):
        raise DomainError(
            f"|c1|^2 = {float(np.max(p))!r} exceeds 1; the amplitude propagator is faulty"
        )
    return np.minimum(p, 1.0)


def build_rho_ab(c1: complex, init: QubitPairInit) -> np.ndarray:
    """Reduced 4x4 two-qubit density matrix in the basis |00>, |01>, |10>, |11>."""
    p = float(_clamped_abs2(c1))
    if p == 1.0 and abs(c1) != 1.0:
        c1 = c1 / abs(c1)
    a, b = init.alpha, init.beta
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = a * a + b * b * (1.0 - p) ** 2
    rho[1, 1] = rho[2, 2] = b * b * p * (1.0 - p)
    rho[3, 3] = b * b * p * p
    rho[0, 3] = a * b * complex(c1) ** 2
    rho[3, 0] = rho[0, 3].conjugate()
    return rho


def concurrence_closed_form(abs2_c1, init: QubitPairInit):
    x = np.asarray(abs2_c1, dtype=float)
    a, b = init.alpha, init.beta
    c = 2.0 * np.maximum(0.0, a * b * x - b * b * x * (1.0 - x))
    return c[()] if c.ndim == 0 else c


def is_x_form(rho, tol=X_FORM_TOL) -> bool:
    mask = np.ones((4, 4), dtype=bool)
    mask[np.arange(4), np.arange(4)] = False
    mask[np.arange(4), 3 - np.arange(4)] = False
    return bool(np.all(np.abs(np.asarray(rho)[mask]) <= tol))


def concurrence_wootters(rho) -> float:
    """Wootters concurrence of an X-state via its closed expression."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4) or not is_x_form(rho):
        raise InvalidParameters("concurrence_wootters supports only 4x4 X-form matrices")
    d = rho.diagonal().real
    c1 = abs(rho[0, 3]) - math.sqrt(max(0.0, d[1] * d[2]))
    c2 = abs(rho[1, 2]) - math.sqrt(max(0.0, d[0] * d[3]))
    return 2.0 * max(0.0, c1, c2)


def concurrence_eigen(rho) -> float:
    """Wootters concurrence from the spectrum of ``rho (sy x sy) rho* (sy x sy)``.

    Valid for any two-qubit density matrix; slower than the X-state formula.
    """
    rho = np.asarray(rho, dtype=complex)
    r = rho @ _SIGMA_YY @ rho.conj() @ _SIGMA_YY
    ev = np.sort(np.sqrt(np.abs(np.linalg.eigvals(r).real)))[::-1]
    return max(0.0, ev[0] - ev[1] - ev[2] - ev[3])


def concurrence_series(traj: Trajectory, init: QubitPairInit) -> np.ndarray:
    return concurrence_closed_form(_clamped_abs2(traj.c1), init)


def find_esd_onset(
    p: SystemParams,
    init: QubitPairInit,
    t_max=DEFAULT_T_MAX,
    points=DEFAULT_POINTS,
    traj: Trajectory | None = None,
):
    """First time in (0, t_max] at which |c1|^2 reaches ``1 - alpha/beta``.

    Scans the sampled trajectory for the first bracketing interval, then
    bisects to 1e-10 in time. Returns ``None`` when no crossing is found.
    """
    if init.alpha >= init.beta:
        return None
    thr = init.esd_threshold
    if traj is None:
        traj = propagate_eigen(p, default_times(t_max, points))
    x = traj.abs2_c1
    hits = np.nonzero(x <= thr)[0]
    if hits.size == 0:
        return None
    k = int(hits[0])
    if k == 0:
        return float(traj.times[0])
    amp = amplitude_function(p)
    lo, hi = float(traj.times[k - 1]), float(traj.times[k])
    while hi - lo > ONSET_TIME_TOL:
        mid = 0.5 * (lo + hi)
        if abs(amp(mid)[0]) ** 2 <= thr:
            hi = mid
        else:
            lo = mid
    return hi


def _positive_runs(times, values, after, threshold):
    runs = []
    start = prev = None
    for t, c in zip(times, values):
        if t <= after:
            continue
        if c > threshold:
            if start is None:
                start = t
            prev = t
        elif start is not None:
            runs.append((float(start), float(prev)))
            start = None
    if start is not None:
        runs.append((float(start), float(prev)))
    return runs


def trapped_value(times, conc, t_max) -> float | None:
    window = conc[times >= (1.0 - TRAP_WINDOW) * t_max]
    if window.size == 0:
        return None
    mean = float(np.mean(window))
    if mean <= TRAP_MIN:
        return None
    if (float(np.max(window)) - float(np.min(window))) / mean >= TRAP_RTOL:
        return None
    return mean


def analyze(
    p: SystemParams, init: QubitPairInit, t_max=DEFAULT_T_MAX, points=DEFAULT_POINTS
) -> EsdReport:
    """Onset, revival intervals after onset, and trapped concurrence plateau."""
    traj = propagate_eigen(p, default_times(t_max, points))
    conc = concurrence_series(traj, init)
    onset = find_esd_onset(p, init, t_max, points, traj=traj)
    revivals = []
    if onset is not None:
        revivals = _positive_runs(traj.times, conc, onset, REVIVAL_THRESHOLD)
    return EsdReport(onset, revivals, trapped_value(traj.times, conc, t_max))
