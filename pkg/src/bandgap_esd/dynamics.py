"""Single-excitation amplitudes of one qubit coupled to two pseudomodes.

The amplitudes x = (c1, b1, b2) obey ``i dx/dt = M x`` with

    M = [[w0,  0,   R ],
         [0,   z1', V ],
         [R,   V,   z2']],   z_j' = w_c - i*Gamma_j'/2,  w_c = w0 + delta,

R being the qubit / second-pseudomode coupling (``rabi``). Two propagators are
provided: an exact one built from a closed-form eigendecomposition of M, and
an adaptive Runge-Kutta one used as an independent check and as the fallback
near exceptional points.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import rk
from .errors import InvalidParameters
from .spectral import PseudomodeParams, SpectralDensity, derive_pseudomode_params

DEFAULT_T_MAX = 50.0
DEFAULT_POINTS = 2001
DEFAULT_RK_TOL = 1e-10
DEGENERACY_RTOL = 1e-8
CLAMP_TOL = 1e-9

INITIAL_STATE = np.array([1.0, 0.0, 0.0], dtype=complex)


@dataclass(frozen=True)
class SystemParams:
    delta: float
    pm: PseudomodeParams
    rabi: float = 1.0
    omega0: float = 0.0

    @classmethod
    def from_density(cls, sd: SpectralDensity, delta=0.0, rabi=1.0, omega0=0.0):
        return cls(float(delta), derive_pseudomode_params(sd), float(rabi), float(omega0))

    @property
    def omega_c(self) -> float:
        return self.omega0 + self.delta

    def validate(self) -> None:
        pm = self.pm
        vals = (self.delta, self.rabi, self.omega0, pm.gamma1_prime, pm.gamma2_prime, pm.v)
        if not all(math.isfinite(x) for x in vals):
            raise InvalidParameters(f"non-finite system parameters: {self}")
        if self.rabi < 0.0:
            raise InvalidParameters(f"rabi must be non-negative, got {self.rabi!r}")
        if pm.gamma1_prime < 0.0 or pm.gamma2_prime <= 0.0 or pm.v < 0.0:
            raise InvalidParameters(f"pseudomode parameters out of range: {pm}")

    def describe(self) -> str:
        pm = self.pm
        return (
            f"delta={self.delta!r} rabi={self.rabi!r} omega0={self.omega0!r} "
            f"gamma1_prime={pm.gamma1_prime!r} gamma2_prime={pm.gamma2_prime!r} v={pm.v!r}"
        )


@dataclass(frozen=True)
class AmplitudeState:
    c1: complex
    b1: complex
    b2: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.b1, self.b2], dtype=complex)


@dataclass
class Trajectory:
    """Amplitudes sampled on a time grid; ``states[k] = (c1, b1, b2)`` at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, k) -> AmplitudeState:
        c1, b1, b2 = self.states[k]
        return AmplitudeState(complex(c1), complex(b1), complex(b2))

    @property
    def c1(self):
        return self.states[:, 0]

    @property
    def b1(self):
        return self.states[:, 1]

    @property
    def b2(self):
        return self.states[:, 2]

    @property
    def abs2_c1(self):
        return np.abs(self.c1) ** 2

    @property
    def norm(self):
        return excitation_norm(self.states)


def default_times(t_max=DEFAULT_T_MAX, points=DEFAULT_POINTS) -> np.ndarray:
    return np.linspace(0.0, float(t_max), int(points))


def excitation_norm(s):
    """|c1|^2 + |b1|^2 + |b2|^2 for a state, or row-wise for an (n, 3) array."""
    if isinstance(s, AmplitudeState):
        s = s.as_array()
    return np.sum(np.abs(np.asarray(s)) ** 2, axis=-1)


def dissipation_rate(p: SystemParams, states):
    """Analytic dN/dt = -Gamma1'|b1|^2 - Gamma2'|b2|^2."""
    states = np.asarray(states)
    return -p.pm.gamma1_prime * np.abs(states[..., 1]) ** 2 - p.pm.gamma2_prime * np.abs(
        states[..., 2]
    ) ** 2


def build_generator(p: SystemParams) -> np.ndarray:
    """Matrix M with ``i dx/dt = M x`` for x = (c1, b1, b2)."""
    wc = p.omega_c
    z1 = wc - 0.5j * p.pm.gamma1_prime
    z2 = wc - 0.5j * p.pm.gamma2_prime
    return np.array(
        [
            [p.omega0, 0.0, p.rabi],
            [0.0, z1, p.pm.v],
            [p.rabi, p.pm.v, z2],
        ],
        dtype=complex,
    )


# --- closed-form eigendecomposition -------------------------------------------


def characteristic_coefficients(m: np.ndarray):
    """(a, b, c) with det(lambda I - M) = lambda^3 + a lambda^2 + b lambda + c."""
    a = -(m[0, 0] + m[1, 1] + m[2, 2])
    b = (
        m[0, 0] * m[1, 1]
        - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2]
        - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2]
        - m[1, 2] * m[2, 1]
    )
    det = (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )
    return complex(a), complex(b), complex(-det)


def cubic_roots(a: complex, b: complex, c: complex) -> np.ndarray:
    """Roots of x^3 + a x^2 + b x + c by Cardano, polished with Newton steps."""
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    disc = cmath.sqrt(q * q / 4.0 + p**3 / 27.0)
    # pick the branch that avoids cancellation in u^3
    u3 = -q / 2.0 + disc
    alt = -q / 2.0 - disc
    if abs(alt) > abs(u3):
        u3 = alt
    if u3 == 0:
        roots = [-shift] * 3
    else:
        u = u3 ** (1.0 / 3.0)
        w = complex(-0.5, math.sqrt(3.0) / 2.0)
        roots = []
        for k in range(3):
            uk = u * w**k
            roots.append(uk - p / (3.0 * uk) - shift)

    def poly(x):
        return ((x + a) * x + b) * x + c

    def dpoly(x):
        return (3.0 * x + 2.0 * a) * x + b

    polished = []
    for r in roots:
        res = abs(poly(r))
        for _ in range(3):
            d = dpoly(r)
            if d == 0 or res == 0:
                break
            cand = r - poly(r) / d
            # near a multiple root Newton may overshoot; keep only improvements
            cand_res = abs(poly(cand))
            if cand_res >= res:
                break
            r, res = cand, cand_res
        polished.append(r)
    return np.array(polished, dtype=complex)


def null_vector(a: np.ndarray) -> np.ndarray:
    """Unit vector spanning the kernel of a rank-2 3x3 matrix.

    Takes the cross product of the pair of rows with the largest cross
    product, i.e. the best-conditioned 2x2 subsystem.
    """
    best = None
    best_norm = -1.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        v = np.cross(a[i], a[j])
        nv = np.linalg.norm(v)
        if nv > best_norm:
            best, best_norm = v, nv
    if best_norm == 0.0:
        # rank <= 1; any vector orthogonal (bilinearly) to the nonzero row
        row = a[np.argmax(np.linalg.norm(a, axis=1))]
        k = int(np.argmax(np.abs(row)))
        best = np.zeros(3, dtype=complex)
        if row[k] == 0:
            best[0] = 1.0
        else:
            j = (k + 1) % 3
            best[k], best[j] = -row[j], row[k]
        best_norm = np.linalg.norm(best)
    return best / best_norm


def eigen_decompose(m: np.ndarray):
    """Eigenvalues and unit eigenvectors (as columns) of a 3x3 complex matrix."""
    lam = cubic_roots(*characteristic_coefficients(m))
    vecs = np.column_stack([null_vector(m - l * np.eye(3)) for l in lam])
    return lam, vecs


def is_near_degenerate(lam: np.ndarray, rtol=DEGENERACY_RTOL) -> bool:
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0:
        return True
    sep = min(abs(lam[i] - lam[j]) for i, j in ((0, 1), (0, 2), (1, 2)))
    return sep <= rtol * scale


class NearDegenerateGenerator(Exception):
    pass


class EigenSolution:
    """Exact x(t) = sum_j alpha_j exp(-i lambda_j t) v_j for x(0) = x0."""

    def __init__(self, p: SystemParams, x0=INITIAL_STATE):
        self.params = p
        self.generator = build_generator(p)
        self.eigenvalues, self.eigenvectors = eigen_decompose(self.generator)
        if is_near_degenerate(self.eigenvalues):
            raise NearDegenerateGenerator(p.describe())
        self.x0 = np.asarray(x0, dtype=complex)
        self.coefficients = np.linalg.solve(self.eigenvectors, self.x0)

    def __call__(self, times) -> np.ndarray:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        phases = np.exp(-1j * np.outer(t, self.eigenvalues))
        out = (phases * self.coefficients) @ self.eigenvectors.T
        out[t == 0.0] = self.x0  # exact, instead of a 1e-16 reconstruction
        return out[0] if np.ndim(times) == 0 else out


class RKSolution:
    """Amplitudes at arbitrary times by integrating from t = 0 on demand."""

    def __init__(self, p: SystemParams, tol=DEFAULT_RK_TOL, x0=INITIAL_STATE):
        self.params = p
        self.tol = tol
        self.x0 = np.asarray(x0, dtype=complex)

    def __call__(self, times) -> np.ndarray:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        order = np.argsort(t)
        grid = np.concatenate(([0.0], t[order]))
        # integrate() needs a non-decreasing grid starting at 0
        vals = _integrate_amplitudes(self.params, grid, self.tol, self.x0)[1:]
        out = np.empty_like(vals)
        out[order] = vals
        return out[0] if np.ndim(times) == 0 else out


def amplitude_function(p: SystemParams, tol=DEFAULT_RK_TOL):
    """Best available callable ``t -> (c1, b1, b2)``: exact when possible."""
    p.validate()
    try:
        return EigenSolution(p)
    except NearDegenerateGenerator:
        return RKSolution(p, tol)


def propagate_eigen(p: SystemParams, times=None) -> Trajectory:
    """Exact propagation from (1, 0, 0).

    Falls back to :func:`propagate_rk` (``meta['fallback'] = True``) when the
    generator has nearly coincident eigenvalues.
    """
    p.validate()
    times = default_times() if times is None else np.asarray(times, dtype=float)
    try:
        sol = EigenSolution(p)
    except NearDegenerateGenerator:
        traj = propagate_rk(p, times=times)
        traj.meta.update(method="rk", fallback=True)
        return traj
    return Trajectory(
        times, sol(times), {"method": "eigen", "fallback": False, "eigenvalues": sol.eigenvalues}
    )


def _integrate_amplitudes(p, times, tol, x0=INITIAL_STATE):
    m = build_generator(p)
    h_min = 1e-14 / p.rabi if p.rabi > 0 else 1e-14
    return rk.integrate(lambda t, x: -1j * (m @ x), x0, times, tol=tol, h_min=h_min, label=p.describe())


def propagate_rk(
    p: SystemParams,
    t_end=DEFAULT_T_MAX,
    tol=DEFAULT_RK_TOL,
    points=DEFAULT_POINTS,
    times=None,
) -> Trajectory:
    """Adaptive Dormand-Prince propagation from (1, 0, 0), sampled by dense output."""
    p.validate()
    if not (1e-13 <= tol <= 1e-3):
        raise InvalidParameters(f"tol must lie in [1e-13, 1e-3], got {tol!r}")
    if times is None:
        if not t_end > 0:
            raise InvalidParameters(f"t_end must be positive, got {t_end!r}")
        times = default_times(t_end, points)
    times = np.asarray(times, dtype=float)
    states = _integrate_amplitudes(p, times, tol)
    return Trajectory(times, states, {"method": "rk", "fallback": False, "tol": tol})
