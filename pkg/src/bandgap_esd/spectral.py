"""Two-Lorentzian band-gap spectral density and its pseudomode parameters.

All rates and frequencies are in units of the qubit-pseudomode coupling
``Omega_0``. Widths (``gamma1``, ``gamma2``) are full widths at half maximum;
use :meth:`SpectralDensity.from_half_widths` to build a density from the
half-width values quoted in figure captions.

The density is

    D(w) = W1*G1 / ((w - wc)^2 + (G1/2)^2) - W2*G2 / ((w - wc)^2 + (G2/2)^2)

with W1 - W2 = 1. The one-Lorentzian model is the degenerate case
``w2 = 0, gamma2 = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidParameters

WEIGHT_SUM_TOL = 1e-12
POSITIVITY_RTOL = 1e-12
PERFECT_GAP_RTOL = 1e-12
GOLDEN_TOL = 1e-9

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SpectralDensity:
    w1: float
    w2: float
    gamma1: float
    gamma2: float
    omega_c: float = 0.0

    @classmethod
    def from_half_widths(cls, w1, w2, gamma1_half, gamma2_half, omega_c=0.0):
        return cls(float(w1), float(w2), 2.0 * gamma1_half, 2.0 * gamma2_half, float(omega_c))

    @classmethod
    def one_lorentzian(cls, gamma1, omega_c=0.0):
        """Single Lorentzian of unit weight and full width ``gamma1``."""
        return cls(1.0, 0.0, float(gamma1), 0.0, float(omega_c))

    @property
    def is_one_lorentzian(self) -> bool:
        return self.w2 == 0.0

    def as_dict(self) -> dict:
        return {
            "w1": self.w1,
            "w2": self.w2,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "omega_c": self.omega_c,
        }


@dataclass(frozen=True)
class PseudomodeParams:
    """Decay rates of the two pseudomodes and their mutual coupling ``v``."""

    gamma1_prime: float
    gamma2_prime: float
    v: float


@dataclass(frozen=True)
class Violation:
    kind: str  # one of: non-finite, weight-sum, width-order, positivity
    message: str


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]

    def summary(self) -> str:
        return "; ".join(v.message for v in self.violations) or "ok"


def validate(sd: SpectralDensity) -> ValidationResult:
    """Check the weight-sum, width-ordering and positivity constraints.

    Never raises. Non-finite fields short-circuit the remaining checks and are
    reported under their own ``non-finite`` kind.
    """
    values = sd.as_dict()
    bad = [k for k, x in values.items() if not _is_finite_number(x)]
    if bad:
        return ValidationResult(
            (Violation("non-finite", f"non-finite parameter(s): {', '.join(bad)}"),)
        )

    out = []
    if abs((sd.w1 - sd.w2) - 1.0) > WEIGHT_SUM_TOL:
        out.append(
            Violation("weight-sum", f"w1 - w2 must equal 1 (got {sd.w1 - sd.w2!r})")
        )
    if not (0.0 <= sd.gamma2 < sd.gamma1):
        out.append(
            Violation(
                "width-order",
                f"need 0 <= gamma2 < gamma1 (got gamma1={sd.gamma1!r}, gamma2={sd.gamma2!r})",
            )
        )
    if sd.w2 < 0.0 or sd.w1 <= 0.0:
        out.append(Violation("positivity", "weights must satisfy w1 > 0 and w2 >= 0"))
    elif sd.w2 > 0.0 and sd.gamma1 > 0.0:
        # w2/w1 <= gamma2/gamma1, cross-multiplied to avoid dividing by zero
        lhs, rhs = sd.w2 * sd.gamma1, sd.w1 * sd.gamma2
        if lhs - rhs > POSITIVITY_RTOL * max(abs(lhs), abs(rhs)):
            out.append(
                Violation(
                    "positivity",
                    f"need w2/w1 <= gamma2/gamma1 for D >= 0 "
                    f"(w2/w1={sd.w2 / sd.w1!r}, gamma2/gamma1={sd.gamma2 / sd.gamma1!r})",
                )
            )
    return ValidationResult(tuple(out))


def require_valid(sd: SpectralDensity) -> None:
    res = validate(sd)
    if not res.ok:
        raise InvalidParameters(f"invalid spectral density {sd}: {res.summary()}", res.violations)


def _is_finite_number(x) -> bool:
    try:
        return math.isfinite(x)
    except TypeError:
        return False


def density_at_detuning(sd: SpectralDensity, delta):
    """D evaluated at ``w = omega_c - delta``; even in ``delta`` bit-for-bit."""
    x2 = np.square(np.asarray(delta, dtype=float))
    out = sd.w1 * sd.gamma1 / (x2 + (0.5 * sd.gamma1) ** 2)
    if sd.w2 != 0.0:
        out = out - sd.w2 * sd.gamma2 / (x2 + (0.5 * sd.gamma2) ** 2)
    return out[()] if np.ndim(out) == 0 else out


def evaluate_density(sd: SpectralDensity, omega):
    """Spectral density at absolute frequency ``omega`` (scalar or array)."""
    return density_at_detuning(sd, np.asarray(omega, dtype=float) - sd.omega_c)


def is_perfect_gap(sd: SpectralDensity, tol: float = PERFECT_GAP_RTOL) -> bool:
    """True when ``w1/gamma1 == w2/gamma2`` to relative tolerance ``tol``.

    The one-Lorentzian model (``w2 == 0``) is never a perfect gap.
    """
    if sd.w2 == 0.0:
        return False
    if sd.gamma2 == 0.0:
        raise InvalidParameters("gamma2 = 0 with w2 > 0 does not define a second Lorentzian")
    a, b = sd.w1 / sd.gamma1, sd.w2 / sd.gamma2
    return abs(a - b) <= tol * max(abs(a), abs(b))


def derive_pseudomode_params(sd: SpectralDensity) -> PseudomodeParams:
    require_valid(sd)
    g1p = sd.w1 * sd.gamma2 - sd.w2 * sd.gamma1
    # roundoff on an exact perfect gap must not produce a (tiny) gain
    if g1p < 0.0 and -g1p <= POSITIVITY_RTOL * sd.w1 * sd.gamma2:
        g1p = 0.0
    g2p = sd.w1 * sd.gamma1 - sd.w2 * sd.gamma2
    v = math.sqrt(sd.w1 * sd.w2) * (sd.gamma1 - sd.gamma2) / 2.0
    return PseudomodeParams(g1p, g2p, v)


def pseudomode_block(pm: PseudomodeParams, omega_c: float = 0.0) -> np.ndarray:
    """Non-Hermitian 2x2 generator of the coupled, damped pseudomodes."""
    return np.array(
        [
            [omega_c - 0.5j * pm.gamma1_prime, pm.v],
            [pm.v, omega_c - 0.5j * pm.gamma2_prime],
        ]
    )


def density_from_pseudomodes(pm: PseudomodeParams, omega, omega_c: float = 0.0):
    """Rebuild D(w) from the pseudomode parameters alone.

    ``D(w) = -2 Im[(w - Z)^-1]_{22}``, where Z is :func:`pseudomode_block`.
    The poles of this resolvent sit at ``omega_c - i*gamma_j/2`` with residues
    ``w1`` and ``-w2``, so it reproduces the two-Lorentzian form exactly.
    """
    z = pseudomode_block(pm, omega_c)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    a = w[:, None] - np.diag(z)[None, :]
    if pm.v == 0.0:
        g22 = 1.0 / a[:, 1]  # first pseudomode decoupled
    else:
        g22 = a[:, 0] / (a[:, 0] * a[:, 1] - pm.v**2)
    out = -2.0 * g22.imag
    return out[0] if np.ndim(omega) == 0 else out


def critical_detuning_paper(sd: SpectralDensity) -> float:
    """Critical |detuning| from the published closed form.

    Delta_c^2 = (G1^2 sqrt(W2 G2) - G2^2 sqrt(W1 G1)) / (4 sqrt(W1) (sqrt(G1) - sqrt(G2)))

    This does not coincide with the maximiser of D; see
    :func:`critical_detuning_stationary`.
    """
    require_valid(sd)
    if sd.w2 == 0.0 or sd.gamma2 == 0.0:
        raise DomainError("critical detuning requires two Lorentzians (w2 > 0, gamma2 > 0)")
    g1, g2 = sd.gamma1, sd.gamma2
    num = g1**2 * math.sqrt(sd.w2 * g2) - g2**2 * math.sqrt(sd.w1 * g1)
    den = 4.0 * math.sqrt(sd.w1) * (math.sqrt(g1) - math.sqrt(g2))
    sq = num / den
    if sq < 0.0:
        raise DomainError(f"negative radicand {sq!r}: no critical detuning for {sd}")
    return math.sqrt(sq)


def critical_detuning_stationary(sd: SpectralDensity) -> float:
    """Positive stationary point of D(Delta), from dD/dDelta = 0.

    Delta*^2 = (G1^2 sqrt(W2 G2) - G2^2 sqrt(W1 G1)) / (4 (sqrt(W1 G1) - sqrt(W2 G2)))
    """
    require_valid(sd)
    if sd.w2 == 0.0 or sd.gamma2 == 0.0:
        raise DomainError("stationary point requires two Lorentzians (w2 > 0, gamma2 > 0)")
    g1, g2 = sd.gamma1, sd.gamma2
    r1, r2 = math.sqrt(sd.w1 * g1), math.sqrt(sd.w2 * g2)
    sq = (g1**2 * r2 - g2**2 * r1) / (4.0 * (r1 - r2))
    if sq < 0.0:
        raise DomainError(f"D has no interior maximum for {sd}")
    return math.sqrt(sq)


def critical_detuning_numeric(sd: SpectralDensity, coarse_points: int = 4001) -> float:
    """Detuning Delta > 0 that maximises D(omega_c - Delta).

    Coarse scan on [0, 5*gamma1] followed by golden-section refinement to
    1e-9. Returns 0.0 when the scan peaks at Delta = 0.
    """
    require_valid(sd)
    grid = np.linspace(0.0, 5.0 * sd.gamma1, coarse_points)
    vals = density_at_detuning(sd, grid)
    i = int(np.argmax(vals))
    if i == 0:
        return 0.0
    lo, hi = grid[i - 1], grid[min(i + 1, coarse_points - 1)]
    return golden_section_max(lambda d: float(density_at_detuning(sd, d)), lo, hi, GOLDEN_TOL)


def golden_section_max(f, a: float, b: float, tol: float = GOLDEN_TOL) -> float:
    """Maximiser of a unimodal ``f`` on [a, b], to absolute tolerance ``tol``."""
    a, b = min(a, b), max(a, b)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
