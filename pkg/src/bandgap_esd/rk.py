"""Adaptive Dormand-Prince 5(4) integrator with dense output.

Shared by the amplitude propagator and the Lindblad oracle. Works on complex
arrays of any shape; the error norm is the scaled RMS over all entries with
``atol = rtol = tol``.
"""
from __future__ import annotations

import numpy as np

from .errors import StiffnessError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array(row)
    for row in (
        [],
        [1 / 5],
        [3 / 40, 9 / 40],
        [44 / 45, -56 / 15, 32 / 9],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    )
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# 5th-order minus embedded 4th-order weights
_E = np.array(
    [-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40]
)
# Shampine's continuous extension (order 4); row i multiplies stage i
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [
            0,
            127303824393 / 49829197408,
            -318862633887 / 49829197408,
            701980252875 / 199316789632,
        ],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
MAX_STEPS = 2_000_000


def _norm(x, scale):
    return float(np.sqrt(np.mean(np.abs(x / scale) ** 2)))


def _initial_step(rhs, t0, y0, f0, tol, t_span):
    # Hairer, Norsett & Wanner, Solving ODEs I, II.4
    scale = tol + tol * np.abs(y0)
    d0, d1 = _norm(y0, scale), _norm(f0, scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_span)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = _norm(f1 - f0, scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, t_span)


def integrate(rhs, y0, t_eval, tol=1e-10, h_min=1e-14, label=None):
    """Integrate ``y' = rhs(t, y)`` from ``t_eval[0]`` and sample at ``t_eval``.

    Returns an array of shape ``(len(t_eval),) + y0.shape``; row 0 is ``y0``.
    Raises :class:`StiffnessError` when the accepted step would drop below
    ``h_min``; ``label`` is attached to the error for reporting.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    y = np.array(y0, dtype=complex)
    shape = y.shape
    y = y.ravel()
    n = y.size

    def f(t, x):
        return np.asarray(rhs(t, x.reshape(shape)), dtype=complex).ravel()

    out = np.empty((len(t_eval), n), dtype=complex)
    out[0] = y
    if len(t_eval) == 1:
        return out.reshape((1,) + shape)

    t, t_end = t_eval[0], t_eval[-1]
    K = np.empty((7, n), dtype=complex)
    K[0] = f(t, y)
    h = _initial_step(f, t, y, K[0], tol, t_end - t)
    nxt = 1
    steps = 0
    while nxt < len(t_eval):
        steps += 1
        if steps > MAX_STEPS:
            raise StiffnessError(f"step budget exhausted at t={t!r}", label)
        last = h >= t_end - t
        if last:
            h = t_end - t
        elif h < h_min:
            raise StiffnessError(
                f"step size {h!r} below floor {h_min!r} at t={t!r} for {label}", label
            )
        for i in range(1, 6):
            K[i] = f(t + _C[i] * h, y + h * (_A[i] @ K[:i]))
        y_new = y + h * (_B[:6] @ K[:6])
        K[6] = f(t + h, y_new)
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
        err = _norm(h * (_E @ K), scale)

        if err <= 1.0:
            t_new = t_end if last else t + h
            # sample every requested time inside (t, t_new]
            while nxt < len(t_eval) and t_eval[nxt] <= t_new:
                theta = (t_eval[nxt] - t) / h
                q = theta ** np.arange(1, 5)
                out[nxt] = y + h * ((_P @ q) @ K)
                nxt += 1
            t, y = t_new, y_new
            K[0] = K[6]
            fac = MAX_FACTOR if err == 0.0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
            h *= fac
        else:
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
    return out.reshape((len(t_eval),) + shape)
