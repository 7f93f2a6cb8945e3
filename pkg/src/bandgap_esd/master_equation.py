"""Lindblad propagation of one qubit plus two pseudomodes, truncated to one excitation.

Used as an oracle for :mod:`bandgap_esd.dynamics`. The rotating-wave
Hamiltonian conserves the excitation number and both dissipators only lower
it, so starting from at most one excitation the truncation below is exact.
"""
from __future__ import annotations

import numpy as np

from . import rk
from .dynamics import DEFAULT_RK_TOL, SystemParams, default_times
from .errors import InvalidParameters

# basis order: ground, qubit excited, first pseudomode, second pseudomode
BASIS = ("g;00", "e;00", "g;10", "g;01")
GROUND, QUBIT, MODE1, MODE2 = range(4)
DIM = 4

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-9


def basis_state(label: str) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[BASIS.index(label)] = 1.0
    return v


def projector(label: str) -> np.ndarray:
    v = basis_state(label)
    return np.outer(v, v.conj())


def build_hamiltonian(p: SystemParams) -> np.ndarray:
    h = np.zeros((DIM, DIM), dtype=complex)
    h[QUBIT, QUBIT] = p.omega0
    h[MODE1, MODE1] = p.omega_c
    h[MODE2, MODE2] = p.omega_c
    h[QUBIT, MODE2] = h[MODE2, QUBIT] = p.rabi
    h[MODE1, MODE2] = h[MODE2, MODE1] = p.pm.v
    return h


def build_jump_operators(p: SystemParams):
    """Lowering operators ``a1``, ``a2`` and their rates, as ``[(a1, G1'), (a2, G2')]``."""
    a1 = np.zeros((DIM, DIM), dtype=complex)
    a2 = np.zeros((DIM, DIM), dtype=complex)
    a1[GROUND, MODE1] = 1.0
    a2[GROUND, MODE2] = 1.0
    return [(a1, p.pm.gamma1_prime), (a2, p.pm.gamma2_prime)]


def check_density(rho: np.ndarray) -> None:
    """Raise :class:`InvalidParameters` unless rho is a valid 4x4 density operator."""
    rho = np.asarray(rho)
    if rho.shape != (DIM, DIM):
        raise InvalidParameters(f"density operator must be {DIM}x{DIM}, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise InvalidParameters("density operator is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise InvalidParameters(f"density operator trace {np.trace(rho)!r} != 1")
    if np.min(np.linalg.eigvalsh(rho)) < POSITIVITY_TOL:
        raise InvalidParameters("density operator has negative eigenvalues")


def lindblad_rhs(h: np.ndarray, jumps):
    """Right-hand side of the master equation, returned exactly Hermitian."""
    terms = [(a, rate, a.conj().T, a.conj().T @ a) for a, rate in jumps if rate != 0.0]

    def rhs(_t, rho):
        # -i[H, rho] = X + X^dagger with X = -i H rho
        x = -1j * (h @ rho)
        for a, rate, ad, ada in terms:
            x = x + rate * (0.5 * (a @ rho @ ad) - 0.5 * (ada @ rho))
        return x + x.conj().T

    return rhs


def propagate_lindblad(rho0, p: SystemParams, times=None, tol=DEFAULT_RK_TOL) -> np.ndarray:
    """Density operators on ``times``; array of shape ``(len(times), 4, 4)``."""
    p.validate()
    check_density(rho0)
    times = default_times() if times is None else np.asarray(times, dtype=float)
    h_min = 1e-14 / p.rabi if p.rabi > 0 else 1e-14
    rhs = lindblad_rhs(build_hamiltonian(p), build_jump_operators(p))
    return rk.integrate(rhs, rho0, times, tol=tol, h_min=h_min, label=p.describe())


def amplitude_dictionary(rhos: np.ndarray) -> np.ndarray:
    """The 3x3 block of rho over (e;00, g;10, g;01), which should equal x x^dagger."""
    idx = np.array([QUBIT, MODE1, MODE2])
    return rhos[..., idx[:, None], idx[None, :]]
