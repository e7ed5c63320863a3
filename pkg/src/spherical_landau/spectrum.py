"""Closed-form level energies of the small-angle Hamiltonian on the sphere.

Near the pole the field-dominated Hamiltonian reduces, mode by mode in the
azimuthal number ``m``, to a shifted harmonic oscillator of frequency

    omega_m = sqrt(omega_c**2 + m**2 / mu**2),

with a linear term of dimensionless strength ``lambda_m``.  Completing the
square gives

    E(m, l) = hbar**2 m**2 / (2 mu) + hbar omega (l + 1/2) - hbar omega_m lambda_m**2 / 8

where the ladder frequency ``omega`` is ``omega_m`` by default and
``omega_c`` with ``eigenvalue_omega="cyclotron"``.

All scalar functions broadcast over numpy arrays of ``m`` and ``l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Literal

import numpy as np

from .core import NumericalError, PhysicalParams, Truncation, validate_truncation

EigenvalueOmega = Literal["mode", "cyclotron"]


class EmptySpectrum(NumericalError):
    pass


class Spin(str, Enum):
    UP = "up"
    DOWN = "down"
    NONE = "none"


def cyclotron_frequency(params: PhysicalParams, b):
    """``omega_c = e b / mu``."""
    return params.e * b / params.mu


def free_cyclotron_frequency(params: PhysicalParams, b):
    """``omega_0 = e b / m0``, the bare-electron frequency in the Zeeman term."""
    return params.e * b / params.m0


def mode_frequency(params: PhysicalParams, b, m):
    """``omega_m = sqrt(omega_c**2 + m**2/mu**2)``; exactly ``omega_c`` at ``m = 0``."""
    return np.hypot(cyclotron_frequency(params, b), np.asarray(m, dtype=float) / params.mu)


def oscillator_length(params: PhysicalParams, b, m):
    """``rho_m = sqrt(hbar / (mu omega_m))``, the angular width of the mode."""
    return np.sqrt(params.hbar / (params.mu * mode_frequency(params, b, m)))


def lambda_shift(params: PhysicalParams, b, m):
    """Dimensionless linear-term strength ``lambda_m``; odd in ``m``, decays like ``b**-0.5``."""
    m = np.asarray(m, dtype=float)
    omega_m = mode_frequency(params, b, m)
    scale = (params.hbar / (params.mu * omega_m)) ** 1.5
    return 2.0 * params.e * m * b * params.r / params.hbar**2 * scale


def alpha_shift(params: PhysicalParams, b, m):
    """Energy offset ``hbar**2 m**2/(2 mu) + lambda_m**2/2`` entering the oscillatory phases."""
    m = np.asarray(m, dtype=float)
    lam = lambda_shift(params, b, m)
    return params.hbar**2 * m**2 / (2.0 * params.mu) + lam**2 / 2.0


@dataclass(frozen=True)
class ModeDerived:
    m: int
    omega_c: float
    omega_0: float
    omega_m: float
    lambda_m: float
    rho_m: float
    alpha_m: float


def mode_derived(params: PhysicalParams, b: float, m: int) -> ModeDerived:
    return ModeDerived(
        m=int(m),
        omega_c=float(cyclotron_frequency(params, b)),
        omega_0=float(free_cyclotron_frequency(params, b)),
        omega_m=float(mode_frequency(params, b, m)),
        lambda_m=float(lambda_shift(params, b, m)),
        rho_m=float(oscillator_length(params, b, m)),
        alpha_m=float(alpha_shift(params, b, m)),
    )


def planar_level(params: PhysicalParams, b, l):
    """Flat-plane Landau level ``hbar omega_c (l + 1/2)``."""
    return params.hbar * cyclotron_frequency(params, b) * (np.asarray(l, dtype=float) + 0.5)


def energy_level(params: PhysicalParams, b, m, l, eigenvalue_omega: EigenvalueOmega = "mode"):
    m = np.asarray(m, dtype=float)
    l = np.asarray(l, dtype=float)
    if np.any(l < 0):
        raise ValueError("oscillator index l must be non-negative")
    omega_m = mode_frequency(params, b, m)
    if eigenvalue_omega == "mode":
        ladder = omega_m
    elif eigenvalue_omega == "cyclotron":
        ladder = cyclotron_frequency(params, b)
    else:
        raise ValueError(f"eigenvalue_omega must be 'mode' or 'cyclotron', got {eigenvalue_omega!r}")
    lam = lambda_shift(params, b, m)
    kinetic = params.hbar**2 * m**2 / (2.0 * params.mu)
    return kinetic + params.hbar * ladder * (l + 0.5) - params.hbar * omega_m * lam**2 / 8.0


def zeeman_shift(params: PhysicalParams, b):
    """Half splitting ``g hbar omega_0 / 4``."""
    return params.g_factor * params.hbar * free_cyclotron_frequency(params, b) / 4.0


def spin_split(energy, spin: Spin | str, params: PhysicalParams, b):
    spin = Spin(spin)
    if spin is Spin.NONE:
        return energy
    shift = zeeman_shift(params, b)
    return energy + shift if spin is Spin.UP else energy - shift


def confinement_angle(params: PhysicalParams, b, m, energy):
    """Largest polar excursion ``(hbar|m| + sqrt(2 mu E)) / (e b r)`` of a level."""
    energy = np.maximum(np.asarray(energy, dtype=float), 0.0)
    return (params.hbar * np.abs(m) + np.sqrt(2.0 * params.mu * energy)) / (params.e * b * params.r)


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)


def harmonic_cutoff(params: PhysicalParams, b: float, beta: float, ratio: float = 1e-12, n_cap: int = 200_000) -> int:
    """Smallest ``n`` whose damping ``1/sinh(n x)`` is below ``ratio`` times the ``n = 1`` value.

    ``x = 2 pi**2 / (beta hbar omega_c)``.  Clipped to ``n_cap``.
    """
    x = 2.0 * math.pi**2 / (beta * params.hbar * cyclotron_frequency(params, b))
    target = -math.log(ratio)
    base = float(_log_sinh(x))
    n = max(1, int(math.floor((target + base + math.log(2.0)) / x)) - 1)
    while n > 1 and float(_log_sinh((n - 1) * x)) - base > target:
        n -= 1
    while n < n_cap and float(_log_sinh(n * x)) - base <= target:
        n += 1
    return min(n, n_cap)


def truncation_for(
    params: PhysicalParams,
    b: float,
    theta_cut: float,
    e_max: float,
    beta: float,
    *,
    l_max: int | None = None,
    eigenvalue_omega: EigenvalueOmega = "mode",
    ratio: float = 1e-12,
) -> Truncation:
    """Field-dependent cut-offs keeping only levels inside the small-angle chart.

    A level ``(m, l)`` is admitted when ``E(m, l) <= e_max`` and its
    confinement angle is below ``theta_cut``.  ``l_max`` defaults to the
    highest admissible rung of the ``m = 0`` ladder; ``m_max`` is then the
    largest ``|m|`` for which every rung ``l <= l_max`` is admissible.
    ``n_max`` comes from :func:`harmonic_cutoff`.

    Raises
    ------
    EmptySpectrum
        If not even the ``m = 0`` ground level is admissible.
    """
    if not (0.0 < theta_cut < math.pi / 2):
        raise ValueError("theta_cut must lie in (0, pi/2)")
    if e_max <= 0:
        raise ValueError("e_max must be positive")

    def admissible(m: int, ls) -> bool:
        energies = energy_level(params, b, m, ls, eigenvalue_omega)
        angles = confinement_angle(params, b, m, energies)
        return bool(np.all((angles < theta_cut) & (energies <= e_max)))

    if l_max is None:
        l_max = -1
        while admissible(0, [l_max + 1]):
            l_max += 1
    elif not admissible(0, np.arange(l_max + 1)):
        l_max = -1
    if l_max < 0:
        raise EmptySpectrum(f"no level satisfies the confinement bound at b={b}, theta_cut={theta_cut}")

    ls = np.arange(l_max + 1)
    m_max = 0
    while params.hbar * (m_max + 1) / (params.e * b * params.r) < theta_cut and admissible(m_max + 1, ls):
        m_max += 1
    return Truncation(m_max=m_max, l_max=l_max, n_max=harmonic_cutoff(params, b, beta, ratio), theta_cut=theta_cut)


@dataclass(frozen=True)
class Level:
    m: int
    l: int
    spin: Spin
    energy: float


@dataclass(frozen=True)
class LevelTable:
    levels: tuple[Level, ...]
    truncation: Truncation
    b: float
    params: PhysicalParams

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)


def sort_levels(levels: Iterable[Level]) -> tuple[Level, ...]:
    return tuple(sorted(levels, key=lambda lv: (lv.energy, lv.m, lv.l, lv.spin.value)))


def build_spectrum(
    params: PhysicalParams,
    b: float,
    truncation: Truncation,
    with_spin: bool = True,
    *,
    eigenvalue_omega: EigenvalueOmega = "mode",
    even_m_only: bool = False,
) -> LevelTable:
    """All ``(m, l, spin)`` levels within ``truncation``, sorted by energy.

    Equal energies are ordered by ``(m, l, spin)``.
    """
    validate_truncation(truncation)
    ms = truncation.mode_numbers(even_m_only)
    if not ms:
        raise EmptySpectrum("no mode numbers inside the truncation")
    m_grid, l_grid = np.meshgrid(ms, np.arange(truncation.l_max + 1), indexing="ij")
    energies = energy_level(params, b, m_grid, l_grid, eigenvalue_omega)
    spins = (Spin.UP, Spin.DOWN) if with_spin else (Spin.NONE,)
    levels = []
    for spin in spins:
        shifted = spin_split(energies, spin, params, b)
        for m, l, energy in zip(m_grid.ravel(), l_grid.ravel(), shifted.ravel()):
            levels.append(Level(int(m), int(l), spin, float(energy)))
    return LevelTable(sort_levels(levels), truncation, b, params)
