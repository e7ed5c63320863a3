"""Oscillatory magnetization, its planar reduction, and dHvA frequency extraction.

The closed-form magnetization is the field derivative of the oscillatory
part of the free energy in the large-field limit,

    M = e/(4 pi hbar^2) sum_m sum_n (-1)^n/(4 beta n) sin(phase) cos(n pi w0/(2 wm)) / sinh(x)
        * (1 + 2 pi^2 n e wc / (tanh(x) mu wm^3 beta hbar)),      x = 2 pi^2 n/(beta hbar wm).

``bracket="printed"`` keeps that bracket as written.  Differentiating the
areal prefactor and the damping of the free energy exactly gives the
bracket ``1 + b * (...)`` instead; that variant is ``bracket="consistent"``.
``bracket="unity"`` drops the correction, which at ``m = 0`` is the flat
Landau result (:func:`magnetization_planar`).

Sign: by default ``M = +dF/db``; ``sign="minus_dF_db"`` flips every result.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from .core import NumericalError, PhysicalParams, Truncation, ValidationError
from .spectrum import (
    EigenvalueOmega,
    LevelTable,
    build_spectrum,
    cyclotron_frequency,
    mode_frequency,
)
from .thermo import (
    FermiParams,
    PhaseConvention,
    ZeemanFactor,
    _modes,
    damping_argument,
    free_energy_analytic,
    free_energy_direct,
    free_energy_oscillatory,
    harmonic_terms,
    inv_sinh,
    zeeman_cosine,
)

Sign = Literal["dF_db", "minus_dF_db"]
Bracket = Literal["printed", "consistent", "unity"]
Source = Literal["direct", "analytic", "oscillatory"]


class StepTooSmall(NumericalError):
    pass


class TooFewPoints(ValidationError):
    pass


class NonUniformGrid(ValidationError):
    pass


def _sign_factor(sign: Sign) -> float:
    if sign == "dF_db":
        return 1.0
    if sign == "minus_dF_db":
        return -1.0
    raise ValueError(f"unknown sign convention {sign!r}")


def bracket_correction(params: PhysicalParams, b, beta, m, n):
    """Second term of the printed bracket, ``2 pi^2 n e wc / (tanh(x) mu wm^3 beta hbar)``.

    At ``m = 0`` and ``beta hbar wc >> 1`` it tends to ``e/(mu wc)``, i.e. ``1/b``.
    """
    omega_m = mode_frequency(params, b, m)
    x = damping_argument(params, b, beta, m, n)
    n = np.asarray(n, dtype=float)
    return (2.0 * math.pi**2 * n * params.e * cyclotron_frequency(params, b)
            / (np.tanh(x) * params.mu * omega_m**3 * beta * params.hbar))


def magnetization_analytic(
    params: PhysicalParams,
    b: float,
    fp: FermiParams,
    truncation: Truncation,
    convention: PhaseConvention = "derivation_consistent",
    *,
    bracket: Bracket = "printed",
    sign: Sign = "dF_db",
    m_values: Sequence[int] | None = None,
    even_m_only: bool = False,
    zeeman: ZeemanFactor = "printed",
) -> float:
    ms = _modes(truncation, m_values, even_m_only)
    terms = harmonic_terms(params, b, fp.beta, fp.nu, ms, truncation.n_max, convention, zeeman=zeeman)
    if bracket != "unity":
        n = np.arange(1, truncation.n_max + 1, dtype=float)[None, :]
        corr = bracket_correction(params, b, fp.beta, ms[:, None], n)
        if bracket == "consistent":
            corr = b * corr
        elif bracket != "printed":
            raise ValueError(f"unknown bracket {bracket!r}")
        terms = terms * (1.0 + corr)
    weight = params.e / (4.0 * math.pi * params.hbar**2)
    return _sign_factor(sign) * weight * math.fsum(terms.ravel())


def magnetization_planar(
    params: PhysicalParams,
    b: float,
    fp: FermiParams,
    n_max: int,
    *,
    sign: Sign = "dF_db",
    zeeman: ZeemanFactor = "printed",
) -> float:
    """Flat Landau magnetization: the ``m = 0`` series with the bracket dropped."""
    n = np.arange(1, n_max + 1, dtype=float)[None, :]
    omega_c = mode_frequency(params, b, np.zeros((1, 1)))
    hw = params.hbar * omega_c
    alternating = np.where(n % 2 == 0, 1.0, -1.0)
    spin = zeeman_cosine(params, b, np.zeros((1, 1)), n, zeeman)
    phase = 2.0 * n * math.pi / hw * fp.nu
    damping = inv_sinh(2.0 * math.pi**2 * n / (fp.beta * params.hbar * omega_c))
    terms = alternating / (4.0 * fp.beta * n) * np.sin(phase) * spin * damping
    return _sign_factor(sign) * params.e / (4.0 * math.pi * params.hbar**2) * math.fsum(terms.ravel())


def magnetization_numeric(
    params: PhysicalParams,
    b: float,
    fp: FermiParams,
    n_electrons: float,
    truncation: Truncation,
    step: float = 1e-5,
    *,
    source: Source = "direct",
    sign: Sign = "dF_db",
    convention: PhaseConvention = "derivation_consistent",
    with_spin: bool = True,
    eigenvalue_omega: EigenvalueOmega = "mode",
    even_m_only: bool = False,
    m_values: Sequence[int] | None = None,
    table_builder: Callable[[float], LevelTable] | None = None,
    prefactor: float | None = None,
    richardson: bool = False,
    zeeman: ZeemanFactor = "printed",
) -> float:
    """Central-difference ``dF/db`` with relative step ``step``.

    ``source`` selects the free energy being differentiated: the direct
    level sum (table rebuilt at ``b +/- delta`` with the same truncation),
    the full closed form, or its oscillatory part with everything but the
    areal prefactor and the damping frozen at ``b``.

    Raises
    ------
    StepTooSmall
        If the estimates at ``step`` and ``step/2`` disagree by more than 10%.
    """
    if not (1e-8 < step < 1e-2):
        raise ValidationError(f"relative step must lie in (1e-8, 1e-2), got {step}")

    if source == "direct":
        def builder(bb):
            if table_builder is not None:
                return table_builder(bb)
            return build_spectrum(params, bb, truncation, with_spin,
                                  eigenvalue_omega=eigenvalue_omega, even_m_only=even_m_only)

        def free_energy(bb):
            return free_energy_direct(builder(bb), fp, n_electrons, prefactor)
    elif source == "analytic":
        def free_energy(bb):
            return free_energy_analytic(params, bb, fp, n_electrons, truncation, convention,
                                        m_values=m_values, even_m_only=even_m_only, zeeman=zeeman).total
    elif source == "oscillatory":
        def free_energy(bb):
            return free_energy_oscillatory(params, bb, fp, truncation, convention, frozen_b=b,
                                           m_values=m_values, even_m_only=even_m_only, zeeman=zeeman)
    else:
        raise ValueError(f"unknown source {source!r}")

    def central(delta):
        return (free_energy(b + delta) - free_energy(b - delta)) / (2.0 * delta)

    delta = step * b
    coarse = central(delta)
    fine = central(delta / 2.0)
    scale = max(abs(free_energy(b)) / b, np.finfo(float).tiny)
    largest = max(abs(coarse), abs(fine))
    if largest > 1e-9 * scale and abs(coarse - fine) > 0.1 * largest:
        raise StepTooSmall(f"derivative estimates {coarse:.6e} and {fine:.6e} disagree; increase the step")
    value = (4.0 * fine - coarse) / 3.0 if richardson else coarse
    return _sign_factor(sign) * value


@dataclass(frozen=True)
class MagnetizationSweep:
    grid: np.ndarray
    inv_b: np.ndarray
    m_values: np.ndarray
    source: str
    sign_convention: str
    phase_convention: str = "derivation_consistent"

    def __post_init__(self):
        if not (len(self.grid) == len(self.inv_b) == len(self.m_values)):
            raise ValidationError("sweep arrays must have equal lengths")
        if np.any(np.diff(self.grid) <= 0):
            raise ValidationError("sweep grid must be strictly ascending in b")


def inverse_field_grid(b_min: float, b_max: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` fields uniformly spaced in ``1/b``; returns ``(b ascending, 1/b)``."""
    if count < 2 or not (0 < b_min < b_max):
        raise ValidationError("need 0 < b_min < b_max and count >= 2")
    inv_b = np.linspace(1.0 / b_max, 1.0 / b_min, count)[::-1]
    return 1.0 / inv_b, inv_b


def field_grid(b_min: float, b_max: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` fields uniformly spaced in ``b``; returns ``(b, 1/b)``."""
    if count < 2 or not (0 < b_min < b_max):
        raise ValidationError("need 0 < b_min < b_max and count >= 2")
    grid = np.linspace(b_min, b_max, count)
    return grid, 1.0 / grid


def magnetization_sweep(
    params: PhysicalParams,
    grid: np.ndarray,
    inv_b: np.ndarray,
    fp: FermiParams,
    truncation: Truncation,
    *,
    source: Literal["analytic", "numeric_diff"] = "analytic",
    convention: PhaseConvention = "derivation_consistent",
    bracket: Bracket = "printed",
    sign: Sign = "dF_db",
    n_electrons: float = 0.0,
    step: float = 1e-5,
    m_values: Sequence[int] | None = None,
    even_m_only: bool = False,
    threads: int = 1,
    zeeman: ZeemanFactor = "printed",
) -> MagnetizationSweep:
    """Evaluate M at every grid point; results keep grid order for any ``threads``."""

    def point(bb):
        if source == "analytic":
            return magnetization_analytic(params, bb, fp, truncation, convention, bracket=bracket, sign=sign,
                                          m_values=m_values, even_m_only=even_m_only, zeeman=zeeman)
        if source == "numeric_diff":
            return magnetization_numeric(params, bb, fp, n_electrons, truncation, step, source="analytic",
                                         sign=sign, convention=convention, m_values=m_values,
                                         even_m_only=even_m_only, zeeman=zeeman)
        raise ValueError(f"unknown sweep source {source!r}")

    grid = np.asarray(grid, dtype=float)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(point, grid))
    else:
        values = [point(bb) for bb in grid]
    return MagnetizationSweep(grid, np.asarray(inv_b, dtype=float), np.array(values), source, sign, convention)


@dataclass(frozen=True)
class DhvaSpectrum:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    detrend_order: int


def spectral_peaks(
    u: np.ndarray,
    y: np.ndarray,
    detrend_order: int = 2,
    *,
    max_peaks: int = 5,
    rel_threshold: float = 0.05,
    min_points: int = 64,
) -> DhvaSpectrum:
    """Dominant frequencies of ``y`` sampled uniformly in ``u``.

    A least-squares polynomial of ``detrend_order`` is removed, the residual
    is Hann-windowed and transformed, and each local maximum of the
    magnitude is refined by a parabola through the logarithms of the peak
    bin and its two neighbours.  Amplitudes are normalised so an on-bin sinusoid of
    amplitude ``A`` reports ``A``.  Peaks below ``rel_threshold`` times the
    largest are dropped.

    Raises
    ------
    TooFewPoints, NonUniformGrid
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    if u.size < min_points:
        raise TooFewPoints(f"need at least {min_points} points, got {u.size}")
    order = np.argsort(u)
    u, y = u[order], y[order]
    du = np.diff(u)
    spacing = (u[-1] - u[0]) / (u.size - 1)
    if np.max(np.abs(du - spacing)) > 1e-9 * abs(spacing):
        raise NonUniformGrid("samples must be uniformly spaced (use a grid uniform in 1/b)")

    centred = (u - u.mean()) / (u[-1] - u[0])
    coeffs = np.polynomial.polynomial.polyfit(centred, y, detrend_order)
    residual = y - np.polynomial.polynomial.polyval(centred, coeffs)
    window = np.hanning(u.size)
    mag = np.abs(np.fft.rfft(residual * window)) * 2.0 / window.sum()
    df = 1.0 / (u.size * spacing)

    # the Hann main lobe is close to Gaussian, so the parabola is fitted to log |Y|
    peaks = []
    for k in range(1, mag.size - 1):
        left, centre, right = mag[k - 1], mag[k], mag[k + 1]
        if centre > left and centre >= right:
            if left > 0 and right > 0:
                a, c, r = math.log(left), math.log(centre), math.log(right)
                curvature = a - 2.0 * c + r
                shift = 0.5 * (a - r) / curvature if curvature != 0 else 0.0
                height = math.exp(c - 0.25 * (a - r) * shift)
            else:
                shift, height = 0.0, centre
            peaks.append(((k + shift) * df, height))
    if not peaks:
        return DhvaSpectrum(np.array([]), np.array([]), detrend_order)
    peaks.sort(key=lambda p: (-p[1], p[0]))
    top = peaks[0][1]
    kept = [p for p in peaks if p[1] >= rel_threshold * top][:max_peaks]
    return DhvaSpectrum(np.array([p[0] for p in kept]), np.array([p[1] for p in kept]), detrend_order)


def dhva_extract(sweep: MagnetizationSweep, detrend_order: int = 2, **kwargs) -> DhvaSpectrum:
    """Oscillation frequencies of a sweep in the ``1/b`` variable."""
    return spectral_peaks(sweep.inv_b, sweep.m_values, detrend_order, **kwargs)
