"""Physical parameters, field points, truncation and the shared error types.

Every formula in the package is written for a charge ``e`` of effective mass
``mu`` on a sphere of radius ``r``.  The default system of units is the
natural one (e = mu = m0 = hbar = r = 1, g = 2), in which all formulas are
dimensionally literal.  ``units_mode="custom"`` lets any positive values
through; the formulas are then applied as written, without unit repair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping


class SphericalLandauError(Exception):
    """Base class; ``name`` is the machine-readable error name."""

    @property
    def name(self) -> str:
        return type(self).__name__


class ValidationError(SphericalLandauError, ValueError):
    """Bad input: a parameter, configuration key or grid violates a contract."""


class NumericalError(SphericalLandauError, ArithmeticError):
    """A computation could not produce a trustworthy result."""


class NonPositiveParameter(ValidationError):
    def __init__(self, field: str, value: Any = None):
        self.field = field
        self.value = value
        super().__init__(f"{field} must be strictly positive (got {value!r})")


class MissingPotentialAndCount(ValidationError):
    def __init__(self) -> None:
        super().__init__("either nu (chemical potential) or n_electrons must be given")


class UnitsModeMismatch(ValidationError):
    pass


class InvalidTruncation(ValidationError):
    pass


class UnknownConfigKey(ValidationError):
    pass


class UnitsMode(str, Enum):
    NATURAL = "natural"
    CUSTOM = "custom"


NATURAL_VALUES = {"e": 1.0, "mu": 1.0, "m0": 1.0, "hbar": 1.0, "r": 1.0, "g_factor": 2.0}


@dataclass(frozen=True)
class PhysicalParams:
    """Charge, masses, g factor, hbar and sphere radius."""

    e: float = 1.0
    mu: float = 1.0
    m0: float = 1.0
    g_factor: float = 2.0
    hbar: float = 1.0
    r: float = 1.0
    units_mode: UnitsMode = UnitsMode.NATURAL

    @classmethod
    def natural(cls) -> "PhysicalParams":
        return cls()

    def areal_prefactor(self, b: float) -> float:
        """Landau degeneracy per unit area, ``e b / (4 pi hbar^2)``."""
        return self.e * b / (4.0 * math.pi * self.hbar**2)


@dataclass(frozen=True)
class FieldPoint:
    """Field strength, inverse temperature and chemical potential or density."""

    b: float
    beta: float
    nu: float | None = None
    n_electrons: float | None = None


@dataclass(frozen=True)
class Truncation:
    """Cut-offs on the level labels and on the harmonic sums.

    ``m_max`` and ``l_max`` may be zero (a single mode or a single ladder
    rung); ``n_max`` and ``theta_cut`` must be positive.
    """

    m_max: int
    l_max: int
    n_max: int
    theta_cut: float = 0.3

    def mode_numbers(self, even_m_only: bool = False) -> list[int]:
        step = 2 if even_m_only else 1
        return [m for m in range(-self.m_max, self.m_max + 1) if m % step == 0]


def validate_params(params: PhysicalParams) -> PhysicalParams:
    mode = UnitsMode(params.units_mode)
    for name in ("e", "mu", "m0", "g_factor", "hbar", "r"):
        value = getattr(params, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise NonPositiveParameter(name, value)
    if mode is UnitsMode.NATURAL:
        for name, expected in NATURAL_VALUES.items():
            if getattr(params, name) != expected:
                raise UnitsModeMismatch(
                    f"natural units require {name} = {expected}, got {getattr(params, name)}; "
                    "use units_mode='custom'"
                )
    if mode is not params.units_mode:
        params = replace(params, units_mode=mode)
    return params


def validate_point(point: FieldPoint) -> FieldPoint:
    for name in ("b", "beta"):
        value = getattr(point, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise NonPositiveParameter(name, value)
    if point.nu is None and point.n_electrons is None:
        raise MissingPotentialAndCount()
    if point.nu is not None and not math.isfinite(point.nu):
        raise ValidationError(f"nu must be finite (got {point.nu!r})")
    if point.n_electrons is not None and not (point.n_electrons > 0 and math.isfinite(point.n_electrons)):
        raise NonPositiveParameter("n_electrons", point.n_electrons)
    return point


def validate_truncation(trunc: Truncation) -> Truncation:
    if trunc.m_max < 0 or trunc.l_max < 0:
        raise InvalidTruncation(f"m_max and l_max must be non-negative, got {trunc.m_max}, {trunc.l_max}")
    if trunc.n_max < 1:
        raise NonPositiveParameter("n_max", trunc.n_max)
    if not (0.0 < trunc.theta_cut < math.pi / 2):
        raise InvalidTruncation(f"theta_cut must lie in (0, pi/2), got {trunc.theta_cut}")
    return trunc


def validate(params: PhysicalParams, point: FieldPoint) -> tuple[PhysicalParams, FieldPoint]:
    """Check every invariant and return the pair unchanged.

    Raises
    ------
    NonPositiveParameter
        Names the first offending field.
    MissingPotentialAndCount
        Neither ``nu`` nor ``n_electrons`` was given.
    """
    return validate_params(params), validate_point(point)


def _from_mapping(cls, data: Mapping[str, Any], where: str):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise UnknownConfigKey(f"unknown key(s) in {where}: {', '.join(unknown)}")
    return cls(**data)


def params_from_dict(data: Mapping[str, Any]) -> PhysicalParams:
    data = dict(data)
    if "units_mode" in data:
        try:
            data["units_mode"] = UnitsMode(data["units_mode"])
        except ValueError:
            raise ValidationError(f"units_mode must be 'natural' or 'custom', got {data['units_mode']!r}")
    return validate_params(_from_mapping(PhysicalParams, data, "params"))


def point_from_dict(data: Mapping[str, Any]) -> FieldPoint:
    return validate_point(_from_mapping(FieldPoint, data, "point"))


def truncation_from_dict(data: Mapping[str, Any]) -> Truncation:
    return validate_truncation(_from_mapping(Truncation, data, "truncation"))


def load_json(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: top-level JSON value must be an object")
    return data
