"""Electrons on a sphere in a strong normal magnetic field.

Closed-form Landau-type spectrum, grand-canonical free energy and
de Haas-van Alphen magnetization, with a finite-difference eigensolver and
a classical orbit integrator as independent checks.
"""

from .core import (
    FieldPoint,
    MissingPotentialAndCount,
    NonPositiveParameter,
    NumericalError,
    PhysicalParams,
    SphericalLandauError,
    Truncation,
    UnitsMode,
    ValidationError,
    validate,
)
from .spectrum import (
    EmptySpectrum,
    Level,
    LevelTable,
    ModeDerived,
    Spin,
    alpha_shift,
    build_spectrum,
    cyclotron_frequency,
    energy_level,
    lambda_shift,
    mode_derived,
    mode_frequency,
    spin_split,
    truncation_for,
)
from .ode_oracle import EigenResult, GridSpec, certify_spectrum, solve_mode
from .thermo import (
    FermiParams,
    FreeEnergyBreakdown,
    chemical_potential,
    fermi,
    free_energy_analytic,
    free_energy_direct,
    partition_function,
    z_density,
    zeeman_cosine,
)
from .magnetization import (
    DhvaSpectrum,
    MagnetizationSweep,
    dhva_extract,
    inverse_field_grid,
    magnetization_analytic,
    magnetization_numeric,
    magnetization_planar,
    magnetization_sweep,
)
from .classical import ClassicalState, Trajectory, check_confinement, hamiltonian, integrate

__version__ = "0.1.0"
