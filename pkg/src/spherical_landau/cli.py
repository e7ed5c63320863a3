"""Command-line front end.

Usage::

    spherical-landau SUBCOMMAND [--config run.json] [--out PATH] [--format csv|json]
                     [--threads N] [--phase ...] [--sign ...] [--l-sum ...]
                     [--eig-omega ...] [--bracket ...] [--zeeman ...] [--even-m]
                     [--b B] [--beta BETA] [--nu NU]

Subcommands: spectrum, certify, free-energy, magnetization, sweep, dhva, orbit.

Settings are resolved flag > environment (``SPHLANDAU_<FLAG>``, e.g.
``SPHLANDAU_PHASE``) > config file > default.  Diagnostics go to stderr as
one JSON object per line.  Exit status: 0 success, 1 invalid input,
2 numerical or I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from .classical import ClassicalState, check_confinement, integrate
from .core import (
    FieldPoint,
    NumericalError,
    PhysicalParams,
    SphericalLandauError,
    Truncation,
    UnknownConfigKey,
    ValidationError,
    load_json,
    params_from_dict,
    validate_point,
    validate_truncation,
)
from .export import emit
from .magnetization import (
    NonUniformGrid,
    dhva_extract,
    field_grid,
    inverse_field_grid,
    magnetization_analytic,
    magnetization_numeric,
    magnetization_sweep,
)
from .ode_oracle import GridSpec, certify_spectrum
from .spectrum import build_spectrum, truncation_for
from .thermo import (
    FermiParams,
    chemical_potential,
    free_energy_analytic,
    occupation,
)

SUBCOMMANDS = ("spectrum", "certify", "free-energy", "magnetization", "sweep", "dhva", "orbit")
ENV_PREFIX = "SPHLANDAU_"
DEFAULT_FORMAT = {"free-energy": "json", "magnetization": "json", "dhva": "json"}

CONVENTION_CHOICES = {
    "eigenvalue_omega": ("mode", "cyclotron"),
    "phase": ("derivation_consistent", "paper_literal"),
    "l_sum": ("paper_literal", "geometric_exact"),
    "sign_convention": ("dF_db", "minus_dF_db"),
    "bracket": ("printed", "consistent", "unity"),
    "zeeman": ("printed", "with_g"),
}
CONVENTION_DEFAULTS = {
    "eigenvalue_omega": "mode",
    "phase": "derivation_consistent",
    "l_sum": "paper_literal",
    "sign_convention": "dF_db",
    "bracket": "printed",
    "zeeman": "printed",
    "even_m_only": False,
}
TOP_KEYS = {
    "params", "point", "grid", "truncation", "conventions", "output", "threads",
    "with_spin", "step", "e_max", "orbit", "certify", "dhva", "magnetization",
}


def diagnostic(event: str, **fields: Any) -> None:
    print(json.dumps({"event": event, **fields}, sort_keys=False), file=sys.stderr)


def _check_keys(data: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise UnknownConfigKey(f"unknown key(s) in {where}: {', '.join(unknown)}")


@dataclass
class RunConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    point: dict[str, Any] = field(default_factory=dict)
    grid: dict[str, Any] | None = None
    truncation: dict[str, Any] = field(default_factory=dict)
    conventions: dict[str, Any] = field(default_factory=lambda: dict(CONVENTION_DEFAULTS))
    explicit_conventions: set[str] = field(default_factory=set)
    output_path: str | None = None
    output_format: str | None = None
    threads: int | None = None
    with_spin: bool = False
    step: float = 1e-5
    e_max: float = math.inf
    orbit: dict[str, Any] = field(default_factory=dict)
    certify: dict[str, Any] = field(default_factory=dict)
    dhva: dict[str, Any] = field(default_factory=dict)
    magnetization: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        _check_keys(data, TOP_KEYS, "config")
        cfg = cls()
        cfg.params = params_from_dict(data.get("params", {}))
        cfg.point = dict(data.get("point", {}))
        _check_keys(cfg.point, {"b", "beta", "nu", "n_electrons"}, "point")
        if "grid" in data:
            cfg.grid = dict(data["grid"])
            _check_keys(cfg.grid, {"b_min", "b_max", "count", "spacing"}, "grid")
        cfg.truncation = dict(data.get("truncation", {}))
        _check_keys(cfg.truncation, {"m_max", "l_max", "n_max", "theta_cut"}, "truncation")
        conv = dict(data.get("conventions", {}))
        _check_keys(conv, set(CONVENTION_DEFAULTS), "conventions")
        cfg.conventions.update(conv)
        cfg.explicit_conventions = set(conv)
        output = dict(data.get("output", {}))
        _check_keys(output, {"path", "format"}, "output")
        cfg.output_path = output.get("path")
        cfg.output_format = output.get("format")
        cfg.threads = int(data["threads"]) if "threads" in data else None
        cfg.with_spin = bool(data.get("with_spin", False))
        cfg.step = float(data.get("step", 1e-5))
        cfg.e_max = float(data.get("e_max", math.inf))
        for name, allowed in (
            ("orbit", {"theta", "phi", "p_theta", "p_phi", "dt", "steps", "method"}),
            ("certify", {"m_list", "l_list", "points", "half_width", "form", "tolerance"}),
            ("dhva", {"detrend_order", "max_peaks"}),
            ("magnetization", {"numeric_source"}),
        ):
            section = dict(data.get(name, {}))
            _check_keys(section, allowed, name)
            setattr(cfg, name, section)
        return cfg

    def validate_conventions(self) -> None:
        for key, choices in CONVENTION_CHOICES.items():
            if self.conventions[key] not in choices:
                raise ValidationError(f"{key} must be one of {choices}, got {self.conventions[key]!r}")
        if self.grid is not None:
            if int(self.grid.get("count", 0)) < 2:
                raise ValidationError("grid count must be >= 2")
            if self.grid.get("spacing", "uniform_inv_b") not in ("uniform_b", "uniform_inv_b"):
                raise ValidationError("grid spacing must be 'uniform_b' or 'uniform_inv_b'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spherical-landau", description=__doc__.split("\n\n")[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--threads", type=int, help="worker threads for sweeps (default: available CPUs)")
    parser.add_argument("--phase", choices=CONVENTION_CHOICES["phase"])
    parser.add_argument("--sign", choices=CONVENTION_CHOICES["sign_convention"])
    parser.add_argument("--l-sum", choices=CONVENTION_CHOICES["l_sum"])
    parser.add_argument("--eig-omega", choices=CONVENTION_CHOICES["eigenvalue_omega"])
    parser.add_argument("--bracket", choices=CONVENTION_CHOICES["bracket"])
    parser.add_argument("--zeeman", choices=CONVENTION_CHOICES["zeeman"])
    parser.add_argument("--even-m", action="store_true", default=None, help="keep only even m")
    parser.add_argument("--b", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--nu", type=float)
    return parser


_FLAG_TARGETS = {
    "phase": "phase",
    "sign": "sign_convention",
    "l_sum": "l_sum",
    "eig_omega": "eigenvalue_omega",
    "bracket": "bracket",
    "zeeman": "zeeman",
    "even_m": "even_m_only",
}


def _env(name: str, environ: Mapping[str, str]) -> str | None:
    return environ.get(ENV_PREFIX + name.upper())


def resolve_config(args: argparse.Namespace, environ: Mapping[str, str]) -> RunConfig:
    config_path = args.config or _env("config", environ)
    cfg = RunConfig.from_dict(load_json(config_path)) if config_path else RunConfig()

    for flag, target in _FLAG_TARGETS.items():
        value = getattr(args, flag)
        if value is None:
            raw = _env(flag, environ)
            if raw is not None:
                value = raw.lower() in ("1", "true", "yes") if flag == "even_m" else raw
        if value is not None:
            cfg.conventions[target] = value
            cfg.explicit_conventions.add(target)
    for key in ("b", "beta", "nu"):
        value = getattr(args, key)
        if value is None and _env(key, environ) is not None:
            value = float(_env(key, environ))
        if value is not None:
            cfg.point[key] = value

    out = args.out or _env("out", environ)
    if out is not None:
        cfg.output_path = out
    fmt = args.format or _env("format", environ)
    if fmt is not None:
        cfg.output_format = fmt
    threads = args.threads if args.threads is not None else _env("threads", environ)
    if threads is not None:
        cfg.threads = int(threads)
    elif cfg.threads is None:
        cfg.threads = os.cpu_count() or 1
    if cfg.threads < 1:
        raise ValidationError("threads must be >= 1")
    cfg.validate_conventions()
    return cfg


def _require(cfg: RunConfig, *keys: str) -> None:
    missing = [k for k in keys if cfg.point.get(k) is None]
    if missing:
        raise ValidationError(f"point is missing {', '.join(missing)}")


def _truncation(cfg: RunConfig, b: float) -> Truncation:
    given = dict(cfg.truncation)
    beta = cfg.point.get("beta")
    if {"m_max", "l_max", "n_max"} <= set(given):
        return validate_truncation(Truncation(**given))
    if {"m_max", "l_max"} <= set(given) and beta is None:
        given.setdefault("n_max", 1)
        return validate_truncation(Truncation(**given))
    if beta is None:
        raise ValidationError("beta is needed to choose n_max; give it or set truncation.n_max")
    auto = truncation_for(
        cfg.params, b, given.get("theta_cut", 0.3), cfg.e_max, beta,
        l_max=given.get("l_max"), eigenvalue_omega=cfg.conventions["eigenvalue_omega"],
    )
    return validate_truncation(replace(auto, **given))


def _point(cfg: RunConfig) -> FieldPoint:
    _require(cfg, "b", "beta")
    return validate_point(FieldPoint(**cfg.point))


def _warn_defaults(cfg: RunConfig, keys: tuple[str, ...]) -> None:
    if "phase" in keys and "phase" not in cfg.explicit_conventions:
        diagnostic(
            "warning", switch="phase", value=cfg.conventions["phase"],
            message="the printed free energy and the pole-sum density disagree on the phase; "
                    "using derivation_consistent (override with --phase paper_literal)",
        )
    if "zeeman" in keys and "zeeman" not in cfg.explicit_conventions and cfg.params.g_factor != 1.0:
        diagnostic(
            "warning", switch="zeeman", value=cfg.conventions["zeeman"],
            message="the printed spin factor cos(n pi w0/(2 wm)) omits g, which cancels odd harmonics at g = 2; "
                    "override with --zeeman with_g",
        )


def _table(cfg: RunConfig, b: float, trunc: Truncation):
    return build_spectrum(cfg.params, b, trunc, cfg.with_spin,
                          eigenvalue_omega=cfg.conventions["eigenvalue_omega"],
                          even_m_only=cfg.conventions["even_m_only"])


def _fermi_and_count(cfg: RunConfig, point: FieldPoint, trunc: Truncation) -> tuple[FermiParams, float]:
    nu, count = point.nu, point.n_electrons
    if nu is None or count is None:
        table = _table(cfg, point.b, trunc)
        if nu is None:
            nu = chemical_potential(table, point.beta, count)
        if count is None:
            count = occupation(table, FermiParams(nu, point.beta))
    return FermiParams(nu, point.beta), count


def _grid(cfg: RunConfig):
    if cfg.grid is None:
        raise ValidationError("this subcommand needs a grid {b_min, b_max, count, spacing}")
    g = cfg.grid
    maker = inverse_field_grid if g.get("spacing", "uniform_inv_b") == "uniform_inv_b" else field_grid
    return maker(float(g["b_min"]), float(g["b_max"]), int(g["count"]))


def _sweep(cfg: RunConfig):
    _require(cfg, "beta")
    if cfg.point.get("nu") is None:
        raise ValidationError("sweeps need a fixed chemical potential nu")
    grid, inv_b = _grid(cfg)
    b_mid = 0.5 * (grid[0] + grid[-1])
    trunc = _truncation(cfg, b_mid)
    fp = FermiParams(float(cfg.point["nu"]), float(cfg.point["beta"]))
    c = cfg.conventions
    return magnetization_sweep(
        cfg.params, grid, inv_b, fp, trunc, convention=c["phase"], bracket=c["bracket"],
        sign=c["sign_convention"], even_m_only=c["even_m_only"], threads=cfg.threads, zeeman=c["zeeman"],
    )


def run(subcommand: str, cfg: RunConfig) -> tuple[Any, int]:
    """Compute the result of ``subcommand``; returns ``(result, exit_status)``."""
    c = cfg.conventions
    if subcommand == "spectrum":
        _require(cfg, "b")
        b = float(cfg.point["b"])
        return _table(cfg, b, _truncation(cfg, b)), 0

    if subcommand == "certify":
        _require(cfg, "b")
        opts = cfg.certify
        grid = GridSpec(opts.get("half_width", 12.0), opts.get("points", 2001))
        cert = certify_spectrum(
            cfg.params, float(cfg.point["b"]), opts.get("m_list", [-2, -1, 0, 1, 2]),
            opts.get("l_list", [0, 1, 2, 3]), grid, form=opts.get("form", "theta"),
            eigenvalue_omega=c["eigenvalue_omega"],
        )
        tolerance = opts.get("tolerance", 1e-6)
        diagnostic("certify", max_rel_dev=cert.max_rel_dev, worst_m=cert.worst[0], worst_l=cert.worst[1],
                   tolerance=tolerance)
        return cert, 0 if cert.max_rel_dev <= tolerance else 2

    if subcommand == "free-energy":
        point = _point(cfg)
        trunc = _truncation(cfg, point.b)
        _warn_defaults(cfg, ("phase", "zeeman"))
        fp, count = _fermi_and_count(cfg, point, trunc)
        return free_energy_analytic(cfg.params, point.b, fp, count, trunc, c["phase"],
                                    even_m_only=c["even_m_only"], zeeman=c["zeeman"]), 0

    if subcommand == "magnetization":
        point = _point(cfg)
        trunc = _truncation(cfg, point.b)
        _warn_defaults(cfg, ("phase", "zeeman"))
        fp, count = _fermi_and_count(cfg, point, trunc)
        source = cfg.magnetization.get("numeric_source", "oscillatory")
        analytic = magnetization_analytic(cfg.params, point.b, fp, trunc, c["phase"], bracket=c["bracket"],
                                          sign=c["sign_convention"], even_m_only=c["even_m_only"],
                                          zeeman=c["zeeman"])
        numeric = magnetization_numeric(cfg.params, point.b, fp, count, trunc, cfg.step, source=source,
                                        sign=c["sign_convention"], convention=c["phase"],
                                        with_spin=cfg.with_spin, eigenvalue_omega=c["eigenvalue_omega"],
                                        even_m_only=c["even_m_only"], zeeman=c["zeeman"])
        return {
            "b": point.b,
            "nu": fp.nu,
            "beta": fp.beta,
            "M_analytic": analytic,
            "M_numeric": numeric,
            "numeric_source": source,
            "bracket": c["bracket"],
            "zeeman": c["zeeman"],
            "phase_convention": c["phase"],
            "sign_convention": c["sign_convention"],
        }, 0

    if subcommand == "sweep":
        _warn_defaults(cfg, ("phase", "zeeman"))
        return _sweep(cfg), 0

    if subcommand == "dhva":
        if cfg.grid is None or cfg.grid.get("spacing", "uniform_inv_b") != "uniform_inv_b":
            raise NonUniformGrid("dhva needs a grid with spacing 'uniform_inv_b' (oscillations are periodic in 1/b)")
        _warn_defaults(cfg, ("phase", "zeeman"))
        opts = cfg.dhva
        return dhva_extract(_sweep(cfg), opts.get("detrend_order", 2), max_peaks=opts.get("max_peaks", 5)), 0

    if subcommand == "orbit":
        _require(cfg, "b")
        o = cfg.orbit
        s0 = ClassicalState(o.get("theta", 0.0), o.get("phi", 0.0), o.get("p_theta", 0.5), o.get("p_phi", 0.0))
        b = float(cfg.point["b"])
        traj = integrate(cfg.params, b, s0, o.get("dt", 1e-3), int(o.get("steps", 100_000)),
                         method=o.get("method", "gauss4"))
        if traj.chart_exit:
            diagnostic("error", name="ChartExit", message="orbit reached the chart boundary; partial trajectory written")
            return traj, 2
        report = check_confinement(traj, cfg.params, b)
        diagnostic("confinement", max_theta=report.max_theta, bound=report.bound, holds=report.holds,
                   relative_energy_drift=traj.relative_energy_drift, p_phi_drift=traj.p_phi_drift)
        return traj, 0

    raise ValidationError(f"unknown subcommand {subcommand!r}")


def main(argv: list[str] | None = None, environ: Mapping[str, str] | None = None) -> int:
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args, environ)
        result, status = run(args.subcommand, cfg)
        fmt = cfg.output_format or DEFAULT_FORMAT.get(args.subcommand, "csv")
        text = emit(result, fmt, cfg.output_path)
        if cfg.output_path in (None, "-"):
            sys.stdout.write(text)
        return status
    except (ValidationError, ValueError, TypeError, KeyError) as exc:
        name = exc.name if isinstance(exc, SphericalLandauError) else type(exc).__name__
        diagnostic("error", name=name, message=str(exc))
        return 1
    except OSError as exc:
        diagnostic("error", name="IoFailure", message=str(exc))
        return 1
    except (NumericalError, ArithmeticError) as exc:
        name = exc.name if isinstance(exc, SphericalLandauError) else type(exc).__name__
        diagnostic("error", name=name, message=str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
