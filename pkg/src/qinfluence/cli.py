"""Config-driven command line front end.

One experiment per invocation::

    qinfluence <command> --config <path> [--out <dir>] [--seed <int>]

Commands: eigensolve, variational, consistency, doubleslit, sample.  The
config is a TOML document (annotated example in the README); results land
in the output directory as CSV tables and TOML reports, plus a
``summary.toml`` that echoes the config, the effective values actually
used, wall time and any diagnostics.  Exit codes: 0 success, 1
computational failure (non-convergence, node error, ...), 2 config error.

Identical config and seed give byte-identical primary outputs; the
summary is excluded from that guarantee because it records wall time.
Files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .consistency import NodeError, energy_moments, observability_verdict
from .doubleslit import (
    DetectorPattern,
    SlitConfig,
    fringe_metrics,
    pattern_partial,
    pattern_particle,
    pattern_wave,
    sample_hits,
)
from .eigensolver import ConvergenceError, Spectrum, residual_norm, solve_spectrum
from .grid import DIRICHLET, PERIODIC, Grid, ScalarField, normalized
from .hamiltonian import Barrier, Free, Harmonic, Potential, Tabulated
from .variational import VariationalOptions, minimize_functional

COMMANDS = ("eigensolve", "variational", "consistency", "doubleslit", "sample")

_MISSING = object()


class ConfigError(ValueError):
    """Malformed or semantically invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description with defaults applied."""

    command: str
    seed: int
    out_dir: str
    grid: Grid | None = None
    potential: Potential | None = None
    eigensolve_m: int | None = None
    variational_m: int | None = None
    variational_opts: VariationalOptions | None = None
    state_indices: tuple[int, ...] | None = None
    coefficients: tuple[complex, ...] | None = None
    assigned_energy: float | None = None
    tolerance: float | None = None
    slit: SlitConfig | None = None
    sample_n: int | None = None
    sample_seed: int | None = None
    warnings: tuple[str, ...] = ()
    raw_text: str = ""


# ----------------------------------------------------------------- parsing

def _check_keys(table: dict, path: str, allowed: tuple[str, ...]) -> None:
    for key in table:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"{where}: unknown key")


def _get(table: dict, path: str, key: str, kinds, default=_MISSING):
    if key not in table:
        if default is _MISSING:
            raise ConfigError(f"{path}.{key}: required key is missing")
        return default
    value = table[key]
    is_bool = isinstance(value, bool)
    if kinds is float and isinstance(value, int) and not is_bool:
        value = float(value)
    if not isinstance(value, kinds) or (is_bool and kinds is not bool):
        raise ConfigError(f"{path}.{key}: expected {getattr(kinds, '__name__', kinds)}")
    return value


def _as_complex(value, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{path}: expected a number or [re, im] pair")


def _unit_coefficients(values, path: str, warnings: list[str]) -> tuple[complex, ...]:
    coeffs = tuple(_as_complex(v, f"{path}[{i}]") for i, v in enumerate(values))
    total = sum(abs(c) ** 2 for c in coeffs)
    dev = abs(total - 1.0)
    if dev > 1e-6:
        raise ConfigError(
            f"{path}: squared magnitudes must sum to 1 within 1e-6, got {total!r}"
        )
    if dev > 1e-10:
        warnings.append(
            f"{path}: renormalized (squared magnitudes summed to {total!r})"
        )
        scale = np.sqrt(total)
        coeffs = tuple(c / scale for c in coeffs)
    return coeffs


def _parse_grid(doc: dict) -> Grid:
    table = doc.get("grid")
    if table is None:
        raise ConfigError("grid: required section is missing")
    _check_keys(table, "grid", ("q_min", "q_max", "n", "boundary"))
    boundary = _get(table, "grid", "boundary", str, DIRICHLET)
    if boundary not in (DIRICHLET, PERIODIC):
        raise ConfigError(f"grid.boundary: expected 'dirichlet' or 'periodic', got {boundary!r}")
    try:
        return Grid(
            q_min=_get(table, "grid", "q_min", float),
            q_max=_get(table, "grid", "q_max", float),
            n=_get(table, "grid", "n", int),
            boundary=boundary,
        )
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def _parse_potential(doc: dict, grid: Grid) -> Potential:
    table = doc.get("potential")
    if table is None:
        raise ConfigError("potential: required section is missing")
    kind = _get(table, "potential", "kind", str)
    try:
        if kind == "free":
            _check_keys(table, "potential", ("kind",))
            return Free()
        if kind == "harmonic":
            _check_keys(table, "potential", ("kind", "omega"))
            return Harmonic(omega=_get(table, "potential", "omega", float))
        if kind == "barrier":
            _check_keys(table, "potential", ("kind", "height", "q_lo", "q_hi"))
            return Barrier(
                height=_get(table, "potential", "height", float),
                q_lo=_get(table, "potential", "q_lo", float),
                q_hi=_get(table, "potential", "q_hi", float),
            )
        if kind == "tabulated":
            _check_keys(table, "potential", ("kind", "values"))
            values = _get(table, "potential", "values", list)
            if len(values) != grid.n:
                raise ConfigError(
                    f"potential.values: {len(values)} samples for a grid of {grid.n}"
                )
            return Tabulated(np.asarray(values, dtype=float))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"potential: {exc}") from exc
    raise ConfigError(
        f"potential.kind: expected free/harmonic/barrier/tabulated, got {kind!r}"
    )


def _parse_slit(doc: dict, warnings: list[str]) -> SlitConfig:
    table = doc.get("doubleslit")
    if table is None:
        raise ConfigError("doubleslit: required section is missing")
    allowed = (
        "slit_separation",
        "screen_distance",
        "wavenumber",
        "screen_halfwidth",
        "bins",
        "alpha1",
        "alpha2",
        "mode",
        "eta",
    )
    _check_keys(table, "doubleslit", allowed)
    alphas = _unit_coefficients(
        [table.get("alpha1", 1.0), table.get("alpha2", 0.0)],
        "doubleslit.alpha",
        warnings,
    )
    mode = _get(table, "doubleslit", "mode", str, "full")
    eta = _get(table, "doubleslit", "eta", float, None) if "eta" in table else None
    try:
        return SlitConfig(
            slit_separation=_get(table, "doubleslit", "slit_separation", float),
            screen_distance=_get(table, "doubleslit", "screen_distance", float),
            wavenumber=_get(table, "doubleslit", "wavenumber", float),
            screen_halfwidth=_get(table, "doubleslit", "screen_halfwidth", float),
            bins=_get(table, "doubleslit", "bins", int),
            alpha1=alphas[0],
            alpha2=alphas[1],
            mode=mode,
            eta=eta,
        )
    except ValueError as exc:
        raise ConfigError(f"doubleslit: {exc}") from exc


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a TOML experiment document.

    Unknown keys are rejected; defaults are applied as documented in the
    README; renormalization of coefficient vectors is recorded as a
    warning on the returned config.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    top_allowed = (
        "command",
        "seed",
        "output",
        "grid",
        "potential",
        "eigensolve",
        "variational",
        "consistency",
        "doubleslit",
        "sample",
    )
    _check_keys(doc, "", top_allowed)
    command = _get(doc, "config", "command", str)
    if command not in COMMANDS:
        raise ConfigError(f"command: expected one of {COMMANDS}, got {command!r}")
    seed = _get(doc, "config", "seed", int, 0)

    out_table = doc.get("output", {})
    _check_keys(out_table, "output", ("dir",))
    out_dir = _get(out_table, "output", "dir", str, ".")

    warnings: list[str] = []
    fields: dict = {
        "command": command,
        "seed": seed,
        "out_dir": out_dir,
        "raw_text": text,
    }

    if command in ("eigensolve", "variational", "consistency"):
        grid = _parse_grid(doc)
        fields["grid"] = grid
        fields["potential"] = _parse_potential(doc, grid)

    if command == "eigensolve":
        table = doc.get("eigensolve")
        if table is None:
            raise ConfigError("eigensolve: required section is missing")
        _check_keys(table, "eigensolve", ("m",))
        m = _get(table, "eigensolve", "m", int)
        if m < 1:
            raise ConfigError(f"eigensolve.m: must be >= 1, got {m}")
        fields["eigensolve_m"] = m

    if command == "variational":
        table = doc.get("variational")
        if table is None:
            raise ConfigError("variational: required section is missing")
        _check_keys(table, "variational", ("m", "step", "max_iters", "tol"))
        m = _get(table, "variational", "m", int)
        if m < 1:
            raise ConfigError(f"variational.m: must be >= 1, got {m}")
        fields["variational_m"] = m
        try:
            fields["variational_opts"] = VariationalOptions(
                step=_get(table, "variational", "step", float, 1.0),
                max_iters=_get(table, "variational", "max_iters", int, 500),
                tol=_get(table, "variational", "tol", float, 1e-7),
                seed=seed,
            )
        except ValueError as exc:
            raise ConfigError(f"variational: {exc}") from exc

    if command == "consistency":
        table = doc.get("consistency")
        if table is None:
            raise ConfigError("consistency: required section is missing")
        _check_keys(
            table,
            "consistency",
            ("state_indices", "coefficients", "assigned_energy", "tolerance"),
        )
        indices = _get(table, "consistency", "state_indices", list)
        if not indices or not all(
            isinstance(i, int) and not isinstance(i, bool) and i >= 0 for i in indices
        ):
            raise ConfigError(
                "consistency.state_indices: expected a nonempty list of indices >= 0"
            )
        coeffs_raw = _get(table, "consistency", "coefficients", list)
        if len(coeffs_raw) != len(indices):
            raise ConfigError(
                "consistency.coefficients: must match state_indices in length"
            )
        tolerance = _get(table, "consistency", "tolerance", float, 1e-6)
        if not tolerance > 0:
            raise ConfigError(f"consistency.tolerance: must be positive, got {tolerance}")
        fields["state_indices"] = tuple(indices)
        fields["coefficients"] = _unit_coefficients(
            coeffs_raw, "consistency.coefficients", warnings
        )
        fields["assigned_energy"] = (
            _get(table, "consistency", "assigned_energy", float)
            if "assigned_energy" in table
            else None
        )
        fields["tolerance"] = tolerance

    if command in ("doubleslit", "sample"):
        fields["slit"] = _parse_slit(doc, warnings)

    if command == "sample":
        table = doc.get("sample")
        if table is None:
            raise ConfigError("sample: required section is missing")
        _check_keys(table, "sample", ("n", "seed"))
        n = _get(table, "sample", "n", int)
        if n < 1:
            raise ConfigError(f"sample.n: must be >= 1, got {n}")
        fields["sample_n"] = n
        fields["sample_seed"] = _get(table, "sample", "seed", int, None) if "seed" in table else None

    fields["warnings"] = tuple(warnings)
    return ExperimentConfig(**fields)


# ------------------------------------------------------------------ output

def _fmt(x: float) -> str:
    return format(float(x), ".12e")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_pattern_csv(pattern: DetectorPattern, path) -> None:
    """Pattern table: header x,probability,intensity then one row per bin."""
    lines = ["x,probability,intensity"]
    for x, p, i in zip(pattern.bin_centers, pattern.probabilities, pattern.intensity):
        lines.append(f"{_fmt(x)},{_fmt(p)},{_fmt(i)}")
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def _write_spectrum_csv(spectrum: Spectrum, potential: Potential, path: Path) -> None:
    lines = ["index,energy,residual"]
    for i, pair in enumerate(spectrum.pairs):
        lines.append(f"{i},{_fmt(pair.energy)},{_fmt(residual_norm(pair, potential))}")
    _atomic_write(path, "\n".join(lines) + "\n")


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r}")


def _write_toml(path: Path, items: list[tuple[str, object]]) -> None:
    """items are (key, value) pairs; a key like '[name]' opens a table."""
    lines = []
    for key, value in items:
        if key.startswith("["):
            lines.append("")
            lines.append(key)
        else:
            lines.append(f"{key} = {_toml_value(value)}")
    _atomic_write(path, "\n".join(lines) + "\n")


# --------------------------------------------------------------- commands

def _mix_state(config: ExperimentConfig) -> tuple[ScalarField, Spectrum]:
    m = max(config.state_indices) + 1
    spectrum = solve_spectrum(config.potential, config.grid, m)
    values = np.zeros(config.grid.n, dtype=complex)
    for idx, coeff in zip(config.state_indices, config.coefficients):
        values += coeff * spectrum[idx].state.values
    return normalized(ScalarField(config.grid, values)), spectrum


def _run_eigensolve(config: ExperimentConfig, out: Path, seed: int):
    spectrum = solve_spectrum(config.potential, config.grid, config.eigensolve_m)
    _write_spectrum_csv(spectrum, config.potential, out / "spectrum.csv")
    return {"spectrum": "spectrum.csv"}, [("m", config.eigensolve_m)]


def _run_variational(config: ExperimentConfig, out: Path, seed: int):
    opts = dataclasses.replace(config.variational_opts, seed=seed)
    spectrum, history = minimize_functional(
        config.potential, config.grid, config.variational_m, opts, return_history=True
    )
    _write_spectrum_csv(spectrum, config.potential, out / "spectrum.csv")
    effective = [
        ("m", config.variational_m),
        ("step", opts.step),
        ("max_iters", opts.max_iters),
        ("tol", opts.tol),
        ("seed", opts.seed),
        ("iterations", [len(h.energies) - 1 for h in history]),
    ]
    return {"spectrum": "spectrum.csv"}, effective


def _run_consistency(config: ExperimentConfig, out: Path, seed: int):
    mix, _ = _mix_state(config)
    if config.assigned_energy is not None:
        assigned = config.assigned_energy
    else:
        assigned, _ = energy_moments(mix, config.potential)
    report = observability_verdict(mix, assigned, config.potential, config.tolerance)
    _write_toml(
        out / "report.toml",
        [
            ("assigned_energy", report.assigned_energy),
            ("mean_energy", report.mean_energy),
            ("energy_variance", report.energy_variance),
            ("el_residual", report.el_residual),
            ("observable", report.observable),
            ("tolerance", report.tolerance),
        ],
    )
    effective = [
        ("state_indices", list(config.state_indices)),
        ("coefficients_re", [c.real for c in config.coefficients]),
        ("coefficients_im", [c.imag for c in config.coefficients]),
        ("assigned_energy", assigned),
        ("tolerance", config.tolerance),
    ]
    return {"report": "report.toml"}, effective


def _slit_pattern(config: ExperimentConfig) -> DetectorPattern:
    if config.slit.mode == "individual":
        return pattern_particle(config.slit)
    if config.slit.mode == "partial":
        return pattern_partial(config.slit)
    return pattern_wave(config.slit)


def _run_doubleslit(config: ExperimentConfig, out: Path, seed: int):
    pattern = _slit_pattern(config)
    write_pattern_csv(pattern, out / "pattern.csv")
    metrics = fringe_metrics(pattern)
    items: list[tuple[str, object]] = [
        ("mode", config.slit.mode),
        ("visibility", metrics.visibility),
        ("spacing_absent", metrics.spacing is None),
    ]
    if metrics.spacing is not None:
        items.append(("fringe_spacing", metrics.spacing))
        items.append(("predicted_spacing", config.slit.fringe_spacing))
    _write_toml(out / "metrics.toml", items)
    return {"pattern": "pattern.csv", "metrics": "metrics.toml"}, [
        ("mode", config.slit.mode)
    ]


def _run_sample(config: ExperimentConfig, out: Path, seed: int):
    pattern = _slit_pattern(config)
    counts = sample_hits(pattern, config.sample_n, seed)
    lines = ["x,count"]
    for x, c in zip(pattern.bin_centers, counts):
        lines.append(f"{_fmt(x)},{int(c)}")
    _atomic_write(out / "hits.csv", "\n".join(lines) + "\n")
    return {"hits": "hits.csv"}, [("n", config.sample_n), ("seed", seed)]


_DISPATCH = {
    "eigensolve": _run_eigensolve,
    "variational": _run_variational,
    "consistency": _run_consistency,
    "doubleslit": _run_doubleslit,
    "sample": _run_sample,
}


def run(config: ExperimentConfig, out_dir: str | None = None, seed: int | None = None) -> int:
    """Execute the configured command; always writes summary.toml.

    Returns the process exit code: 0 on success, 1 on computational
    failure (the diagnostic is recorded in the summary).
    """
    started = time.perf_counter()
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if seed is None:
        if config.command == "sample" and config.sample_seed is not None:
            seed = config.sample_seed
        else:
            seed = config.seed
    status, code, error = "ok", 0, None
    artifacts: dict = {}
    effective: list = []
    try:
        artifacts, effective = _DISPATCH[config.command](config, out, seed)
    except (ConvergenceError, NodeError, ValueError, OSError) as exc:
        status, code, error = "error", 1, f"{type(exc).__name__}: {exc}"

    items: list[tuple[str, object]] = [
        ("command", config.command),
        ("status", status),
        ("exit_code", code),
        ("tool", "qinfluence"),
        ("version", __version__),
        ("seed", seed),
        ("wall_time_s", time.perf_counter() - started),
        ("warnings", list(config.warnings)),
    ]
    if error is not None:
        items.append(("error", error))
    items.append(("config_echo", config.raw_text.splitlines()))
    if artifacts:
        items.append(("[artifacts]", None))
        items.extend(artifacts.items())
    if effective:
        items.append(("[effective]", None))
        items.extend(effective)
    try:
        _write_toml(out / "summary.toml", items)
    except OSError as exc:
        print(f"failed to write summary: {exc}", file=sys.stderr)
        return 1
    if error is not None:
        print(error, file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qinfluence",
        description="Spectra, observability reports and double-slit patterns from TOML configs.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the TOML experiment file")
    parser.add_argument("--out", default=None, help="output directory (overrides [output].dir)")
    parser.add_argument("--seed", type=int, default=None, help="overrides the configured seed")
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if config.command != args.command:
        print(
            f"config error: command mismatch (config says {config.command!r}, "
            f"command line says {args.command!r})",
            file=sys.stderr,
        )
        return 2
    for warning in config.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return run(config, out_dir=args.out, seed=args.seed)


if __name__ == "__main__":
    sys.exit(main())
