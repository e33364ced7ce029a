"""Command-line front end: spec ingestion, orchestration, reports, plots.

Numbers cross this boundary as decimal strings in both directions; JSON
floats are rejected outright because a double-precision detour would
silently corrupt high-precision inputs.  Exit codes: 0 means the run
completed (whether or not the target tolerance was achieved), 2 means
the input was unusable, 3 means an internal a-posteriori check failed
and the result cannot be trusted.

Every result is re-verified against its module's closing invariant
before it is serialized.  Per-t work is dispatched strictly in t order;
the arbitrary-precision context is process-global, so the dispatcher
keeps a single lane regardless of the LATTICE_ROTOR_THREADS cap (the
cap is honored as an upper bound and matters only for code paths with
thread-safe kernels).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import mpmath
from mpmath import mpc, mpf

from . import __version__
from .corelattice import ComplexVector, Rotation, nearest_gaussian, real_dist_to_lattice
from .oracle import (
    PlanarIsometry,
    covering_time,
    check_prop_sep,
    isometry_max_frac,
    separated_probe,
    separation,
    tau_estimate,
)
from .plotting import cell_svg, curve_svg
from .precision import (
    MIN_PRECISION,
    format_decimal,
    parse_decimal,
    residual_tol,
    working_precision,
)
from .products import EvenDimPointSet, project_planes, solve_even_dim
from .relations import recommended_precision
from .reporting import RunReport, canonical_json, tau_csv
from .solver import (
    InternalCheckError,
    SolverConfig,
    lattice_residuals,
    solve_general,
)

__all__ = [
    "SpecError",
    "ProblemSpec",
    "parse_problem_spec",
    "run",
    "emit_plot",
    "thread_cap",
    "main",
]

_MODES = ("solve", "tau", "prop_sep", "covering")
_SPEC_KEYS = {
    "mode",
    "points",
    "epsilon",
    "t",
    "t_range",
    "precision_bits",
    "seed",
    "height_bound",
    "L_cap",
}
_MAX_T_COUNT = 10000


class SpecError(ValueError):
    """Problem spec failed validation; maps to exit code 2."""


def thread_cap() -> int:
    """Upper bound on worker threads: LATTICE_ROTOR_THREADS, else cores."""
    raw = os.environ.get("LATTICE_ROTOR_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError:
        raise SpecError(f"LATTICE_ROTOR_THREADS must be a positive integer, got {raw!r}")
    if cap < 1:
        raise SpecError(f"LATTICE_ROTOR_THREADS must be a positive integer, got {raw!r}")
    return cap


def _require_decimal(value, name: str, bits: int = 64) -> str:
    if not isinstance(value, str):
        raise SpecError(
            f"{name} must be a decimal string (JSON numbers are rejected so "
            f"precision survives the boundary), got {type(value).__name__}"
        )
    try:
        parse_decimal(value, bits)
    except (ValueError, TypeError):
        raise SpecError(f"{name} is not a valid decimal: {value!r}")
    return value


def _require_int(value, name: str, minimum: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SpecError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise SpecError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class ProblemSpec:
    """Validated, normalized run description."""

    mode: str
    points: Tuple[Tuple[str, ...], ...]
    epsilon: Optional[str]
    t_echo: Optional[dict]
    t_values: Tuple[str, ...]
    precision_bits: int
    seed: int
    height_bound: int
    l_cap: Optional[str]

    @property
    def dim(self) -> int:
        return len(self.points[0]) if self.points else 0

    def echo(self) -> dict:
        data: dict = {
            "mode": self.mode,
            "precision_bits": self.precision_bits,
            "seed": self.seed,
        }
        if self.points:
            data["points"] = [list(p) for p in self.points]
        if self.epsilon is not None:
            data["epsilon"] = self.epsilon
        if self.t_echo is not None:
            data.update(self.t_echo)
            data["t_values"] = list(self.t_values)
        if self.mode == "solve":
            data["height_bound"] = self.height_bound
        if self.l_cap is not None:
            data["L_cap"] = self.l_cap
        return data


def _parse_points(raw, mode: str) -> Tuple[Tuple[str, ...], ...]:
    if not isinstance(raw, list) or not raw:
        raise SpecError("points must be a non-empty list")
    points = []
    width = None
    for idx, entry in enumerate(raw):
        if not isinstance(entry, list) or not entry:
            raise SpecError(f"points[{idx}] must be a non-empty list of decimal strings")
        if width is None:
            width = len(entry)
            if width % 2 != 0:
                raise SpecError(
                    f"points must have even dimension (pairs of coordinates), got {width}"
                )
        elif len(entry) != width:
            raise SpecError(
                f"points[{idx}] has {len(entry)} coordinates, expected {width}"
            )
        points.append(
            tuple(_require_decimal(c, f"points[{idx}][{j}]") for j, c in enumerate(entry))
        )
    if mode in ("tau", "prop_sep") and width != 2:
        raise SpecError(f"mode {mode} requires planar points, got dimension {width}")
    return tuple(points)


def _expand_t(data: dict, bits: int) -> Tuple[Optional[dict], Tuple[str, ...]]:
    has_t = "t" in data
    has_range = "t_range" in data
    if has_t and has_range:
        raise SpecError("give either t or t_range, not both")
    if not has_t and not has_range:
        return None, ()
    with working_precision(bits + 32):
        if has_t:
            t_str = _require_decimal(data["t"], "t")
            if not parse_decimal(t_str, bits + 32) > 0:
                raise SpecError(f"t must be positive, got {t_str}")
            return {"t": t_str}, (t_str,)
        rng = data["t_range"]
        if not isinstance(rng, dict):
            raise SpecError("t_range must be an object")
        unknown = set(rng) - {"from", "to", "count", "spacing"}
        if unknown:
            raise SpecError(f"unknown t_range keys: {sorted(unknown)}")
        for key in ("from", "to"):
            if key not in rng:
                raise SpecError(f"t_range is missing {key!r}")
        count = _require_int(rng.get("count", 1), "t_range.count", 1)
        if count > _MAX_T_COUNT:
            raise SpecError(f"t_range.count must be <= {_MAX_T_COUNT}, got {count}")
        spacing = rng.get("spacing", "log")
        if spacing not in ("linear", "log"):
            raise SpecError(f"t_range.spacing must be linear or log, got {spacing!r}")
        a = parse_decimal(_require_decimal(rng["from"], "t_range.from"), bits + 32)
        b = parse_decimal(_require_decimal(rng["to"], "t_range.to"), bits + 32)
        if not (a > 0 and b > 0):
            raise SpecError("t_range endpoints must be positive")
        if b < a:
            raise SpecError("t_range.to must be >= t_range.from")
        if count == 1:
            values = [a]
        elif spacing == "linear":
            step = (b - a) / (count - 1)
            values = [a + step * i for i in range(count)]
        else:
            la, lb = mpmath.log(a), mpmath.log(b)
            step = (lb - la) / (count - 1)
            values = [mpmath.exp(la + step * i) for i in range(count)]
        echo = {
            "t_range": {
                "from": rng["from"],
                "to": rng["to"],
                "count": count,
                "spacing": spacing,
            }
        }
        return echo, tuple(format_decimal(v, bits) for v in values)


def parse_problem_spec(data, mode_expected: str) -> ProblemSpec:
    """Validate a raw spec object for the given subcommand; SpecError on
    any schema violation."""
    if not isinstance(data, dict):
        raise SpecError("problem spec must be a JSON object")
    unknown = set(data) - _SPEC_KEYS
    if unknown:
        raise SpecError(f"unknown spec keys: {sorted(unknown)}")
    mode = data.get("mode", mode_expected)
    if mode not in _MODES:
        raise SpecError(f"mode must be one of {_MODES}, got {mode!r}")
    if mode != mode_expected:
        raise SpecError(f"spec mode {mode!r} does not match subcommand {mode_expected!r}")

    bits = _require_int(data.get("precision_bits", 128), "precision_bits", 1)
    if bits < MIN_PRECISION:
        raise SpecError(f"precision_bits must be >= {MIN_PRECISION}, got {bits}")
    if bits > (1 << 20):
        raise SpecError(f"precision_bits is implausibly large: {bits}")
    seed = _require_int(data.get("seed", 0), "seed", 0)
    height_bound = _require_int(data.get("height_bound", 64), "height_bound", 1)

    points: Tuple[Tuple[str, ...], ...] = ()
    if mode in ("solve", "tau"):
        if "points" not in data:
            raise SpecError(f"mode {mode} requires points")
        points = _parse_points(data["points"], mode)
    elif "points" in data:
        points = _parse_points(data["points"], mode)

    epsilon = None
    if "epsilon" in data or mode == "solve":
        if "epsilon" not in data:
            raise SpecError("mode solve requires epsilon")
        epsilon = _require_decimal(data["epsilon"], "epsilon")
        k = len(points[0]) if points else 2
        with working_precision(max(bits, 64)):
            eps_v = parse_decimal(epsilon, max(bits, 64))
            limit = mpmath.sqrt(mpf(k)) / 2
            if not (0 < eps_v < limit):
                raise SpecError(
                    f"epsilon must lie in (0, sqrt({k})/2 = {mpmath.nstr(limit, 8)}), "
                    f"got {epsilon}"
                )

    t_echo, t_values = _expand_t(data, bits)
    if mode in ("solve", "tau") and not t_values:
        raise SpecError(f"mode {mode} requires t or t_range")

    l_cap = None
    if "L_cap" in data:
        l_cap = _require_decimal(data["L_cap"], "L_cap")
        if not parse_decimal(l_cap, 64) > 0:
            raise SpecError(f"L_cap must be positive, got {l_cap}")

    return ProblemSpec(
        mode=mode,
        points=points,
        epsilon=epsilon,
        t_echo=t_echo,
        t_values=t_values,
        precision_bits=bits,
        seed=seed,
        height_bound=height_bound,
        l_cap=l_cap,
    )


def _complex_vector(spec: ProblemSpec, bits: int) -> ComplexVector:
    with working_precision(bits):
        entries = tuple(
            mpc(parse_decimal(p[0], bits), parse_decimal(p[1], bits))
            for p in spec.points
        )
        return ComplexVector(entries, bits)


def _point_set(spec: ProblemSpec, bits: int) -> EvenDimPointSet:
    with working_precision(bits):
        pts = tuple(
            tuple(parse_decimal(c, bits) for c in p) for p in spec.points
        )
        return EvenDimPointSet(pts, bits)


def _recheck_planar(report, vec: ComplexVector, t: mpf, eps: mpf) -> None:
    if not report.achieved:
        return
    res = lattice_residuals(report.theta, t, vec, 2 * report.eval_bits)
    with working_precision(2 * report.eval_bits):
        worst = max(res)
        if not worst < eps + residual_tol(report.eval_bits):
            raise InternalCheckError(
                f"a-posteriori recheck failed at t={mpmath.nstr(t, 12)}: "
                f"recomputed worst residual {mpmath.nstr(worst, 12)} is not "
                f"below tolerance"
            )


def _recheck_block(report, point_set: EvenDimPointSet, t: mpf, eps: mpf) -> None:
    if not report.achieved:
        return
    planes = project_planes(point_set)
    hb = 2 * report.eval_bits
    with working_precision(hb):
        t_h = mpf(t)
        worst = mpf(0)
        for p in range(len(point_set)):
            coords = []
            for i, plane in enumerate(planes):
                w = report.per_plane[i].theta.value * (t_h * plane.entries[p])
                coords.extend((w.real, w.imag))
            d = real_dist_to_lattice(coords, hb)
            if d > worst:
                worst = d
        if not worst < eps + residual_tol(report.eval_bits):
            raise InternalCheckError(
                f"a-posteriori recheck failed at t={mpmath.nstr(t, 12)}: "
                f"recomputed combined residual {mpmath.nstr(worst, 12)} is not "
                f"below tolerance"
            )


def _run_solve(spec: ProblemSpec) -> Tuple[Tuple[dict, ...], dict, Tuple[str, ...]]:
    bits = spec.precision_bits
    config = SolverConfig(
        bits=bits, height_bound=spec.height_bound, l_cap=spec.l_cap
    )
    planar = spec.dim == 2
    vec = _complex_vector(spec, bits) if planar else None
    pset = None if planar else _point_set(spec, bits)

    warnings = []
    advised = recommended_precision(len(spec.points), spec.height_bound)
    if planar and bits < advised:
        warnings.append(
            f"precision_bits {bits} is below the advised {advised} for relation "
            f"detection over {len(spec.points)} entries at height {spec.height_bound}"
        )

    results = []
    achieved_count = 0
    worst = None
    # strictly ordered by t; see the module docstring for why the per-t
    # lane count stays at one
    for t_str in spec.t_values:
        with working_precision(bits):
            t_v = parse_decimal(t_str, bits)
            eps_v = parse_decimal(spec.epsilon, bits)
        if planar:
            rep = solve_general(vec, t_v, eps_v, seed=spec.seed, config=config)
            _recheck_planar(rep, vec, t_v, eps_v)
            if rep.decomposition is not None:
                for w in rep.decomposition.warnings:
                    if w not in warnings:
                        warnings.append(w)
            frac = rep.max_frac
        else:
            rep = solve_even_dim(pset, t_v, eps_v, seed=spec.seed, config=config)
            _recheck_block(rep, pset, t_v, eps_v)
            frac = rep.combined_max_frac
        results.append(rep.to_json_dict())
        if rep.achieved:
            achieved_count += 1
        with working_precision(rep.eval_bits):
            if worst is None or frac > worst[0]:
                worst = (frac, rep.eval_bits)

    summary = {
        "count": len(results),
        "achieved_count": achieved_count,
        "all_achieved": achieved_count == len(results),
        "worst_max_frac": format_decimal(worst[0], worst[1]),
    }
    return tuple(results), summary, tuple(warnings)


def _run_tau(
    spec: ProblemSpec, grid_theta: int, grid_trans: int, with_reflection: bool
) -> Tuple[Tuple[dict, ...], dict, Tuple[str, ...]]:
    bits = spec.precision_bits
    base = _complex_vector(spec, bits)
    results = []
    uppers = []
    for t_str in spec.t_values:
        with working_precision(bits):
            t_v = parse_decimal(t_str, bits)
            scaled = base.scaled(t_v)
        est = tau_estimate(
            scaled, grid_theta, grid_trans, with_reflection=with_reflection, bits=bits
        )
        with working_precision(bits):
            reproduced = isometry_max_frac(est.argmin, scaled, bits)
            tol = residual_tol(bits)
            ok = (
                abs(reproduced - est.upper) <= tol
                and est.certified_lower <= est.upper
                and est.upper <= mpmath.sqrt(mpf(2)) / 2 + tol
            )
        if not ok:
            raise InternalCheckError(
                f"tau a-posteriori recheck failed at t={t_str}: argmin does not "
                f"reproduce the reported upper bound"
            )
        uppers.append((est.upper, bits))
        results.append({"t": t_str, "estimate": est.to_json_dict()})

    with working_precision(bits):
        nonincreasing = all(
            uppers[i + 1][0] <= uppers[i][0] + residual_tol(bits)
            for i in range(len(uppers) - 1)
        )
        lo = min(u for u, _ in uppers)
        hi = max(u for u, _ in uppers)
    summary = {
        "count": len(results),
        "upper_min": format_decimal(lo, bits),
        "upper_max": format_decimal(hi, bits),
        "nonincreasing": nonincreasing,
    }
    return tuple(results), summary, ()


def _run_prop_sep(
    t: str, samples: int, seed: int, bits: int
) -> Tuple[Tuple[dict, ...], dict, Tuple[str, ...]]:
    chk = check_prop_sep(t, samples, seed, bits=bits)

    # reproduce the argmin sample independently from the seed stream
    rng = random.Random(seed)
    draw = None
    for i in range(chk.argmin_index + 1):
        draw = (rng.random(), rng.random() < 0.5, rng.random(), rng.random())
    probe = separated_probe(t, bits)
    with working_precision(bits):
        g = PlanarIsometry(
            Rotation.from_angle(2 * mpmath.pi * mpf(draw[0]), bits),
            draw[1],
            (mpf(draw[2]), mpf(draw[3])),
        )
        reproduced = isometry_max_frac(g, probe, bits)
        sep = separation(probe, bits)
        t_v = parse_decimal(t, bits)
        if abs(reproduced - chk.minimum) > residual_tol(bits) or sep != t_v:
            raise InternalCheckError(
                "prop-sep a-posteriori recheck failed: the argmin sample does "
                "not reproduce the reported minimum"
            )

    result = chk.to_json_dict()
    result["separation"] = format_decimal(sep, bits)
    summary = {
        "samples": samples,
        "violations": len(chk.violations),
        "minimum": format_decimal(chk.minimum, bits),
    }
    return (result,), summary, ()


def _run_covering(
    direction: Tuple[str, ...], eps: str, cap: str, cell: Optional[str]
) -> Tuple[Tuple[dict, ...], dict, Tuple[str, ...]]:
    dir_floats = [float(parse_decimal(c, 64)) for c in direction]
    eps_f = float(parse_decimal(eps, 64))
    cap_f = float(parse_decimal(cap, 64))
    cell_f = None if cell is None else float(parse_decimal(cell, 64))
    try:
        out = covering_time(dir_floats, eps_f, cap_f, cell_f)
    except ValueError as exc:
        raise SpecError(str(exc))
    if out.covered:
        if out.cells_visited != out.cells_total or out.L is None or out.L > cap_f:
            raise InternalCheckError("covering a-posteriori recheck failed")
    elif out.cells_visited >= out.cells_total:
        raise InternalCheckError("covering a-posteriori recheck failed")
    summary = {
        "covered": out.covered,
        "L": None if out.L is None else repr(out.L),
        "cells_visited": out.cells_visited,
        "cells_total": out.cells_total,
    }
    return (out.to_json_dict(),), summary, ()


def run(
    spec: ProblemSpec,
    *,
    grid_theta: Optional[int] = None,
    grid_trans: Optional[int] = None,
    with_reflection: bool = False,
    samples: Optional[int] = None,
    direction: Optional[Tuple[str, ...]] = None,
    covering_eps: Optional[str] = None,
    covering_cap: Optional[str] = None,
    covering_cell: Optional[str] = None,
    timings: bool = False,
) -> RunReport:
    """Execute a validated spec; deterministic given the spec and seed."""
    start = time.monotonic()
    options: dict = {}
    if spec.mode == "solve":
        results, summary, warnings = _run_solve(spec)
    elif spec.mode == "tau":
        if grid_theta is None or grid_trans is None:
            raise SpecError("tau mode requires --grid-theta and --grid-trans")
        grid_theta = _require_int(grid_theta, "grid_theta", 1)
        grid_trans = _require_int(grid_trans, "grid_trans", 1)
        options = {
            "grid_theta": grid_theta,
            "grid_trans": grid_trans,
            "with_reflection": bool(with_reflection),
        }
        results, summary, warnings = _run_tau(
            spec, grid_theta, grid_trans, with_reflection
        )
    elif spec.mode == "prop_sep":
        if not spec.t_values or samples is None:
            raise SpecError("prop_sep mode requires t and samples")
        samples = _require_int(samples, "samples", 1)
        options = {"samples": samples}
        results, summary, warnings = _run_prop_sep(
            spec.t_values[0], samples, spec.seed, spec.precision_bits
        )
    elif spec.mode == "covering":
        if direction is None or covering_eps is None or covering_cap is None:
            raise SpecError("covering mode requires direction, eps, and cap")
        options = {
            "direction": list(direction),
            "eps": covering_eps,
            "cap": covering_cap,
        }
        if covering_cell is not None:
            options["cell"] = covering_cell
        results, summary, warnings = _run_covering(
            direction, covering_eps, covering_cap, covering_cell
        )
    else:  # pragma: no cover - parse_problem_spec guards this
        raise SpecError(f"unsupported mode {spec.mode!r}")

    echo = spec.echo()
    if options:
        echo["options"] = options
    return RunReport(
        spec_echo=echo,
        mode=spec.mode,
        results=results,
        summary=summary,
        tool_version=__version__,
        warnings=warnings,
        wall_clock_seconds=f"{time.monotonic() - start:.3f}" if timings else None,
    )


def _curve_data(report: RunReport):
    ts, values, achieved = [], [], []
    bits = int(report.spec_echo.get("precision_bits", 128))
    with working_precision(bits + 32):
        for r in report.results:
            t_v = parse_decimal(r["t"], bits + 32)
            frac_str = r["max_frac"] if "max_frac" in r else r["combined_max_frac"]
            f_v = parse_decimal(frac_str, bits + 32)
            ts.append(float(mpmath.log10(t_v)))
            values.append(float(f_v) if f_v > 0 else 0.0)
            achieved.append(bool(r["achieved"]))
        eps = float(parse_decimal(report.spec_echo["epsilon"], bits + 32))
    return ts, values, achieved, eps


def _cell_data(report: RunReport):
    chosen = None
    for r in report.results:
        if r["achieved"]:
            chosen = r
            break
    if chosen is None:
        chosen = report.results[0]
    points = report.spec_echo["points"]
    eps = float(parse_decimal(report.spec_echo["epsilon"], 64))
    residues = []
    if "per_plane" in chosen:
        plane_reports = chosen["per_plane"]
        bits = max(int(p["eval_bits"]) for p in plane_reports)
        with working_precision(bits):
            t_v = parse_decimal(chosen["t"], bits)
            for p in points:
                for i, pr in enumerate(plane_reports):
                    theta = mpc(
                        parse_decimal(pr["theta"][0], bits),
                        parse_decimal(pr["theta"][1], bits),
                    )
                    z = mpc(
                        parse_decimal(p[2 * i], bits),
                        parse_decimal(p[2 * i + 1], bits),
                    )
                    w = theta * (t_v * z)
                    ga, gb = nearest_gaussian(w, bits)
                    residues.append((float(w.real - ga), float(w.imag - gb)))
    else:
        bits = int(chosen["eval_bits"])
        with working_precision(bits):
            t_v = parse_decimal(chosen["t"], bits)
            theta = mpc(
                parse_decimal(chosen["theta"][0], bits),
                parse_decimal(chosen["theta"][1], bits),
            )
            for p in points:
                z = mpc(parse_decimal(p[0], bits), parse_decimal(p[1], bits))
                w = theta * (t_v * z)
                ga, gb = nearest_gaussian(w, bits)
                residues.append((float(w.real - ga), float(w.imag - gb)))
    return residues, eps, chosen["t"]


def emit_plot(report: RunReport, path: str, kind: str = "curve") -> None:
    """Write a deterministic SVG for a solve-mode report."""
    if report.mode != "solve":
        raise SpecError(f"plots are available for solve reports, not {report.mode!r}")
    if not report.results:
        raise SpecError("report has no results to plot")
    if kind == "curve":
        ts, values, achieved, eps = _curve_data(report)
        svg = curve_svg(
            ts, values, achieved, eps, "worst fractional distance vs dilation"
        )
    elif kind == "cell":
        residues, eps, t_str = _cell_data(report)
        label = t_str if len(t_str) <= 24 else t_str[:21] + "..."
        svg = cell_svg(residues, eps, f"rotated configuration at t = {label}")
    else:
        raise SpecError(f"unknown plot kind {kind!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)


def _tau_rows(report: RunReport):
    rows = []
    for r in report.results:
        rows.append(
            (r["t"], r["estimate"]["upper"], r["estimate"]["certified_lower"])
        )
    return rows


def _fail(code: int, message: str) -> int:
    sys.stdout.write(canonical_json({"error": message, "exit_code": code}))
    return code


def _load_spec_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON in {path}: {exc}")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lattice-rotor",
        description=(
            "Find rotations that pull a dilated planar configuration onto the "
            "Gaussian integer lattice; sweep, sample, and tabulate the "
            "brute-force counterparts."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the solver over a t grid")
    p_solve.add_argument("--input", required=True, help="problem spec JSON")
    p_solve.add_argument("--output", required=True, help="report JSON path")
    p_solve.add_argument("--plot", help="optional SVG path")
    p_solve.add_argument(
        "--plot-kind", choices=("curve", "cell"), default="curve",
        help="curve: worst residual vs t; cell: residues in one lattice cell",
    )
    p_solve.add_argument("--seed", type=int, help="override the spec seed")
    p_solve.add_argument("--precision", type=int, help="override precision_bits")
    p_solve.add_argument("--timings", action="store_true", help="include wall-clock")

    p_tau = sub.add_parser("tau", help="grid sweep for the embedding infimum")
    p_tau.add_argument("--input", required=True, help="problem spec JSON")
    p_tau.add_argument("--grid-theta", type=int, required=True)
    p_tau.add_argument("--grid-trans", type=int, required=True)
    p_tau.add_argument("--reflect", action="store_true")
    p_tau.add_argument("--output", help="report JSON path (default stdout)")
    p_tau.add_argument("--csv", help="optional CSV path: t,upper,certified_lower")
    p_tau.add_argument("--precision", type=int, help="override precision_bits")
    p_tau.add_argument("--timings", action="store_true")

    p_sep = sub.add_parser("prop-sep", help="sampled separation lower-bound check")
    p_sep.add_argument("--t", required=True, help="separation parameter (decimal)")
    p_sep.add_argument("--samples", type=int, required=True)
    p_sep.add_argument("--seed", type=int, required=True)
    p_sep.add_argument("--precision", type=int, default=128)
    p_sep.add_argument("--output", help="report JSON path (default stdout)")
    p_sep.add_argument("--timings", action="store_true")

    p_cov = sub.add_parser("covering", help="torus orbit covering time")
    p_cov.add_argument(
        "--direction", required=True, help="comma-separated decimals, e.g. 1,1.618"
    )
    p_cov.add_argument("--eps", required=True, help="target density (decimal)")
    p_cov.add_argument("--cap", required=True, help="give up past this time")
    p_cov.add_argument("--cell", help="grid cell size (default eps/2)")
    p_cov.add_argument("--output", help="report JSON path (default stdout)")
    p_cov.add_argument("--timings", action="store_true")
    return parser


def _dispatch(args) -> Tuple[RunReport, dict]:
    if args.command == "solve":
        data = _load_spec_file(args.input)
        if args.seed is not None:
            data["seed"] = args.seed
        if args.precision is not None:
            data["precision_bits"] = args.precision
        spec = parse_problem_spec(data, "solve")
        report = run(spec, timings=args.timings)
        return report, {
            "output": args.output,
            "plot": args.plot,
            "plot_kind": args.plot_kind,
        }
    if args.command == "tau":
        data = _load_spec_file(args.input)
        if args.precision is not None:
            data["precision_bits"] = args.precision
        data.setdefault("mode", "tau")
        spec = parse_problem_spec(data, "tau")
        report = run(
            spec,
            grid_theta=args.grid_theta,
            grid_trans=args.grid_trans,
            with_reflection=args.reflect,
            timings=args.timings,
        )
        return report, {"output": args.output, "csv": args.csv}
    if args.command == "prop-sep":
        data = {
            "mode": "prop_sep",
            "t": args.t,
            "seed": args.seed,
            "precision_bits": args.precision,
        }
        spec = parse_problem_spec(data, "prop_sep")
        report = run(spec, samples=args.samples, timings=args.timings)
        return report, {"output": args.output}
    if args.command == "covering":
        direction = tuple(c.strip() for c in args.direction.split(",") if c.strip())
        if not direction:
            raise SpecError("direction must list at least one coordinate")
        for c in direction:
            _require_decimal(c, "direction")
        _require_decimal(args.eps, "eps")
        _require_decimal(args.cap, "cap")
        if args.cell is not None:
            _require_decimal(args.cell, "cell")
        spec = ProblemSpec(
            mode="covering",
            points=(),
            epsilon=None,
            t_echo=None,
            t_values=(),
            precision_bits=MIN_PRECISION,
            seed=0,
            height_bound=64,
            l_cap=None,
        )
        report = run(
            spec,
            direction=direction,
            covering_eps=args.eps,
            covering_cap=args.cap,
            covering_cell=args.cell,
            timings=args.timings,
        )
        return report, {"output": args.output}
    raise SpecError(f"unknown command {args.command!r}")  # pragma: no cover


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        report, sinks = _dispatch(args)
        text = report.to_json()
        if sinks.get("output"):
            _write_text(sinks["output"], text)
        else:
            sys.stdout.write(text)
        if sinks.get("csv"):
            _write_text(sinks["csv"], tau_csv(_tau_rows(report)))
        if sinks.get("plot"):
            emit_plot(report, sinks["plot"], sinks.get("plot_kind", "curve"))
        return 0
    except SpecError as exc:
        return _fail(2, str(exc))
    except OSError as exc:
        return _fail(2, f"file error: {exc}")
    except InternalCheckError as exc:
        return _fail(3, f"internal invariant violation: {exc}")


if __name__ == "__main__":
    sys.exit(main())
