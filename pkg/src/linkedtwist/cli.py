"""Command-line driver: ``key = value`` configuration files, one subcommand per
experiment family, and byte-reproducible CSV/JSON output.

Exit status is 0 when the run passes, 1 when a certification fails and 2 on
a usage or configuration error.  Per-task random streams come from
``SeedSequence(seed, spawn_key=(task,))`` so reruns are bit-identical.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

SYSTEMS = ("cat", "toral", "generalized", "planar", "sphere")
SUBCOMMANDS = ("simulate", "lyapunov", "cones", "bounds", "horseshoe", "semiconj", "mixing", "returns", "portrait")
SQRT7 = math.sqrt(7.0)


class ConfigError(Exception):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


@dataclass(frozen=True)
class ConfigIssue:
    line: Optional[int]
    key: str
    reason: str

    def __str__(self) -> str:
        where = f"line {self.line}" if self.line is not None else "command line"
        return f"{where}: key '{self.key}': {self.reason}"


# --------------------------------------------------------------------------
# value parsers


def _int(text: str) -> int:
    return int(text.strip(), 0)


def _float(text: str) -> float:
    v = float(text.strip())
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _point(text: str) -> tuple:
    parts = [_float(t) for t in text.split(",")]
    if len(parts) not in (2, 3):
        raise ValueError("a point has two or three comma-separated numbers")
    return tuple(parts)


def _points(text: str) -> tuple:
    pts = tuple(_point(t) for t in text.split(";") if t.strip())
    if not pts:
        raise ValueError("need at least one point")
    return pts


def _box(text: str) -> tuple:
    parts = [_float(t) for t in text.split(",")]
    if len(parts) % 2 or len(parts) < 4:
        raise ValueError("a box is centre coordinates followed by half-widths")
    d = len(parts) // 2
    if any(h <= 0 for h in parts[d:]):
        raise ValueError("half-widths must be positive")
    return tuple(parts)


def _choice(*options) -> Callable:
    def parse(text: str) -> str:
        v = text.strip()
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return v

    return parse


def _at_least(parser, lo) -> Callable:
    def parse(text):
        v = parser(text)
        if v < lo:
            raise ValueError(f"must be at least {lo}")
        return v

    return parse


KEYS = {
    "system": _choice(*SYSTEMS),
    "seed": _at_least(_int, 0),
    "x0": _float, "x1": _float, "y0": _float, "y1": _float,
    "j": _at_least(_int, 1), "k": _at_least(_int, 1),
    "r0": _float, "r1": _float,
    "point": _point,
    "seeds": _points,
    "iterations": _at_least(_int, 0),
    "samples": _at_least(_int, 1),
    "n_max": _at_least(_int, 0),
    "horizon": _at_least(_int, 2),
    "depth": _at_least(_int, 1),
    "cap": _at_least(_int, 1),
    "mode": _choice("returnStep", "singleStep"),
    "grid": _at_least(_int, 100),
    "refine": _at_least(_int, 0),
    "period": _at_least(_int, 1),
    "region_a": _box,
    "region_b": _box,
    "output": str.strip,
    "format": _choice("csv", "json"),
}
REQUIRED = ("system", "seed")
SYSTEM_KEYS = {
    "cat": (),
    "toral": ("x0", "x1", "y0", "y1", "j", "k"),
    "generalized": ("x0", "y0"),
    "sphere": ("x0", "y0"),
    "planar": ("r0", "r1"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    system: str
    seed: int
    params: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)
    output: Optional[str] = None
    format: Optional[str] = None

    def build_system(self):
        from .twist_maps import GeneralizedToralLTM, PlanarLTM, SphereLTM, ToralLTM

        if self.system == "cat":
            return ToralLTM.cat_map()
        cls = {"toral": ToralLTM, "generalized": GeneralizedToralLTM, "sphere": SphereLTM, "planar": PlanarLTM}
        return cls[self.system](**self.params)

    def get(self, key: str, default):
        return self.settings.get(key, default)


def _read_lines(text: str):
    entries = {}
    issues = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            issues.append(ConfigIssue(no, line, "expected 'key = value'"))
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key in entries:
            issues.append(ConfigIssue(no, key, f"duplicate key (first set on line {entries[key][1]})"))
            continue
        entries[key] = (value, no)
    return entries, issues


def _validate(entries: dict, issues: list) -> ExperimentConfig:
    values = {}
    for key, (text, no) in entries.items():
        if key not in KEYS:
            issues.append(ConfigIssue(no, key, "unknown key"))
            continue
        try:
            values[key] = KEYS[key](text)
        except ValueError as exc:
            issues.append(ConfigIssue(no, key, str(exc)))
    for key in REQUIRED:
        if key not in entries:
            issues.append(ConfigIssue(None, key, "missing required key"))
    if issues:
        raise ConfigError(issues)

    system = values["system"]
    line = lambda k: entries[k][1]  # noqa: E731
    allowed = SYSTEM_KEYS[system]
    for key in ("x0", "x1", "y0", "y1", "j", "k", "r0", "r1"):
        if key in values and key not in allowed:
            issues.append(ConfigIssue(line(key), key, f"not a parameter of the {system} system"))
    params = {k: values[k] for k in allowed if k in values}
    if system == "planar":
        r0, r1 = params.get("r0", 2.0), params.get("r1", SQRT7)
        if "r0" in params and not 2.0 <= r0:
            issues.append(ConfigIssue(line("r0"), "r0", "r0 violates 2 ≤ r0 < r1 ≤ √7"))
        if "r1" in params and not r0 < r1 <= SQRT7:
            issues.append(ConfigIssue(line("r1"), "r1", "r1 violates 2 ≤ r0 < r1 ≤ √7"))
    if issues:
        raise ConfigError(issues)
    settings = {k: v for k, v in values.items() if k not in KEYS_SYSTEM_ALL and k not in ("output", "format")}
    cfg = ExperimentConfig(system, values["seed"], params, settings, values.get("output"), values.get("format"))
    try:
        cfg.build_system()
    except ValueError as exc:
        key = next(iter(params), "system")
        raise ConfigError([ConfigIssue(line(key) if key in entries else None, key, str(exc))]) from None
    return cfg


KEYS_SYSTEM_ALL = ("system", "seed", "x0", "x1", "y0", "y1", "j", "k", "r0", "r1")


def parse_config(text: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` starts a comment); ``overrides`` are
    command-line values that replace file entries."""
    entries, issues = _read_lines(text)
    for key, value in (overrides or {}).items():
        entries[key] = (value, None)
    return _validate(entries, issues)


# --------------------------------------------------------------------------
# reports


def _plain(obj):
    """Convert numpy scalars and arrays to JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


@dataclass(frozen=True)
class Report:
    name: str
    passed: bool
    body: dict

    def to_json(self) -> str:
        doc = {"subcommand": self.name, "pass": self.passed, "result": _plain(self.body)}
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        from .diagnostics import format_float

        rows = ["key,value", f"pass,{str(self.passed).lower()}"]

        def walk(prefix, v):
            if isinstance(v, dict):
                for k in sorted(v):
                    walk(f"{prefix}.{k}" if prefix else str(k), v[k])
            elif isinstance(v, list):
                for i, item in enumerate(v):
                    walk(f"{prefix}[{i}]", item)
            elif isinstance(v, float):
                rows.append(f"{prefix},{format_float(v)}")
            else:
                rows.append(f"{prefix},{str(v).lower() if isinstance(v, bool) else v}")

        walk("", _plain(self.body))
        return "\n".join(rows) + "\n"


def _default_point(system):
    fam = system.family
    if fam == "toral":
        if system.x0 == 0.0 and system.x1 == 1.0:
            return (0.1234567, 0.7654321)
        return (0.5 * (system.x0 + system.x1) + 0.0123, 0.5 * (system.y0 + system.y1) + 0.0071)
    if fam == "generalized":
        return (0.1234, 0.2345)
    if fam == "planar":
        return (0.0123, 1.7)
    return tuple(float(c) for c in system.sample_uniform(np.random.default_rng(0), 1)[0])


def _require(system, families, name):
    if system.family not in families:
        raise ConfigError([ConfigIssue(None, "system", f"'{name}' needs a {' or '.join(families)} system")])


# --------------------------------------------------------------------------
# subcommands (thin shells over the library)


def cmd_simulate(cfg, system):
    from .diagnostics import phase_portrait

    pt = cfg.get("point", None) or _default_point(system)
    return phase_portrait(system, [pt], cfg.get("iterations", 1000))


def cmd_portrait(cfg, system):
    from .diagnostics import line_seeds, phase_portrait

    seeds = cfg.get("seeds", None)
    if seeds is None:
        if system.family == "planar":
            seeds = line_seeds((-1.0 - system.r1 + 0.01, 0.02), (-1.0 - system.r0 - 0.01, 0.02), 20)
        else:
            p = _default_point(system)
            seeds = [p]
    return phase_portrait(system, seeds, cfg.get("iterations", 100))


def cmd_lyapunov(cfg, system):
    from .hyperbolicity import lyapunov_estimate, unstable_direction_estimate

    _require(system, ("toral", "generalized", "planar"), "lyapunov")
    pt = cfg.get("point", None) or _default_point(system)
    est = lyapunov_estimate(system, pt, (1.0, 1.0), cfg.get("iterations", 100000))
    body = dict(est.__dict__)
    if system.family != "planar":
        d = unstable_direction_estimate(system, pt)
        body["unstable_direction"] = d.direction
        body["unstable_in_cone"] = d.in_cone
    return Report("lyapunov", est.chi_plus > 0.0, body)


def cmd_cones(cfg, system):
    from .diagnostics import task_rng
    from .hyperbolicity import TangentCone, cone_check

    _require(system, ("toral", "generalized", "planar"), "cones")
    mode = cfg.get("mode", "returnStep")
    cone = TangentCone.planar_U(system.c) if system.family == "planar" else TangentCone.positive()
    rng = task_rng(cfg.seed, 0)
    n = cfg.get("samples", 200)
    pts = []
    while len(pts) < n:
        z = system.sample_uniform(rng, 4 * n)
        inside = system.in_sigma(z) if system.family == "planar" else system.in_S(z)
        pts.extend(z[inside].tolist())
    pts = pts[:n]
    failures, worst = 0, math.inf
    for p in pts:
        chk = cone_check(system, p, cone, mode)
        failures += not chk.verdict
        worst = min(worst, chk.expansion_factor)
    body = {"mode": mode, "points": n, "failures": failures, "min_expansion": worst}
    return Report("cones", failures == 0, body)


def cmd_bounds(cfg, system):
    from .coordinates import CLAIMED_BOUNDS, GridSpec, derivative_bound_scan, ergodic_condition_check

    _require(system, ("planar",), "bounds")
    g = cfg.get("grid", 400)
    grid = GridSpec(n_r=g, n_t=g, refine=cfg.get("refine", 3))
    scans = {q: derivative_bound_scan(q, system, grid).to_dict() for q in CLAIMED_BOUNDS}
    erg = ergodic_condition_check(system).to_dict()
    ok = all(s["passed"] for s in scans.values()) and erg["pass"]
    return Report("bounds", ok, {"scans": scans, "ergodic_condition": erg})


def cmd_horseshoe(cfg, system):
    from . import horseshoe as hs_mod
    from .twist_maps import jacobian

    _require(system, ("toral",), "horseshoe")
    hs = hs_mod.build_horseshoe(system)
    cm = hs_mod.verify_conley_moser(hs.M, hs.strips, system)
    sp = hs_mod.hyperbolic_splitting(system)
    orbits = []
    ok = cm.all_pass
    for p in range(1, cfg.get("period", 5) + 1):
        for word in hs_mod.primitive_words(hs.N, p):
            try:
                z = hs_mod.periodic_point(hs_mod.SymbolSequence.cyclic(word, hs.N), hs)
            except hs_mod.RefinementStagnation as exc:
                ok = False
                orbits.append({"word": list(word), "error": str(exc)})
                continue
            res = float(np.linalg.norm(hs_mod._periodic_residual(system, z, p)))
            big, small = hs_mod.eigenvalues_2x2(jacobian(system, z, p).matrix)
            eig_err = max(abs(big / sp.lambda_plus ** p - 1.0), abs(small / sp.lambda_minus ** p - 1.0))
            ok &= res < hs_mod.PERIODIC_TOL and eig_err < 1e-9
            orbits.append({"word": list(word), "point": z, "residual": res, "eigenvalue_error": eig_err})
    body = {
        "N": hs.N,
        "M": hs.M.vertices,
        "conley_moser": cm.to_dict(),
        "horizontal": [s.to_dict() for s in hs.strips.horizontal],
        "vertical": [s.to_dict() for s in hs.strips.vertical],
        "lambda_plus": sp.lambda_plus,
        "lambda_minus": sp.lambda_minus,
        "periodic_orbits": orbits,
    }
    return Report("horseshoe", bool(ok), body)


def cmd_semiconj(cfg, system):
    from .diagnostics import task_rng
    from .semiconjugacy import SphereCap, involution_residuals, pushforward_preservation, semiconjugacy_residual

    _require(system, ("sphere",), "semiconj")
    n = cfg.get("samples", 10000)
    res = semiconjugacy_residual(system, n, task_rng(cfg.seed, 0))
    inv = involution_residuals(system, n, task_rng(cfg.seed, 1))
    cap = pushforward_preservation(system, SphereCap((0.3, 0.5, 0.8), 0.2), n, task_rng(cfg.seed, 2))
    ok = res.max_residual < 1e-9 and inv.e_of_j < 1e-10 and inv.j_of_f < 1e-10
    body = {
        "max_residual": res.max_residual,
        "argmax": res.argmax,
        "rejected": res.rejected,
        "e_of_j": inv.e_of_j,
        "j_of_f": inv.j_of_f,
        "cap_measure": cap.measure,
        "cap_image_measure": cap.image_measure,
        "cap_discrepancy": cap.discrepancy,
        "cap_std_error": cap.std_error,
    }
    return Report("semiconj", ok, body)


def cmd_mixing(cfg, system):
    from .diagnostics import Box, correlation_series

    _require(system, ("toral", "generalized", "planar"), "mixing")
    # the half-torus {x < 1/2} is the default only where it is meaningful, on the cat map
    default = (0.25, 0.5, 0.25, 0.5) if cfg.system == "cat" else None
    a = cfg.get("region_a", default)
    if a is None:
        raise ConfigError([ConfigIssue(None, "region_a", "required for this system")])
    b = cfg.get("region_b", a)
    box_a = Box(a[: len(a) // 2], a[len(a) // 2:])
    box_b = Box(b[: len(b) // 2], b[len(b) // 2:])
    cs = correlation_series(system, box_a, box_b, cfg.get("n_max", 20), cfg.get("samples", 10 ** 5), cfg.seed)
    product = cs.measure_a * cs.measure_b
    body = {
        "estimates": cs.estimates,
        "std_errors": cs.std_errors,
        "measure_a": cs.measure_a,
        "measure_b": cs.measure_b,
        "product": product,
        "samples": cs.samples,
    }
    return Report("mixing", True, body)


def cmd_returns(cfg, system):
    from .hyperbolicity import pq_m_sequences, return_frequency

    _require(system, ("toral", "generalized"), "returns")
    pt = cfg.get("point", None) or _default_point(system)
    if not system.in_S_point(*system.canonical(np.asarray(pt, float))):
        raise ConfigError([ConfigIssue(None, "point", "must lie in S")])
    rec = pq_m_sequences(system, pt, cfg.get("depth", 10), cfg.get("cap", 10 ** 6))
    freq = return_frequency(system, pt, cfg.get("horizon", 10 ** 5))
    body = {"p": rec.p, "q": rec.q, "m": rec.m, "complete": rec.complete,
            "delta": freq.delta, "delta_half": freq.delta_half, "returns": freq.returns}
    return Report("returns", True, body)


COMMANDS = {name: globals()[f"cmd_{name}"] for name in SUBCOMMANDS}


def run(subcommand: str, cfg: ExperimentConfig):
    """(exit status, artifact) where the artifact is a Report or a Dataset."""
    if subcommand not in COMMANDS:
        raise ConfigError([ConfigIssue(None, "subcommand", f"unknown subcommand {subcommand!r}")])
    artifact = COMMANDS[subcommand](cfg, cfg.build_system())
    status = 0 if getattr(artifact, "passed", True) else 1
    return status, artifact


def render(artifact, fmt: str) -> str:
    return artifact.to_json() if fmt == "json" else artifact.to_csv()


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linkedtwist", description="Linked-twist map experiments.")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="path of a key = value configuration file")
    for key in KEYS:
        flags = [f"--{key}"] + ([f"--{key.replace('_', '-')}"] if "_" in key else [])
        ap.add_argument(*flags, dest=key, default=None, metavar="VALUE")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    text = ""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
    overrides = {k: getattr(args, k) for k in KEYS if getattr(args, k) is not None}
    try:
        cfg = parse_config(text, overrides)
        status, artifact = run(args.subcommand, cfg)
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"error: {issue}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fmt = cfg.format or ("csv" if args.subcommand in ("simulate", "portrait") else "json")
    out = render(artifact, fmt)
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(out)
        except OSError as exc:
            print(f"error: cannot write output: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
