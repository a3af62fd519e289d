"""Orbit diagnostics: Birkhoff averages, Monte-Carlo correlation decay and
phase-portrait datasets, plus the deterministic seed splitting they share."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

BATCH = 1 << 17


def task_rng(master_seed: int, task: int) -> np.random.Generator:
    """Generator for one task, keyed by (master seed, task index) through SeedSequence."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(master_seed), spawn_key=(int(task),))))


def birkhoff_average(system, observable: Callable, point, n: int) -> float:
    """(1/n) sum_{i<n} observable(H^i(point)), summed exactly with fsum."""
    if n < 1:
        raise ValueError("need n >= 1")
    p = tuple(float(c) for c in np.asarray(point, dtype=float))
    step = system.forward_point

    def values():
        z = p
        for i in range(n):
            v = float(observable(z))
            if not math.isfinite(v):
                raise ValueError(f"observable is not finite at iterate {i}")
            yield v
            z = step(z)

    return math.fsum(values()) / n


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by centre and half-widths in the natural coordinates."""

    center: tuple
    half_width: tuple

    def __post_init__(self):
        if len(self.center) != len(self.half_width):
            raise ValueError("centre and half-widths differ in dimension")
        if any(h <= 0 for h in self.half_width):
            raise ValueError("half-widths must be positive")

    def __call__(self, pts) -> np.ndarray:
        p = np.asarray(pts, dtype=float)
        c, h = np.asarray(self.center, float), np.asarray(self.half_width, float)
        return np.all(np.abs(p - c) <= h, axis=-1)


@dataclass(frozen=True)
class CorrelationSeries:
    """Estimates of mu(H^{-n}(A) n B) for n = 0..n_max with binomial standard errors."""

    estimates: tuple
    std_errors: tuple
    measure_a: float
    measure_b: float
    samples: int

    def within(self, target: float, sigmas: float = 3.0, start: int = 0) -> bool:
        return all(abs(e - target) <= sigmas * s for e, s in zip(self.estimates[start:], self.std_errors[start:]))


def correlation_series(system, region_a: Callable, region_b: Callable, n_max: int,
                       samples: int, seed: int) -> CorrelationSeries:
    """Monte-Carlo estimates of mu(H^{-n}(A) n B): the fraction of samples z
    uniform in the domain with z in B and H^n(z) in A.

    Samples are drawn in batches, each from its own sub-seed of ``seed``, and
    the batch counts are summed as integers, so the result does not depend on
    the batch order.
    """
    if n_max < 0 or samples < 2:
        raise ValueError("need n_max >= 0 and at least two samples")
    hits = np.zeros(n_max + 1, dtype=np.int64)
    count_a = count_b = 0
    done = 0
    for task in range(math.ceil(samples / BATCH)):
        m = min(BATCH, samples - done)
        z = system.sample_uniform(task_rng(seed, task), m)
        in_b = np.asarray(region_b(z), dtype=bool)
        count_a += int(np.count_nonzero(region_a(z)))
        count_b += int(np.count_nonzero(in_b))
        for n in range(n_max + 1):
            if n:
                z = system.forward(z)
            hits[n] += int(np.count_nonzero(in_b & np.asarray(region_a(z), dtype=bool)))
        done += m
    if count_a == 0 or count_b == 0:
        raise ValueError("a region has estimated measure zero")
    est = hits / samples
    se = np.sqrt(est * (1.0 - est) / samples)
    return CorrelationSeries(tuple(est.tolist()), tuple(se.tolist()), count_a / samples, count_b / samples, samples)


# --------------------------------------------------------------------------
# datasets


def format_float(v: float) -> str:
    return "%.17g" % v


@dataclass(frozen=True)
class Dataset:
    header: tuple
    rows: tuple

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(self.header) + "\n")
        for row in self.rows:
            out.write(",".join(str(v) if isinstance(v, int) else format_float(v) for v in row) + "\n")
        return out.getvalue()

    def to_json(self) -> str:
        return json.dumps({"header": list(self.header), "rows": [list(r) for r in self.rows]}, sort_keys=True) + "\n"


def line_seeds(start, end, count: int) -> list:
    """``count`` evenly spaced points on the segment from start to end."""
    if count < 1:
        raise ValueError("need at least one seed")
    a, b = np.asarray(start, float), np.asarray(end, float)
    return [tuple(float(c) for c in a + t * (b - a)) for t in np.linspace(0.0, 1.0, count)]


def phase_portrait(system, seeds: Sequence, iterations: int) -> Dataset:
    """Rows (seed_id, iterate, coordinates...) for every seed and iterate 0..iterations."""
    seeds = [tuple(float(c) for c in s) for s in seeds]
    if not seeds:
        raise ValueError("seed set is empty")
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    dim = len(seeds[0])
    names = ("x", "y") if dim == 2 else ("u", "v", "w")
    rows = []
    for sid, s in enumerate(seeds):
        z = s
        rows.append((sid, 0) + z)
        for i in range(1, iterations + 1):
            z = tuple(float(c) for c in system.forward_point(z))
            rows.append((sid, i) + z)
    return Dataset(("seed_id", "iterate") + names, tuple(rows))
