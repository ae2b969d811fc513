"""Domains, boundary sampling, right-hand sides and Monte Carlo quadrature.

Sampling is uniform (disk interior via the sqrt-radius trick, boundaries by
arc length) and fully deterministic per seed; the generator is numpy's PCG64,
split per consumer through ``SeedSequence``.  The 1d "boundary" is the two
endpoints carrying counting measure, so the boundary integral of g is
g(a) + g(b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

RNG_ALGORITHM = "numpy PCG64 (default_rng), streams split via SeedSequence"


@dataclass(frozen=True)
class Domain:
    """A bounded region with known measure and boundary measure."""

    kind: str                 # "interval" | "unit_disk" | "square"
    bounds: tuple = ()        # interval: (a, b); square: (cx, cy, side)

    @classmethod
    def interval(cls, a: float, b: float) -> "Domain":
        if not b > a:
            raise ConfigurationError(f"interval needs a < b, got ({a}, {b})")
        return cls("interval", (float(a), float(b)))

    @classmethod
    def unit_disk(cls) -> "Domain":
        return cls("unit_disk")

    @classmethod
    def square(cls, center=(0.0, 0.0), side: float = 2.0) -> "Domain":
        if side <= 0:
            raise ConfigurationError(f"square side must be positive, got {side}")
        return cls("square", (float(center[0]), float(center[1]), float(side)))

    @classmethod
    def unit_square(cls) -> "Domain":
        return cls.square(center=(0.5, 0.5), side=1.0)

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 2

    @property
    def measure(self) -> float:
        if self.kind == "interval":
            a, b = self.bounds
            return b - a
        if self.kind == "unit_disk":
            return math.pi
        side = self.bounds[2]
        return side * side

    @property
    def boundary_measure(self) -> float:
        if self.kind == "interval":
            return 2.0  # counting measure on the two endpoints
        if self.kind == "unit_disk":
            return 2.0 * math.pi
        return 4.0 * self.bounds[2]

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of rows lying inside the (closed) domain."""
        x = np.asarray(points, dtype=np.float64)
        if self.kind == "interval":
            a, b = self.bounds
            return (x[:, 0] >= a) & (x[:, 0] <= b)
        if self.kind == "unit_disk":
            return np.einsum("ij,ij->i", x, x) <= 1.0 + 1e-12
        cx, cy, side = self.bounds
        h = side / 2.0
        return (np.abs(x[:, 0] - cx) <= h + 1e-12) & (np.abs(x[:, 1] - cy) <= h + 1e-12)


@dataclass(frozen=True)
class Rhs:
    """Right-hand side f as one of the preset families or a custom callable."""

    kind: str                      # "constant" | "two_balls" | "fourier" | "custom"
    params: tuple = ()
    fn: object = None

    @classmethod
    def constant(cls, c: float) -> "Rhs":
        return cls("constant", (float(c),))

    @classmethod
    def two_balls(cls, r: float) -> "Rhs":
        """+1 on the ball of radius r at (0, -1/2), -1 on the one at (0, +1/2)."""
        if r <= 0:
            raise ConfigurationError(f"ball radius must be positive, got {r}")
        return cls("two_balls", (float(r),))

    @classmethod
    def fourier_mode(cls, k: int, m: int, a: float) -> "Rhs":
        return cls("fourier", (int(k), int(m), float(a)))

    @classmethod
    def custom(cls, fn) -> "Rhs":
        return cls("custom", (), fn)

    def label(self) -> str:
        if self.kind == "constant":
            return f"const{self.params[0]:g}"
        if self.kind == "two_balls":
            return f"two_balls_r{self.params[0]:g}"
        if self.kind == "fourier":
            k, m, a = self.params
            return f"fourier_k{k}_m{m}"
        return "custom"


def rhs_eval(f: Rhs, points: np.ndarray) -> np.ndarray:
    """Pointwise evaluation of f; two_balls uses strict ball membership."""
    x = np.asarray(points, dtype=np.float64)
    if f.kind == "constant":
        return np.full(x.shape[0], f.params[0])
    if f.kind == "two_balls":
        r = f.params[0]
        lo = (x[:, 0] - 0.0) ** 2 + (x[:, 1] + 0.5) ** 2 < r * r
        hi = (x[:, 0] - 0.0) ** 2 + (x[:, 1] - 0.5) ** 2 < r * r
        return lo.astype(np.float64) - hi.astype(np.float64)
    if f.kind == "fourier":
        k, m, a = f.params
        return a * np.sin(k * np.pi * x[:, 0]) * np.sin(m * np.pi * x[:, 1])
    return np.asarray(f.fn(x), dtype=np.float64)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Interior and boundary quadrature points for one domain."""

    interior: np.ndarray    # (N_i, d)
    boundary: np.ndarray    # (N_b, d)
    seed: int
    domain: Domain


def sample(domain: Domain, n_interior: int, n_boundary: int, seed: int) -> SampleBatch:
    """Uniform interior and boundary samples, deterministic per seed.

    For intervals the boundary batch is always exactly the two endpoints.
    """
    if n_interior < 1 or n_boundary < 1:
        raise ConfigurationError("sample counts must be at least 1")
    rng = np.random.default_rng(seed)
    if domain.kind == "interval":
        a, b = domain.bounds
        interior = (a + (b - a) * rng.random(n_interior))[:, None]
        boundary = np.array([[a], [b]])
    elif domain.kind == "unit_disk":
        radius = np.sqrt(rng.random(n_interior))
        angle = 2.0 * np.pi * rng.random(n_interior)
        interior = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
        theta = 2.0 * np.pi * rng.random(n_boundary)
        boundary = np.column_stack([np.cos(theta), np.sin(theta)])
    elif domain.kind == "square":
        cx, cy, side = domain.bounds
        h = side / 2.0
        interior = np.column_stack([
            cx - h + side * rng.random(n_interior),
            cy - h + side * rng.random(n_interior),
        ])
        t = rng.random(n_boundary) * 4.0  # arclength in units of one side
        edge = np.floor(t).astype(int)
        s = (t - edge) * side
        bx = np.empty(n_boundary)
        by = np.empty(n_boundary)
        bottom, right, top, left = edge == 0, edge == 1, edge == 2, edge == 3
        bx[bottom], by[bottom] = cx - h + s[bottom], cy - h
        bx[right], by[right] = cx + h, cy - h + s[right]
        bx[top], by[top] = cx + h - s[top], cy + h
        bx[left], by[left] = cx - h, cy + h - s[left]
        boundary = np.column_stack([bx, by])
    else:
        raise ConfigurationError(f"unknown domain kind {domain.kind!r}")
    return SampleBatch(interior, boundary, int(seed), domain)


def mc_integral(values: np.ndarray, measure: float) -> float:
    """Monte Carlo estimate measure * mean(values)."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ConfigurationError("mc_integral requires a nonempty value batch")
    return float(measure * v.mean())


def mc_std_error(values: np.ndarray, measure: float) -> float:
    """Standard error of :func:`mc_integral` from the sample variance."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < 2:
        raise ConfigurationError("standard error needs at least 2 samples")
    return float(measure * v.std(ddof=1) / math.sqrt(v.size))


def spawn_seeds(seed: int, count: int) -> list:
    """Independent child seeds derived from a root seed (SeedSequence spawn)."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, np.uint32)[0]) for c in children]
