"""Numerical certification of the closed-form disk formulas.

Each check draws random points and partitions from a seeded generator and
returns a :class:`Check` with the worst observed error against its
tolerance.  ``run_disk_suite`` runs them all; the CLI ``verify-disk`` prints
the report.
"""
from __future__ import annotations

from dataclasses import dataclass
import time

import numpy as np

from . import disk
from .divergence import HELLINGER, KL, TV_SMOOTHED, reduced_divergence


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    worst: float
    tol: float
    samples: int
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<40s} worst={self.worst:.3e} tol={self.tol:.0e} n={self.samples} ({self.seconds:.2f}s)"


def random_disk_point(rng, rmin=0.0, rmax=0.95) -> complex:
    # area-uniform radius between rmin and rmax
    r = np.sqrt(rng.uniform(rmin**2, rmax**2))
    return complex(r * np.exp(1j * rng.uniform(-np.pi, np.pi)))


def random_partition(rng, n: int, min_gap: float = 1e-3) -> np.ndarray:
    """n sorted angles in (-pi, pi] with every cyclic gap above ``min_gap``."""
    while True:
        t = np.sort(rng.uniform(-np.pi, np.pi, n))
        gaps = disk.ccw_length(t, np.roll(t, -1))
        if len(np.unique(t)) == n and gaps.min() > min_gap:
            return t


def _timed(fn):
    def run(*a, **kw):
        t0 = time.perf_counter()
        name, worst, tol, samples, ok = fn(*a, **kw)
        return Check(name, bool(ok), float(worst), tol, samples, time.perf_counter() - t0)

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def random_disk_points(rng, size: int, rmin=0.0, rmax=0.95) -> np.ndarray:
    r = np.sqrt(rng.uniform(rmin**2, rmax**2, size))
    return r * np.exp(1j * rng.uniform(-np.pi, np.pi, size))


@_timed
def check_chord_identity(samples: int = 10_000, seed: int = 0):
    """|1/conj(v) + w/(1-|z|^2)| with v, w the chord vectors from z."""
    rng = np.random.default_rng(seed)
    z = random_disk_points(rng, samples)
    th = rng.uniform(-np.pi, np.pi, samples)
    v = np.exp(1j * th) - z
    w = np.exp(1j * disk.antipode(z, th)) - z
    worst = float(np.abs(1.0 / np.conj(v) + w / (1.0 - np.abs(z) ** 2)).max())
    return "chord identity", worst, 1e-12, samples, worst < 1e-12


@_timed
def check_antipode_involution(samples: int = 10_000, seed: int = 1):
    rng = np.random.default_rng(seed)
    z = random_disk_points(rng, samples)
    th = rng.uniform(-np.pi, np.pi, samples)
    back = disk.antipode(z, disk.antipode(z, th))
    worst = float(np.abs(disk.wrap_angle(back - th)).max())
    return "antipode involution", worst, 1e-10, samples, worst < 1e-10


@_timed
def check_partition_of_unity(samples: int = 10_000, seed: int = 2):
    """Coordinates sum to one and their gradients sum to zero."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 17))
        z = random_disk_point(rng)
        t = random_partition(rng, n)
        s = abs(disk.harmonic_measures_disk(z, t).sum() - 1.0)
        gsum = np.abs(disk.grad_harmonic_measures_disk(z, t).sum(axis=0)).max()
        # gradients scale like 1/(1-|z|^2)
        worst = max(worst, s, gsum * (1.0 - abs(z) ** 2))
    return "partition of unity / zero gradient sum", worst, 1e-12, samples, worst < 1e-12


@_timed
def check_gradient_fd(samples: int = 1000, seed: int = 3, ns=(3, 8, 16), step: float = 1e-6):
    """Analytic coordinate gradients against central differences."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(samples):
        n = ns[i % len(ns)]
        z = random_disk_point(rng)
        t = random_partition(rng, n, min_gap=0.05)
        j = int(rng.integers(n))
        g = disk.grad_harmonic_measure_disk(z, t, j)
        fd = np.array([
            disk.harmonic_measure_disk(z + step, t, j) - disk.harmonic_measure_disk(z - step, t, j),
            disk.harmonic_measure_disk(z + 1j * step, t, j) - disk.harmonic_measure_disk(z - 1j * step, t, j),
        ]) / (2 * step)
        worst = max(worst, np.linalg.norm(g - fd) / np.linalg.norm(g))
    return "coordinate gradient vs finite differences", worst, 1e-6, samples, worst < 1e-6


@_timed
def check_nonvanishing_gradient(samples: int = 1000, seed: int = 4, ns=(3, 4, 8, 16), generators=(KL, HELLINGER, TV_SMOOTHED)):
    """Divergence gradient toward the origin never vanishes away from it.

    The reported value is the smallest |grad| * (1 - |z|^2) / |z| seen, a
    scale-free lower bound that must stay above 1e-12.
    """
    rng = np.random.default_rng(seed)
    smallest = np.inf
    count = 0
    for n in ns:
        for g in generators:
            for _ in range(samples):
                z = random_disk_point(rng, 1e-3, 0.95)
                while abs(z) <= 1e-3:
                    z = random_disk_point(rng, 1e-3, 0.95)
                t = random_partition(rng, n)
                grad = disk.grad_divergence_disk(z, t, g)
                smallest = min(smallest, np.linalg.norm(grad) * (1.0 - abs(z) ** 2) / abs(z))
                count += 1
    names = "/".join(g.name for g in generators)
    return f"nonvanishing divergence gradient ({names})", smallest, 1e-12, count, smallest > 1e-12


@_timed
def check_two_arc_control(samples: int = 200, seed: int = 5, generators=(KL, HELLINGER, TV_SMOOTHED)):
    """n = 2 with antipodal breakpoints: on the diameter through them the
    distance vanishes and the gradient has no component along it."""
    rng = np.random.default_rng(seed)
    t = np.array([-np.pi / 2, np.pi / 2])
    worst = dmax = 0.0
    for g in generators:
        for _ in range(samples):
            z = 1j * rng.uniform(-0.95, 0.95)
            dmax = max(dmax, abs(disk.divergence_disk(z, t, g)))
            worst = max(worst, abs(disk.grad_divergence_disk(z, t, g)[1]))
    ok = worst <= 1e-10 and dmax <= 1e-12
    return "two-arc degenerate diameter", worst, 1e-10, samples * len(generators), ok


@_timed
def check_mobius_invariance(samples: int = 1000, seed: int = 6, g=KL):
    """Coordinates and reduced distances survive z -> (z-a)/(1-conj(a)z)
    when the breakpoints are transported along."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(3, 17))
        a = random_disk_point(rng, 0.0, 0.8)
        z1, z2 = random_disk_point(rng), random_disk_point(rng)
        t = random_partition(rng, n, min_gap=1e-2)
        t2, shift = disk.transport_partition(a, t)
        m1, m2 = disk.mobius_map(a, z1), disk.mobius_map(a, z2)
        if max(abs(m1), abs(m2)) >= 1.0 - 1e-6:
            continue
        p1 = np.roll(disk.harmonic_measures_disk(m1, t2), shift)
        p2 = np.roll(disk.harmonic_measures_disk(m2, t2), shift)
        q1 = disk.harmonic_measures_disk(z1, t)
        q2 = disk.harmonic_measures_disk(z2, t)
        d_err = abs(reduced_divergence(p1, p2, g) - reduced_divergence(q1, q2, g))
        worst = max(worst, np.abs(p1 - q1).max(), d_err)
    return "Mobius invariance", worst, 1e-10, samples, worst < 1e-10


ALL_CHECKS = (
    check_chord_identity,
    check_antipode_involution,
    check_partition_of_unity,
    check_gradient_fd,
    check_nonvanishing_gradient,
    check_two_arc_control,
    check_mobius_invariance,
)


def run_disk_suite(scale: float = 1.0) -> list[Check]:
    """Run every check; ``scale`` < 1 shrinks the sample counts."""
    if scale == 1.0:
        return [fn() for fn in ALL_CHECKS]
    return [fn(samples=max(10, int(_DEFAULT_SAMPLES[fn.__name__] * scale))) for fn in ALL_CHECKS]


_DEFAULT_SAMPLES = {
    "check_chord_identity": 10_000,
    "check_antipode_involution": 10_000,
    "check_partition_of_unity": 10_000,
    "check_gradient_fd": 1000,
    "check_nonvanishing_gradient": 1000,
    "check_two_arc_control": 200,
    "check_mobius_invariance": 1000,
}
