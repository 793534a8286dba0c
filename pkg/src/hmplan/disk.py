"""Closed-form harmonic measure on the unit disk.

Points are complex numbers, angles are radians in (-pi, pi].  Arc ``j`` of a
circle partition ``thetas`` runs counter-clockwise from ``thetas[j]`` to
``thetas[(j + 1) % n]`` (0-based).  These formulas are exact and serve as the
reference the mesh-based coordinates are checked against.
"""
from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi
INTERIOR_GUARD = 1e-9


def check_disk_point(z):
    """A complex scalar, or a complex array when ``z`` is array-like."""
    if np.ndim(z) == 0:
        z = complex(z)
        if not abs(z) < 1.0 - INTERIOR_GUARD:
            raise ValueError(f"|z| = {abs(z)!r} is not strictly inside the unit disk")
        return z
    z = np.asarray(z, dtype=complex)
    if not np.all(np.abs(z) < 1.0 - INTERIOR_GUARD):
        raise ValueError(f"max |z| = {np.abs(z).max()!r} is not strictly inside the unit disk")
    return z


def check_partition(thetas) -> np.ndarray:
    """Validate a circle partition: strictly increasing angles in (-pi, pi]."""
    t = np.asarray(thetas, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise ValueError("a circle partition needs at least 2 angles")
    if not (np.all(t > -np.pi) and np.all(t <= np.pi)):
        raise ValueError("partition angles must lie in (-pi, pi]")
    if not np.all(np.diff(t) > 0):
        raise ValueError("partition angles must be strictly increasing")
    return t


def uniform_partition(n: int, offset: float = 0.0) -> np.ndarray:
    t = wrap_angle(offset + TWO_PI * np.arange(n) / n)
    return np.sort(t)


def wrap_angle(a):
    """Map angles into (-pi, pi]."""
    a = np.mod(np.asarray(a, dtype=float) + np.pi, TWO_PI) - np.pi
    return np.where(a <= -np.pi, a + TWO_PI, a)


def ccw_length(a, b):
    """Counter-clockwise angular distance from a to b, in (0, 2*pi]."""
    d = np.mod(np.asarray(b, dtype=float) - a, TWO_PI)
    return np.where(d <= 0.0, d + TWO_PI, d)


def poisson_kernel_disk(z, theta):
    z = check_disk_point(z)
    e = np.exp(1j * np.asarray(theta, dtype=float))
    return (1.0 - abs(z) ** 2) / (TWO_PI * np.abs(z - e) ** 2)


def antipode(z, theta):
    """Angle of the second point where the chord from e^{i theta} through z
    meets the circle.  ``z`` and ``theta`` broadcast."""
    z = check_disk_point(z)
    theta = np.asarray(theta, dtype=float)
    v = np.exp(1j * theta) - z
    return wrap_angle(np.angle(-v / np.conj(v) * np.exp(-1j * theta)))


def arc_measure_disk(z, start, stop):
    """Harmonic measure at z of the ccw arc from ``start`` to ``stop``."""
    return ccw_length(antipode(z, start), antipode(z, stop)) / TWO_PI


def harmonic_measures_disk(z, thetas) -> np.ndarray:
    """All n reduced coordinates of z for the partition (sums to 1)."""
    t = check_partition(thetas)
    psi = antipode(z, t)
    return ccw_length(psi, np.roll(psi, -1)) / TWO_PI


def harmonic_measure_disk(z, thetas, j: int) -> float:
    t = check_partition(thetas)
    n = len(t)
    if not 0 <= j < n:
        raise IndexError(f"arc index {j} out of range for n={n}")
    return float(arc_measure_disk(z, t[j], t[(j + 1) % n]))


def _grad_from_psi(z, psi_a, psi_b):
    g = 1j / (np.pi * (1.0 - abs(z) ** 2)) * (np.exp(1j * psi_b) - np.exp(1j * psi_a))
    return np.array([g.real, g.imag])


def grad_harmonic_measure_disk(z, thetas, j: int) -> np.ndarray:
    """Gradient of arc j's harmonic measure as an (x, y) vector."""
    t = check_partition(thetas)
    n = len(t)
    z = check_disk_point(z)
    psi = antipode(z, np.array([t[j], t[(j + 1) % n]]))
    return _grad_from_psi(z, psi[0], psi[1])


def grad_harmonic_measures_disk(z, thetas) -> np.ndarray:
    """(n, 2) array of all coordinate gradients."""
    t = check_partition(thetas)
    z = check_disk_point(z)
    psi = antipode(z, t)
    g = 1j / (np.pi * (1.0 - abs(z) ** 2)) * (np.exp(1j * np.roll(psi, -1)) - np.exp(1j * psi))
    return np.column_stack([g.real, g.imag])


def divergence_disk(z, thetas, generator) -> float:
    """Reduced divergence from the origin to z: sum_j phi_j(0) f(phi_j(z)/phi_j(0))."""
    t = check_partition(thetas)
    p0 = ccw_length(t, np.roll(t, -1)) / TWO_PI
    pz = harmonic_measures_disk(z, t)
    return float(np.sum(p0 * generator.f(pz / p0)))


def grad_divergence_disk(z, thetas, generator) -> np.ndarray:
    """Chain-rule gradient of :func:`divergence_disk` with respect to z."""
    t = check_partition(thetas)
    p0 = ccw_length(t, np.roll(t, -1)) / TWO_PI
    pz = harmonic_measures_disk(z, t)
    weights = generator.df(pz / p0)
    return weights @ grad_harmonic_measures_disk(z, t)


def mobius_map(a, z):
    """Disk automorphism z -> (z - a) / (1 - conj(a) z), sending a to 0."""
    a = check_disk_point(a)
    z = np.asarray(z, dtype=complex)
    return (z - a) / (1.0 - np.conj(a) * z)


def transport_partition(a, thetas):
    """Push partition breakpoints through :func:`mobius_map`.

    The map preserves cyclic order, so the sorted image is a rotation of the
    mapped angles.  Returns ``(new_thetas, shift)``: original arc ``j`` is arc
    ``(j - shift) % n`` of the new partition.
    """
    t = check_partition(thetas)
    mapped = wrap_angle(np.angle(mobius_map(a, np.exp(1j * t))))
    shift = int(np.argmin(mapped))
    return np.roll(mapped, -shift), shift
