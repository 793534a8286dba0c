import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from hmplan import disk
from hmplan.divergence import HELLINGER, KL, TV_SMOOTHED
from hmplan.verify import random_disk_point, random_partition

radii = st.floats(0.0, 0.95)
angles = st.floats(-np.pi, np.pi, exclude_min=True)


def disk_points():
    return st.builds(lambda r, a: complex(r * np.cos(a), r * np.sin(a)), radii, angles)


def partitions(nmin=2, nmax=16):
    return st.builds(
        lambda n, seed: random_partition(np.random.default_rng(seed), n, min_gap=1e-2),
        st.integers(nmin, nmax), st.integers(0, 2**32 - 1),
    )


def chord_antipode(z, theta):
    """Second intersection of the line through e^{i theta} and z with the
    circle, from the quadratic |p + t d|^2 = 1 (one root is t = 0)."""
    p = np.array([np.cos(theta), np.sin(theta)])
    d = np.array([z.real, z.imag]) - p
    t = -2.0 * (p @ d) / (d @ d)
    q = p + t * d
    return np.arctan2(q[1], q[0])


def poisson_arc(z, a, b):
    """Harmonic measure of the ccw arc a -> b by adaptive quadrature."""
    if b <= a:
        b += 2 * np.pi
    val, _ = quad(lambda t: float(disk.poisson_kernel_disk(z, t)), a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


# -- Poisson kernel ------------------------------------------------------------------

def test_kernel_at_center():
    assert disk.poisson_kernel_disk(0, 1.234) == pytest.approx(1 / (2 * np.pi), abs=1e-15)


def test_kernel_direct_substitution():
    assert disk.poisson_kernel_disk(0.5, 0.0) == pytest.approx(3 / (2 * np.pi), rel=1e-14)


@pytest.mark.parametrize("z", [0.0, 0.3 + 0.4j, -0.9j, 0.7 - 0.1j])
def test_kernel_integrates_to_one(z):
    val, _ = quad(lambda t: float(disk.poisson_kernel_disk(z, t)), -np.pi, np.pi, epsabs=1e-13, limit=200)
    assert abs(val - 1.0) < 1e-10


def test_boundary_point_rejected():
    with pytest.raises(ValueError):
        disk.poisson_kernel_disk(1.0, 0.0)
    with pytest.raises(ValueError):
        disk.antipode(0.99999999999, 0.0)


# -- antipodes ---------------------------------------------------------------------

def test_antipode_at_center():
    assert disk.antipode(0, 0.3) == pytest.approx(0.3 - np.pi, abs=1e-15)


def test_antipode_diameter():
    assert abs(disk.wrap_angle(disk.antipode(0.5, np.pi))) < 1e-15


def test_antipode_chord_value():
    psi = disk.antipode(0.5, np.pi / 2)
    assert psi == pytest.approx(np.arctan2(-0.6, 0.8), abs=1e-14)
    assert psi == pytest.approx(-0.6435011087932844, abs=1e-12)
    v = np.exp(1j * np.pi / 2) - 0.5
    w = np.exp(1j * psi) - 0.5
    assert abs(v) * abs(w) == pytest.approx(0.75, abs=1e-14)


@settings(max_examples=300, deadline=None)
@given(disk_points(), angles)
def test_antipode_matches_chord_intersection(z, theta):
    a = disk.antipode(z, theta)
    b = chord_antipode(z, theta)
    assert abs(disk.wrap_angle(a - b)) < 1e-9


@settings(max_examples=300, deadline=None)
@given(disk_points(), angles)
def test_chord_identity_and_involution(z, theta):
    v = np.exp(1j * theta) - z
    w = np.exp(1j * disk.antipode(z, theta)) - z
    assert abs(1 / np.conj(v) + w / (1 - abs(z) ** 2)) < 1e-12
    back = disk.antipode(z, disk.antipode(z, theta))
    assert abs(disk.wrap_angle(back - theta)) < 1e-10


# -- harmonic measure --------------------------------------------------------------

def test_uniform_quarters_at_center():
    t = disk.uniform_partition(4)
    assert np.allclose(disk.harmonic_measures_disk(0, t), 0.25, atol=1e-15)


def test_half_circle_value_two_oracles():
    t = np.array([-np.pi / 2, np.pi / 2])
    phi = disk.harmonic_measure_disk(0.5, t, 0)
    assert phi == pytest.approx(poisson_arc(0.5, -np.pi / 2, np.pi / 2), abs=1e-9)
    # closed form: 1/2 + (2/pi) atan(r) for the half disk facing z = r
    assert phi == pytest.approx(0.5 + 2 / np.pi * np.arctan(0.5), abs=1e-14)
    assert phi == pytest.approx(0.7952, abs=5e-5)


@settings(max_examples=60, deadline=None)
@given(disk_points(), partitions(2, 8), st.integers(0, 7))
def test_measure_matches_quadrature(z, t, j):
    j = j % len(t)
    ref = poisson_arc(z, t[j], t[(j + 1) % len(t)])
    assert disk.harmonic_measure_disk(z, t, j) == pytest.approx(ref, abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(disk_points(), partitions())
def test_partition_of_unity(z, t):
    phi = disk.harmonic_measures_disk(z, t)
    assert abs(phi.sum() - 1) < 1e-12
    assert (phi > 0).all()


def test_arc_index_range():
    with pytest.raises(IndexError):
        disk.harmonic_measure_disk(0, disk.uniform_partition(4), 4)


@pytest.mark.parametrize("bad", [[0.1], [0.5, 0.2, 1.0], [-4.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
def test_partition_validation(bad):
    with pytest.raises(ValueError):
        disk.harmonic_measures_disk(0, bad)


# -- gradients -----------------------------------------------------------------------

def test_gradient_at_center_points_to_arc_middle():
    g = disk.grad_harmonic_measure_disk(0, [0.0, np.pi / 2, np.pi], 0)
    assert np.allclose(g, [1 / np.pi, 1 / np.pi], atol=1e-15)


def _fd_grad(fun, z, h=1e-6):
    return np.array([fun(z + h) - fun(z - h), fun(z + 1j * h) - fun(z - 1j * h)]) / (2 * h)


@settings(max_examples=200, deadline=None)
@given(disk_points(), partitions(3, 16), st.integers(0, 15))
def test_gradient_matches_finite_differences(z, t, j):
    j = j % len(t)
    g = disk.grad_harmonic_measure_disk(z, t, j)
    fd = _fd_grad(lambda w: disk.harmonic_measure_disk(w, t, j), z)
    assert np.linalg.norm(g - fd) <= 1e-6 * np.linalg.norm(g) + 1e-9


@settings(max_examples=300, deadline=None)
@given(disk_points(), partitions())
def test_gradients_sum_to_zero(z, t):
    G = disk.grad_harmonic_measures_disk(z, t)
    assert np.abs(G.sum(axis=0)).max() * (1 - abs(z) ** 2) < 1e-12


def test_all_gradients_agree_with_single():
    t = disk.uniform_partition(5, 0.2)
    z = 0.3 - 0.6j
    G = disk.grad_harmonic_measures_disk(z, t)
    for j in range(5):
        assert np.allclose(G[j], disk.grad_harmonic_measure_disk(z, t, j), atol=1e-15)


# smoothed TV has f' slope 1/eps = 1e8 at 1, amplifying ratio rounding
@pytest.mark.parametrize("g, tol", [(KL, 1e-14), (HELLINGER, 1e-14), (TV_SMOOTHED, 1e-6)])
def test_divergence_gradient_vanishes_at_center(g, tol):
    t = random_partition(np.random.default_rng(1), 6)
    assert np.linalg.norm(disk.grad_divergence_disk(0, t, g)) < tol


@settings(max_examples=100, deadline=None)
@given(disk_points(), partitions(3, 12), st.sampled_from([KL, HELLINGER]))
def test_divergence_gradient_matches_finite_differences(z, t, g):
    grad = disk.grad_divergence_disk(z, t, g)
    fd = _fd_grad(lambda w: disk.divergence_disk(w, t, g), z)
    assert np.linalg.norm(grad - fd) <= 1e-5 * np.linalg.norm(grad) + 1e-8


def test_kl_gradient_nonzero_uniform_eight():
    rng = np.random.default_rng(11)
    t = disk.uniform_partition(8)
    for _ in range(1000):
        z = random_disk_point(rng, 1e-3, 0.95)
        if abs(z) <= 1e-3:
            continue
        assert np.linalg.norm(disk.grad_divergence_disk(z, t, KL)) > 0


def test_two_arcs_antipodal_gradient_is_horizontal():
    t = np.array([-np.pi / 2, np.pi / 2])
    # on the zero locus the distance is minimal: no component along it
    g = disk.grad_divergence_disk(0.4j, t, KL)
    assert abs(g[1]) < 1e-12
    assert disk.divergence_disk(0.4j, t, KL) < 1e-12
    # just off the locus the gradient points away from it
    g = disk.grad_divergence_disk(0.1 + 0.4j, t, KL)
    assert g[0] > 1e-3


def test_two_arcs_generic_zero_locus_is_circle_through_origin():
    t1, t2 = -0.4, 1.9
    t = np.array([t1, t2])
    a, b = np.exp(1j * t1), np.exp(1j * t2)
    # circumcircle of a, b and 0
    M = np.array([[2 * a.real, 2 * a.imag], [2 * b.real, 2 * b.imag]])
    c = complex(*np.linalg.solve(M, [1.0, 1.0]))
    r = abs(c)
    phi0 = disk.harmonic_measures_disk(0, t)
    hits = 0
    for s in np.linspace(0, 2 * np.pi, 200, endpoint=False):
        z = c + r * np.exp(1j * s)
        if abs(z) > 0.95:
            continue
        hits += 1
        assert np.allclose(disk.harmonic_measures_disk(z, t), phi0, atol=1e-12)
        if abs(z) > 1e-3:
            tangent = np.array([-np.sin(s), np.cos(s)])
            g = disk.grad_divergence_disk(z, t, HELLINGER)
            assert abs(g @ tangent) < 1e-10
    assert hits > 20


# -- Mobius maps -----------------------------------------------------------------------

def test_mobius_identity_and_center():
    z = np.array([0.1 + 0.2j, -0.5j, np.exp(0.7j)])
    assert np.allclose(disk.mobius_map(0, z), z)
    assert abs(disk.mobius_map(0.3 - 0.4j, 0.3 - 0.4j)) < 1e-15


@settings(max_examples=200, deadline=None)
@given(disk_points(), disk_points(), partitions(2, 12), st.floats(0.0, 0.8), angles)
def test_mobius_preserves_harmonic_measure(z, _, t, ra, aa):
    a = ra * np.exp(1j * aa)
    w = disk.mobius_map(a, z)
    if abs(w) >= 1 - 1e-6:
        return
    t2, shift = disk.transport_partition(a, t)
    mapped = np.roll(disk.harmonic_measures_disk(w, t2), shift)
    assert np.allclose(mapped, disk.harmonic_measures_disk(z, t), atol=1e-10)


def test_mobius_keeps_circle():
    a = 0.6 + 0.2j
    w = disk.mobius_map(a, np.exp(1j * np.linspace(-3, 3, 50)))
    assert np.allclose(np.abs(w), 1.0, atol=1e-14)


def test_antipode_broadcasts_over_points():
    z = np.array([0.1 + 0.2j, -0.5j, 0.7])
    th = np.array([0.3, -2.0, 1.0])
    got = disk.antipode(z, th)
    assert np.array_equal(got, [disk.antipode(a, b) for a, b in zip(z, th)])
    with pytest.raises(ValueError):
        disk.antipode(np.array([0.1, 1.0]), 0.0)
