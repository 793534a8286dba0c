"""Convex generators and reduced f-divergence distances between coordinate rows."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

TV_SMOOTHING = 1e-8


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class ConvexGenerator:
    """A strictly convex f on (0, inf) with f(1) = 0.

    ``f0`` is the limit f(0+) and ``fstar0`` the limit of f(x)/x as x -> inf
    (the value of the dual generator at 0+); either may be ``inf``.
    """

    name: str
    f: Callable
    df: Callable
    f0: float
    fstar0: float

    def __call__(self, x):
        return self.f(x)


def _kl_f(x):
    return -np.log(x)


def _kl_df(x):
    return -1.0 / np.asarray(x, dtype=float)


def _hel_f(x):
    return 2.0 * (1.0 - np.sqrt(x))


def _hel_df(x):
    return -1.0 / np.sqrt(x)


def _tv_f(x):
    return np.abs(1.0 - np.asarray(x, dtype=float))


def _tv_df(x):
    return np.sign(np.asarray(x, dtype=float) - 1.0)


def _tvs_f(x, eps=TV_SMOOTHING):
    x = np.asarray(x, dtype=float)
    return np.sqrt((1.0 - x) ** 2 + eps**2) - eps


def _tvs_df(x, eps=TV_SMOOTHING):
    x = np.asarray(x, dtype=float)
    return (x - 1.0) / np.sqrt((1.0 - x) ** 2 + eps**2)


KL = ConvexGenerator("kl", _kl_f, _kl_df, f0=np.inf, fstar0=0.0)
HELLINGER = ConvexGenerator("hellinger", _hel_f, _hel_df, f0=2.0, fstar0=0.0)
# |1 - x| is convex but not strictly; kept for the duality identity and for
# distance fields, which never need f'.
TV = ConvexGenerator("tv", _tv_f, _tv_df, f0=1.0, fstar0=1.0)
TV_SMOOTHED = ConvexGenerator(
    "tv_smoothed",
    _tvs_f,
    _tvs_df,
    f0=float(np.sqrt(1.0 + TV_SMOOTHING**2) - TV_SMOOTHING),
    fstar0=1.0,
)

_BUILTIN = {g.name: g for g in (KL, HELLINGER, TV, TV_SMOOTHED)}


def make_generator(kind: str, f=None, df=None, f0=None, fstar0=None, name=None) -> ConvexGenerator:
    """Return a built-in generator ('kl', 'hellinger', 'tv', 'tv_smoothed')
    or validate and wrap a custom one (kind='custom')."""
    if kind in _BUILTIN:
        return _BUILTIN[kind]
    if kind != "custom":
        raise GeneratorError(f"unknown generator {kind!r}")
    if f is None or df is None or f0 is None or fstar0 is None:
        raise GeneratorError("custom generator needs f, df, f0 and fstar0")
    g = ConvexGenerator(name or "custom", f, df, float(f0), float(fstar0))
    validate_generator(g)
    return g


def validate_generator(g: ConvexGenerator, samples: int = 1000, seed: int = 0) -> None:
    """Check f(1) = 0 and sampled convexity; raise GeneratorError otherwise."""
    f1 = float(g.f(1.0))
    if not abs(f1) <= 1e-14:
        raise GeneratorError(f"{g.name}: f(1) = {f1!r}, expected 0")
    rng = np.random.default_rng(seed)
    xyz = np.sort(np.exp(rng.uniform(np.log(1e-6), np.log(1e6), size=(samples, 3))), axis=1)
    x, y, z = xyz.T
    fx, fy, fz = g.f(x), g.f(y), g.f(z)
    lam = (z - y) / (z - x)
    chord = lam * fx + (1.0 - lam) * fz
    scale = np.abs(fx) + np.abs(fy) + np.abs(fz) + 1.0
    bad = fy > chord + 1e-9 * scale
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise GeneratorError(f"{g.name}: convexity violated at x={x[i]:.3g}, y={y[i]:.3g}, z={z[i]:.3g}")
    # rule out affine f, which passes the sampled test with equality
    if not g.f(1.0) < 0.5 * (g.f(0.5) + g.f(1.5)):
        raise GeneratorError(f"{g.name}: not strictly convex around 1")


def dual(g: ConvexGenerator) -> ConvexGenerator:
    """f*(x) = x f(1/x); swapping the limits f(0+) and f*(0+)."""
    f, df = g.f, g.df

    def fs(x):
        x = np.asarray(x, dtype=float)
        return x * f(1.0 / x)

    def dfs(x):
        x = np.asarray(x, dtype=float)
        return f(1.0 / x) - df(1.0 / x) / x

    name = g.name[:-1] if g.name.endswith("*") else g.name + "*"
    return ConvexGenerator(name, fs, dfs, f0=g.fstar0, fstar0=g.f0)


def _check_rows(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"coordinate rows differ in length: {x.shape} vs {y.shape}")
    return x, y


def reduced_divergence(x, y, g: ConvexGenerator) -> float:
    """sum_j x_j f(y_j / x_j) for strictly positive coordinate rows."""
    x, y = _check_rows(x, y)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("coordinate rows must be strictly positive")
    d = float(np.sum(x * g.f(y / x)))
    return max(d, 0.0)


def euclidean_sq(x, y) -> float:
    x, y = _check_rows(x, y)
    return float(np.sum((x - y) ** 2))


def pairwise_divergence(X, Y, g: ConvexGenerator | None) -> np.ndarray:
    """Matrix D[a, b] = d(X[a], Y[b]); ``g=None`` selects squared Euclidean.

    Zero entries use the limits 0 * f(y/0) = y * fstar0 and x * f(0/x) =
    x * f0, so boundary rows (indicator-like coordinates) are allowed.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise ValueError("coordinate rows differ in length")
    if g is None:
        sq = (X**2).sum(1)[:, None] + (Y**2).sum(1)[None, :] - 2.0 * X @ Y.T
        return np.maximum(sq, 0.0)
    out = np.empty((len(X), len(Y)))
    for b in range(len(Y)):
        out[:, b] = _column(X, Y[b], g)
    return np.maximum(out, 0.0)


def divergence_to(X, y, g: ConvexGenerator | None) -> np.ndarray:
    """Vector d(X[a], y) over the rows of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)[None, :]
    if g is None:
        return ((X - y) ** 2).sum(axis=1)
    return np.maximum(_terms(X, y, g).sum(axis=1), 0.0)


def divergence_from(x, Y, g: ConvexGenerator | None) -> np.ndarray:
    """Vector d(x, Y[b]) over the rows of Y."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    x = np.asarray(x, dtype=float)[None, :]
    if g is None:
        return ((Y - x) ** 2).sum(axis=1)
    return np.maximum(_terms(x, Y, g).sum(axis=1), 0.0)


def _column(X, y, g):
    return _terms(X, y[None, :], g).sum(axis=1)


def _terms(P, Q, g):
    """Elementwise P f(Q / P) with the zero limits filled in."""
    P, Q = np.broadcast_arrays(P, Q)
    ppos, qpos = P > 0, Q > 0
    both = ppos & qpos
    safe_p = np.where(both, P, 1.0)
    safe_q = np.where(both, Q, 1.0)
    out = np.where(both, safe_p * g.f(safe_q / safe_p), 0.0)
    with np.errstate(invalid="ignore"):
        out = np.where(ppos & ~qpos, P * g.f0, out)
        out = np.where(~ppos & qpos, Q * g.fstar0, out)
    return out
