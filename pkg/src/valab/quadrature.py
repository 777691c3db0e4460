"""Shared deterministic quadrature rules on circles and spheres.

Everything here is a fixed, seedless rule: given the same orders the node
and weight arrays are bit-identical, which is what makes experiment reports
reproducible.  All sphere measures are normalized to total mass 1, matching
the convention used by the valuation and transform modules.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def gauss_legendre(order: int, a: float = -1.0, b: float = 1.0):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def circle_nodes(count: int):
    """Uniform angles on [0, 2pi) with weights summing to 1 (periodic trapezoid)."""
    theta = 2.0 * np.pi * np.arange(count) / count
    return theta, np.full(count, 1.0 / count)


def adaptive_circle_integral(fn, lo: float, hi: float, rtol: float = 1e-10,
                             atol: float = 1e-14, max_depth: int = 30) -> tuple[float, float]:
    """Adaptive Gauss-Legendre integral of ``fn`` over the angle interval [lo, hi].

    ``fn`` must accept a vector of angles and return a vector of values.
    Returns (integral, error_estimate); the integral carries the plain
    d(theta) measure, callers apply any 1/(2 pi) normalization.
    """
    def panel(a, b):
        x7, w7 = gauss_legendre(7, a, b)
        x15, w15 = gauss_legendre(15, a, b)
        coarse = float(w7 @ fn(x7))
        fine = float(w15 @ fn(x15))
        return fine, abs(fine - coarse)

    total, err = panel(lo, hi)
    stack = [(lo, hi, total, err, 0)]
    result = 0.0
    result_err = 0.0
    budget = abs(total) * rtol + atol
    while stack:
        a, b, val, e, depth = stack.pop()
        if e <= max(budget * (b - lo + 1e-300) / (hi - lo + 1e-300), atol) or depth >= max_depth:
            result += val
            result_err += e
            continue
        m = 0.5 * (a + b)
        v1, e1 = panel(a, m)
        v2, e2 = panel(m, b)
        budget = max(budget, (abs(result) + abs(v1) + abs(v2)) * rtol + atol)
        stack.append((a, m, v1, e1, depth + 1))
        stack.append((m, b, v2, e2, depth + 1))
    return result, result_err


@lru_cache(maxsize=64)
def sphere_product_grid(sphere_dim: int, order: int):
    """Product quadrature on the unit sphere S^sphere_dim in R^(sphere_dim+1).

    Recursively combines Gauss-Legendre rules in the polar cosines with a
    uniform azimuthal rule; weights are normalized to sum to 1.  Exact (to
    rounding) for polynomials of degree below roughly ``order``.
    """
    if sphere_dim < 1:
        raise ValueError("sphere_product_grid needs sphere_dim >= 1")
    if sphere_dim == 1:
        theta, w = circle_nodes(max(4, 2 * order))
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
        return pts, w
    sub_pts, sub_w = sphere_product_grid(sphere_dim - 1, order)
    t, wt = gauss_legendre(order)
    # measure on S^d: proportional to (1 - t^2)^((d-2)/2) dt x dS^(d-1)
    dens = (1.0 - t ** 2) ** ((sphere_dim - 2) / 2.0)
    wt = wt * dens
    wt = wt / wt.sum()
    pts = np.concatenate([
        np.concatenate([np.full((sub_pts.shape[0], 1), ti),
                        np.sqrt(max(1.0 - ti * ti, 0.0)) * sub_pts], axis=1)
        for ti in t
    ])
    w = np.concatenate([wi * sub_w for wi in wt])
    return pts, w


@lru_cache(maxsize=64)
def sphere_split_polar_grid(sphere_dim: int, order: int):
    """Sphere quadrature split at the equator of the first coordinate.

    Integrands with an |first coordinate| factor are smooth on each
    hemisphere, so splitting the polar integral at t = 0 keeps Gauss-Legendre
    spectrally accurate.  Weights are normalized to total mass 1.
    """
    if sphere_dim == 1:
        rows = []
        for a, b in ((-np.pi / 2, np.pi / 2), (np.pi / 2, 3 * np.pi / 2)):
            th, w = gauss_legendre(order, a, b)
            rows.append((np.column_stack([np.cos(th), np.sin(th)]), w / (2.0 * np.pi)))
        pts = np.concatenate([r[0] for r in rows])
        w = np.concatenate([r[1] for r in rows])
        return pts, w
    sub_pts, sub_w = sphere_product_grid(sphere_dim - 1, order)
    pieces = []
    for a, b in ((0.0, 1.0), (-1.0, 0.0)):
        t, wt = gauss_legendre(order, a, b)
        dens = (1.0 - t ** 2) ** ((sphere_dim - 2) / 2.0)
        pieces.append((t, wt * dens))
    norm = sum(p[1].sum() for p in pieces)
    pts_all = []
    w_all = []
    for t, wt in pieces:
        for ti, wi in zip(t, wt):
            pts_all.append(np.concatenate([
                np.full((sub_pts.shape[0], 1), ti),
                np.sqrt(max(1.0 - ti * ti, 0.0)) * sub_pts], axis=1))
            w_all.append((wi / norm) * sub_w)
    return np.concatenate(pts_all), np.concatenate(w_all)


def fibonacci_sphere(count: int) -> np.ndarray:
    """Quasi-uniform points on the unit 2-sphere (golden-spiral layout)."""
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def uniform_sphere_samples(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random points on S^(dim-1) in R^dim."""
    x = rng.standard_normal((count, dim))
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    # resample the (measure-zero) degenerate rows instead of dividing by ~0
    bad = norms[:, 0] < 1e-12
    while np.any(bad):
        x[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        bad = norms[:, 0] < 1e-12
    return x / norms
