"""Face enumeration, exterior angles as spherical regions, and integration
of kernels over those regions with the mass-1 normalized sphere measure.

The membership test for an exterior-angle region is always the defining
vertex inequality  u . (p - x) <= 0  for every vertex p of the parent body,
with x interior to the face.  Cone generators (incident facet normals) and
exact arcs are derived data; disagreements with the inequality test are
construction errors, never silently accepted.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import TOL, GeometryError, Polytope, convex_hull
from .quadrature import adaptive_circle_integral, uniform_sphere_samples


class FaceError(GeometryError):
    pass


class OddKernelError(ValueError):
    """A kernel failed its evenness spot-check."""


@dataclass(frozen=True, eq=False)
class Face:
    """A k-face: vertex ids in the parent, direction basis, k-volume."""

    parent: Polytope
    k: int
    vertex_ids: tuple
    dir_basis: np.ndarray       # (n, k), orthonormal
    kvol: float
    interior_point: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return self.parent.vertices[list(self.vertex_ids)]


@dataclass(frozen=True, eq=False)
class NormalRegion:
    """Exterior angle of a face, living in the unit sphere of the face's
    orthogonal complement.

    ``arc`` is (center_angle, half_width) in perp-basis coordinates when the
    complement is 2-dimensional, the string "full" for a full sphere, or
    None when no exact description is kept.
    """

    face: Face
    perp_basis: np.ndarray      # (n, n-k), orthonormal
    cone_generators: np.ndarray  # (G, n-k), unit rows, perp coordinates
    arc: Optional[object] = None

    @property
    def sphere_dim(self) -> int:
        return self.perp_basis.shape[1] - 1

    def contains(self, directions: np.ndarray, tol: float = TOL) -> np.ndarray:
        """Vertex-inequality membership for ambient unit directions (M, n)."""
        U = np.atleast_2d(directions)
        rel = self.face.parent.vertices - self.face.interior_point
        return np.max(U @ rel.T, axis=1) <= 10 * tol

    def contains_perp(self, coords: np.ndarray, tol: float = TOL) -> np.ndarray:
        """Membership for unit vectors given in perp-basis coordinates (M, n-k)."""
        return self.contains(np.atleast_2d(coords) @ self.perp_basis.T, tol)


def _orth_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(basis columns)."""
    n, k = basis.shape
    if k == 0:
        return np.eye(n)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, k:]


def _face_frame(points: np.ndarray, k: int, tol: float = TOL):
    base = points.mean(axis=0)
    centered = points - base
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > 1e3 * tol * max(1.0, s[0] if s.size else 0.0)))
    if rank != k:
        return None
    return base, vt[:k].T


def _convex_area_2d(coords: np.ndarray) -> float:
    """Area of the convex hull of 2D points (shoelace on the angular order)."""
    c = coords.mean(axis=0)
    rel = coords - c
    order = np.argsort(np.arctan2(rel[:, 1], rel[:, 0]))
    p = coords[order]
    x, y = p[:, 0], p[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _convex_volume(points: np.ndarray, k: int) -> float:
    """k-volume of the convex hull of points spanning a k-dimensional flat.

    Computed by a Gram-determinant triangulation: facets of the local hull
    are triangulated recursively and coned from the centroid.
    """
    base, basis = _face_frame(points, k) or (None, None)
    if base is None:
        raise FaceError("points do not span the requested dimension")
    coords = (points - base) @ basis
    return _convex_volume_local(coords)


def _convex_volume_local(coords: np.ndarray) -> float:
    k = coords.shape[1]
    if k == 1:
        return float(coords[:, 0].max() - coords[:, 0].min())
    if k == 2:
        return _convex_area_2d(coords)
    hull = convex_hull(coords)
    total = 0.0
    inc = hull.facet_incidence()
    centroid = hull.vertices.mean(axis=0)
    for f in range(hull.n_facets):
        fpts = hull.vertices[inc[:, f]]
        height = hull.facet_offsets[f] - hull.facet_normals[f] @ centroid
        sub_frame = _face_frame(fpts, k - 1)
        if sub_frame is None:
            continue
        sub_base, sub_basis = sub_frame
        total += abs(height) * _convex_volume_local((fpts - sub_base) @ sub_basis) / k
    return total


def _witness_check(P: Polytope, vertex_ids: tuple, normals: np.ndarray,
                   tol: float = TOL) -> bool:
    """Verify that some direction attains its maximum exactly on the face.

    The mean of the active facet normals is such a witness; the check guards
    the incidence bookkeeping against silent corruption.
    """
    w = normals.mean(axis=0)
    vals = P.vertices @ w
    top = vals.max()
    on = np.abs(vals - top) <= 1e2 * tol * max(1.0, abs(top))
    return set(np.where(on)[0]) == set(vertex_ids)


def enumerate_faces(P: Polytope, k: int) -> list[Face]:
    """All k-faces of P with positive k-volume, in deterministic order.

    Faces are found through facet incidence: a k-face of a d-dimensional
    body is the common active vertex set of d-k facets whose normals span a
    (d-k)-dimensional space, provided that vertex set is k-dimensional.
    Each face is re-verified with a supporting-direction witness.  When
    k equals the affine dimension the body itself is the single face.
    """
    n = P.ambient_dim
    if not (1 <= k <= n - 1):
        raise FaceError(f"k={k} out of range for ambient dimension {n}")
    d = P.affine_dim
    if k > d:
        return []
    if k == d:
        base, basis = _face_frame(P.vertices, d) or (None, None)
        vol = _convex_volume(P.vertices, d)
        return [Face(P, k, tuple(range(P.n_vertices)), basis, vol,
                     P.vertices.mean(axis=0))]

    inc = P.facet_incidence()
    hull_normals = P.facet_normals  # lie inside the hull direction space
    found: dict[tuple, np.ndarray] = {}
    r = d - k
    if r == 2:
        counts = inc.T.astype(np.int32) @ inc.astype(np.int32)
        cand_pairs = [(i, j) for i, j in zip(*np.nonzero(np.triu(counts >= k + 1, 1)))]
        combos = cand_pairs
    else:
        combos = itertools.combinations(range(P.n_facets), r)
    for combo in combos:
        rows = hull_normals[list(combo)]
        if np.linalg.matrix_rank(rows, tol=1e-6) < r:
            continue
        common = np.where(np.all(inc[:, list(combo)], axis=1))[0]
        if common.size < k + 1:
            continue
        pts = P.vertices[common]
        frame = _face_frame(pts, k)
        if frame is None:
            continue
        key = tuple(sorted(int(i) for i in common))
        if key not in found:
            found[key] = rows
    faces = []
    for key in sorted(found):
        pts = P.vertices[list(key)]
        base, basis = _face_frame(pts, k)
        if not _witness_check(P, key, found[key]):
            raise FaceError(f"face {key} failed its supporting-direction check")
        vol = _convex_volume(pts, k)
        if vol <= TOL:
            continue
        faces.append(Face(P, k, key, basis, vol, pts.mean(axis=0)))
    return faces


def exterior_angle(P: Polytope, F: Face) -> NormalRegion:
    """Exterior angle of P at F as a region in the sphere of F's complement.

    Cone generators come from the incident facets; for a 2-dimensional
    complement the exact arc is computed and its midpoint is re-verified
    with the vertex-inequality membership test.
    """
    if F.parent is not P:
        raise FaceError("face does not belong to this polytope")
    n = P.ambient_dim
    perp = _orth_complement(F.dir_basis)
    x = F.interior_point

    gens = []
    for nrm, off in zip(P.facet_normals, P.facet_offsets):
        if np.max(np.abs(F.points @ nrm - off)) <= 1e2 * TOL:
            g = perp.T @ nrm
            ng = np.linalg.norm(g)
            if ng > 1e-8:
                gens.append(g / ng)
    gens = np.array(gens) if gens else np.zeros((0, n - F.k))

    region = NormalRegion(F, perp, gens, arc=None)
    if n - F.k == 2:
        arc = _exact_arc(region)
        region = NormalRegion(F, perp, gens, arc=arc)
    return region


def _exact_arc(region: NormalRegion):
    """Exact arc of a codimension-2 exterior angle.

    Returns "full" for a full circle (face of a k-dimensional body equal to
    its own affine hull boundary-free direction, or any face whose normal
    cone fills the circle) or (center, half_width).
    """
    gens = region.cone_generators
    if gens.shape[0] >= 2:
        ang = np.arctan2(gens[:, 1], gens[:, 0])
        ref = ang[0]
        rel = np.mod(ang - ref + np.pi, 2 * np.pi) - np.pi
        lo, hi = float(rel.min()), float(rel.max())
        if hi - lo < np.pi - 1e-9:
            center = ref + 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            mid_dir = np.array([np.cos(center), np.sin(center)])
            if region.contains_perp(mid_dir[None, :])[0]:
                return float(center), float(half)
    # fall back to a membership scan refined by bisection
    return _scan_arc(region)


def _scan_arc(region: NormalRegion, grid: int = 4096):
    theta = 2 * np.pi * np.arange(grid) / grid
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    inside = region.contains_perp(dirs)
    if np.all(inside):
        return "full"
    if not np.any(inside):
        raise FaceError("empty exterior angle")
    # locate the inside run (unique for a convex cone region)
    trans = np.where(inside != np.roll(inside, 1))[0]
    if trans.size != 2:
        raise FaceError("exterior angle region is not a single arc")
    i_enter = trans[0] if inside[trans[0]] else trans[1]
    i_exit = trans[1] if inside[trans[0]] else trans[0]

    def bisect(a, b):
        # a outside, b inside (angles); refine the boundary between them
        fa, fb = a, b
        for _ in range(60):
            m = 0.5 * (fa + fb)
            if region.contains_perp(np.array([[np.cos(m), np.sin(m)]]))[0]:
                fb = m
            else:
                fa = m
        return fb

    step = 2 * np.pi / grid
    start = bisect(theta[i_enter] - step, theta[i_enter])
    stop = bisect(theta[i_exit % grid], theta[i_exit % grid] - step)
    if stop < start:
        stop += 2 * np.pi
    return float(0.5 * (start + stop)), float(0.5 * (stop - start))


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    stderr: float
    method: str
    samples: int = 0


def region_measure(region: NormalRegion, method: str = "exact",
                   samples: int = 100000, seed: int = 0) -> MeasureEstimate:
    """Normalized measure of the region in [0, 1]; total sphere mass is 1.

    ``exact`` is available only when the sphere of the complement has
    dimension at most 1; ``mc`` samples uniform directions and tests the
    defining vertex inequalities, reporting a standard error.
    """
    dim = region.sphere_dim
    if method == "exact":
        if dim > 1:
            raise ValueError("exact measure unavailable above sphere dimension 1")
        if dim == 0:
            pts = np.array([[1.0], [-1.0]])
            inside = region.contains_perp(pts)
            return MeasureEstimate(0.5 * float(inside.sum()), 0.0, "exact")
        if region.arc == "full":
            return MeasureEstimate(1.0, 0.0, "exact")
        _, half = region.arc
        return MeasureEstimate(half / np.pi, 0.0, "exact")
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    hits = 0
    batch = 200000
    done = 0
    while done < samples:
        count = min(batch, samples - done)
        pts = uniform_sphere_samples(dim + 1, count, rng)
        hits += int(np.sum(region.contains_perp(pts)))
        done += count
    p = hits / samples
    stderr = math.sqrt(max(p * (1 - p), 1e-12) / samples)
    return MeasureEstimate(p, stderr, "mc", samples)


def _evenness_spot_check(kernel, E: np.ndarray, perp: np.ndarray, seed: int = 11):
    rng = np.random.default_rng(seed)
    dim = perp.shape[1]
    probe = uniform_sphere_samples(dim, 4, rng) @ perp.T
    plus = kernel.eval_batch(E, probe)
    minus = kernel.eval_batch(E, -probe)
    scale = 1.0 + float(np.max(np.abs(plus)))
    if np.max(np.abs(plus - minus)) > 1e-8 * scale:
        raise OddKernelError(f"kernel {kernel.label!r} is not even in the line argument")


def integrate_kernel_over_region(kernel, F: Face, region: NormalRegion,
                                 method: str = "auto", samples: int = 100000,
                                 seed: int = 0, rtol: float = 1e-10) -> MeasureEstimate:
    """Integral of kernel(F_bar, l) over the region, normalized sphere measure.

    Codimension 1 evaluates the single normal direction with weight 1/2 per
    point of the 0-sphere; codimension 2 runs adaptive Gauss quadrature on
    the exact arc; higher codimension uses Monte Carlo with membership
    rejection.  The kernel must be even in l (spot-checked).
    """
    P = F.parent
    if kernel.ambient_dim != P.ambient_dim or kernel.degree != F.k:
        raise ValueError("kernel dimensions do not match the face")
    E = F.dir_basis
    perp = region.perp_basis
    _evenness_spot_check(kernel, E, perp)
    dim = region.sphere_dim

    if method == "auto":
        method = "exact" if dim <= 1 else "mc"

    if method == "exact":
        if dim > 1:
            raise ValueError("exact integration unavailable above sphere dimension 1")
        if dim == 0:
            pts = np.array([[1.0], [-1.0]])
            inside = region.contains_perp(pts)
            vals = kernel.eval_batch(E, pts @ perp.T)
            return MeasureEstimate(float(0.5 * np.sum(vals * inside)), 0.0, "exact")
        if region.arc == "full":
            lo, hi = 0.0, 2 * np.pi
        else:
            center, half = region.arc
            lo, hi = center - half, center + half
        if hi - lo <= 0:
            return MeasureEstimate(0.0, 0.0, "exact")

        def integrand(theta):
            dirs = np.column_stack([np.cos(theta), np.sin(theta)]) @ perp.T
            return kernel.eval_batch(E, dirs)

        val, err = adaptive_circle_integral(integrand, lo, hi, rtol=rtol)
        return MeasureEstimate(val / (2 * np.pi), err / (2 * np.pi), "exact")

    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    batch = 200000
    while done < samples:
        count = min(batch, samples - done)
        pts = uniform_sphere_samples(dim + 1, count, rng)
        inside = region.contains_perp(pts)
        vals = np.where(inside, kernel.eval_batch(E, pts @ perp.T), 0.0)
        total += float(vals.sum())
        total_sq += float((vals ** 2).sum())
        done += count
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return MeasureEstimate(mean, math.sqrt(var / samples), "mc", samples)
