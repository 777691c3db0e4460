"""Polytope geometry: hulls, halfspace intersections, Hausdorff distance,
and generators of the polytope sequences used by continuity experiments.

Conventions
-----------
* Coordinates are float64 numpy arrays.  Test bodies are kept inside a ball
  of radius ~10 so the single global tolerance ``TOL`` is meaningful for
  incidence and support tests.
* A facet is stored as (unit outward normal, offset) encoding the inequality
  ``normal . x <= offset``.  Lower-dimensional bodies are first-class: their
  facets are facets inside the affine hull (normals lie in the hull's
  direction space) and the hull itself (base point plus orthonormal
  direction basis) is stored separately.
* Everything is immutable after construction and all operations are pure
  functions of their inputs; randomized operations take explicit seeds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

TOL = 1e-9

# brute-force hull search is quadratic-to-combinatorial in the input size;
# above this many points (full-dimensional input only) we hand off to Qhull
BRUTE_FORCE_LIMIT = 40


class GeometryError(ValueError):
    """Invalid geometric input or inconsistent construction."""


class EmptyFeasibleRegionError(GeometryError):
    """Halfspace intersection has no point."""


class UnboundedFeasibleRegionError(GeometryError):
    """Halfspace intersection has a nonzero recession cone."""


class ProjectionError(RuntimeError):
    """Nearest-point iteration hit its cap before certifying the duality gap."""


def as_points(points, dim: Optional[int] = None) -> np.ndarray:
    """Validate and stack an iterable of coordinate vectors into an (m, n) array."""
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.size == 0:
        raise GeometryError("empty point set")
    if arr.ndim != 2:
        raise GeometryError("points must be a sequence of coordinate vectors")
    if dim is not None and arr.shape[1] != dim:
        raise GeometryError(f"dimension mismatch: expected {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("non-finite coordinates")
    return arr


def dedupe_points(points: np.ndarray, tol: float = TOL) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] <= 1:
        return pts.copy()
    # collapse float-noise duplicates on a fine grid first, then do the exact
    # tolerance pass on the survivors
    grid = np.round(pts / max(tol / 10.0, 1e-14)).astype(np.int64)
    _, first = np.unique(grid, axis=0, return_index=True)
    pts = pts[np.sort(first)]
    k = pts.shape[0]
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    keep = np.ones(k, dtype=bool)
    t2 = tol * tol
    idx = np.arange(k)
    for i in range(k):
        if keep[i]:
            keep[(d2[i] <= t2) & (idx > i)] = False
    return pts[keep]


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex compact polytope in V-representation with derived facet data.

    ``facet_normals`` / ``facet_offsets`` describe facets within the affine
    hull; ``hull_point`` and ``hull_basis`` (orthonormal columns) pin the
    affine hull itself when ``affine_dim < ambient_dim``.
    """

    vertices: np.ndarray
    facet_normals: np.ndarray
    facet_offsets: np.ndarray
    affine_dim: int
    hull_point: np.ndarray
    hull_basis: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_facets(self) -> int:
        return self.facet_normals.shape[0]

    def support(self, direction) -> float:
        """Support function h(direction) = max over vertices of the dot product."""
        return float(np.max(self.vertices @ np.asarray(direction, dtype=float)))

    def contains(self, point, tol: float = TOL) -> bool:
        x = np.asarray(point, dtype=float)
        r = x - self.hull_point
        off_hull = r - self.hull_basis @ (self.hull_basis.T @ r)
        if np.linalg.norm(off_hull) > tol * 10:
            return False
        if self.n_facets == 0:
            return np.linalg.norm(x - self.vertices[0]) <= tol * 10
        return bool(np.all(self.facet_normals @ x <= self.facet_offsets + tol * 10))

    def facet_incidence(self, tol: float = TOL) -> np.ndarray:
        """Boolean (n_vertices, n_facets) matrix of vertex-on-facet incidences."""
        if self.n_facets == 0:
            return np.zeros((self.n_vertices, 0), dtype=bool)
        gap = self.facet_offsets[None, :] - self.vertices @ self.facet_normals.T
        return np.abs(gap) <= tol * 10

    def validate(self, tol: float = TOL) -> None:
        """Check the structural invariants; raises GeometryError on failure."""
        v = self.vertices
        if v.ndim != 2 or not np.all(np.isfinite(v)):
            raise GeometryError("bad vertex array")
        r = v - self.hull_point
        off = r - (r @ self.hull_basis) @ self.hull_basis.T
        if self.hull_basis.shape[1] != self.affine_dim:
            raise GeometryError("hull basis size does not match affine_dim")
        if np.max(np.linalg.norm(off, axis=1), initial=0.0) > 100 * tol:
            raise GeometryError("vertices leave the declared affine hull")
        if self.n_facets:
            slack = self.facet_offsets[None, :] - v @ self.facet_normals.T
            if slack.min() < -100 * tol:
                raise GeometryError("a vertex violates a facet inequality")
            support_counts = (np.abs(slack) <= 10 * tol).sum(axis=0)
            if np.any(support_counts < max(self.affine_dim, 1)):
                raise GeometryError("under-supported facet")
            norms = np.linalg.norm(self.facet_normals, axis=1)
            if np.max(np.abs(norms - 1.0)) > 100 * tol:
                raise GeometryError("facet normals not unit length")
        elif self.affine_dim > 0:
            raise GeometryError("positive-dimensional polytope without facets")

    def translate(self, shift) -> "Polytope":
        t = np.asarray(shift, dtype=float)
        return Polytope(self.vertices + t, self.facet_normals,
                        self.facet_offsets + self.facet_normals @ t,
                        self.affine_dim, self.hull_point + t, self.hull_basis)

    def scale(self, factor: float) -> "Polytope":
        if factor <= 0:
            raise GeometryError("scale factor must be positive; use reflect() for -P")
        return Polytope(self.vertices * factor, self.facet_normals,
                        self.facet_offsets * factor, self.affine_dim,
                        self.hull_point * factor, self.hull_basis)

    def reflect(self) -> "Polytope":
        """The point reflection -P."""
        return Polytope(-self.vertices, -self.facet_normals, self.facet_offsets,
                        self.affine_dim, -self.hull_point, self.hull_basis)

    def rotate(self, R) -> "Polytope":
        R = np.asarray(R, dtype=float)
        return Polytope(self.vertices @ R.T, self.facet_normals @ R.T,
                        self.facet_offsets, self.affine_dim,
                        R @ self.hull_point, R @ self.hull_basis)

    def to_json(self) -> dict:
        return {"dim": self.ambient_dim, "vertices": self.vertices.tolist()}

    @staticmethod
    def from_json(data: dict) -> "Polytope":
        verts = as_points(data["vertices"], dim=int(data["dim"]))
        return convex_hull(verts)


def _affine_frame(points: np.ndarray, tol: float = TOL):
    """Base point, orthonormal direction basis and affine dimension of a point set."""
    base = points.mean(axis=0)
    centered = points - base
    if points.shape[0] == 1:
        return base, np.zeros((points.shape[1], 0)), 0
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > 1e3 * tol * scale))
    return base, vt[:rank].T, rank


def _hyperplane_through(coords: np.ndarray, tol: float = TOL):
    """Unit normal and offset of the hyperplane through d affinely independent points.

    Returns None when the points are affinely dependent.
    """
    d = coords.shape[1]
    diffs = coords[1:] - coords[0]
    _, s, vt = np.linalg.svd(diffs, full_matrices=True)
    if d > 1 and (s.size < d - 1 or s[d - 2] <= 1e3 * tol * max(1.0, s[0])):
        return None
    normal = vt[-1]
    return normal, float(normal @ coords[0])


def _polytope_from_planes(points: np.ndarray, planes: list[tuple[np.ndarray, float]],
                          base: np.ndarray, basis: np.ndarray, tol: float = TOL) -> Polytope:
    """Assemble a Polytope from candidate supporting hyperplanes in hull coordinates.

    ``points`` are hull coordinates of the input points; planes are
    (unit normal, offset) pairs already oriented outward.  Dedupes planes,
    selects vertices (points whose active plane normals span the hull), and
    re-expresses everything in ambient coordinates.
    """
    d = basis.shape[1]
    normals: list[np.ndarray] = []
    offsets: list[float] = []
    for normal, offset in planes:
        dup = False
        for n2, o2 in zip(normals, offsets):
            if np.linalg.norm(normal - n2) <= 1e-7 and abs(offset - o2) <= 1e-7:
                dup = True
                break
        if not dup:
            normals.append(normal)
            offsets.append(offset)
    N = np.array(normals)
    O = np.array(offsets)

    gap = O[None, :] - points @ N.T
    active = np.abs(gap) <= 10 * tol
    vertex_mask = np.zeros(points.shape[0], dtype=bool)
    for i in range(points.shape[0]):
        rows = N[active[i]]
        if rows.shape[0] >= d and np.linalg.matrix_rank(rows, tol=1e-6) >= d:
            vertex_mask[i] = True
    if not np.any(vertex_mask):
        raise GeometryError("no vertices found; degenerate or inconsistent input")
    verts_local = dedupe_points(points[vertex_mask], tol=10 * tol)

    # keep only facets supported by at least d vertices
    gap_v = O[None, :] - verts_local @ N.T
    keep = (np.abs(gap_v) <= 10 * tol).sum(axis=0) >= d
    N, O = N[keep], O[keep]

    verts_amb = base + verts_local @ basis.T
    normals_amb = N @ basis.T
    offsets_amb = O + normals_amb @ base if N.shape[0] else np.zeros(0)
    poly = Polytope(verts_amb, normals_amb, offsets_amb, d, base, basis)
    poly.validate()
    return poly


def _brute_force_planes(coords: np.ndarray, tol: float = TOL):
    """All supporting hyperplanes of a d-dimensional point cloud, by subset search."""
    m, d = coords.shape
    planes = []
    for idx in itertools.combinations(range(m), d):
        hp = _hyperplane_through(coords[list(idx)], tol)
        if hp is None:
            continue
        normal, offset = hp
        gaps = coords @ normal - offset
        hi, lo = gaps.max(), gaps.min()
        if hi <= 10 * tol:
            planes.append((normal, offset))
        elif lo >= -10 * tol:
            planes.append((-normal, -offset))
    return planes


def _qhull_planes(coords: np.ndarray):
    from scipy.spatial import ConvexHull as _Qhull

    hull = _Qhull(coords)
    eqs = hull.equations  # rows (normal, -offset) with normal.x + c <= 0
    return [(eq[:-1] / np.linalg.norm(eq[:-1]), float(-eq[-1] / np.linalg.norm(eq[:-1])))
            for eq in eqs]


def convex_hull(points, tol: float = TOL) -> Polytope:
    """Convex hull with irredundant vertices and a full facet list.

    Brute-force supporting-hyperplane search over affinely independent point
    subsets at desk scale; large full-dimensional inputs are handed to Qhull
    behind the same contract (same vertex/facet post-processing and the same
    validation).  Lower-dimensional inputs always take the brute-force path
    in affine-hull coordinates.
    """
    pts = dedupe_points(as_points(points), tol)
    base, basis, d = _affine_frame(pts, tol)
    if d == 0:
        return Polytope(pts[:1], np.zeros((0, pts.shape[1])), np.zeros(0), 0,
                        pts[0], np.zeros((pts.shape[1], 0)))
    coords = (pts - base) @ basis
    if d == 1:
        t = coords[:, 0]
        planes = [(np.array([1.0]), float(t.max())), (np.array([-1.0]), float(-t.min()))]
    elif pts.shape[0] > BRUTE_FORCE_LIMIT and d == pts.shape[1]:
        planes = _qhull_planes(coords)
    else:
        planes = _brute_force_planes(coords, tol)
    if not planes:
        raise GeometryError("facet search found no supporting hyperplanes")
    return _polytope_from_planes(coords, planes, base, basis, tol)


def _linprog(c, A, b, extra_row=None, extra_rhs=None):
    from scipy.optimize import linprog

    A_ub = A if extra_row is None else np.vstack([A, extra_row])
    b_ub = b if extra_row is None else np.append(b, extra_rhs)
    return linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(None, None), method="highs")


def hrep_polytope(normals, offsets, tol: float = TOL) -> Polytope:
    """Bounded intersection of halfspaces {x : normals[i] . x <= offsets[i]}.

    Vertex enumeration is brute force over n-subsets of constraints.  Empty
    and unbounded inputs raise distinct errors.
    """
    A = as_points(normals)
    b = np.asarray(offsets, dtype=float)
    if b.shape != (A.shape[0],):
        raise GeometryError("offsets length must match the number of normals")
    n = A.shape[1]

    res = _linprog(np.zeros(n), A, b)
    if res.status == 2:
        raise EmptyFeasibleRegionError("halfspace intersection is empty")

    # recession cone probe: any unit coordinate direction realizable in
    # {d : A d <= 0} certifies unboundedness
    for j in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[j] = sign
            probe = _linprog(-c, A, np.zeros(A.shape[0]), extra_row=c, extra_rhs=1.0)
            if probe.status == 0 and -probe.fun > 0.5:
                raise UnboundedFeasibleRegionError(
                    "halfspace intersection has a nonzero recession direction")

    candidates = []
    for idx in itertools.combinations(range(A.shape[0]), n):
        sub = A[list(idx)]
        if abs(np.linalg.det(sub)) <= 1e-12 * max(1.0, np.abs(sub).max()) ** n:
            continue
        x = np.linalg.solve(sub, b[list(idx)])
        if np.all(A @ x <= b + 10 * tol):
            candidates.append(x)
    if not candidates:
        raise GeometryError("no vertices found for a bounded feasible region")
    return convex_hull(dedupe_points(np.array(candidates), 10 * tol), tol)


def project_point(P: Polytope, point, gap_tol: float = 1e-10, max_iter: int = 100000):
    """Euclidean projection of ``point`` onto P via Wolfe's min-norm-point method.

    Returns (nearest_point, distance).  Stops when the Frank-Wolfe duality
    gap of the squared distance drops below ``gap_tol``; exceeding
    ``max_iter`` raises ProjectionError rather than silently approximating.
    """
    x = np.asarray(point, dtype=float)
    Z = P.vertices - x
    G = Z @ Z.T
    diag = np.diag(G)
    S = [int(np.argmin(diag))]
    lam = np.array([1.0])
    for _ in range(max_iter):
        w = lam @ Z[S]
        wz = Z @ w
        gap = float(w @ w - wz.min())
        if gap <= gap_tol:
            return x + w, float(np.linalg.norm(w))
        j = int(np.argmin(wz))
        if j not in S:
            S.append(j)
            lam = np.append(lam, 0.0)
        # minor cycle: affine-optimal weights over S, trimmed to the simplex
        while True:
            k = len(S)
            M = np.zeros((k + 1, k + 1))
            M[:k, :k] = G[np.ix_(S, S)]
            M[:k, k] = 1.0
            M[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            alpha = np.linalg.lstsq(M, rhs, rcond=None)[0][:k]
            if np.all(alpha > 1e-12):
                lam = alpha
                break
            neg = alpha <= 1e-12
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(lam - alpha > 1e-300, lam / (lam - alpha), np.inf)
            theta = float(np.min(ratios[neg]))
            theta = min(max(theta, 0.0), 1.0)
            lam = lam + theta * (alpha - lam)
            keep = lam > 1e-12
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            S = [s for s, k_ in zip(S, keep) if k_]
            lam = lam[keep]
            lam = lam / lam.sum()
    raise ProjectionError(f"projection did not certify gap <= {gap_tol} in {max_iter} iterations")


def directed_hausdorff(P: Polytope, Q: Polytope) -> float:
    """sup over P of the distance to Q (attained at vertices of P)."""
    return max(project_point(Q, v)[1] for v in P.vertices)


def hausdorff_distance(P: Polytope, Q: Polytope) -> float:
    if P.ambient_dim != Q.ambient_dim:
        raise GeometryError("dimension mismatch in hausdorff_distance")
    return max(directed_hausdorff(P, Q), directed_hausdorff(Q, P))


@dataclass(frozen=True, eq=False)
class PolytopeSequence:
    """Lazily generated polytope sequence with an optional polytope limit.

    ``distance_to_limit`` overrides the default Hausdorff computation when
    the limit is known analytically (ball approximants).
    """

    family: str
    params: dict
    member_fn: Callable[[int], Polytope]
    limit_body: Optional[Polytope] = None
    distance_fn: Optional[Callable[[int], float]] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def member(self, m: int) -> Polytope:
        if m < 1:
            raise GeometryError("sequence index starts at 1")
        if m not in self._cache:
            self._cache[m] = self.member_fn(m)
        return self._cache[m]

    def distance_to_limit(self, m: int) -> float:
        if self.distance_fn is not None:
            return self.distance_fn(m)
        if self.limit_body is None:
            raise GeometryError("sequence has no limit body and no distance override")
        return hausdorff_distance(self.member(m), self.limit_body)

    def describe(self) -> dict:
        return {"family": self.family, "params": self.params}


def _edge_data(P: Polytope, edge_vertex_ids, tol: float = TOL):
    """Endpoints, direction and the incident facet indices of a 1-face."""
    ids = sorted(edge_vertex_ids)
    if len(ids) != 2:
        raise GeometryError("edge must have exactly two vertices")
    a, b = P.vertices[ids[0]], P.vertices[ids[1]]
    d = b - a
    length = float(np.linalg.norm(d))
    if length <= tol:
        raise GeometryError("degenerate edge")
    d = d / length
    inc = [i for i, (nrm, off) in enumerate(zip(P.facet_normals, P.facet_offsets))
           if abs(nrm @ a - off) <= 10 * tol and abs(nrm @ b - off) <= 10 * tol]
    return a, b, d, length, inc


def _clip_line(p0: np.ndarray, direction: np.ndarray, A: np.ndarray, b: np.ndarray,
               tol: float = TOL):
    """Intersect the line p0 + t*direction with {A x <= b}; None when empty."""
    dots = A @ direction
    gaps = b - A @ p0
    lo, hi = -np.inf, np.inf
    for a_t, g in zip(dots, gaps):
        if abs(a_t) <= 1e-12:
            if g < -10 * tol:
                return None
            continue
        t = g / a_t
        if a_t > 0:
            hi = min(hi, t)
        else:
            lo = max(lo, t)
    if lo - hi > 1e-9 or not np.isfinite(lo) or not np.isfinite(hi):
        return None
    return p0 + lo * direction, p0 + hi * direction


def _verify_vertices_against_hrep(vertices: np.ndarray, A: np.ndarray, b: np.ndarray,
                                  n_dirs: int = 24, seed: int = 7) -> None:
    """Random support-function cross-check of an enumerated vertex set."""
    from scipy.optimize import linprog

    rng = np.random.default_rng(seed)
    for _ in range(n_dirs):
        c = rng.standard_normal(A.shape[1])
        c /= np.linalg.norm(c)
        res = linprog(-c, A_ub=A, b_ub=b, bounds=(None, None), method="highs")
        if res.status != 0:
            raise GeometryError("support cross-check LP failed")
        lp_val = -res.fun
        enum_val = float(np.max(vertices @ c))
        if abs(lp_val - enum_val) > 1e-6 * max(1.0, abs(lp_val)):
            raise GeometryError("vertex enumeration misses part of the body")


class BulgeConstructionError(GeometryError):
    """The requested chamfer parameters do not produce a valid convex member."""


def bulge_family(P: Polytope, edge, delta: float, segments: int,
                 height_schedule: Callable[[int], float]) -> PolytopeSequence:
    """Family of convex bodies converging to P while the replaced edge keeps a
    fixed spread of edge directions.

    member(m) replaces the edge by a fan of chamfer panels cut at depth
    h = height_schedule(m).  Panel normals alternate a small tilt along the
    edge direction, which tilts the chamfer edges by the fixed angle
    ``delta`` toward the local arc tangent.  Holding that angular window
    fixed while d_H -> 0 forces the panel count to grow like 1/h (a convex
    crest with a bounded number of edges sweeps its directions monotonically,
    so its window would shrink like segments*h); ``segments`` is the panel
    count of the first member.  With delta = 0 the fan degenerates to a
    straight chamfer whose exterior arcs partition the original arc exactly.

    For a degenerate 1-dimensional base (a segment) the member is an outward
    planar arc bump of height exactly h over the midpoint.
    """
    if P.ambient_dim != 3:
        raise GeometryError("bulge_family requires ambient dimension 3")
    if not (0 <= delta < np.pi / 3):
        raise BulgeConstructionError("delta out of range")
    if segments < 1:
        raise GeometryError("segments must be >= 1")

    if P.affine_dim == 1:
        return _segment_bulge_family(P, delta, segments, height_schedule)

    if P.affine_dim != 3:
        raise GeometryError("bulge base must be full-dimensional or a segment")

    if hasattr(edge, "vertex_ids"):
        edge_ids = edge.vertex_ids
        if getattr(edge, "k", 1) != 1:
            raise GeometryError("edge must be a 1-face")
    else:
        edge_ids = tuple(edge)
    a, b, d, length, incident = _edge_data(P, edge_ids)
    if len(incident) != 2:
        raise GeometryError("edge is not a 1-face with exactly two incident facets")
    i1, i2 = incident
    n1, n2 = P.facet_normals[i1], P.facet_normals[i2]
    cosw = float(np.clip(n1 @ n2, -1.0, 1.0))
    W = math.acos(cosw)
    p_hat = n2 - cosw * n1
    p_hat = p_hat / np.linalg.norm(p_hat)
    d_tilde = np.cross(n1, p_hat)
    if d_tilde @ d < 0:
        d_tilde = -d_tilde
    mid = 0.5 * (a + b)
    h_ref = float(height_schedule(1))
    if h_ref <= 0:
        raise GeometryError("height schedule must be positive")

    w_in = -(n1 + n2)
    w_in = w_in / np.linalg.norm(w_in)
    cos_half = math.cos(W / 2.0)
    # panel count must outgrow the tilt-induced offset drift along the edge
    # (length * beta/2 stays below the interior panel depth ~ h); with
    # delta = 0 there is no drift and the base count is kept for all members
    q_scale = length * W * math.tan(delta) / 2.0

    def make_member(m: int) -> Polytope:
        h = float(height_schedule(m))
        if h <= 0:
            raise GeometryError("height schedule must be positive")
        q = int(max(2, segments, math.ceil(q_scale / h)))
        # panels are tangent to a cylinder inscribed against both facets; its
        # radius is set so the deepest cut (mid-arc) removes exactly depth h
        rho = h * cos_half / (1.0 - cos_half)
        center = mid + (rho / cos_half) * w_in
        beta = (W / q) * math.tan(delta) / 2.0
        j0 = max(1, int(round(0.05 * q)))
        new_normals = []
        new_offsets = []
        for j in range(1, q):
            theta = j * W / q
            taper = min(1.0, j / j0, (q - j) / j0)
            bj = beta * taper * (-1.0) ** j
            nu = math.cos(bj) * (math.cos(theta) * n1 + math.sin(theta) * p_hat) \
                + math.sin(bj) * d_tilde
            nu = nu / np.linalg.norm(nu)
            new_normals.append(nu)
            new_offsets.append(float(nu @ center + rho))
        A = np.vstack([P.facet_normals, np.array(new_normals)])
        bvec = np.concatenate([P.facet_offsets, np.array(new_offsets)])

        n_old = P.n_facets
        fan = [i1] + list(range(n_old, n_old + q - 1)) + [i2]

        # candidate vertex lines: consecutive fan planes (the chamfer edges),
        # every fan plane against every original facet (the end caps), and
        # the original facet pairs (untouched edges of P)
        pairs = set()
        for u, v in zip(fan[:-1], fan[1:]):
            pairs.add((min(u, v), max(u, v)))
        for pj in fan:
            for g in range(n_old):
                if pj != g:
                    pairs.add((min(pj, g), max(pj, g)))
        for g1, g2 in itertools.combinations(range(n_old), 2):
            pairs.add((g1, g2))

        pts = [v for v in P.vertices if np.all(A @ v <= bvec + 10 * TOL)]
        for (u, v) in pairs:
            direction = np.cross(A[u], A[v])
            nrm = np.linalg.norm(direction)
            if nrm <= 1e-10:
                continue
            direction = direction / nrm
            # a point on the intersection line of the two planes
            B2 = np.vstack([A[u], A[v]])
            p0 = np.linalg.lstsq(B2, np.array([bvec[u], bvec[v]]), rcond=None)[0]
            seg = _clip_line(p0, direction, A, bvec)
            if seg is not None:
                pts.extend(seg)
        pts = dedupe_points(np.array(pts), 1e-8)
        _verify_vertices_against_hrep(pts, A, bvec)

        base, basis, dim = _affine_frame(pts)
        if dim != 3:
            raise BulgeConstructionError("chamfer collapsed the body")
        coords = (pts - base) @ basis
        planes = [((basis.T @ A[i]) / np.linalg.norm(basis.T @ A[i]),
                   float(bvec[i] - A[i] @ base) / np.linalg.norm(basis.T @ A[i]))
                  for i in range(A.shape[0])]
        gap = np.array([o for _, o in planes])[None, :] - coords @ np.array([n for n, _ in planes]).T
        keep = (np.abs(gap) <= 1e-7).sum(axis=0) >= 3
        if not np.all(keep[n_old:]):
            raise BulgeConstructionError("a chamfer panel is not supported; delta too large")
        poly = _polytope_from_planes(coords, [p for p, k in zip(planes, keep) if k],
                                     base, basis)
        return poly

    params = {"delta": delta, "segments": segments,
              "edge": [int(i) for i in sorted(edge_ids)],
              "arc_width": W, "edge_length": length}
    return PolytopeSequence("bulge", params, make_member, limit_body=P)


def _segment_bulge_family(P: Polytope, delta: float, segments: int,
                          height_schedule: Callable[[int], float]) -> PolytopeSequence:
    a, b = P.vertices[0], P.vertices[-1]
    d = b - a
    length = float(np.linalg.norm(d))
    d = d / length
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(d)))] = 1.0
    w_hat = np.cross(d, axis)
    w_hat /= np.linalg.norm(w_hat)
    w_hat = np.cross(w_hat, d)
    w_hat /= np.linalg.norm(w_hat)
    mid = 0.5 * (a + b)

    def make_member(m: int) -> Polytope:
        h = float(height_schedule(m))
        if delta <= 0:
            return convex_hull(np.vstack([P.vertices, mid + h * w_hat]))
        r = h / (1.0 - math.cos(delta))
        half_chord = r * math.sin(delta)
        if 2 * half_chord >= 0.95 * length:
            raise BulgeConstructionError("bulge chord exceeds the segment; delta too large")
        center = mid - (r - h) * w_hat
        psis = np.linspace(-delta, delta, segments + 1)
        chain = center[None, :] + r * (np.sin(psis)[:, None] * d[None, :]
                                       + np.cos(psis)[:, None] * w_hat[None, :])
        return convex_hull(np.vstack([a, b, chain]))

    params = {"delta": delta, "segments": segments, "base": "segment"}
    return PolytopeSequence("bulge", params, make_member, limit_body=P)


_TETRA_DIRECTIONS = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0],
                              [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]) / math.sqrt(3.0)


def _latlong_directions(m: int, axis: np.ndarray) -> np.ndarray:
    """Ring layout around an axis; edge directions concentrate along the axis
    near its equator, unlike the isotropic golden-spiral layout."""
    rings = max(3, int(round(math.sqrt(m / 2.0))))
    per_ring = max(3, int(round(m / rings)))
    a = axis / np.linalg.norm(axis)
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(a)))] = 1.0
    b1 = np.cross(a, helper)
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(a, b1)
    pts = [a, -a]
    for i in range(rings):
        lat = np.pi * (i + 0.5) / rings - np.pi / 2
        offset = 0.5 * np.pi * (i % 2) / per_ring
        phis = 2 * np.pi * np.arange(per_ring) / per_ring + offset
        ring = (math.sin(lat) * a[None, :]
                + math.cos(lat) * (np.cos(phis)[:, None] * b1[None, :]
                                   + np.sin(phis)[:, None] * b2[None, :]))
        pts.append(ring)
    return np.vstack(pts)


def ball_approximant(center, radius: float, m: int, layout: str = "fibonacci",
                     axis=None) -> Polytope:
    """Inscribed polytope from an m-point sphere sampling.

    ``layout`` picks the direction pattern: "fibonacci" is quasi-uniform,
    "latlong" uses latitude rings around ``axis`` and produces an edge
    direction distribution biased along that axis.  Different layouts give
    sequences with the same Hausdorff limit but different flag statistics.
    """
    from .quadrature import fibonacci_sphere

    c = np.asarray(center, dtype=float)
    if c.shape != (3,):
        raise GeometryError("ball_approximant works in R^3")
    if radius < 0:
        raise GeometryError("negative radius")
    if radius == 0:
        return convex_hull(c[None, :])
    if m < 4:
        raise GeometryError("need at least 4 directions to span R^3")
    if m == 4:
        dirs = _TETRA_DIRECTIONS
    elif layout == "fibonacci":
        dirs = fibonacci_sphere(m)
    elif layout == "latlong":
        dirs = _latlong_directions(m, np.asarray(axis if axis is not None else [1.0, 0, 0],
                                                 dtype=float))
    else:
        raise GeometryError(f"unknown ball layout {layout!r}")
    return convex_hull(c[None, :] + radius * dirs)


def ball_support_gap(P: Polytope, center, radius: float, grid: int = 4000) -> float:
    """Hausdorff distance from an inscribed polytope to the ball it approximates.

    Equals the maximal support-function gap radius - h_{P-c}(u), scanned on a
    fine quasi-uniform direction grid.
    """
    from .quadrature import fibonacci_sphere

    c = np.asarray(center, dtype=float)
    dirs = fibonacci_sphere(grid)
    supports = np.max((P.vertices - c) @ dirs.T, axis=0)
    return float(np.max(radius - supports))


def ball_family(center, radius: float, base_count: int = 16,
                layout: str = "fibonacci", axis=None) -> PolytopeSequence:
    """Sequence of inscribed ball approximants; member(m) uses base_count*m points."""
    c = np.asarray(center, dtype=float)

    def make_member(m: int) -> Polytope:
        return ball_approximant(c, radius, base_count * m, layout=layout, axis=axis)

    def distance(m: int) -> float:
        return ball_support_gap(make_member(m), c, radius)

    params = {"center": c.tolist(), "radius": radius, "base_count": base_count,
              "layout": layout}
    if axis is not None:
        params["axis"] = list(np.asarray(axis, dtype=float))
    return PolytopeSequence("ball", params, make_member, limit_body=None,
                            distance_fn=distance)


def box(sides, corner=None) -> Polytope:
    """Axis-aligned box with the given side lengths (convenience constructor)."""
    sides = np.asarray(sides, dtype=float)
    n = sides.size
    lo = np.zeros(n) if corner is None else np.asarray(corner, dtype=float)
    corners = np.array(list(itertools.product(*[(l, l + s) for l, s in zip(lo, sides)])))
    return convex_hull(corners)


def standard_simplex(n: int = 3) -> Polytope:
    return convex_hull(np.vstack([np.zeros(n), np.eye(n)]))
