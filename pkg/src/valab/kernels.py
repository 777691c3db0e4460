"""Kernels on the flag space of (k-subspace, orthogonal line) pairs, the
fiber-averaging map to the Grassmannian, distinguished kernel constructions,
and the restriction operator to a 3-dimensional subspace.

A kernel is an even, basis-invariant function f(E, l): E is handed to the
evaluator as an orthonormal basis matrix of a k-subspace, l as a unit vector
orthogonal to E, and the value may not depend on the choice of basis of E
nor on the sign of l.  Lines are unit vectors under an evenness contract;
both contracts are spot-checked by ``check_kernel`` and at construction time
for the built-in families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import GeometryError, Polytope
from .quadrature import (circle_nodes, sphere_product_grid,
                         sphere_split_polar_grid, uniform_sphere_samples)


class KernelContractError(ValueError):
    """A kernel violates evenness, basis invariance, or smoothness checks."""


class ParityError(ValueError):
    """Sphere-form evaluations disagree across orientation choices."""


class DegenerateProfileError(ValueError):
    """The circle profile integrates to zero over the target arc."""


@dataclass(frozen=True, eq=False)
class Kernel:
    """Evaluable kernel f(E, l) with ambient dimension n and degree k."""

    ambient_dim: int
    degree: int
    eval_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str = "kernel"
    spec: dict = field(default_factory=dict)

    def eval_batch(self, E: np.ndarray, lines: np.ndarray) -> np.ndarray:
        """Evaluate on a batch of unit line representatives (M, n)."""
        L = np.atleast_2d(np.asarray(lines, dtype=float))
        return np.asarray(self.eval_fn(np.asarray(E, dtype=float), L), dtype=float)

    def __call__(self, E, line) -> float:
        return float(self.eval_batch(E, np.atleast_2d(line))[0])


@dataclass(frozen=True, eq=False)
class GrassFunction:
    """Function of a k-subspace alone (basis-invariant)."""

    ambient_dim: int
    degree: int
    eval_fn: Callable[[np.ndarray], float]
    label: str = "grassmann function"

    def __call__(self, E) -> float:
        return float(self.eval_fn(np.asarray(E, dtype=float)))


def _random_subspace(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    M = rng.standard_normal((n, k))
    q, _ = np.linalg.qr(M)
    return q[:, :k]


def _random_orthogonal(k: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def check_kernel(f: Kernel, seed: int = 5, samples: int = 24, tol: float = 1e-9) -> None:
    """Spot-check the kernel contracts on random flags.

    Raises KernelContractError when evenness in l, invariance under basis
    re-parameterization of E, finiteness, or a finite-difference smoothness
    bound fails.
    """
    n, k = f.ambient_dim, f.degree
    rng = np.random.default_rng(seed)
    scale = 1.0
    for _ in range(samples):
        E = _random_subspace(n, k, rng)
        perp = np.linalg.svd(E, full_matrices=True)[0][:, k:]
        u = uniform_sphere_samples(n - k, 1, rng) @ perp.T
        v_plus = f.eval_batch(E, u)[0]
        scale = max(scale, abs(v_plus))
        if not np.isfinite(v_plus):
            raise KernelContractError(f"{f.label!r}: non-finite value")
        if abs(v_plus - f.eval_batch(E, -u)[0]) > tol * scale:
            raise KernelContractError(f"{f.label!r}: evenness violated")
        Q = _random_orthogonal(k, rng)
        if abs(v_plus - f.eval_batch(E @ Q, u)[0]) > tol * scale:
            raise KernelContractError(f"{f.label!r}: basis invariance violated")
        # crude smoothness probe: nearby lines give nearby values
        t = 1e-5 * (perp @ uniform_sphere_samples(n - k, 1, rng)[0])
        u2 = u + t
        u2 = u2 / np.linalg.norm(u2)
        if abs(v_plus - f.eval_batch(E, u2)[0]) > 1e-2 * scale:
            raise KernelContractError(f"{f.label!r}: value jumps under a 1e-5 perturbation")


def constant_kernel(n: int, k: int, value: float = 1.0) -> Kernel:
    """The constant kernel; its valuation is the k-th intrinsic volume."""
    if not (1 <= k <= n - 1):
        raise ValueError("degree out of range")
    return Kernel(n, k, lambda E, L: np.full(L.shape[0], value),
                  label=f"constant({value})",
                  spec={"kind": "constant", "params": {"n": n, "k": k, "value": value}})


def random_kernel(n: int, k: int, seed: int = 0, terms: int = 3) -> Kernel:
    """Random smooth even kernel built from quadratic forms in l and the
    projector of E (manifestly basis-invariant)."""
    rng = np.random.default_rng(seed)
    a = uniform_sphere_samples(n, terms, rng)
    b = uniform_sphere_samples(n, terms, rng)
    c = rng.standard_normal(terms)
    c0 = rng.standard_normal()

    def ev(E, L):
        PE = E @ E.T
        la = L @ a.T                       # (M, terms)
        eb = np.einsum("ti,ij,tj->t", b, PE, b)  # (terms,)
        return c0 + (la ** 2 * (c * (1.0 + eb))).sum(axis=1)

    return Kernel(n, k, ev, label=f"random(seed={seed})",
                  spec={"kind": "random", "params": {"n": n, "k": k, "seed": seed,
                                                     "terms": terms}})


def _perp_basis_of(E: np.ndarray) -> np.ndarray:
    u, _, _ = np.linalg.svd(E, full_matrices=True)
    return u[:, E.shape[1]:]


def smap(f: Kernel, rtol: float = 1e-8) -> GrassFunction:
    """Fiberwise average of f over the lines orthogonal to E (mass-1 measure).

    Uses exact circle quadrature when the fiber is a circle, a sphere
    product rule otherwise, with order doubling until the relative change is
    below ``rtol``.
    """
    n, k = f.ambient_dim, f.degree

    def ev(E: np.ndarray) -> float:
        perp = _perp_basis_of(E)
        dim = n - k - 1
        if dim == 0:
            pts = np.array([[1.0]])
            return float(f.eval_batch(E, pts @ perp.T)[0])
        prev = None
        order = 32 if dim == 1 else 12
        for _ in range(8):
            if dim == 1:
                theta, w = circle_nodes(order)
                pts = np.column_stack([np.cos(theta), np.sin(theta)])
            else:
                pts, w = sphere_product_grid(dim, order)
            val = float(w @ f.eval_batch(E, pts @ perp.T))
            if prev is not None and abs(val - prev) <= rtol * abs(val) + 1e-13:
                return val
            prev = val
            order *= 2
        return prev

    return GrassFunction(n, k, ev, label=f"S[{f.label}]")


def pullback(h: GrassFunction) -> Kernel:
    """Constant-along-fibers kernel (E, l) -> h(E)."""
    return Kernel(h.ambient_dim, h.degree,
                  lambda E, L: np.full(L.shape[0], h(E)),
                  label=f"pullback[{h.label}]",
                  spec={"kind": "pullback", "params": {"label": h.label}})


def smooth_bump(t: np.ndarray, width: float) -> np.ndarray:
    """C-infinity bump equal to 1 at 0 and 0 outside [-width, width]."""
    t = np.asarray(t, dtype=float)
    x = np.clip(np.abs(t) / width, 0.0, 1.0)
    out = np.zeros_like(x)
    inside = x < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


@dataclass(frozen=True)
class CircleProfile:
    """Even zero-mean profile cos(order * theta - phase) on the circle.

    ``order`` must be even and positive so the profile descends to lines.
    """

    order: int = 2
    phase: float = 0.0

    def __post_init__(self):
        if self.order <= 0 or self.order % 2:
            raise ValueError("profile order must be positive and even")

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        return np.cos(self.order * np.asarray(theta) - self.phase)

    def arc_integral(self, lo: float, hi: float) -> float:
        m = self.order
        return (math.sin(m * hi - self.phase) - math.sin(m * lo - self.phase)) / m


def lemma18_kernel(delta: Polytope, edge_index: int = 0,
                   profile: Optional[CircleProfile] = None,
                   bump_width: float = 0.4) -> Kernel:
    """Kernel with vanishing fiber averages but nonzero valuation on ``delta``.

    The kernel is bump(angle(E, edge direction)) times a zero-mean circle
    profile transported to the fiber circle by a smooth frame.  Every fiber
    average vanishes identically because the profile has zero mean on the
    full circle, while the integral over the chosen edge's exterior arc is
    nonzero, so the valuation of the simplex does not vanish.  Construction
    fails when the profile is degenerate on the arc or when another edge
    direction falls inside the bump support.
    """
    from .faces import enumerate_faces, exterior_angle

    n = delta.ambient_dim
    if n != 3:
        raise ValueError("this construction lives in ambient dimension 3")
    if delta.affine_dim != 3 or delta.n_vertices != 4:
        raise ValueError("delta must be a 3-simplex")
    edges = enumerate_faces(delta, 1)
    F1 = edges[edge_index]
    ia, ib = sorted(F1.vertex_ids)
    d1 = delta.vertices[ib] - delta.vertices[ia]
    d1 = d1 / np.linalg.norm(d1)

    for j, F in enumerate(edges):
        if j == edge_index:
            continue
        ja, jb = sorted(F.vertex_ids)
        dj = delta.vertices[jb] - delta.vertices[ja]
        dj = dj / np.linalg.norm(dj)
        ang = math.acos(min(1.0, abs(float(dj @ d1))))
        if ang < bump_width:
            raise ValueError("bump support overlaps another edge direction; "
                             "shrink bump_width")

    region = exterior_angle(delta, F1)
    if region.arc in (None, "full"):
        raise ValueError("edge exterior angle has no exact arc")
    r1 = region.perp_basis[:, 0]
    r2 = np.cross(d1, r1)
    # generator angles in the (r1, r2) frame
    gens_amb = region.cone_generators @ region.perp_basis.T
    angs = np.arctan2(gens_amb @ r2, gens_amb @ r1)
    rel = np.mod(angs - angs[0] + np.pi, 2 * np.pi) - np.pi
    lo = float(angs[0] + rel.min())
    hi = float(angs[0] + rel.max())
    if profile is None:
        profile = CircleProfile(order=2, phase=float(np.mod(2 * lo + (hi - lo), 2 * np.pi)))
        # phase 2*center maximizes the arc integral of cos(2 theta - phase)

    mean, _ = _profile_circle_mean(profile)
    if abs(mean) > 1e-10:
        raise ValueError("profile must have zero mean over the full circle")
    arc_int = profile.arc_integral(lo, hi) if isinstance(profile, CircleProfile) \
        else _profile_arc_integral(profile, lo, hi)
    if abs(arc_int) < 1e-8:
        raise DegenerateProfileError("profile integrates to zero over the edge arc")

    predicted = F1.kvol * arc_int / (2 * np.pi)

    def ev(E: np.ndarray, L: np.ndarray) -> np.ndarray:
        e = E[:, 0]
        c = float(e @ d1)
        ang = math.acos(min(1.0, abs(c)))
        amp = float(smooth_bump(np.array([ang]), bump_width)[0])
        if amp == 0.0:
            return np.zeros(L.shape[0])
        ehat = e if c > 0 else -e
        v1 = r1 - (r1 @ ehat) * ehat
        v1 = v1 / np.linalg.norm(v1)
        v2 = np.cross(ehat, v1)
        theta = np.arctan2(L @ v2, L @ v1)
        return amp * profile(theta)

    kern = Kernel(3, 1, ev, label=f"lemma18(edge={edge_index}, width={bump_width})",
                  spec={"kind": "lemma18",
                        "params": {"vertices": delta.vertices.tolist(),
                                   "edge_index": edge_index,
                                   "bump_width": bump_width,
                                   "profile_order": getattr(profile, "order", None),
                                   "profile_phase": getattr(profile, "phase", None),
                                   "predicted_simplex_value": predicted,
                                   "arc": [lo, hi]}})
    _verify_vanishing_fiber_means(kern, seed=3)
    return kern


def _profile_circle_mean(profile) -> tuple[float, float]:
    theta = np.linspace(0.0, 2 * np.pi, 4097)[:-1]
    vals = profile(theta)
    return float(np.mean(vals)), float(np.max(np.abs(vals)))


def _profile_arc_integral(profile, lo: float, hi: float) -> float:
    from .quadrature import adaptive_circle_integral

    val, _ = adaptive_circle_integral(lambda t: np.asarray(profile(t)), lo, hi)
    return val


def _verify_vanishing_fiber_means(kern: Kernel, seed: int, count: int = 32,
                                  bound: float = 1e-8) -> None:
    S = smap(kern)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        E = _random_subspace(kern.ambient_dim, kern.degree, rng)
        worst = max(worst, abs(S(E)))
    if worst > bound:
        raise KernelContractError(f"fiber means do not vanish (sup {worst:.2e})")


@dataclass(frozen=True, eq=False)
class SphereForm:
    """Tangential 1-form on the sphere with covector values, encoded by a
    matrix field W(m): the form at m sends a tangent vector t to the
    covector W(m) t.  Only the restriction of W(m) to the tangent plane of m
    matters.  The parity convention for descending to lines is W(-m) = -W(m).
    """

    component_batch: Callable[[np.ndarray], np.ndarray]  # (M,3) -> (M,3,3)
    label: str = "sphere form"
    spec: dict = field(default_factory=dict)

    def component(self, m: np.ndarray) -> np.ndarray:
        return self.component_batch(np.atleast_2d(m))[0]


def rotation_invariant_form() -> SphereForm:
    """The round area pairing; it induces the constant kernel."""

    def comp(M: np.ndarray) -> np.ndarray:
        out = np.zeros((M.shape[0], 3, 3))
        out[:, 0, 1] = -M[:, 2]
        out[:, 0, 2] = M[:, 1]
        out[:, 1, 0] = M[:, 2]
        out[:, 1, 2] = -M[:, 0]
        out[:, 2, 0] = -M[:, 1]
        out[:, 2, 1] = M[:, 0]
        return out

    return SphereForm(comp, label="round form",
                      spec={"kind": "chform", "params": {"form": "rotation_invariant"}})


def random_sphere_form(seed: int = 0, cubic_terms: int = 2) -> SphereForm:
    """Random smooth odd-parity matrix field: linear plus odd cubic terms."""
    rng = np.random.default_rng(seed)
    lin = rng.standard_normal((3, 3, 3)) / 3.0       # W_lin[i,j,a] m_a
    cub_mats = rng.standard_normal((cubic_terms, 3, 3)) / 3.0
    cub_dirs = uniform_sphere_samples(3, 3 * cubic_terms, rng).reshape(cubic_terms, 3, 3)

    def comp(M: np.ndarray) -> np.ndarray:
        out = np.einsum("ija,ma->mij", lin, M)
        for t in range(cubic_terms):
            f = (M @ cub_dirs[t, 0]) * (M @ cub_dirs[t, 1]) * (M @ cub_dirs[t, 2])
            out += f[:, None, None] * cub_mats[t]
        return out

    return SphereForm(comp, label=f"random form(seed={seed})",
                      spec={"kind": "chform", "params": {"form": "random", "seed": seed,
                                                         "cubic_terms": cubic_terms}})


def combine_forms(terms: list[tuple[float, SphereForm]]) -> SphereForm:
    def comp(M: np.ndarray) -> np.ndarray:
        out = np.zeros((M.shape[0], 3, 3))
        for c, form in terms:
            out += c * form.component_batch(M)
        return out

    return SphereForm(comp, label="combined form",
                      spec={"kind": "chform", "params": {"form": "combination"}})


def chform_kernel(omega: SphereForm, validate: bool = True) -> Kernel:
    """Kernel induced by integrating the form over normal cycles.

    f(E, l) pairs the form at the point l with the unit tangent of the fiber
    circle at l and with a unit vector spanning E, symmetrized over the four
    orientation choices.  The four values must agree in absolute value
    (parity consistency); a form whose symmetrization vanishes identically
    while raw values do not is rejected.  Kernels built this way extend to
    continuous valuations, which makes them the positive controls in the
    continuity experiments.
    """

    def raw_values(E: np.ndarray, L: np.ndarray) -> np.ndarray:
        e = E[:, 0]
        vals = []
        for se in (1.0, -1.0):
            for su in (1.0, -1.0):
                U = su * L
                T = np.cross(np.broadcast_to(se * e, U.shape), U)
                W = omega.component_batch(U)
                cov = np.einsum("mij,mj->mi", W, T)
                vals.append(cov @ (se * e))
        return np.stack(vals, axis=0)

    def ev(E: np.ndarray, L: np.ndarray) -> np.ndarray:
        vals = raw_values(E, L)
        mean = vals.mean(axis=0)
        spread = np.max(np.abs(vals - mean[None, :]))
        scale = 1.0 + float(np.max(np.abs(vals)))
        if spread > 1e-8 * scale:
            raise ParityError(f"{omega.label!r}: orientation choices disagree "
                              f"(spread {spread:.2e})")
        return mean

    kern = Kernel(3, 1, ev, label=f"chform[{omega.label}]",
                  spec=omega.spec or {"kind": "chform", "params": {}})
    if validate:
        rng = np.random.default_rng(17)
        E = _random_subspace(3, 1, rng)
        perp = _perp_basis_of(E)
        probes = uniform_sphere_samples(2, 64, rng) @ perp.T
        raw = raw_values(E, probes)
        if np.max(np.abs(raw)) > 1e-10 and np.max(np.abs(raw.mean(axis=0))) <= 1e-12:
            raise ParityError(f"{omega.label!r}: symmetrization vanishes identically")
        check_kernel(kern, seed=23, samples=12)
    return kern


def restrict_kernel(f: Kernel, w_basis: np.ndarray, kappa: float,
                    order: int = 24) -> Kernel:
    """Restriction of a degree-1 kernel to a 3-dimensional subspace W.

    The restricted kernel g on flags of W averages f over the unit sphere of
    l + W_perp against the weight sqrt(1 - |projection onto W_perp|^2),
    scaled by ``kappa``.  The weight equals |cos| of the angle to l, so the
    quadrature splits the polar integral at the equator to stay spectrally
    accurate.  Valuations of bodies inside W computed with g match those
    computed with f.
    """
    n = f.ambient_dim
    if n < 4 or f.degree != 1:
        raise ValueError("restriction needs a degree-1 kernel in dimension >= 4")
    W = np.asarray(w_basis, dtype=float)
    if W.shape != (n, 3) or np.max(np.abs(W.T @ W - np.eye(3))) > 1e-9:
        raise ValueError("w_basis must be an orthonormal (n, 3) basis")
    w_perp = _perp_basis_of(W)
    sphere_dim = n - 3
    nodes, weights = sphere_split_polar_grid(sphere_dim, order)

    def ev(E3: np.ndarray, L3: np.ndarray) -> np.ndarray:
        E = W @ E3
        out = np.empty(L3.shape[0])
        for i, l3 in enumerate(L3):
            l_amb = W @ l3
            nl = np.linalg.norm(l_amb)
            if abs(nl - 1.0) > 1e-8 or abs(float(l3 @ E3[:, 0])) > 1e-8:
                raise ValueError("line must be a unit vector of W orthogonal to E")
            frame = np.column_stack([l_amb, w_perp])
            ms = nodes @ frame.T
            wts = weights * np.abs(nodes[:, 0])
            out[i] = kappa * float(wts @ f.eval_batch(E, ms))
        return out

    return Kernel(3, 1, ev, label=f"restricted[{f.label}]",
                  spec={"kind": "restricted",
                        "params": {"inner": f.spec, "kappa": kappa,
                                   "w_basis": W.tolist()}})


def calibrate_kappa(n: int, order: int = 24) -> tuple[float, float]:
    """Normalizing constant for the restriction: reciprocal of the weighted
    sphere average applied to the constant kernel.  Returns (kappa, error
    estimate from order doubling)."""
    if n < 4:
        raise ValueError("restriction exists only for ambient dimension >= 4")
    sphere_dim = n - 3

    def avg(o: int) -> float:
        nodes, weights = sphere_split_polar_grid(sphere_dim, o)
        return float(weights @ np.abs(nodes[:, 0]))

    a1, a2 = avg(order), avg(2 * order)
    return 1.0 / a2, abs(1.0 / a2 - 1.0 / a1)


def separable_kernel(n: int, k: int, direction, order: int = 2,
                     phase: float = 0.0, envelope_width: float = 0.0,
                     amplitude: float = 1.0) -> Kernel:
    """Zero-fiber-mean separable kernel a(E) * u(l) for tests and configs.

    ``direction`` fixes the reference line for the transported circle frame;
    a nonzero ``envelope_width`` multiplies by a bump in the angle between E
    and the reference line (the same construction the simplex witness uses),
    otherwise a smooth polynomial factor of E is applied.
    """
    if (n, k) != (3, 1):
        raise ValueError("separable kernels are implemented for n=3, k=1")
    d1 = np.asarray(direction, dtype=float)
    d1 = d1 / np.linalg.norm(d1)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(d1)))] = 1.0
    r1 = np.cross(d1, axis)
    r1 /= np.linalg.norm(r1)
    prof = CircleProfile(order=order, phase=phase)

    def ev(E: np.ndarray, L: np.ndarray) -> np.ndarray:
        e = E[:, 0]
        c = float(e @ d1)
        ang = math.acos(min(1.0, abs(c)))
        if envelope_width > 0:
            amp = float(smooth_bump(np.array([ang]), envelope_width)[0])
            if amp == 0.0:
                return np.zeros(L.shape[0])
        else:
            amp = 1.0 + 0.5 * math.cos(ang) ** 2
        ehat = e if c >= 0 else -e
        v1 = r1 - (r1 @ ehat) * ehat
        nv = np.linalg.norm(v1)
        if nv < 1e-12:
            return np.zeros(L.shape[0])
        v1 = v1 / nv
        v2 = np.cross(ehat, v1)
        theta = np.arctan2(L @ v2, L @ v1)
        return amplitude * amp * prof(theta)

    return Kernel(3, 1, ev, label=f"separable(order={order})",
                  spec={"kind": "separable",
                        "params": {"n": n, "k": k, "direction": d1.tolist(),
                                   "order": order, "phase": phase,
                                   "envelope_width": envelope_width,
                                   "amplitude": amplitude}})


def kernel_from_spec(spec: dict) -> Kernel:
    """Build a kernel from the JSON mini-language used by configs and reports."""
    kind = spec.get("kind")
    params = dict(spec.get("params", {}))
    if kind == "constant":
        return constant_kernel(int(params["n"]), int(params["k"]),
                               float(params.get("value", 1.0)))
    if kind == "random":
        return random_kernel(int(params["n"]), int(params["k"]),
                             seed=int(params.get("seed", 0)),
                             terms=int(params.get("terms", 3)))
    if kind == "separable":
        return separable_kernel(int(params.get("n", 3)), int(params.get("k", 1)),
                                params["direction"],
                                order=int(params.get("order", 2)),
                                phase=float(params.get("phase", 0.0)),
                                envelope_width=float(params.get("envelope_width", 0.0)),
                                amplitude=float(params.get("amplitude", 1.0)))
    if kind == "lemma18":
        from .geometry import convex_hull, standard_simplex

        if params.get("vertices") in (None, "standard"):
            delta = standard_simplex()
        else:
            delta = convex_hull(np.asarray(params["vertices"], dtype=float))
        prof = None
        if params.get("profile_order") is not None and params.get("profile_phase") is not None:
            prof = CircleProfile(order=int(params["profile_order"]),
                                 phase=float(params["profile_phase"]))
        return lemma18_kernel(delta, edge_index=int(params.get("edge_index", 0)),
                              profile=prof,
                              bump_width=float(params.get("bump_width", 0.4)))
    if kind == "chform":
        form_kind = params.get("form", "rotation_invariant")
        if form_kind == "rotation_invariant":
            return chform_kernel(rotation_invariant_form())
        if form_kind == "random":
            return chform_kernel(random_sphere_form(seed=int(params.get("seed", 0)),
                                                    cubic_terms=int(params.get("cubic_terms", 2))))
        raise ValueError(f"unknown chform variant {form_kind!r}")
    if kind == "restricted":
        inner = kernel_from_spec(params["inner"])
        W = np.asarray(params["w_basis"], dtype=float)
        kappa = params.get("kappa")
        if kappa is None:
            kappa = calibrate_kappa(inner.ambient_dim)[0]
        return restrict_kernel(inner, W, float(kappa))
    raise ValueError(f"unknown kernel kind {kind!r}")
