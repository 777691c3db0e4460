"""Evaluation of the face-sum valuations, intrinsic volumes, the Klain
function, and the two continuity probe engines.

The valuation of a polytope is the sum over its k-faces of the k-volume
times the integral of the kernel over the face's exterior angle, taken with
the mass-1 normalized sphere measure.  A body whose affine dimension equals
the kernel degree is its own single face with a full-sphere exterior angle,
which is what ties the Klain function to the fiber average.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .faces import enumerate_faces, exterior_angle, integrate_kernel_over_region
from .geometry import GeometryError, Polytope, PolytopeSequence, convex_hull, hrep_polytope
from .kernels import Kernel, constant_kernel


@dataclass(frozen=True)
class FaceTerm:
    face_id: int
    kvol: float
    inner_integral: float
    contribution: float
    stderr: float


@dataclass(frozen=True)
class ValuationResult:
    value: float
    per_face_terms: tuple
    error_estimate: float
    method: str
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {"value": self.value,
                "error_estimate": self.error_estimate,
                "method": self.method, "samples": self.samples, "seed": self.seed,
                "per_face_terms": [vars(t) for t in self.per_face_terms]}


def phi(f: Kernel, P: Polytope, method: str = "auto", samples: int = 100000,
        seed: int = 0) -> ValuationResult:
    """Valuation of P under the kernel f: sum over k-faces of k-volume times
    the exterior-angle integral of f."""
    if f.ambient_dim != P.ambient_dim:
        raise ValueError("kernel and polytope ambient dimensions differ")
    k = f.degree
    if P.affine_dim < k:
        return ValuationResult(0.0, (), 0.0, method, 0, seed)
    faces = enumerate_faces(P, k)
    terms = []
    total = 0.0
    err = 0.0
    for i, F in enumerate(faces):
        region = exterior_angle(P, F)
        est = integrate_kernel_over_region(f, F, region, method=method,
                                           samples=samples, seed=seed + 7919 * i)
        contrib = F.kvol * est.value
        terms.append(FaceTerm(i, F.kvol, est.value, contrib, F.kvol * est.stderr))
        total += contrib
        err += (F.kvol * est.stderr) ** 2 + (F.kvol * 1e-10 * abs(est.value)) ** 2
    return ValuationResult(total, tuple(terms), math.sqrt(err), method, samples, seed)


def intrinsic_volume(P: Polytope, k: int, method: str = "auto",
                     samples: int = 100000, seed: int = 0) -> float:
    """k-th intrinsic volume, as the valuation of the constant kernel.

    With the mass-1 angle normalization this matches the elementary
    symmetric polynomial of the side lengths on boxes.
    """
    return phi(constant_kernel(P.ambient_dim, k), P, method=method,
               samples=samples, seed=seed).value


def unit_cube_in(E: np.ndarray) -> Polytope:
    """The unit k-cube spanned by an orthonormal basis, as a degenerate body."""
    E = np.atleast_2d(np.asarray(E, dtype=float))
    if E.ndim != 2:
        raise ValueError("E must be a basis matrix")
    k = E.shape[1]
    corners = np.array([np.zeros(E.shape[0])] if k == 0 else
                       [E @ np.array(bits) for bits in itertools.product((0.0, 1.0), repeat=k)])
    return convex_hull(corners)


def klain_function(f: Kernel, E: np.ndarray, method: str = "auto",
                   samples: int = 100000, seed: int = 0) -> float:
    """Valuation density on the subspace E: the valuation of the unit k-cube
    embedded in E.

    Computed through the face-sum path (full-sphere exterior angle of a
    degenerate body), deliberately independent of the fiber-average code, so
    the two can be compared as separate routes to the same function.
    """
    cube = unit_cube_in(E)
    return phi(f, cube, method=method, samples=samples, seed=seed).value


_VERDICT_TO_VALUE = "converges-to-value"
_VERDICT_ELSEWHERE = "converges-elsewhere"
_VERDICT_INCONCLUSIVE = "inconclusive"
_VERDICT_PLAIN = "converges"


@dataclass(frozen=True)
class ProbeReport:
    kernel_spec: dict
    family_spec: dict
    rows: tuple  # (m, distance, value, error) per member
    extrapolated_limit: float
    extrapolation_uncertainty: float
    phi_at_limit_body: Optional[float]
    verdict: str
    margin: float
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kernel": self.kernel_spec, "family": self.family_spec,
                "samples": [{"m": m, "distance": d, "value": v, "error": e}
                            for (m, d, v, e) in self.rows],
                "extrapolated_limit": self.extrapolated_limit,
                "extrapolation_uncertainty": self.extrapolation_uncertainty,
                "phi_at_limit_body": self.phi_at_limit_body,
                "verdict": self.verdict, "margin": self.margin,
                "diagnostics": self.diagnostics}

    def to_csv_rows(self) -> list[list]:
        out = [["m", "distance", "value", "error"]]
        out += [[m, d, v, e] for (m, d, v, e) in self.rows]
        return out


def _worker_count() -> int:
    raw = os.environ.get("VALAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def dyadic_schedule(m_max: int) -> list[int]:
    ms = []
    m = 1
    while m < m_max:
        ms.append(m)
        m *= 2
    ms.append(m_max)
    return sorted(set(ms))


def _richardson(rows: list[tuple], use: int = 4):
    """First-order extrapolation in the distance column over the last rows.

    Returns (limit, uncertainty, diagnostics).  The uncertainty combines the
    fit residual, the shift against the fit that drops the oldest point, and
    the members' own error estimates.
    """
    pts = rows[-use:]
    d = np.array([r[1] for r in pts])
    v = np.array([r[2] for r in pts])
    errs = np.array([r[3] for r in pts])
    A = np.column_stack([np.ones_like(d), d])
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    resid = v - A @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    if use > 3:
        coef3, *_ = np.linalg.lstsq(A[1:], v[1:], rcond=None)
        shift = abs(float(coef[0] - coef3[0]))
    else:
        shift = rms
    unc = max(rms, shift) + float(np.mean(errs)) + 1e-12
    gaps = np.abs(v - coef[0])
    monotone = bool(np.all(gaps[:-1] >= gaps[1:] - 2.0 * (rms + np.mean(errs) + 1e-13)))
    diag = {"fit_rms": rms, "drop_one_shift": shift, "slope": float(coef[1]),
            "monotone_tail": monotone}
    return float(coef[0]), float(unc), diag


def continuity_probe(f: Kernel, seq: PolytopeSequence, m_max: int = 64,
                     extrapolation: str = "richardson", method: str = "auto",
                     samples: int = 100000, seed: int = 0) -> ProbeReport:
    """Evaluate the valuation along the sequence, extrapolate its limit, and
    compare with the valuation of the limit body.

    Verdicts follow fixed thresholds: the difference must exceed 10x the
    combined uncertainty to call the limit different, and stay below 3x to
    call it equal; anything else is inconclusive.  Sequences without a
    polytope limit body report the extrapolated limit with the plain
    "converges" verdict.
    """
    ms = dyadic_schedule(m_max)

    def eval_member(m: int):
        body = seq.member(m)
        res = phi(f, body, method=method, samples=samples, seed=seed + m)
        return (m, seq.distance_to_limit(m), res.value, res.error_estimate)

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(eval_member, ms))
    else:
        rows = [eval_member(m) for m in ms]
    rows.sort(key=lambda r: r[0])

    diagnostics: dict = {"schedule": ms, "extrapolation": extrapolation}
    if len(rows) < 4 and extrapolation == "richardson":
        extrapolation = "none"
        diagnostics["note"] = "fewer than 4 members, extrapolation downgraded"

    if extrapolation == "richardson":
        limit, unc, diag = _richardson(rows)
        diagnostics.update(diag)
        failed_tail = not diag["monotone_tail"]
    elif extrapolation == "none":
        limit = rows[-1][2]
        unc = abs(rows[-1][2] - rows[-2][2]) + rows[-1][3] + 1e-12 if len(rows) > 1 \
            else rows[-1][3] + 1e-12
        failed_tail = False
    else:
        raise ValueError(f"unknown extrapolation {extrapolation!r}")

    if seq.limit_body is None:
        verdict = _VERDICT_INCONCLUSIVE if failed_tail else _VERDICT_PLAIN
        return ProbeReport(f.spec, seq.describe(), tuple(rows), limit, unc, None,
                           verdict, 0.0, diagnostics)

    ref = phi(f, seq.limit_body, method=method, samples=samples, seed=seed)
    gap = abs(limit - ref.value)
    combined = unc + ref.error_estimate
    diagnostics["combined_uncertainty"] = combined
    if failed_tail:
        verdict = _VERDICT_INCONCLUSIVE
    elif gap > 10.0 * combined:
        verdict = _VERDICT_ELSEWHERE
    elif gap < 3.0 * combined:
        verdict = _VERDICT_TO_VALUE
    else:
        verdict = _VERDICT_INCONCLUSIVE
    return ProbeReport(f.spec, seq.describe(), tuple(rows), limit, unc, ref.value,
                       verdict, gap, diagnostics)


@dataclass(frozen=True)
class WeakContinuityReport:
    samples: tuple               # (t, value) pairs on the initial grid
    max_initial_jump: float
    refined_jump: float
    refined_interval: float
    bracket: tuple
    jump_history: tuple
    passed: bool

    def to_json(self) -> dict:
        return {"samples": [{"t": t, "value": v} for (t, v) in self.samples],
                "max_initial_jump": self.max_initial_jump,
                "refined_jump": self.refined_jump,
                "refined_interval": self.refined_interval,
                "bracket": list(self.bracket),
                "jump_history": list(self.jump_history),
                "passed": self.passed}


def weak_continuity_scan(f: Kernel, xi, path: Callable[[float], np.ndarray],
                         steps: int = 48, refine_rounds: int = 16,
                         jump_threshold: float = 1e-4, method: str = "auto",
                         samples: int = 100000, seed: int = 0) -> WeakContinuityReport:
    """Scan the valuation along a path of halfspace offsets.

    Samples t -> phi(P(y(t))), locates the largest jump between consecutive
    samples, and bisects that bracket; the scan passes when the refined jump
    shrinks with the bracket and ends below the threshold.
    """
    A = np.asarray(xi, dtype=float)

    def value_at(t: float) -> float:
        body = hrep_polytope(A, np.asarray(path(t), dtype=float))
        return phi(f, body, method=method, samples=samples, seed=seed).value

    ts = np.linspace(0.0, 1.0, steps + 1)
    vals = [value_at(t) for t in ts]
    jumps = np.abs(np.diff(vals))
    j = int(np.argmax(jumps))
    max_jump = float(jumps[j])

    lo, hi = float(ts[j]), float(ts[j + 1])
    v_lo, v_hi = vals[j], vals[j + 1]
    history = [max_jump]
    for _ in range(refine_rounds):
        mid = 0.5 * (lo + hi)
        v_mid = value_at(mid)
        if abs(v_mid - v_lo) >= abs(v_hi - v_mid):
            hi, v_hi = mid, v_mid
        else:
            lo, v_lo = mid, v_mid
        history.append(abs(v_hi - v_lo))
    refined = abs(v_hi - v_lo)
    return WeakContinuityReport(tuple(zip(ts.tolist(), vals)), max_jump, refined,
                                hi - lo, (lo, hi), tuple(history),
                                refined < jump_threshold)


def probe_report_to_json_str(report: ProbeReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True, indent=2)
