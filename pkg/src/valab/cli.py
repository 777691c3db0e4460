"""Batch experiment runner: faces, valuations, continuity probes, and
cosine-transform studies driven by JSON configs.

Reports are written as JSON plus plot-ready CSV.  Identical config and seed
give byte-identical reports: all quadratures use fixed grids and reductions
run in a pinned order.  Exit codes: 0 success, 2 validation error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import (GeometryError, Polytope, PolytopeSequence, ball_family,
                       box, bulge_family, convex_hull, hrep_polytope,
                       standard_simplex)
from .faces import enumerate_faces, exterior_angle, region_measure
from .kernels import Kernel, kernel_from_spec
from .transforms import (NumericalFailure, SphereFunction, cosine_multipliers,
                         cosine_transform, harmonic_project, range_diagnostic)
from .valuation import continuity_probe, phi

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment configuration; round-trips losslessly to JSON."""

    command: str
    data: dict

    @staticmethod
    def load(path: Path, command: str, overrides: dict) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        cfg_cmd = raw.get("command", command)
        if cfg_cmd != command:
            raise ConfigError(f"config command {cfg_cmd!r} does not match {command!r}")
        data = dict(raw)
        data["command"] = command
        for key, val in overrides.items():
            if val is not None:
                data[key] = val
        data.setdefault("seed", 0)
        data.setdefault("samples", 100000)
        data.setdefault("out", ".")
        pf = data.get("polytope", {})
        if isinstance(pf, dict) and pf.get("kind") == "file":
            if not Path(pf["params"]["path"]).exists():
                raise ConfigError(f"polytope file not found: {pf['params']['path']}")
        return ExperimentConfig(command, data)

    def to_json(self) -> dict:
        return dict(self.data)


def polytope_from_spec(spec: dict) -> Polytope:
    kind = spec.get("kind")
    params = dict(spec.get("params", {}))
    if kind == "cube":
        n = int(params.get("n", 3))
        return box([float(params.get("side", 1.0))] * n)
    if kind == "box":
        return box(params["sides"], params.get("corner"))
    if kind == "simplex":
        return standard_simplex(int(params.get("n", 3)))
    if kind == "vertices":
        return convex_hull(np.asarray(params["vertices"], dtype=float))
    if kind == "hrep":
        return hrep_polytope(np.asarray(params["normals"], dtype=float),
                             np.asarray(params["offsets"], dtype=float))
    if kind == "file":
        return Polytope.from_json(json.loads(Path(params["path"]).read_text()))
    raise ConfigError(f"unknown polytope kind {kind!r}")


def sequence_from_spec(spec: dict) -> PolytopeSequence:
    family = spec.get("family")
    params = dict(spec.get("params", {}))
    if family == "bulge":
        base = polytope_from_spec(params["base"])
        schedule = params.get("height_schedule", {"kind": "inverse", "scale": 0.15})
        if schedule.get("kind") != "inverse":
            raise ConfigError("only the inverse height schedule m -> scale/m is defined")
        scale = float(schedule.get("scale", 0.15))
        return bulge_family(base, tuple(params["edge"]),
                            delta=float(params.get("delta", 0.15)),
                            segments=int(params.get("segments", 8)),
                            height_schedule=lambda m: scale / m)
    if family == "ball":
        return ball_family(params.get("center", [0.0, 0.0, 0.0]),
                           float(params.get("radius", 1.0)),
                           base_count=int(params.get("base_count", 16)),
                           layout=params.get("layout", "fibonacci"),
                           axis=params.get("axis"))
    raise ConfigError(f"unknown sequence family {family!r}")


def _json_bytes(payload: dict) -> bytes:
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()


def _write_report(out_dir: Path, name: str, payload: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_bytes(_json_bytes(payload))
    return path


def _write_csv(out_dir: Path, name: str, rows: list[list]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    return path


def _base_report(cfg: ExperimentConfig) -> dict:
    return {"version": __version__, "config": cfg.to_json()}


def cmd_faces(cfg: ExperimentConfig) -> int:
    P = polytope_from_spec(cfg.data["polytope"])
    k = int(cfg.data.get("k", 1))
    method = cfg.data.get("method", "auto")
    samples = int(cfg.data["samples"])
    seed = int(cfg.data["seed"])
    faces = enumerate_faces(P, k) if P.affine_dim >= k else []
    rows = [["face_id", "k", "kvol", "measure", "measure_stderr"]]
    table = []
    for i, F in enumerate(faces):
        region = exterior_angle(P, F)
        meas_method = "exact" if (method == "auto" and region.sphere_dim <= 1) else \
            ("mc" if method == "auto" else method)
        est = region_measure(region, method=meas_method, samples=samples, seed=seed + i)
        rows.append([i, k, F.kvol, est.value, est.stderr])
        table.append({"face_id": i, "k": k, "kvol": F.kvol,
                      "measure": est.value, "stderr": est.stderr})
    if not faces:
        print(f"warning: no {k}-faces (affine dimension {P.affine_dim})", file=sys.stderr)
    out = Path(cfg.data["out"])
    report = _base_report(cfg)
    report["faces"] = table
    _write_report(out, "faces.json", report)
    _write_csv(out, "faces.csv", rows)
    return EXIT_OK


def cmd_phi(cfg: ExperimentConfig) -> int:
    P = polytope_from_spec(cfg.data["polytope"])
    kern = kernel_from_spec(cfg.data["kernel"])
    res = phi(kern, P, method=cfg.data.get("method", "auto"),
              samples=int(cfg.data["samples"]), seed=int(cfg.data["seed"]))
    out = Path(cfg.data["out"])
    report = _base_report(cfg)
    report["result"] = res.to_json()
    _write_report(out, "phi.json", report)
    rows = [["face_id", "kvol", "inner_integral", "contribution", "stderr"]]
    rows += [[t.face_id, t.kvol, t.inner_integral, t.contribution, t.stderr]
             for t in res.per_face_terms]
    _write_csv(out, "phi_faces.csv", rows)
    return EXIT_OK


def cmd_probe(cfg: ExperimentConfig) -> int:
    seq = sequence_from_spec(cfg.data["sequence"])
    kern = kernel_from_spec(cfg.data["kernel"])
    report = continuity_probe(kern, seq, m_max=int(cfg.data.get("m_max", 64)),
                              extrapolation=cfg.data.get("extrapolation", "richardson"),
                              method=cfg.data.get("method", "auto"),
                              samples=int(cfg.data["samples"]),
                              seed=int(cfg.data["seed"]))
    out = Path(cfg.data["out"])
    payload = _base_report(cfg)
    payload["probe"] = report.to_json()
    _write_report(out, "probe.json", payload)
    _write_csv(out, "probe.csv", report.to_csv_rows())
    return EXIT_OK


def cmd_cosine(cfg: ExperimentConfig) -> int:
    out = Path(cfg.data["out"])
    payload = _base_report(cfg)
    max_degree = int(cfg.data.get("max_degree", 8))
    if "kernel" in cfg.data:
        kern = kernel_from_spec(cfg.data["kernel"])
        diag = range_diagnostic(kern, max_degree=max_degree)
        payload["range_diagnostic"] = diag.to_json()
    else:
        payload["multipliers"] = {str(d): lam for d, lam in cosine_multipliers(max_degree)}
        fn = cfg.data.get("function", "constant")
        if fn == "constant":
            g = SphereFunction(lambda P: np.ones(P.shape[0]), label="one")
        else:
            raise ConfigError(f"unknown sphere function {fn!r}")
        spec = harmonic_project(cosine_transform(g), max_degree)
        payload["transformed_spectrum"] = spec.to_json()
    _write_report(out, "cosine.json", payload)
    return EXIT_OK


_COMMANDS = {"faces": cmd_faces, "phi": cmd_phi, "probe": cmd_probe, "cosine": cmd_cosine}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="valab",
        description="Polytope valuation experiments: face tables, valuations, "
                    "continuity probes, cosine transform studies.")
    parser.add_argument("--version", action="version", version=f"valab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
    args = parser.parse_args(argv)

    try:
        cfg = ExperimentConfig.load(args.config, args.command,
                                    {"seed": args.seed, "samples": args.samples,
                                     "out": args.out})
        return _COMMANDS[args.command](cfg)
    except (ConfigError, GeometryError, ValueError) as exc:
        print(json.dumps({"error": "validation", "detail": str(exc)}), file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalFailure, RuntimeError) as exc:
        print(json.dumps({"error": "numerical", "detail": str(exc)}), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
