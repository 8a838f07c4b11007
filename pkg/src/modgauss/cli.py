"""Command-line entry point.

Every subcommand is deterministic given its configuration and seed: random
draws come from counter-based streams split into fixed chunks, so outputs
do not depend on ``--threads``.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__

THREADS_ENV = "MODGAUSS_THREADS"
SIMULATE_MODELS = ("lattice", "circle", "sphere", "cue", "er", "markov")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending knob."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    """Everything a run depends on.  Serializes to JSON and back without loss."""

    command: str
    params: dict = field(default_factory=dict)
    seed: int = 7
    threads: int = 1
    out: str | None = None

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        raw = json.loads(text)
        unknown = set(raw) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration field")
        return cls(**raw)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------
def _clean(obj: Any) -> Any:
    """JSON-safe copy: numpy scalars become Python numbers, non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps_json(obj: Any) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _emit(cfg: ExperimentConfig, text: str, summary: dict) -> None:
    summary = {"command": cfg.command, "seed": cfg.seed, "status": "ok", **summary}
    line = json.dumps(_clean(summary), sort_keys=True)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(line)
    else:
        sys.stdout.write(text)
        print(line, file=sys.stderr)


def _load_json(path: str, field_name: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(field_name, f"cannot read JSON from {path!r}: {exc}") from exc


def _load_csv(path: str, field_name: str) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError):
        try:
            arr = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=1)
        except (OSError, ValueError) as exc:
            raise ConfigError(field_name, f"cannot read numeric CSV from {path!r}: {exc}") from exc
    if arr.size == 0:
        raise ConfigError(field_name, "no samples")
    return arr


def _stream(cfg: ExperimentConfig, stream: int = 0):
    from .numeric_core import RngStream

    return RngStream(cfg.seed, stream)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------
def run_cumulants(cfg: ExperimentConfig) -> dict:
    from .cumulants import empirical_joint_cumulant, joint_cumulant
    from .models.lattice import lattice_step_oracle

    p = cfg.params
    idx = [int(i) for i in str(p.get("indices", "0,0")).split(",") if i != ""]
    order = p.get("order")
    if order is not None and int(order) != len(idx):
        raise ConfigError("order", f"order {order} does not match {len(idx)} indices")
    if not 1 <= len(idx) <= 6:
        raise ConfigError("indices", "between 1 and 6 indices are supported")
    if p.get("samples"):
        data = _load_csv(p["samples"], "samples")
        if max(idx) >= data.shape[1] or min(idx) < 0:
            raise ConfigError("indices", "index outside the sample dimension")
        est = empirical_joint_cumulant(data, idx)
        res = {"indices": idx, "estimate": est, "n": int(data.shape[0]),
               "estimator": "plug-in moments of the empirical law (bias O(1/n))"}
    else:
        model = p.get("model", "lattice")
        if model != "lattice":
            raise ConfigError("model", "exact cumulants are available for the 'lattice' step law")
        d = int(p.get("dim", 2))
        if max(idx) >= d or min(idx) < 0:
            raise ConfigError("indices", "index outside the model dimension")
        est = joint_cumulant(lattice_step_oracle(d), idx)
        res = {"indices": idx, "estimate": est, "n": None, "estimator": "exact, one step of the walk"}
    _emit(cfg, dumps_json(res), {"estimate": est})
    return res


def run_mc_check(cfg: ExperimentConfig) -> dict:
    from .depgraph import IidStepsModel, check_mc_hypotheses
    from .models.lattice import LatticeWalkModel

    p = cfg.params
    model_name = p.get("model", "lattice")
    d = int(p.get("dim", 2))
    if model_name == "lattice":
        model = IidStepsModel(LatticeWalkModel(d, 1).steps)
        K = np.eye(d) / d
    elif model_name == "bernoulli":
        q = float(p.get("p", 0.3))
        if not 0 < q < 1:
            raise ConfigError("p", "must lie in (0, 1)")
        model = IidStepsModel(np.array([[-q], [1 - q]]), np.array([1 - q, q]))
        K = np.array([[q * (1 - q)]])
    else:
        raise ConfigError("model", "choose 'lattice' or 'bernoulli'")
    grid = [int(n) for n in str(p.get("n_grid", "16,64,256,1024")).split(",")]
    rep = check_mc_hypotheses(model, grid, int(p.get("v", 4)), K, tol=float(p.get("tol", 1e-8)))
    _emit(cfg, dumps_json(rep), {"statuses": {k: v["status"] for k, v in rep.items() if isinstance(v, dict) and "status" in v}})
    return rep


def run_distance(cfg: ExperimentConfig) -> dict:
    from .numeric_core import SpdMatrix
    from .smoothing_distance import (SMOOTHING_FACTOR, EmpiricalFT, GaussianFT, convex_distance_lower_bound,
                                     convex_distance_upper_bound, delta_epsilon, gaussian_regularity_constant)

    p = cfg.params
    if not p.get("samples"):
        raise ConfigError("samples", "a CSV of samples is required")
    x = _load_csv(p["samples"], "samples")
    d = x.shape[1]
    mean = np.zeros(d)
    if p.get("gaussian"):
        g = _load_json(p["gaussian"], "gaussian")
        K = np.asarray(g["K"] if isinstance(g, dict) else g, dtype=float)
        if isinstance(g, dict) and "mean" in g:
            mean = np.asarray(g["mean"], dtype=float)
    else:
        K = np.eye(d)
    try:
        Ks = SpdMatrix(np.atleast_2d(K))
    except ValueError as exc:
        raise ConfigError("gaussian", str(exc)) from exc
    if Ks.dim != d:
        raise ConfigError("gaussian", "covariance dimension differs from the sample dimension")
    eps = float(p.get("eps", 0.4))
    if not 0 < eps < 1 / math.sqrt(2 * d + 2):
        raise ConfigError("eps", f"must lie in (0, 1/sqrt(2d+2)) = (0, {1 / math.sqrt(2 * d + 2):.4f})")
    families = [f for f in str(p.get("families", "halfspace,ball,box")).split(",") if f]
    try:
        low = convex_distance_lower_bound(x, Ks, mean, families)
    except ValueError as exc:
        raise ConfigError("families", str(exc)) from exc
    # the smoothing bound compares centred transforms
    panels = p.get("panels")
    if panels is not None and int(panels) < 1:
        raise ConfigError("panels", "must be a positive integer")
    delta = delta_epsilon(EmpiricalFT(x - mean), GaussianFT(Ks), eps, d,
                          panels=None if panels is None else int(panels))
    R = gaussian_regularity_constant(Ks)
    upper = convex_distance_upper_bound(delta, R, eps, d)
    res = {"lower_bound": low["lower_bound"], "families": low, "delta_eps": delta, "upper_bound": upper,
           "R": R, "constant": 2.0 / SMOOTHING_FACTOR * (d + 1) ** ((d + 1) / 2), "eps": eps, "n": int(x.shape[0])}
    _emit(cfg, dumps_json(res), {"lower_bound": res["lower_bound"], "upper_bound": upper})
    return res


def run_mesh(cfg: ExperimentConfig) -> dict:
    from .sphere_mesh import build_mesh, sphere_area

    p = cfg.params
    d, b, m = int(p.get("dim", 2)), float(p.get("radius", 1.0)), int(p.get("res", 32))
    if not 2 <= d <= 4:
        raise ConfigError("dim", "must lie in [2, 4]")
    try:
        mesh = build_mesh(d, b, m, int(p.get("order", 16)))
    except ValueError as exc:
        raise ConfigError("res" if "resolution" in str(exc) else "radius", str(exc)) from exc
    c, w = mesh.centers, mesh.measures
    header = ["facet"] + [f"x{i + 1}" for i in range(d)] + ["measure"]
    text = dumps_csv(header, ([i, *c[i], w[i]] for i in range(len(w))))
    total = mesh.total_measure()
    _emit(cfg, text, {"facets": len(w), "total_measure": total, "sphere_area": sphere_area(d, b)})
    return {"facets": len(w), "total_measure": total}


def parse_sector(spec: dict, K):
    from .largedev import SphericalSector

    try:
        b = float(spec["b"])
        kind = spec["kind"]
        data = spec["data"]
    except (KeyError, TypeError) as exc:
        raise ConfigError("sector", "expected an object with keys b, kind, data") from exc
    if kind == "angular":
        return SphericalSector.angular(b, float(data[0]), float(data[1]), K=K)
    if kind == "facet-cells":
        d = int(spec.get("d", np.asarray(K).shape[0]))
        cells = [(int(c[0]), tuple(int(v) for v in c[1:])) for c in data["cells"]]
        return SphericalSector.facet_cells(b, d, int(data["m"]), cells, K=K)
    raise ConfigError("sector", f"unknown sector kind {kind!r}")


def run_tailprob(cfg: ExperimentConfig) -> dict:
    from .largedev import CueBarnes, ToyModel, UniformCube, tail_probability_formula, tilted_mc_tail
    from .models.cue import CueModel
    from .models.lattice import LatticeWalkModel

    p = cfg.params
    model_name = p.get("model", "toy")
    spec = _load_json(p["sector"], "sector") if p.get("sector") else {"b": 1.0, "kind": "angular",
                                                                      "data": [0.0, math.pi / 4]}
    d = int(spec.get("d", 2))
    if model_name == "toy":
        t_n = float(p.get("tn", 64.0))
        if t_n <= 0:
            raise ConfigError("tn", "must be positive")
        model = ToyModel(t_n, UniformCube(d))
        K, psi = np.eye(d), model
    elif model_name == "lattice":
        n = int(p.get("n", 1024))
        model = LatticeWalkModel(d, n)
        t_n, K, psi = model.t_n, model.K, model.residue()
    elif model_name == "cue":
        model = CueModel(int(p.get("n", 64)))
        t_n, K, psi = model.t_n, np.eye(2), CueBarnes()
    else:
        raise ConfigError("model", "choose toy, lattice or cue")
    sector = parse_sector(spec, K)
    res_m = int(p.get("res", 64))
    try:
        formula = tail_probability_formula(t_n, sector, psi, res=res_m)
    except ValueError as exc:
        raise ConfigError("sector", str(exc)) from exc
    tilt = p.get("tilt")
    if tilt is None:
        # default tilt: the base point of the sector direction closest to its centre on the mesh
        h = _default_tilt(sector) if model_name != "cue" else np.zeros(d)
    else:
        try:
            h = np.asarray([float(v) for v in str(tilt).split(",")])
        except ValueError as exc:
            raise ConfigError("tilt", "expected comma-separated numbers") from exc
        if h.shape != (d,):
            raise ConfigError("tilt", f"expected {d} components")
    n_mc = int(p.get("mc_samples", 10 ** 6))
    if n_mc < 1:
        raise ConfigError("mc_samples", "must be positive")
    try:
        est, se = tilted_mc_tail(model, sector.contains, t_n, h, n_mc, _stream(cfg), threads=cfg.threads)
    except ValueError as exc:
        raise ConfigError("tilt", str(exc)) from exc
    res = {"formula": formula, "mc_estimate": est, "mc_stderr": se, "ratio": est / formula if formula > 0 else None,
           "t_n": t_n, "tilt": h, "model": model_name}
    _emit(cfg, dumps_json(res), {"ratio": res["ratio"]})
    return res


def _default_tilt(sector) -> np.ndarray:
    """Tilt b K^{-1/2} u that centres X_n / t_n on the sector base, u the mean sector direction."""
    from .sphere_mesh import build_mesh

    mesh = build_mesh(sector.d, 1.0, 16)
    sel = np.asarray(sector.region(mesh.centers @ sector.K.sqrt().T), dtype=bool)
    if not sel.any():
        return np.zeros(sector.d)
    c = (mesh.centers[sel] * mesh.measures[sel, None]).sum(axis=0)
    norm = np.linalg.norm(c)
    if norm == 0:
        return np.zeros(sector.d)
    return sector.b * (sector.K.inv_sqrt() @ (c / norm))


def run_simulate(cfg: ExperimentConfig) -> dict:
    from .models import circle, cue, erdos_renyi, lattice, markov, sphere

    p = cfg.params
    model_name = p.get("model")
    if model_name not in SIMULATE_MODELS:
        raise ConfigError("model", f"choose one of {', '.join(SIMULATE_MODELS)}")
    mp = _load_json(p["params"], "params") if p.get("params") else {}
    mp.update(p.get("model_params") or {})
    samples = int(p.get("samples", 1000))
    if samples < 1:
        raise ConfigError("samples", "must be positive")
    traj = bool(p.get("trajectory", False))
    rng = _stream(cfg).generator()
    try:
        if model_name == "lattice":
            m = lattice.LatticeWalkModel(int(mp.get("d", 2)), int(mp.get("n", 1024)))
            data = lattice.lattice_walk_trajectory(m, rng) if traj else lattice.lattice_walk_sample(m, rng, samples)
        elif model_name == "circle":
            m = circle.CircleWalkModel(int(mp.get("N", 1000)), int(mp.get("D", 40)), float(mp.get("lam", 1.0)))
            data = circle.circle_walk_sample(m, rng, samples, trajectory=traj)
        elif model_name == "sphere":
            m = sphere.SphereWalkModel(int(mp.get("N", 1000)), int(mp.get("D", 40)), float(mp.get("lam", 1.0)),
                                       int(mp.get("substeps", 4)))
            data = sphere.sphere_walk_sample(m, rng, samples, trajectory=traj)
        elif model_name == "cue":
            data = cue.cue_logdet_sample(int(mp.get("n", 32)), rng, samples)
        elif model_name == "er":
            motifs = tuple(_motif(s) for s in mp.get("motifs", ["edge", "triangle"]))
            m = erdos_renyi.ErdosRenyiModel(int(mp.get("n", 30)), float(mp.get("p", 0.3)), motifs)
            data = erdos_renyi.er_subgraph_counts(m, rng, samples)
        else:
            P = np.asarray(mp.get("P", [[0.5, 0.3, 0.2], [0.3, 0.4, 0.3], [0.2, 0.3, 0.5]]), dtype=float)
            m = markov.MarkovModel(P)
            n = int(mp.get("n", 1000))
            data = markov.markov_empirical(m, n, rng, trajectory=True) if traj else markov.markov_empirical(m, n, rng, samples)
    except ValueError as exc:
        raise ConfigError("params", str(exc)) from exc
    data = np.asarray(data)
    if data.ndim == 1:
        data = data[:, None]
    prefix = "step" if traj else "sample"
    header = [prefix] + [f"x{i + 1}" for i in range(data.shape[1])]
    text = dumps_csv(header, ([i, *row] for i, row in enumerate(data)))
    _emit(cfg, text, {"rows": int(data.shape[0]), "model": model_name})
    return {"rows": int(data.shape[0])}


def _motif(name):
    from .models.erdos_renyi import Motif

    if isinstance(name, dict):
        return Motif(int(name["k"]), tuple(tuple(e) for e in name["edges"]))
    table = {"edge": Motif.edge(), "triangle": Motif.triangle(), "path2": Motif.path(2), "path3": Motif.path(3)}
    if name not in table:
        raise ConfigError("params", f"unknown motif {name!r}")
    return table[name]


def run_figure(cfg: ExperimentConfig) -> dict:
    from .largedev import cue_sector_density, lattice_conditional_density

    p = cfg.params
    which = p.get("which", "H")
    grid = int(p.get("grid", 100))
    if grid < 1:
        raise ConfigError("grid", "must be positive")
    rs = [float(v) for v in str(p.get("r", "0.7")).split(",")]
    theta = 2 * math.pi * np.arange(grid + 1) / grid
    cols = []
    for r in rs:
        try:
            if which == "H":
                cols.append(cue_sector_density(r, theta))
            elif which == "F":
                cols.append(lattice_conditional_density(r, theta))
            else:
                raise ConfigError("which", "choose F or H")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("r", str(exc)) from exc
    header = ["theta"] + [f"{which}(r={r:g})" for r in rs]
    text = dumps_csv(header, ([theta[i], *(c[i] for c in cols)] for i in range(grid + 1)))
    _emit(cfg, text, {"rows": grid + 1, "which": which})
    return {"rows": grid + 1}


COMMANDS = {
    "cumulants": run_cumulants,
    "mc-check": run_mc_check,
    "distance": run_distance,
    "mesh": run_mesh,
    "tailprob": run_tailprob,
    "simulate": run_simulate,
    "figure": run_figure,
}


def run(config: ExperimentConfig) -> int:
    """Execute one configuration; returns the process exit status."""
    if config.command not in COMMANDS:
        print(f"error: command: unknown subcommand {config.command!r}", file=sys.stderr)
        return 2
    if config.threads < 1:
        print("error: threads: must be at least 1", file=sys.stderr)
        return 2
    try:
        COMMANDS[config.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------
def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _show_defaults(parser: argparse.ArgumentParser) -> None:
    """Give every option a help text so the formatter prints its default."""
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                _show_defaults(sub)
        elif action.help is None and action.option_strings and action.nargs != 0:
            action.help = "(default: %(default)s)"


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="modgauss", formatter_class=fmt,
                                     description="Mod-Gaussian cumulants, distances, meshes and tail asymptotics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=_default_threads(),
                        help=f"worker threads (default from ${THREADS_ENV}); results do not depend on it")
    parser.add_argument("--seed", type=int, default=7, help="master seed of the random streams")
    parser.add_argument("--out", default=None, help="output file; stdout when omitted")
    parser.add_argument("--config", default=None, help="run a saved ExperimentConfig JSON instead of flags")
    parser.add_argument("--save-config", default=None, help="write the resolved ExperimentConfig JSON here")
    sub = parser.add_subparsers(dest="command")

    s = sub.add_parser("cumulants", formatter_class=fmt, help="joint cumulants from samples or an exact model")
    s.add_argument("--samples", default=None, help="CSV of samples (one row per observation)")
    s.add_argument("--model", default="lattice", help="exact model when no samples are given")
    s.add_argument("--dim", type=int, default=2, help="model dimension")
    s.add_argument("--order", type=int, default=None, help="cumulant order (checked against --indices)")
    s.add_argument("--indices", default="0,0", help="comma-separated coordinate indices")

    s = sub.add_parser("mc-check", formatter_class=fmt, help="check the method-of-cumulants hypotheses")
    s.add_argument("--model", default="lattice", choices=["lattice", "bernoulli"])
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--p", type=float, default=0.3, help="success probability of the bernoulli model")
    s.add_argument("--n-grid", default="16,64,256,1024")
    s.add_argument("--v", type=int, default=4, help="scaling exponent v >= 3")
    s.add_argument("--tol", type=float, default=1e-8)

    s = sub.add_parser("distance", formatter_class=fmt, help="convex-distance bounds between samples and a Gaussian")
    s.add_argument("--samples", required=True)
    s.add_argument("--gaussian", default=None, help='JSON {"K": [[...]], "mean": [...]} or a bare matrix')
    s.add_argument("--eps", type=float, default=0.4)
    s.add_argument("--families", default="halfspace,ball,box")
    s.add_argument("--panels", type=int, default=None,
                   help="quadrature panels per axis for Delta_eps (default: panels at most 2 wide)")

    s = sub.add_parser("mesh", formatter_class=fmt, help="hypercubic facets of a sphere")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--res", type=int, default=32)
    s.add_argument("--order", type=int, default=16, help="Gauss-Legendre nodes per axis and cell")

    s = sub.add_parser("tailprob", formatter_class=fmt, help="sector tail formula against tilted Monte Carlo")
    s.add_argument("--model", default="toy", choices=["toy", "lattice", "cue"])
    s.add_argument("--tn", type=float, default=64.0, help="t_n of the toy model")
    s.add_argument("--n", type=int, default=1024, help="steps (lattice) or matrix size (cue)")
    s.add_argument("--sector", default=None, help="sector JSON; default b=1, angles [0, pi/4]")
    s.add_argument("--res", type=int, default=64)
    s.add_argument("--mc-samples", type=int, default=10 ** 6)
    s.add_argument("--tilt", default=None, help="comma-separated exponential tilt on X_n; default centres X_n/t_n on the sector base")

    s = sub.add_parser("simulate", formatter_class=fmt, help="draw samples or trajectories of an example model")
    s.add_argument("--model", required=True, choices=list(SIMULATE_MODELS))
    s.add_argument("--params", default=None, help="JSON file of model parameters")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--trajectory", action="store_true", help="emit one trajectory, one row per step")

    s = sub.add_parser("figure", formatter_class=fmt, help="tables of the angular densities F and H")
    s.add_argument("--which", default="H", choices=["F", "H"])
    s.add_argument("--r", default="0.7", help="comma-separated radii")
    s.add_argument("--grid", type=int, default=100, help="theta = 2 pi k / grid, k = 0..grid")
    _show_defaults(parser)
    return parser


_GLOBAL = {"threads", "seed", "out", "config", "save_config", "command"}


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    params = {k: v for k, v in vars(ns).items() if k not in _GLOBAL}
    return ExperimentConfig(ns.command, params, seed=ns.seed, threads=ns.threads, out=ns.out)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                cfg = ExperimentConfig.from_json(fh.read())
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            print(f"error: config: {exc}", file=sys.stderr)
            return 2
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    elif ns.command is None:
        parser.print_help()
        return 2
    else:
        cfg = config_from_args(ns)
    if ns.save_config:
        with open(ns.save_config, "w", encoding="utf-8") as fh:
            fh.write(cfg.to_json() + "\n")
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
