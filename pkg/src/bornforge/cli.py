"""Command-line driver.

    bornforge train --config run.json --out runs/lognormal
    bornforge entanglement --target bas:4x4 --out runs/bas4
    bornforge bound --kl 1e-4 --alpha 10 --time 1

Run configs are JSON::

    {
      "dataset": {"pdf": {"family": "lognormal", "params": {"mu": 1, "sigma": 0.5}, "a": 1, "b": 9}},
      "remap": false,
      "model": {"type": "aclbm", "n_operators": 3, "eps1": 1e-3, "eps2": 5e-3},
      "loss": {"tag": "KL"},
      "seed": 0
    }

The dataset holds exactly one of ``pdf``, ``benchmark`` ({family, n}),
``samples`` ({path, n, m, a}), ``bas`` ({rows, cols}) or ``image``
({path, downsample}).  Model types are ``aclbm``, ``structure1``,
``structure2`` and ``mps``.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import baselines, bounds, data, entanglement
from .circuit import save_circuit
from .losses import LossKind
from .pool import build_full_pool, build_reduced_pool
from .trainer import TrainConfig, train_aclbm

log = logging.getLogger("bornforge")

DATASET_KEYS = ("pdf", "benchmark", "samples", "bas", "image")
MODEL_TYPES = ("aclbm",) + baselines.FAMILIES
ACLBM_KEYS = {"n_operators", "eps1", "eps2", "alpha", "beta1", "beta2", "adam_eps", "max_iterations",
              "max_epochs", "append_order", "reset_optimizer", "step_control",
              "pool_reduction"}
FIXED_KEYS = {"depth", "lr", "max_epochs", "eps2"}


class ConfigError(ValueError):
    pass


# --- datasets -------------------------------------------------------------------

def load_dataset(ds: dict, base: Path = Path(".")) -> np.ndarray:
    """Target distribution described by a dataset section."""
    if not isinstance(ds, dict):
        raise ConfigError("dataset must be an object")
    present = [k for k in DATASET_KEYS if k in ds]
    if len(present) != 1 or set(ds) - set(DATASET_KEYS):
        raise ConfigError(f"dataset needs exactly one of {DATASET_KEYS}, got {sorted(ds)}")
    kind = present[0]
    d = ds[kind]
    if kind == "pdf":
        return data.discretize_pdf(data.PdfSpec.from_dict(d))
    if kind == "benchmark":
        return data.benchmark_distribution(d["family"], int(d["n"]))
    if kind == "samples":
        samples = np.loadtxt(base / d["path"], dtype=float, ndmin=1)
        return data.empirical_distribution(samples, int(d["n"]), int(d.get("m", 0)), (float(d.get("a", 0.0)), None))
    if kind == "bas":
        return data.bas_distribution(int(d["rows"]), int(d["cols"]))
    pixels = data.read_pgm(base / d["path"])
    factor = int(d.get("downsample", 1))
    if factor > 1:
        pixels = data.downsample(pixels, factor)
    return data.image_to_distribution(pixels)


def parse_target(text: str) -> np.ndarray:
    """Target for the entanglement command: a JSON file or a shorthand.

    Shorthands: ``bas:RxC``, ``benchmark:FAMILY:N``, ``image:PATH``.
    """
    path = Path(text)
    if path.suffix == ".json" and path.exists():
        cfg = json.loads(path.read_text(encoding="utf-8"))
        return load_dataset(cfg.get("dataset", cfg), path.parent)
    head, _, rest = text.partition(":")
    if head == "bas":
        rows, cols = rest.lower().split("x")
        return data.bas_distribution(int(rows), int(cols))
    if head == "benchmark":
        family, n = rest.split(":")
        return data.benchmark_distribution(family, int(n))
    if head == "image":
        return data.image_to_distribution(data.read_pgm(rest))
    raise ConfigError(f"cannot interpret target {text!r}")


# --- config -----------------------------------------------------------------------

def parse_loss(d: dict | None) -> LossKind:
    d = d or {}
    return LossKind(d.get("tag", "KL"), d.get("kernel_sigmas"))


def validate_config(cfg) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if "dataset" not in cfg:
        raise ConfigError("config needs a dataset section")
    model = cfg.get("model", {"type": "aclbm"})
    mtype = model.get("type", "aclbm")
    if mtype not in MODEL_TYPES:
        raise ConfigError(f"model type must be one of {MODEL_TYPES}")
    allowed = ACLBM_KEYS if mtype == "aclbm" else FIXED_KEYS
    extra = set(model) - allowed - {"type"}
    if extra:
        raise ConfigError(f"unknown {mtype} settings: {sorted(extra)}")
    if mtype != "aclbm" and int(model.get("depth", 1)) < 1:
        raise ConfigError("depth must be at least 1")
    r = model.get("pool_reduction", 0.0)
    if not 0.0 <= r <= 1.0:
        raise ConfigError("pool_reduction must lie in [0, 1]")
    return cfg


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def run_training(cfg: dict, out: Path, base: Path = Path(".")) -> dict:
    """Train per ``cfg`` and write the run directory.  Returns final metrics."""
    cfg = validate_config(cfg)
    p = load_dataset(cfg["dataset"], base)
    n = int(round(np.log2(p.size)))
    order = None
    if cfg.get("remap", False):
        p, order = data.remap_sorted(p)
    loss = parse_loss(cfg.get("loss"))
    seed = int(cfg.get("seed", 0))
    model = dict(cfg.get("model", {"type": "aclbm"}))
    mtype = model.pop("type", "aclbm")
    out.mkdir(parents=True, exist_ok=True)

    if mtype == "aclbm":
        r = float(model.pop("pool_reduction", 0.0))
        pool = build_full_pool(n)
        if r > 0:
            pool = build_reduced_pool(pool, entanglement.mutual_information_matrix(entanglement.target_state(p)), r)
        circuit, theta, report = train_aclbm(p, pool, TrainConfig(loss=loss, seed=seed, **model))
        report.final["pool_size"] = len(pool)
    else:
        circuit = baselines.FixedAnsatzSpec(mtype, n, int(model.pop("depth", 1)), seed).build()
        theta, report = baselines.train_fixed(circuit, p, loss, seed=seed, **model)

    metrics = dict(report.final, model=mtype, loss_tag=loss.tag, n_qubits=n, remapped=order is not None)
    save_circuit(out / "circuit.json", circuit, theta)
    report.write_history(out / "history.csv")
    _write_json(out / "metrics.json", metrics)
    _write_json(out / "config.json", cfg)
    files = ["circuit.json", "history.csv", "metrics.json", "config.json"]
    if order is not None:
        _write_json(out / "remap.json", {"order": [int(k) for k in order]})
        files.append("remap.json")
    _write_json(out / "manifest.json", {"seed": seed, "sha256": {f: _sha256(out / f) for f in files}})
    return metrics


def write_matrix_csv(path: Path, m: np.ndarray):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in m:
            w.writerow([repr(float(v)) for v in row])


# --- commands ---------------------------------------------------------------------

def cmd_train(args) -> int:
    path = Path(args.config)
    try:
        cfg = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as e:
        print(f"error: invalid JSON in {path}: {e}", file=sys.stderr)
        return 2
    try:
        metrics = run_training(cfg, Path(args.out), path.parent)
    except (ConfigError, KeyError, TypeError, ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    print(json.dumps({k: metrics[k] for k in ("kl", "parameters", "depth", "cumulative_measurements")}))
    return 0


def cmd_entanglement(args) -> int:
    try:
        p = parse_target(args.target)
    except (ConfigError, KeyError, ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    state = entanglement.target_state(p)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    qmi = entanglement.mutual_information_matrix(state)
    eof = entanglement.eof_matrix(state)
    write_matrix_csv(out / "qmi.csv", qmi)
    write_matrix_csv(out / "eof.csv", eof)
    print(json.dumps({"max_qmi": float(qmi.max()), "max_eof": float(eof.max())}))
    return 0


def cmd_bound(args) -> int:
    try:
        report = bounds.bound_report(args.kl, args.alpha, args.time)
        if args.eps is not None:
            report["eps"] = args.eps
            report["required_kl"] = bounds.required_kl(args.eps, args.alpha, args.time)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(json.dumps(report, indent=1, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bornforge", description="Adaptive Born-machine state preparation")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress per iteration")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a circuit from a JSON run config")
    t.add_argument("--config", required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("entanglement", help="pairwise QMI and EOF of a target state")
    e.add_argument("--target", required=True, help="JSON file, bas:RxC, benchmark:FAMILY:N or image:PATH")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_entanglement)

    b = sub.add_parser("bound", help="time-evolution error bound for a KL error")
    b.add_argument("--kl", type=float, required=True)
    b.add_argument("--alpha", type=float, required=True)
    b.add_argument("--time", type=float, required=True)
    b.add_argument("--eps", type=float, help="also report the KL needed for this error")
    b.set_defaults(func=cmd_bound)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)
