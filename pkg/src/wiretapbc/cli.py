"""Command-line entry point: ``python -m wiretapbc --config run.json``.

A run is described by one JSON document::

    {
      "command": "region",                  # region | enhance-verify | misome | misome-highsnr | check
      "channel": {
        "H1": [[1, 0], [0, 1]],             # optional, identity by default; 1-D list = one row
        "H2": [[1, 0], [0, 1]],
        "H3": [[1, 0], [0, 1]],
        "N1": [[1, 0], [0, 1]],             # a number means that multiple of the identity
        "N2": 1.5,
        "N3": 2,
        "S": [[1, 0], [0, 1]]               # or "P": 10 for a total power constraint
      },
      "solver": {"restarts": 32, "max_iter": 2000},
      "grids": {"mu": 32, "alpha": 101},    # a count or an explicit list
      "output": {"path": "out.csv", "format": "csv"},
      "seed": 0
    }

Errors are reported on stderr as one line of JSON and a non-zero exit code.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .channel import MISOME, SADBC, ChannelInstance, InputConstraint, aligned_from_general, classify, to_misome
from .enhance import certify_enhancement
from .exceptions import ConfigError, NonStationaryError, WiretapError
from .misome import default_alpha_grid, misome_highsnr, misome_rates, misome_sweep, rank_one_split
from .optimizer import (
    SearchBudget,
    WeightedObjective,
    default_mu_grid,
    maximize_weighted_sum,
    recover_multipliers,
    trace_boundary,
)
from .regions import CovarianceSplit, convex_closure, gaussian_rates, hull_contains, sdpc_rates

log = logging.getLogger(__name__)

COMMANDS = ("region", "enhance-verify", "misome", "misome-highsnr", "check")
FORMATS = ("csv", "json")
JSON_ONLY = ("enhance-verify", "misome-highsnr")
ASYM_TOL = 1e-9

REGION_HEADER = ["weight_mu", "permutation", "R1_bits", "R2_bits", "B1_rowmajor", "B2_rowmajor", "converged"]
MISOME_HEADER = ["alpha_split", "permutation", "R1_bits", "R2_bits"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    channel: dict
    solver: dict = field(default_factory=lambda: {"restarts": 32, "max_iter": 2000})
    grids: dict = field(default_factory=lambda: {"mu": 32, "alpha": 101})
    output: dict = field(default_factory=lambda: {"path": None, "format": "csv"})
    seed: int = 0

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def channel_instance(self) -> ChannelInstance:
        c = self.channel
        m = 2
        cons = InputConstraint.covariance(c["S"]) if "S" in c else InputConstraint.power(c["P"])
        return ChannelInstance(
            tuple(c[f"H{k + 1}"] for k in range(m)),
            tuple(c[f"N{k + 1}"] for k in range(m)),
            c["H3"],
            c["N3"],
            cons,
        )

    def budget(self) -> SearchBudget:
        return SearchBudget(max_iter=self.solver["max_iter"], restarts=self.solver["restarts"], seed=self.seed)

    def mu_grid(self) -> np.ndarray:
        g = self.grids["mu"]
        return default_mu_grid(g) if isinstance(g, int) else np.array(g, dtype=float)

    def alpha_grid(self) -> np.ndarray:
        g = self.grids["alpha"]
        return default_alpha_grid(g) if isinstance(g, int) else np.array(g, dtype=float)


# ---------------------------------------------------------------------------
# parsing


def _number(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(path, f"expected a finite number, got {v!r}")
    return float(v)


def _int(v, path, lo=1) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise ConfigError(path, f"expected an integer >= {lo}, got {v!r}")
    return v


def _matrix(v, path, vector_is_row=True) -> list:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return [[_number(v, path)]]
    if not isinstance(v, list) or not v:
        raise ConfigError(path, "expected a number or a non-empty (nested) list")
    if all(not isinstance(x, list) for x in v):
        row = [_number(x, f"{path}[{j}]") for j, x in enumerate(v)]
        return [row] if vector_is_row else [[x] for x in row]
    rows = []
    for i, r in enumerate(v):
        if not isinstance(r, list) or not r:
            raise ConfigError(f"{path}[{i}]", "expected a non-empty row")
        rows.append([_number(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)])
    if len({len(r) for r in rows}) != 1:
        raise ConfigError(path, "rows have different lengths")
    return rows


def _symmetric(M: list, path: str, name: str) -> list:
    A = np.array(M, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ConfigError(path, f"{name} must be square, got {A.shape[0]}x{A.shape[1]}")
    asym = float(np.max(np.abs(A - A.T)))
    if asym > ASYM_TOL * max(1.0, float(np.max(np.abs(A)))):
        warnings.warn(f"{path}: {name} is not symmetric (max asymmetry {asym:.3g}); symmetrizing", stacklevel=3)
    return (0.5 * (A + A.T)).tolist()


def _noise(v, path, name, r) -> list:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        M = (np.eye(r) * _number(v, path)).tolist()
    else:
        M = _symmetric(_matrix(v, path), path, name)
        if len(M) != r:
            raise ConfigError(path, f"{name} must be {r}x{r} to match its gain matrix")
    lo = float(np.linalg.eigvalsh(np.array(M))[0])
    if lo <= 0:
        raise ConfigError(path, f"{name} must be positive definite (min eigenvalue {lo:.6g})")
    return M


def _channel(c, path="$.channel") -> dict:
    if not isinstance(c, dict):
        raise ConfigError(path, "expected an object")
    known = {"H1", "H2", "H3", "N1", "N2", "N3", "S", "P"}
    extra = sorted(set(c) - known)
    if extra:
        raise ConfigError(f"{path}.{extra[0]}", "unknown field")
    if ("S" in c) == ("P" in c):
        raise ConfigError(path, "give exactly one of S (covariance constraint) or P (total power)")
    out = {}
    t = None
    if "S" in c:
        out["S"] = _symmetric(_matrix(c["S"], f"{path}.S"), f"{path}.S", "S")
        t = len(out["S"])
    for name in ("H1", "H2", "H3"):
        if name in c:
            out[name] = _matrix(c[name], f"{path}.{name}")
            cols = len(out[name][0])
            if t is None:
                t = cols
            elif cols != t:
                raise ConfigError(f"{path}.{name}", f"expected {t} columns, got {cols}")
    if t is None:
        for name in ("N1", "N2", "N3"):
            if name in c and isinstance(c[name], list):
                t = len(c[name]) if isinstance(c[name][0], list) else 1
                break
        else:
            t = 1
    for name in ("H1", "H2", "H3"):
        out.setdefault(name, np.eye(t).tolist())
    for k in ("1", "2", "3"):
        name = "N" + k
        if name not in c:
            raise ConfigError(f"{path}.{name}", "missing noise covariance")
        out[name] = _noise(c[name], f"{path}.{name}", name, len(out["H" + k]))
    if "P" in c:
        P = _number(c["P"], f"{path}.P")
        if P <= 0:
            raise ConfigError(f"{path}.P", f"P must be positive, got {P}")
        out["P"] = P
    else:
        lo = float(np.linalg.eigvalsh(np.array(out["S"]))[0])
        if lo < 0:
            raise ConfigError(f"{path}.S", f"S must be PSD (min eigenvalue {lo:.6g})")
    return dict(sorted(out.items()))


def _grid(v, path, lo, hi) -> Any:
    if isinstance(v, int) and not isinstance(v, bool):
        return _int(v, path, lo=2)
    if not isinstance(v, list) or not v:
        raise ConfigError(path, "expected a point count or a non-empty list")
    vals = [_number(x, f"{path}[{i}]") for i, x in enumerate(v)]
    for i, x in enumerate(vals):
        if not lo <= x <= hi:
            raise ConfigError(f"{path}[{i}]", f"value {x} outside [{lo}, {hi}]")
    return vals


def parse_config(text: str) -> RunConfig:
    """Validate a JSON run description; every error names its JSON path."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError("$", f"invalid JSON: {err}") from None
    if not isinstance(doc, dict):
        raise ConfigError("$", "expected a JSON object")
    extra = sorted(set(doc) - {"command", "channel", "solver", "grids", "output", "seed"})
    if extra:
        raise ConfigError(f"$.{extra[0]}", "unknown field")
    command = doc.get("command")
    if command not in COMMANDS:
        raise ConfigError("$.command", f"expected one of {', '.join(COMMANDS)}, got {command!r}")
    if "channel" not in doc:
        raise ConfigError("$.channel", "missing channel description")
    channel = _channel(doc["channel"])

    s = doc.get("solver", {})
    if not isinstance(s, dict):
        raise ConfigError("$.solver", "expected an object")
    solver = {
        "restarts": _int(s.get("restarts", 32), "$.solver.restarts"),
        "max_iter": _int(s.get("max_iter", 2000), "$.solver.max_iter"),
    }
    g = doc.get("grids", {})
    if not isinstance(g, dict):
        raise ConfigError("$.grids", "expected an object")
    grids = {
        "mu": _grid(g.get("mu", 32), "$.grids.mu", 1.0, math.inf),
        "alpha": _grid(g.get("alpha", 101), "$.grids.alpha", 0.0, 1.0),
    }
    o = doc.get("output", {})
    if not isinstance(o, dict):
        raise ConfigError("$.output", "expected an object")
    fmt = o.get("format", "json" if command in JSON_ONLY else "csv")
    if fmt not in FORMATS:
        raise ConfigError("$.output.format", f"expected csv or json, got {fmt!r}")
    path = o.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("$.output.path", "expected a string")
    seed = _int(doc.get("seed", 0), "$.seed", lo=0)
    cfg = RunConfig(command, channel, solver, grids, {"path": path, "format": fmt}, seed)
    _check_command(cfg)
    return cfg


def _check_command(cfg: RunConfig) -> None:
    try:
        ch = cfg.channel_instance()
    except WiretapError as err:
        raise ConfigError("$.channel", str(err)) from None
    tag = classify(ch).tag
    if cfg.command in ("misome", "misome-highsnr"):
        if tag != MISOME:
            raise ConfigError("$.channel", f"{cfg.command} needs single-antenna receivers (channel is {tag})")
        if "P" not in cfg.channel:
            raise ConfigError("$.channel.P", f"{cfg.command} needs a total power constraint P")
    if cfg.command == "enhance-verify":
        if tag != SADBC or "S" not in cfg.channel:
            raise ConfigError("$.channel", f"enhance-verify needs a degraded aligned channel with S (channel is {tag})")
    if cfg.command in JSON_ONLY and cfg.output["format"] != "json":
        raise ConfigError("$.output.format", f"{cfg.command} writes JSON only")


# ---------------------------------------------------------------------------
# commands


def _g(x: float) -> str:
    return f"{x:.12g}"


def _perm_label(perm) -> str:
    return "".join(str(i) for i in perm)


def _rowmajor(M) -> str:
    return " ".join(_g(v) for v in np.asarray(M).ravel())


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _hull_pairs(points) -> list:
    return convex_closure(points).as_array().tolist()


def cmd_region(cfg: RunConfig) -> tuple:
    ch = cfg.channel_instance()
    pts = trace_boundary(ch, cfg.mu_grid(), cfg.budget())
    if cfg.output["format"] == "csv":
        rows = [
            [
                _g(p.provenance["mu"]),
                _perm_label(p.provenance["permutation"]),
                _g(p.rates.R1),
                _g(p.rates.R2),
                _rowmajor(p.provenance["split"].B1),
                _rowmajor(p.provenance["split"].B2),
                str(p.provenance["converged"]).lower(),
            ]
            for p in pts
        ]
        return _csv(REGION_HEADER, rows), 0
    doc = {
        "channel_class": classify(ch).tag,
        "points": [
            {
                "weight_mu": p.provenance["mu"],
                "permutation": _perm_label(p.provenance["permutation"]),
                "R1_bits": p.rates.R1,
                "R2_bits": p.rates.R2,
                "B1": p.provenance["split"].B1.tolist(),
                "B2": p.provenance["split"].B2.tolist(),
                "converged": p.provenance["converged"],
            }
            for p in pts
        ],
        "hull": _hull_pairs(pts),
    }
    return _dump(doc), 0


def cmd_enhance_verify(cfg: RunConfig) -> tuple:
    ch = cfg.channel_instance()
    out = []
    for mu in cfg.mu_grid():
        obj = WeightedObjective.from_mu(float(mu))
        rep = maximize_weighted_sum(ch, obj, cfg.budget())
        entry = {"mu": float(mu), "R1_bits": rep.rates.R1, "R2_bits": rep.rates.R2, "kkt_residual": rep.kkt_residual}
        try:
            mult = recover_multipliers(rep.split, obj, ch)
        except NonStationaryError as err:
            entry.update(certified=False, flags=[str(err)], residuals=list(err.residuals))
            out.append(entry)
            continue
        entry.update(certify_enhancement(rep.split, mult, ch).to_dict())
        out.append(entry)
    return _dump({"certificates": out}), 0


def cmd_misome(cfg: RunConfig) -> tuple:
    ch = to_misome(cfg.channel_instance())
    pts = misome_sweep(ch, cfg.alpha_grid())
    if cfg.output["format"] == "csv":
        rows = [
            [_g(p.provenance["alpha_split"]), _perm_label(p.provenance["permutation"]), _g(p.rates.R1), _g(p.rates.R2)]
            for p in pts
        ]
        return _csv(MISOME_HEADER, rows), 0
    doc = {
        "points": [
            {
                "alpha_split": p.provenance["alpha_split"],
                "permutation": _perm_label(p.provenance["permutation"]),
                "R1_bits": p.rates.R1,
                "R2_bits": p.rates.R2,
            }
            for p in pts
        ],
        "hull": _hull_pairs(pts),
        "noise_scaling": list(ch.noise_scaling),
    }
    return _dump(doc), 0


def cmd_misome_highsnr(cfg: RunConfig) -> tuple:
    ch = to_misome(cfg.channel_instance())
    return _dump(misome_highsnr(ch).to_dict()), 0


def _random_split(rng, ch: ChannelInstance) -> CovarianceSplit:
    t = ch.t
    Bs = []
    for _ in range(ch.m):
        G = rng.standard_normal((t, t))
        Bs.append(G @ G.T)
    total = sum(Bs)
    if ch.constraint.kind == "covariance":
        S = ch.constraint.S
        w, V = np.linalg.eigh(S)
        W = (V / np.sqrt(np.maximum(w, 1e-300))) @ V.T
        c = float(np.linalg.eigvalsh(W @ total @ W)[-1])
    else:
        c = float(np.trace(total)) / ch.constraint.P
    f = rng.uniform(0.1, 1.0) / c
    return CovarianceSplit(tuple(f * B for B in Bs))


def cmd_check(cfg: RunConfig) -> tuple:
    """Invariant suite for one channel; the exit status is 1 if anything fails."""
    ch = cfg.channel_instance()
    tag = classify(ch).tag
    rng = np.random.default_rng(cfg.seed)
    results = []

    def record(name, ok, detail=""):
        results.append((name, bool(ok), detail))

    zero = sdpc_rates((1, 2), CovarianceSplit.zeros(ch.t, ch.m), ch)
    record("zero split gives zero rates", np.all(zero == 0.0), f"rates={zero.tolist()}")

    splits = [_random_split(rng, ch) for _ in range(20)]
    rates = [sdpc_rates(p, s, ch) for s in splits for p in ((1, 2), (2, 1))]
    record("rates finite and non-negative", all(np.all(np.isfinite(r)) and np.all(r >= 0) for r in rates))

    if tag == SADBC:
        gap = max(abs(g - s) for sp in splits for g, s in zip(gaussian_rates(sp, ch), sdpc_rates((1, 2), sp, ch)))
        record("identity-order SDPC equals Gaussian rates", gap <= 1e-12, f"max gap {gap:.3g}")

    square = all(H.shape[0] == H.shape[1] == ch.t for H in (*ch.H, ch.H3))
    if square and all(abs(np.linalg.det(H)) > 1e-12 for H in (*ch.H, ch.H3)):
        al = aligned_from_general(ch)
        gap = max(
            float(np.max(np.abs(sdpc_rates(p, s, ch) - sdpc_rates(p, s, al))))
            for s in splits
            for p in ((1, 2), (2, 1))
        )
        record("aligned form preserves rates", gap <= 1e-9, f"max gap {gap:.3g}")

    if tag == MISOME and ch.constraint.kind == "power":
        mch = to_misome(ch)
        gap = 0.0
        for a in np.linspace(0, 1, 11):
            for p in ((1, 2), (2, 1)):
                r = misome_rates(mch, a, p)
                s = sdpc_rates(p, rank_one_split(mch, a, p), mch.to_channel())
                gap = max(gap, abs(r.R1 - s[0]), abs(r.R2 - s[1]))
        record("pencil rates equal rank-one SDPC rates", gap <= 1e-9, f"max gap {gap:.3g}")
        pts = misome_sweep(mch, cfg.alpha_grid())
    else:
        pts = trace_boundary(ch, cfg.mu_grid(), cfg.budget())
    hull = convex_closure(pts)
    record("hull contains every swept point", all(hull_contains(hull, (p.rates.R1, p.rates.R2), 1e-9) for p in pts))
    V = hull.as_array()
    origin = bool(np.all(V == 0.0))
    record("region", True, "origin" if origin else f"{len(V)} hull vertices, max R1={V[:, 0].max():.6g}, max R2={V[:, 1].max():.6g}")

    if tag == SADBC and ch.constraint.kind == "covariance" and not origin:
        obj = WeightedObjective.from_mu(2.0)
        rep = maximize_weighted_sum(ch, obj, cfg.budget())
        try:
            cert = certify_enhancement(rep.split, recover_multipliers(rep.split, obj, ch), ch)
            record("enhancement certificate at mu=2", cert.certified, "; ".join(cert.flags))
        except NonStationaryError as err:
            record("enhancement certificate at mu=2", False, str(err))

    width = max(len(r[0]) for r in results)
    lines = [f"{'check':<{width}}  result  detail"]
    lines += [f"{n:<{width}}  {'PASS' if ok else 'FAIL':<6}  {d}".rstrip() for n, ok, d in results]
    lines.append(f"channel class: {tag}")
    return "\n".join(lines) + "\n", 0 if all(ok for _, ok, _ in results) else 1


HANDLERS = {
    "region": cmd_region,
    "enhance-verify": cmd_enhance_verify,
    "misome": cmd_misome,
    "misome-highsnr": cmd_misome_highsnr,
    "check": cmd_check,
}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute ``cfg`` and write its artifact; returns the exit status."""
    text, status = HANDLERS[cfg.command](cfg)
    path = cfg.output.get("path")
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)
    return status


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wiretapbc", description="Secrecy rate regions of Gaussian MIMO broadcast channels.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="overrides the command in the config")
    p.add_argument("--config", required=True, help="JSON run description")
    p.add_argument("--output", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--mu-grid", type=int, dest="mu_grid", help="number of weights in the default mu grid")
    p.add_argument("--alpha-grid", type=int, dest="alpha_grid", help="number of uniform alpha_split values")
    return p


def _apply_overrides(doc: dict, args) -> dict:
    if args.command:
        doc["command"] = args.command
    if args.output is not None or args.format is not None:
        out = dict(doc.get("output", {}))
        if args.output is not None:
            out["path"] = args.output
        if args.format is not None:
            out["format"] = args.format
        doc["output"] = out
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.restarts is not None:
        doc["solver"] = {**doc.get("solver", {}), "restarts": args.restarts}
    if args.mu_grid is not None:
        doc["grids"] = {**doc.get("grids", {}), "mu": args.mu_grid}
    if args.alpha_grid is not None:
        doc["grids"] = {**doc.get("grids", {}), "alpha": args.alpha_grid}
    return doc


def _fail(err: Exception) -> int:
    diag = {"error": type(err).__name__, "message": str(err)}
    if isinstance(err, ConfigError):
        diag["path"] = err.path
    sys.stderr.write(json.dumps(diag) + "\n")
    return 2


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError("$", f"invalid JSON: {err}") from None
        if isinstance(doc, dict):
            text = json.dumps(_apply_overrides(doc, args))
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            cfg = parse_config(text)
        return run(cfg)
    except (WiretapError, OSError, ValueError) as err:
        return _fail(err)


if __name__ == "__main__":
    sys.exit(main())
