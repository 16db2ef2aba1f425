"""Command-line runner: one YAML config per run, flags override its keys.

Every run writes its outputs plus ``resolved_config.yaml`` into the output
directory (``--output-dir``, the config's ``output_dir``, or
``$BESTPACK_OUTPUT_DIR``), so re-running on the echoed config reproduces them.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import asymptotics, cantor, equidist, minkowski
from .energy import OptimizerOptions, minimize_energy
from .geometry import Cube, IFSSpec, UnknownSetKindError, set_from_dict
from .packing import PackingOptions, best_packing

log = logging.getLogger("bestpack")

EXIT_CONFIG = 2
EXIT_SET_KIND = 3
EXIT_OUTPUT_DIR = 4
EXIT_PRECONDITION = 5

REQUIRED = {
    "minimize-energy": ("set", "N", "s"),
    "best-pack": ("set", "N"),
    "cantor-exact": ("N",),
    "oscillation": ("k", "m_max"),
    "sweep-energy": ("set", "s", "N_list"),
    "sweep-packing": ("set", "N_list"),
    "minkowski": ("set", "alpha"),
    "equidist": ("set", "N_list"),
    "root-limits": ("set", "N", "s_list"),
}


class ConfigError(Exception):
    pass


class OutputDirError(Exception):
    pass


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _ifs(cfg: dict) -> IFSSpec:
    spec = cfg.get("ifs") or cfg.get("set") or {"kind": "cantor"}
    if spec.get("kind", "cantor") == "cantor":
        return IFSSpec.cantor()
    if spec.get("kind") == "self_similar":
        return IFSSpec.from_dict(spec)
    raise UnknownSetKindError(f"unknown set kind {spec.get('kind')!r} for a self-similar command")


def _energy_opts(cfg: dict) -> OptimizerOptions:
    return OptimizerOptions(
        restarts=int(cfg.get("restarts", 16)),
        max_iter=cfg.get("max_iter"),
        seed=int(cfg["seed"]),
    )


def _packing_opts(cfg: dict) -> PackingOptions:
    return PackingOptions(
        restarts=int(cfg.get("restarts", 16)),
        schedule=tuple(cfg.get("schedule", (8, 16, 32, 64))),
        seed=int(cfg["seed"]),
        energy=_energy_opts(cfg),
    )


# ---------------------------------------------------------------------------
# Commands; each returns {filename: text}
# ---------------------------------------------------------------------------


def cmd_minimize_energy(cfg):
    aset = set_from_dict(cfg["set"])
    rep = minimize_energy(aset, int(cfg["N"]), float(cfg["s"]), _energy_opts(cfg))
    return {"energy_report.json": json.dumps(rep.to_dict(), indent=2)}


def cmd_best_pack(cfg):
    aset = set_from_dict(cfg["set"])
    rep = best_packing(aset, int(cfg["N"]), _packing_opts(cfg))
    return {"packing_report.json": json.dumps(rep.to_dict(), indent=2)}


def cmd_cantor_exact(cfg):
    ifs = _ifs(cfg)
    N_values = cfg["N"] if isinstance(cfg["N"], list) else [cfg["N"]]
    rows, records = [], []
    for N in N_values:
        ex = cantor.exact_delta(ifs, int(N), cfg.get("depth"))
        rows.append([ex.N, ex.delta.numerator, ex.delta.denominator, _fmt(ex.normalized()), ex.depth])
        records.append({
            "N": ex.N, "delta": str(ex.delta), "delta_float": float(ex.delta),
            "normalized": ex.normalized(), "depth": ex.depth,
            "witness": [str(w) for w in ex.witness],
        })
    return {
        "cantor_exact.json": json.dumps({"ifs": ifs.to_dict(), "results": records}, indent=2),
        "cantor_exact.csv": _csv(["N", "delta_num", "delta_den", "normalized_value", "depth"], rows),
    }


def cmd_oscillation(cfg):
    ifs = _ifs(cfg)
    rep = cantor.subsequence_oscillation(ifs, int(cfg["k"]), int(cfg["m_max"]))
    summary = {
        "ifs": ifs.to_dict(), "k": rep.k, "delta_k": str(rep.delta_k),
        "limit_kpm": rep.limit_kpm, "limit_cm": rep.limit_cm,
        "ratio": rep.ratio, "expected_ratio": rep.expected_ratio,
    }
    return {"oscillation.csv": rep.to_csv(), "oscillation.json": json.dumps(summary, indent=2)}


def _table_outputs(name, table, extra=None):
    out = {f"{name}.csv": table.to_csv(), f"{name}_plot.csv": table.plot_data_csv()}
    if extra:
        out[f"{name}.json"] = json.dumps(extra, indent=2)
    return out


def cmd_sweep_energy(cfg):
    aset = set_from_dict(cfg["set"])
    table = asymptotics.energy_sweep(aset, float(cfg["s"]), cfg["N_list"], _energy_opts(cfg))
    extra = {"richardson": asymptotics.richardson(table)} if len(table.rows) >= 2 else None
    return _table_outputs("sweep_energy", table, extra)


def cmd_sweep_packing(cfg):
    aset = set_from_dict(cfg["set"])
    table = asymptotics.packing_sweep(aset, cfg["N_list"], _packing_opts(cfg))
    return _table_outputs("sweep_packing", table)


def cmd_minkowski(cfg):
    aset = set_from_dict(cfg["set"])
    est = minkowski.content_estimate(
        aset, float(cfg["alpha"]), cfg.get("rho_grid"), cfg.get("normalization", "paper"),
        cfg.get("method", "auto"), int(cfg.get("samples", 200_000)), int(cfg["seed"]),
    )
    summary = {
        "set": aset.to_dict(), "alpha": est.alpha, "normalization": est.normalization,
        "lower_content": est.lower_content, "upper_content": est.upper_content,
    }
    return {"content.csv": est.to_csv(), "content.json": json.dumps(summary, indent=2)}


def _default_regions(aset):
    kind = aset.kind
    if kind == "interval":
        return equidist.quartiles(aset)
    if kind == "circle":
        return equidist.arcs(aset)
    if kind == "sphere2":
        return equidist.hemispheres(aset)
    if isinstance(aset, Cube):
        half = [
            equidist.Region(aset, "subcube", (tuple(lo), tuple(lo + 0.5)), f"corner{i}")
            for i, lo in enumerate(np.array(np.meshgrid(*[[0.0, 0.5]] * aset.d)).reshape(aset.d, -1).T)
        ]
        return half
    raise ConfigError(f"no default regions for {kind}; give 'regions'")


def _regions(aset, cfg):
    if "regions" not in cfg:
        return _default_regions(aset)
    out = []
    for r in cfg["regions"]:
        params = tuple(tuple(v) if isinstance(v, list) else v for v in r["params"])
        out.append(equidist.Region(aset, r["kind"], params, r.get("label", "")))
    return out


def cmd_equidist(cfg):
    aset = set_from_dict(cfg["set"])
    mode = cfg.get("mode", "energy")
    if mode == "energy":
        s = float(cfg.get("s", 3.0))
        configs = [minimize_energy(aset, int(N), s, _energy_opts(cfg)).config for N in cfg["N_list"]]
    elif mode == "packing":
        configs = [best_packing(aset, int(N), _packing_opts(cfg)).config for N in cfg["N_list"]]
    else:
        raise ConfigError(f"mode must be 'energy' or 'packing', got {mode!r}")
    rep = equidist.equidist_deviation(configs, _regions(aset, cfg), int(cfg.get("min_N", 8)))
    return {"equidist.csv": rep.to_csv()}


def cmd_root_limits(cfg):
    aset = set_from_dict(cfg["set"])
    seq = asymptotics.root_limit_fixed_N(aset, int(cfg["N"]), cfg["s_list"], _energy_opts(cfg), _packing_opts(cfg))
    csd = asymptotics.csd_root_limit([s for s in cfg["s_list"] if float(s) > 1])
    return {
        "root_limit.csv": _csv(["s", "product"], [[_fmt(s), _fmt(v)] for s, v in seq]),
        "csd_root_limit.csv": _csv(["s", "value"], [[_fmt(s), _fmt(v)] for s, v in csd]),
    }


COMMANDS = {
    "minimize-energy": cmd_minimize_energy,
    "best-pack": cmd_best_pack,
    "cantor-exact": cmd_cantor_exact,
    "oscillation": cmd_oscillation,
    "sweep-energy": cmd_sweep_energy,
    "sweep-packing": cmd_sweep_packing,
    "minkowski": cmd_minkowski,
    "equidist": cmd_equidist,
    "root-limits": cmd_root_limits,
}


# ---------------------------------------------------------------------------
# Config resolution and the entry point
# ---------------------------------------------------------------------------


def _parse_value(text: str):
    return yaml.safe_load(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bestpack", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", nargs="?", help="YAML run config")
        p.add_argument("--output-dir")
        p.add_argument("--seed", type=int)
        p.add_argument("--N", type=_parse_value)
        p.add_argument("--s", type=float)
        p.add_argument("--restarts", type=int)
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key; VALUE is parsed as YAML")
    return parser


def resolve_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = yaml.safe_load(fh) or {}
        except OSError as err:
            raise ConfigError(f"cannot read config {args.config}: {err}") from err
        except yaml.YAMLError as err:
            raise ConfigError(f"malformed config {args.config}: {err}") from err
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a mapping")
    file_command = cfg.get("command")
    if file_command and file_command != args.command:
        raise ConfigError(f"config is for {file_command!r}, not {args.command!r}")
    cfg["command"] = args.command
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        cfg[key] = _parse_value(value)
    for key in ("N", "s", "seed", "restarts"):
        value = getattr(args, key)
        if value is not None:
            cfg[key] = value
    if args.output_dir:
        cfg["output_dir"] = args.output_dir
    cfg.setdefault("output_dir", os.environ.get("BESTPACK_OUTPUT_DIR", "bestpack_output"))
    cfg.setdefault("seed", 0)
    cfg.setdefault("deterministic", True)
    for key in REQUIRED[args.command]:
        if key not in cfg:
            raise ConfigError(f"missing required key '{key}' for {args.command}")
    if "set" in cfg and not isinstance(cfg["set"], dict):
        raise ConfigError("'set' must be a mapping with a 'kind' key")
    return cfg


def _prepare_output(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as err:
        raise OutputDirError(f"output directory {out} is not writable: {err}") from err
    return out


def run(cfg: dict) -> dict:
    """Runs a resolved config and writes its files; returns ``{name: text}``."""
    out = _prepare_output(cfg["output_dir"])
    files = COMMANDS[cfg["command"]](cfg)
    files["resolved_config.yaml"] = yaml.safe_dump(cfg, sort_keys=True)
    for name, text in files.items():
        (out / name).write_text(text)
    return files


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        files = run(cfg)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyError as err:
        print(f"error: missing required key {err}", file=sys.stderr)
        return EXIT_CONFIG
    except UnknownSetKindError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SET_KIND
    except OutputDirError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_OUTPUT_DIR
    except (ValueError, cantor.HypothesisError, cantor.InsufficientDepthError) as err:
        print(f"error: precondition violated: {err}", file=sys.stderr)
        return EXIT_PRECONDITION
    log.info("wrote %s to %s", ", ".join(sorted(files)), cfg["output_dir"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
