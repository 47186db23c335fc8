"""Command-line front end: config ingestion, state computation, sweeps and
oracle cross-checks, with machine-readable JSON/CSV reports.

Invocation: ``nanospec <mode> [flags]`` with mode in {states, tube, sweep,
verify}.  A TOML config file may supply any setting; flags win over the
file.  Exit codes: 0 ok, 1 config error, 2 computation error, 3 validation
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np
import tomli

from .background import Background, band_edges
from .jost import Perturbation
from .oracle import bound_state_oracle
from .states import Tolerances, find_states, validate_counts
from .tube import TubeConfig, field_sweep, tube_states

__all__ = ["main", "ConfigError", "parse_config", "run"]

MODES = ("states", "tube", "sweep", "verify")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COMPUTE = 2
EXIT_VALIDATION = 3


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


# ---------------------------------------------------------------------------
# serialization: canonical 17-significant-digit decimals, round-trip safe


def _fmt(x: float) -> str:
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        raise ValueError("non-finite number in report")
    return format(float(x), ".17g")


def _to_json(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  "{k}": {_to_json(v, indent + 1)}' for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{pad}  {_to_json(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _state_dict(rec) -> dict:
    lam = complex(rec.lam)
    return {
        "re": float(lam.real),
        "im": float(lam.imag),
        "sheet": rec.point.sheet,
        "kind": rec.kind,
        "multiplicity": rec.multiplicity,
    }


def _channel_dict(k: int, a: float, degenerate: bool, states, extra=None) -> dict:
    d = {
        "k": k,
        "a": float(a),
        "degenerate": degenerate,
        "states": [_state_dict(s) for s in states],
    }
    if extra:
        d.update(extra)
    return d


def _csv_rows(channels):
    rows = [["b", "channel", "a", "re", "im", "sheet", "kind", "multiplicity"]]
    for ch in channels:
        for s in ch["states"]:
            rows.append(
                [
                    _fmt(ch.get("b", 0.0)),
                    str(ch["k"]),
                    _fmt(ch["a"]),
                    _fmt(s["re"]),
                    _fmt(s["im"]),
                    s["sheet"],
                    s["kind"],
                    str(s["multiplicity"]),
                ]
            )
    return rows


def _emit(report: dict, out_path, fmt: str):
    if fmt == "json":
        text = _to_json(report) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        channels = list(report.get("channels", []))
        for step in report.get("sweep", []):
            for ch in step["channels"]:
                ch = dict(ch)
                ch["b"] = step["b"]
                channels.append(ch)
        writer.writerows(_csv_rows(channels))
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# configuration


def _parse_q(text):
    if text is None or text == "":
        return []
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as e:
        raise ConfigError(f"--q: expected comma-separated floats, got {text!r}") from e


def _parse_grid(text):
    try:
        b0, b1, steps = text.split(":")
        steps = int(steps)
        if steps < 1:
            raise ValueError
        return np.linspace(float(b0), float(b1), steps)
    except (ValueError, AttributeError) as e:
        raise ConfigError(f"--grid: expected 'b0:b1:steps', got {text!r}") from e


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nanospec",
        description="Spectral states of perturbed two-periodic Jacobi chains "
        "and zigzag half-nanotubes.",
    )
    parser.add_argument("mode", nargs="?", choices=MODES)
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--v", type=float)
    parser.add_argument("--a", type=float)
    parser.add_argument("--q", help="comma-separated perturbation values q1,q2,...")
    parser.add_argument("--N", type=int)
    parser.add_argument("--b", type=float)
    parser.add_argument("--B", type=float, help="field magnitude |B| (needs --N)")
    parser.add_argument("--mode", dest="mode_flag", choices=MODES)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--grid", help="b0:b1:steps")
    parser.add_argument("--oracle-size", type=int, dest="oracle_size")
    return parser


def parse_config(argv):
    """Merged run configuration: TOML file values overridden by flags."""
    args = _build_parser().parse_args(argv)
    cfg = {}
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                cfg = tomli.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from e
        except tomli.TOMLDecodeError as e:
            raise ConfigError(f"config parse error in {args.config}: {e}") from e

    mode = args.mode or args.mode_flag or cfg.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    merged = {
        "mode": mode,
        "v": args.v if args.v is not None else cfg.get("v", 0.0),
        "a": args.a if args.a is not None else cfg.get("a"),
        "q": _parse_q(args.q) if args.q is not None else cfg.get("q", []),
        "N": args.N if args.N is not None else cfg.get("N"),
        "b": args.b if args.b is not None else cfg.get("b"),
        "B": args.B if args.B is not None else cfg.get("B"),
        "out": args.out if args.out is not None else cfg.get("out"),
        "format": args.format if args.format is not None else cfg.get("format", "json"),
        "grid": args.grid if args.grid is not None else cfg.get("grid"),
        "oracle_size": args.oracle_size
        if args.oracle_size is not None
        else cfg.get("oracle_size", 4000),
        "tolerances": cfg.get("tolerances", {}),
    }
    _validate(merged)
    return merged


def _validate(cfg):
    q = cfg["q"]
    if not isinstance(q, (list, tuple)) or not all(
        isinstance(x, (int, float)) for x in q
    ):
        raise ConfigError("field 'q': expected a list of numbers")
    if q and q[-1] == 0:
        raise ConfigError("field 'q': last entry q_p must be nonzero")
    if cfg["mode"] in ("states", "verify"):
        if cfg["a"] is None:
            raise ConfigError(f"mode {cfg['mode']}: field 'a' is required")
        if cfg["a"] <= 0:
            raise ConfigError("field 'a': must be positive")
    if cfg["mode"] in ("tube", "sweep"):
        if cfg["N"] is None or cfg["N"] < 1:
            raise ConfigError(f"mode {cfg['mode']}: field 'N' must be a positive integer")
        if cfg["b"] is not None and cfg["B"] is not None:
            raise ConfigError("specify only one of 'b' and 'B'")
        if cfg["mode"] == "tube" and cfg["b"] is None and cfg["B"] is None:
            raise ConfigError("mode tube: one of 'b' or 'B' is required")
        if cfg["mode"] == "sweep" and cfg["grid"] is None:
            raise ConfigError("mode sweep: field 'grid' ('b0:b1:steps') is required")
    if cfg["format"] not in ("json", "csv"):
        raise ConfigError(f"field 'format': expected json or csv, got {cfg['format']!r}")
    tol = cfg["tolerances"]
    known = {"eps_edge", "eps_v", "eps_cluster", "eps_deg"}
    unknown = set(tol) - known
    if unknown:
        raise ConfigError(f"tolerances: unknown keys {sorted(unknown)}")


def _tolerances(cfg) -> Tolerances:
    tol = cfg["tolerances"]
    return Tolerances(
        eps_edge=tol.get("eps_edge", Tolerances.eps_edge),
        eps_v_rel=tol.get("eps_v", Tolerances.eps_v_rel),
        eps_cluster=tol.get("eps_cluster", Tolerances.eps_cluster),
    )


# ---------------------------------------------------------------------------
# modes


def _validation_dict(vr, report) -> dict:
    return {
        "total_multiplicity": report.total_multiplicity,
        "bound_virtual_at_least_two": vr.bound_virtual_at_least_two,
        "middle_gap_odd": vr.middle_gap_odd,
        "middle_gap_has_bound_or_virtual": vr.middle_gap_has_bound_or_virtual,
        "interlacing": vr.interlacing,
        "cluster_merged": report.cluster_merged,
    }


def _run_states(cfg, tol):
    bg = Background(cfg["v"], cfg["a"])
    q = Perturbation(cfg["q"])
    report = find_states(bg, q, tol)
    vr = validate_counts(report, bg)
    out = {
        "config": {"mode": "states", "v": cfg["v"], "a": cfg["a"], "q": list(cfg["q"])},
        "channels": [_channel_dict(1, cfg["a"], False, report.states)],
        "validation": _validation_dict(vr, report),
    }
    failed = report.total_multiplicity != 2 * q.p and q.p > 0
    return out, (EXIT_VALIDATION if failed else EXIT_OK)


def _run_tube(cfg, tol):
    tc = TubeConfig(
        N=cfg["N"], b=cfg["b"], v=cfg["v"], q=Perturbation(cfg["q"]), B_magnitude=cfg["B"]
    )
    report = tube_states(tc, tol)
    channels = []
    ok = True
    for ch in report.channels:
        if ch.spec.degenerate:
            discrete, flat = ch.flat_spectrum
            channels.append(
                _channel_dict(
                    ch.spec.k,
                    ch.spec.a,
                    True,
                    (),
                    extra={"flat_bands": list(flat), "discrete": list(discrete)},
                )
            )
            continue
        channels.append(_channel_dict(ch.spec.k, ch.spec.a, False, ch.report.states))
        if Perturbation(cfg["q"]).p > 0:
            ok = ok and ch.report.total_multiplicity == 2 * Perturbation(cfg["q"]).p
    out = {
        "config": {
            "mode": "tube",
            "N": tc.N,
            "b": tc.b,
            "b_raw": tc.b_raw,
            "v": tc.v,
            "q": list(cfg["q"]),
        },
        "channels": channels,
        "validation": {
            "pp_spectrum": list(report.pp_spectrum),
            "total_multiplicity_ok": ok,
        },
    }
    return out, (EXIT_OK if ok else EXIT_VALIDATION)


def _run_sweep(cfg, tol):
    grid = _parse_grid(cfg["grid"])
    tc = TubeConfig(
        N=cfg["N"],
        b=cfg["b"] if cfg["b"] is not None else 0.0,
        v=cfg["v"],
        q=Perturbation(cfg["q"]),
    )
    steps = []
    for b, report, traj in field_sweep(tc, grid, tol):
        channels = []
        idx = 0
        for ch in report.channels:
            if ch.report is None:
                channels.append(
                    _channel_dict(
                        ch.spec.k,
                        ch.spec.a,
                        True,
                        (),
                        extra={"flat_bands": list(ch.flat_spectrum[1])},
                    )
                )
                continue
            recs = []
            for s in ch.report.states:
                d = _state_dict(s)
                d["trajectory"] = traj.get(idx, -1)
                idx += 1
                recs.append(d)
            channels.append(
                {
                    "k": ch.spec.k,
                    "a": float(ch.spec.a),
                    "degenerate": False,
                    "states": recs,
                }
            )
        steps.append({"b": float(b), "channels": channels})
    out = {
        "config": {"mode": "sweep", "N": cfg["N"], "v": cfg["v"], "q": list(cfg["q"]),
                   "grid": cfg["grid"]},
        "sweep": steps,
        "validation": {"steps": len(steps)},
    }
    return out, EXIT_OK


def _run_verify(cfg, tol):
    bg = Background(cfg["v"], cfg["a"])
    q = Perturbation(cfg["q"])
    report = find_states(bg, q, tol)
    bound = sorted(
        complex(s.lam).real for s in report.states for _ in range(s.multiplicity)
        if s.kind == "bound"
    )
    oracle = bound_state_oracle(bg, q, cfg["oracle_size"])
    rows = []
    ok = len(bound) == len(oracle)
    max_dev = 0.0
    if ok:
        for lam, mu in zip(bound, sorted(oracle)):
            dev = abs(lam - mu)
            max_dev = max(max_dev, dev)
            rows.append({"analytic": lam, "oracle": float(mu), "deviation": dev})
        ok = max_dev <= 1e-6
    out = {
        "config": {
            "mode": "verify",
            "v": cfg["v"],
            "a": cfg["a"],
            "q": list(cfg["q"]),
            "oracle_size": cfg["oracle_size"],
        },
        "channels": [_channel_dict(1, cfg["a"], False, report.states)],
        "validation": {
            "bound_count_analytic": len(bound),
            "bound_count_oracle": len(oracle),
            "comparison": rows,
            "max_deviation": max_dev,
            "ok": ok,
        },
    }
    return out, (EXIT_OK if ok else EXIT_VALIDATION)


def run(cfg) -> int:
    """Execute one parsed configuration; returns the process exit code."""
    tol = _tolerances(cfg)
    runner = {
        "states": _run_states,
        "tube": _run_tube,
        "sweep": _run_sweep,
        "verify": _run_verify,
    }[cfg["mode"]]
    try:
        report, status = runner(cfg, tol)
    except (ArithmeticError, RuntimeError, ValueError) as e:
        report = {
            "config": {"mode": cfg["mode"]},
            "error": {"type": type(e).__name__, "message": str(e)},
        }
        _emit(report, cfg["out"], "json")
        return EXIT_COMPUTE
    _emit(report, cfg["out"], cfg["format"])
    return status


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
