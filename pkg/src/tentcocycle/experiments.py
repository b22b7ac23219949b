"""CLI front-end: config parsing, experiment orchestration, CSV/JSON emission.

Subcommands: ulam | lyapunov | sweep | cone-check | mc-compare | oseledets.
Exit codes: 0 success, 1 config error, 2 numerical anomaly, 3 cone violation.

Outputs are byte-reproducible for a fixed config: every row embeds the
resolved parameters and seed, floats are printed with 17 significant
digits, and timestamps only ever go to the sidecar log (--log, default
stderr).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import densities as dn
from . import driving as dv
from . import lyapunov as ly
from . import quarantine as qa
from . import ulam as ul
from .errors import (
    ConeViolationError,
    ConfigurationError,
    NumericalAnomalyError,
    TentCocycleError,
)
from .interval_maps import PairedTentMap

FMT = "%.17g"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; config errors must exit 1
        raise ConfigurationError(message)


def _log(args, msg: str) -> None:
    line = f"[{time.strftime('%Y-%m-%dT%H:%M:%S')}] {msg}"
    if getattr(args, "log", None):
        with open(args.log, "a") as fh:
            fh.write(line + "\n")
    else:
        print(line, file=sys.stderr)


def read_config(path: str) -> dict:
    """Flat key = value file; '#' starts a comment."""
    out = {}
    p = Path(path)
    if not p.exists():
        raise ConfigurationError(f"config file not found: {path}")
    for raw in p.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"bad config line (expected key = value): {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _resolve(args, key: str, default=None, cast=None):
    """CLI flag wins over config file wins over default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is None:
        val = args._config.get(key)
    if val is None:
        return default
    if cast is not None and isinstance(val, str):
        try:
            return cast(val)
        except (ValueError, TypeError) as e:
            raise ConfigurationError(f"bad value for {key}: {val!r}") from e
    if cast is not None and not isinstance(val, str):
        return cast(val)
    return val


def _eps_list(text) -> List[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    vals = [float(x) for x in str(text).replace(";", ",").split(",") if x.strip()]
    if not vals:
        raise ConfigurationError("empty eps list")
    return vals


def _driver(args) -> dv.DriverSpec:
    text = _resolve(args, "driver", default="constant(1,1)")
    spec = dv.parse_driver(text) if isinstance(text, str) else text
    seed = _resolve(args, "seed", default=None, cast=int)
    if seed is not None:
        spec = spec.with_seed(seed)
    return spec


def _backend(args, default_kind: str = "ulam") -> ly.Backend:
    kind = _resolve(args, "backend", default=default_kind)
    bins = _resolve(args, "bins", default=4096, cast=int)
    if kind == "ulam":
        return ly.UlamBackend(n_bins=bins)
    if kind == "exact":
        return ly.ExactPCBackend()
    raise ConfigurationError(f"unknown backend {kind!r} (expected 'ulam' or 'exact')")


def _config_hash(d: dict) -> str:
    blob = json.dumps(d, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _emit_json(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, default=float) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_ulam(args) -> int:
    spec = _driver(args)
    eps = _eps_list(_resolve(args, "eps", default="0.01"))[0]
    n = _resolve(args, "bins", default=4096, cast=int)
    exact = _resolve(args, "backend", default="exact") == "exact"
    orbit = dv.generate(spec, 1)
    a, b = float(orbit.a[0]), float(orbit.b[0])
    if exact:
        m = PairedTentMap(Fraction(eps) * Fraction(a), Fraction(eps) * Fraction(b))
    else:
        m = PairedTentMap(eps * a, eps * b)
    mat = ul.build_ulam(m, n)
    sums = mat.row_sums()
    if mat.exact:
        dev = max(abs(s - 1) for s in sums)
    else:
        dev = float(np.max(np.abs(np.asarray(sums) - 1.0)))
    out = _resolve(args, "out", default=None)
    if out:
        ul.dump_coordinate_text(mat, out)
        _log(args, f"wrote matrix dump to {out}")
    payload = {
        "command": "ulam",
        "eps": eps,
        "driver": spec.to_dict(),
        "bins": n,
        "exact": mat.exact,
        "nnz": mat.nnz(),
        "max_row_sum_deviation": float(dev),
        "coupling_mass": float(ul.coupling_mass(mat)),
    }
    payload["config_hash"] = _config_hash(payload)
    _emit_json(payload, None)
    return 0


def _run_from_args(args, eps: float, default_backend: str = "ulam") -> ly.CocycleRun:
    return ly.CocycleRun(
        spec=_driver(args),
        eps=eps,
        n_steps=_resolve(args, "steps", default=10_000, cast=int),
        backend=_backend(args, default_kind=default_backend),
    )


def cmd_lyapunov(args) -> int:
    eps = _eps_list(_resolve(args, "eps", default="0.01"))[0]
    run = _run_from_args(args, eps)
    rep = ly.spectrum(run)
    payload = {
        "command": "lyapunov",
        "eps": eps,
        "driver": run.spec.to_dict(),
        "backend": run.backend.__class__.__name__,
        "bins": getattr(run.backend, "n_bins", None),
        "n_steps": run.n_steps,
        "seed": run.spec.seed,
        **rep.to_json_dict(),
    }
    payload.pop("block_logs", None)  # keep the JSON small; block data is diagnostic
    payload["config_hash"] = _config_hash({k: payload[k] for k in ("eps", "driver", "backend", "n_steps")})
    _emit_json(payload, _resolve(args, "out", default=None))
    return 0


def _sweep_point(run: ly.CocycleRun):
    stats = ly.sign_push_stats(run)
    mc = dv.mc_second_exponent(run.spec, run.eps, run.n_steps)
    return run.eps, stats.phi_rate, stats.err, mc


def cmd_sweep(args) -> int:
    eps_list = _eps_list(_resolve(args, "eps", default="0.04,0.02,0.01,0.005"))
    threads = _resolve(args, "threads", default=1, cast=int)
    runs = [_run_from_args(args, e, default_backend="exact") for e in eps_list]
    if threads > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_point, runs))
    else:
        results = [_sweep_point(r) for r in runs]
    results.sort(key=lambda row: -row[0])  # deterministic: descending eps
    spec = runs[0].spec
    mean = dv.mean_ab(spec)
    backend_name = "exact" if isinstance(runs[0].backend, ly.ExactPCBackend) else "ulam"
    n_steps = runs[0].n_steps
    lines = ["eps,lambda2,err,mc_lambda2,predicted,seed,backend,n_steps"]
    for eps, lam2, err, mc in results:
        predicted = -eps * mean
        row = [FMT % eps, FMT % lam2, FMT % err, FMT % mc, FMT % predicted, str(spec.seed), backend_name, str(n_steps)]
        lines.append(",".join(row))
    xs = np.array([r[0] for r in results])
    ys = np.array([r[1] for r in results])
    slope, intercept = np.polyfit(xs, ys, 1)
    lines.append("# slope = " + FMT % slope)
    lines.append("# intercept = " + FMT % intercept)
    lines.append("# mean_ab = " + FMT % mean)
    for eps, lam2, err, mc in results:
        r = abs(lam2 + eps * mean) / (eps * eps * abs(math.log(eps)))
        lines.append("# r " + (FMT % eps) + " " + (FMT % r))
    text = "\n".join(lines) + "\n"
    out = _resolve(args, "out", default=None)
    if out:
        Path(out).write_text(text)
        _log(args, f"wrote sweep CSV to {out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_cone_check(args) -> int:
    eps = _eps_list(_resolve(args, "eps", default="0.0004"))[0]
    spec = _driver(args)
    n_samples = _resolve(args, "samples", default=1000, cast=int)
    seed = _resolve(args, "seed", default=0, cast=int)
    zero_mass = bool(int(_resolve(args, "zero-mass", default=0, cast=int)))
    rep = qa.invariance_trial(spec, Fraction(str(eps)), n_samples, seed=seed, zero_mass=zero_mass)
    payload = {
        "command": "cone-check",
        "driver": spec.to_dict(),
        "seed": seed,
        "n_steps": None,
        "backend": "exact",
        **rep.to_json_dict(),
    }
    payload["config_hash"] = _config_hash({"eps": eps, "driver": payload["driver"], "n": n_samples})
    _emit_json(payload, _resolve(args, "out", default=None))
    if not rep.passed:
        raise ConeViolationError(
            f"{len(rep.violations)} cone violations in {n_samples} trials (falsification signal)"
        )
    return 0


def cmd_mc_compare(args) -> int:
    eps = _eps_list(_resolve(args, "eps", default="0.01"))[0]
    spec = _driver(args)
    n = _resolve(args, "steps", default=10_000, cast=int)
    mc = dv.mc_second_exponent(spec, eps, n)
    lam1, lam2 = dv.mc_cocycle_exponents_qr(spec, eps, n)
    orbit = dv.generate(spec, n)
    h_plus = eps * orbit.a / (1.0 + eps * orbit.a)
    h_minus = eps * orbit.b / (1.0 + eps * orbit.b)
    ulam2 = float(np.mean(np.log(1.0 - h_plus - h_minus)))
    payload = {
        "command": "mc-compare",
        "eps": eps,
        "driver": spec.to_dict(),
        "seed": spec.seed,
        "n_steps": n,
        "backend": "mc",
        "mc_second_exponent": mc,
        "qr_lambda_1": lam1,
        "qr_lambda_2": lam2,
        "ulam2bin_second_exponent": ulam2,
        "gap_idealized_vs_exact_overlap": abs(mc - ulam2),
        "entrywise_gap_bound": eps * eps,
    }
    payload["config_hash"] = _config_hash({"eps": eps, "driver": payload["driver"], "n": n})
    _emit_json(payload, _resolve(args, "out", default=None))
    return 0


def cmd_oseledets(args) -> int:
    eps = _eps_list(_resolve(args, "eps", default="0.01"))[0]
    depth = _resolve(args, "depth", default=200, cast=int)
    run = ly.CocycleRun(
        spec=_driver(args),
        eps=eps,
        n_steps=max(depth, 1),
        backend=_backend(args, default_kind="exact"),
    )
    v = ly.oseledets_vector_2(run, depth)
    rep = dn.bv_norm(v.to_float())
    cfg = {
        "eps": eps,
        "driver": run.spec.to_dict(),
        "depth": depth,
        "backend": "exact" if isinstance(run.backend, ly.ExactPCBackend) else "ulam",
    }
    header = {
        "config_hash": _config_hash(cfg),
        "eps": repr(eps),
        "seed": run.spec.seed,
        "depth": depth,
        "bv_norm": repr(float(rep.bv)),
        "bv_envelope": 15,
        "int_jplus": repr(float(v.to_float().integral_on(0, 1))),
    }
    out = _resolve(args, "out", default=None)
    if out is None:
        raise ConfigurationError("oseledets needs --out PATH for the density dump")
    dn.dump_two_column(v, out, header=header)
    _log(args, f"wrote second-Oseledets-vector dump to {out}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> _Parser:
    p = _Parser(prog="tentcocycle", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", default=None, help="flat key = value config file")
        sp.add_argument("--eps", default=None, help="leakage strength (comma list for sweep)")
        sp.add_argument("--driver", default=None, help="driver spec, e.g. constant(1,1) or JSON")
        sp.add_argument("--bins", type=int, default=None, help="Ulam bin count (even)")
        sp.add_argument("--steps", type=int, default=None, help="cocycle length")
        sp.add_argument("--seed", type=int, default=None, help="driver seed")
        sp.add_argument("--backend", choices=("ulam", "exact"), default=None)
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--threads", type=int, default=None, help="sweep worker processes")
        sp.add_argument("--log", default=None, help="sidecar log file (timestamps live here)")

    for name in ("ulam", "lyapunov", "sweep", "cone-check", "mc-compare", "oseledets"):
        sp = sub.add_parser(name)
        common(sp)
        if name == "cone-check":
            sp.add_argument("--samples", type=int, default=None, help="number of cone trials")
            sp.add_argument("--zero-mass", type=int, default=None, help="1: sample the zero-mass slice")
        if name == "oseledets":
            sp.add_argument("--depth", type=int, default=None, help="pullback depth")
    return p


_COMMANDS = {
    "ulam": cmd_ulam,
    "lyapunov": cmd_lyapunov,
    "sweep": cmd_sweep,
    "cone-check": cmd_cone_check,
    "mc-compare": cmd_mc_compare,
    "oseledets": cmd_oseledets,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args._config = read_config(args.config) if args.config else {}
        return _COMMANDS[args.command](args)
    except ConfigurationError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except ConeViolationError as e:
        print(f"cone violation: {e}", file=sys.stderr)
        return 3
    except NumericalAnomalyError as e:
        print(f"numerical anomaly: {e}", file=sys.stderr)
        return 2
    except TentCocycleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
