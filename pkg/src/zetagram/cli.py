"""Command-line front end: point export, verification runs, maxima
scans, resonator builds, and divisor-table dumps.

Output bytes are deterministic: floats are printed with shortest
round-trip repr, JSON keys are sorted, and wall-clock fields are
excluded from reports unless explicitly requested with --stamp.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
import time
import warnings

import numpy as np

from . import __version__, divisor, moments, resonator, verify
from .grampoints import classify, enumerate_points
from .special import DomainError, EvalConfig, theta
from .verify import run_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


@dataclasses.dataclass
class RunConfig:
    phi: float = 0.0
    t_max: float = 1e4
    threads: int = 1
    cache_dir: str | None = None
    format: str = "csv"
    rs_correction_order: int = 1
    abs_tol: float = 1e-10
    output: str | None = None
    stamp: bool = False

    def __post_init__(self):
        if not 0.0 <= self.phi < math.pi:
            raise DomainError("phi must be in [0, pi)")
        if self.t_max <= 0:
            raise DomainError("t_max must be positive")
        if self.threads < 1:
            raise DomainError("threads must be >= 1")
        if self.format not in ("csv", "json"):
            raise DomainError("format must be csv or json")

    def eval_config(self) -> EvalConfig:
        return EvalConfig(rs_correction_order=self.rs_correction_order,
                          abs_tol=self.abs_tol)

    def semantic_hash(self) -> str:
        # threads, cache location and output format do not affect the numbers
        payload = "\n".join([
            f"phi={self.phi!r}",
            f"t_max={self.t_max!r}",
            f"rs_correction_order={self.rs_correction_order!r}",
            f"abs_tol={self.abs_tol!r}",
            f"version={__version__}",
        ])
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"bad config line: {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


_CONFIG_TYPES = {
    "phi": float, "t_max": float, "threads": int, "cache_dir": str,
    "format": str, "rs_correction_order": int, "abs_tol": float,
    "output": str, "stamp": lambda v: v.lower() in ("1", "true", "yes"),
}


def _build_runconfig(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            if key not in _CONFIG_TYPES:
                raise DomainError(f"unknown config key {key!r}")
            values[key] = _CONFIG_TYPES[key](raw)
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return RunConfig(**values)


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_points(cfg: RunConfig) -> int:
    points = enumerate_points(cfg.phi, cfg.t_max, cfg.eval_config(),
                              cache_dir=cfg.cache_dir)
    signed = classify(points, cfg.eval_config(), threads=cfg.threads)
    th = theta(points.t) if len(points) else np.empty(0)
    zeta = np.exp(-1j * th) * signed.value * np.where(points.n % 2 == 0, 1.0, -1.0)
    rows = []
    for i in range(len(points)):
        z_val = signed.value[i] * (1.0 if points.n[i] % 2 == 0 else -1.0)
        sign = "+" if signed.sign[i] > 0 else "-"
        rows.append((int(points.n[i]), cfg.phi, float(points.t[i]),
                     float(zeta[i].real), float(zeta[i].imag), float(z_val), sign))
    if cfg.format == "json":
        payload = {
            "metadata": _metadata(cfg),
            "points": [
                {"n": n, "phi": phi, "t": t, "zeta_re": zr, "zeta_im": zi,
                 "z": z, "sign": sign}
                for n, phi, t, zr, zi, z, sign in rows],
        }
        _emit(_dump_json(payload), cfg.output)
    else:
        lines = ["n,phi,t,zeta_re,zeta_im,z,sign"]
        lines += [f"{n},{phi!r},{t!r},{zr!r},{zi!r},{z!r},{sign}"
                  for n, phi, t, zr, zi, z, sign in rows]
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


def _metadata(cfg: RunConfig) -> dict:
    meta = {"version": __version__, "config_hash": cfg.semantic_hash(),
            "phi": cfg.phi, "t_max": cfg.t_max}
    if cfg.stamp:
        meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    return meta


def _exponents_from_flags(args) -> list | None:
    """Map --p/--q (or a rational --k) to pipeline exponents."""
    p, q, k = getattr(args, "p", None), getattr(args, "q", None), getattr(args, "k", None)
    if p is not None or q is not None:
        if p is None or q is None:
            raise DomainError("--p and --q must be given together")
        return [(int(p), int(q))]
    if k is not None:
        from fractions import Fraction
        frac = Fraction(k).limit_denominator(64)
        if abs(float(frac) - k) > 1e-12 or frac < 1:
            raise DomainError("--k must be a rational >= 1 (or use --p/--q)")
        return [(frac.numerator, frac.denominator)]
    return None


def cmd_verify(cfg: RunConfig, which: str, exponents=None) -> int:
    results = run_checks(which, cfg.phi, cfg.t_max, cfg.eval_config(),
                         threads=cfg.threads, cache_dir=cfg.cache_dir,
                         exponents=exponents)
    bundle = {
        "metadata": _metadata(cfg),
        "criteria": [{"name": r.name, "passed": r.passed,
                      "details": r.details} for r in results],
        "all_passed": all(r.passed for r in results),
    }
    if cfg.format == "json":
        _emit(_dump_json(bundle), cfg.output)
    else:
        lines = ["name,passed,details"]
        for r in results:
            detail = ";".join(f"{k}={_fmt_detail(v)}" for k, v in sorted(r.details.items()))
            lines.append(f"{r.name},{int(r.passed)},{detail}")
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK if bundle["all_passed"] else EXIT_CHECK_FAILED


def _fmt_detail(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + " ".join(_fmt_detail(x) for x in v) + "]"
    return str(v)


def cmd_maxscan(cfg: RunConfig) -> int:
    sweep = moments.GramSweep(cfg.phi, cfg.t_max, cfg.eval_config(),
                              cache_dir=cfg.cache_dir, threads=cfg.threads)
    signed = sweep.signed()
    absz = np.abs(signed.value)
    n_checkpoints = max(2, int(math.log10(max(cfg.t_max / 100.0, 10.0)) * 3))
    checkpoints = np.geomspace(max(100.0, cfg.t_max / 1000.0), cfg.t_max, n_checkpoints)
    lines = ["T,count,max_plus,argmax_plus,max_minus,argmax_minus,"
             "logT_5_4,logT_3_2,ratio_plus_5_4,ratio_minus_5_4"]
    rows = []
    for cp in checkpoints:
        mask = sweep.points.t <= cp
        row = {"T": float(cp), "count": int(mask.sum())}
        for label, cls_mask in (("plus", signed.plus_mask), ("minus", signed.minus_mask)):
            sel = mask & cls_mask
            if sel.any():
                idx = np.nonzero(sel)[0]
                j = idx[np.argmax(absz[idx])]
                row[f"max_{label}"] = float(absz[j])
                row[f"argmax_{label}"] = float(sweep.points.t[j])
            else:
                row[f"max_{label}"] = None
                row[f"argmax_{label}"] = None
        lt = math.log(cp)
        row["logT_5_4"] = lt ** 1.25
        row["logT_3_2"] = lt ** 1.5
        row["ratio_plus_5_4"] = (row["max_plus"] / lt ** 1.25) if row["max_plus"] else None
        row["ratio_minus_5_4"] = (row["max_minus"] / lt ** 1.25) if row["max_minus"] else None
        rows.append(row)
        cells = [repr(row["T"]), str(row["count"])]
        for key in ("max_plus", "argmax_plus", "max_minus", "argmax_minus",
                    "logT_5_4", "logT_3_2", "ratio_plus_5_4", "ratio_minus_5_4"):
            cells.append("" if row[key] is None else repr(row[key]))
        lines.append(",".join(cells))
    if cfg.format == "json":
        _emit(_dump_json({"metadata": _metadata(cfg), "scan": rows}), cfg.output)
    else:
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


def cmd_resonate(cfg: RunConfig, cutoff: float, with_certificate: bool) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = resonator.build_resonator(cutoff)
        ratio = resonator.resonator_ratio(res)
        summary = {
            "metadata": _metadata(cfg),
            "cutoff": res.config.X,
            "L": res.config.L,
            "prime_lo": res.config.prime_lo,
            "prime_hi": res.config.prime_hi,
            "support_size": int(res.support.size),
            "ratio": ratio,
            "sum_f_squared": res.sum_f_squared,
        }
        if with_certificate:
            cert = resonator.certify_lower_bound(cfg.phi, cfg.t_max, res,
                                                 cfg.eval_config())
            summary["certificate"] = {
                "certified_bound": cert.certified_bound,
                "scanned_max": cert.scanned_max,
                "degenerate_direction": cert.degenerate_direction,
            }
    if cfg.format == "json":
        _emit(_dump_json(summary), cfg.output)
    else:
        lines = ["n,f"]
        lines += [f"{int(n)},{float(w)!r}" for n, w in zip(res.support, res.weights)]
        lines.append(f"# ratio={ratio!r} sum_f_squared={res.sum_f_squared!r}")
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


def cmd_divisor(cfg: RunConfig, kappa: float, limit: int, partial: float | None) -> int:
    if partial is not None:
        total, pred = divisor.divisor_partial_sum(int(kappa), partial)
        payload = {"metadata": _metadata(cfg), "kappa": kappa, "x": partial,
                   "sum": total, "predicted": pred,
                   "rel_error": None if pred is None else abs(total - pred) / total}
        if cfg.format == "json":
            _emit(_dump_json(payload), cfg.output)
        else:
            _emit(f"kappa,x,sum,predicted\n{kappa!r},{partial!r},{total!r},"
                  f"{'' if pred is None else repr(pred)}\n", cfg.output)
        return EXIT_OK
    table = divisor.build_table(kappa, limit)
    if cfg.format == "json":
        _emit(_dump_json({"metadata": _metadata(cfg), "kappa": kappa,
                          "values": table.values[1:].tolist()}), cfg.output)
    else:
        lines = ["n,d_kappa"] + [f"{n},{float(table.values[n])!r}"
                                 for n in range(1, limit + 1)]
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--phi", type=float, default=None,
                        help="direction angle in [0, pi)")
    parser.add_argument("--t-max", dest="t_max", type=float, default=None,
                        help="height cutoff T")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--cache-dir", dest="cache_dir", default=None)
    parser.add_argument("--config", default=None,
                        help="flat key=value config file; flags override")
    parser.add_argument("--output", "-o", default=None,
                        help="write to file instead of stdout")
    parser.add_argument("--rs-correction-order", dest="rs_correction_order",
                        type=int, default=None)
    parser.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
    parser.add_argument("--stamp", action="store_true", default=None,
                        help="include a wall-clock timestamp in the metadata")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zetagram",
        description="Critical-line zeta, generalized Gram points, and "
                    "discrete-moment verification")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_points = sub.add_parser("points", help="enumerate and classify Gram points")
    _add_common(p_points)

    p_verify = sub.add_parser("verify", help="run named verification checks")
    p_verify.add_argument("which", choices=list(verify.CHECK_NAMES) + ["all"])
    p_verify.add_argument("--k", type=float, default=None,
                          help="rational exponent for the lower-bound pipeline")
    p_verify.add_argument("--p", type=int, default=None,
                          help="exponent numerator (with --q)")
    p_verify.add_argument("--q", type=int, default=None,
                          help="exponent denominator (with --p)")
    _add_common(p_verify)

    p_max = sub.add_parser("maxscan", help="running maxima per sign class")
    _add_common(p_max)

    p_res = sub.add_parser("resonate", help="build a resonator and report its ratio")
    p_res.add_argument("--x", dest="cutoff", type=float, default=1e4,
                       help="coefficient cutoff X")
    p_res.add_argument("--certificate", action="store_true",
                       help="also certify the lower bound at (phi, t_max)")
    _add_common(p_res)

    p_div = sub.add_parser("divisor", help="divisor tables and partial sums")
    p_div.add_argument("--kappa", type=float, default=1.0)
    p_div.add_argument("--limit", type=int, default=100)
    p_div.add_argument("--partial-sum", dest="partial", type=float, default=None,
                       help="report sum_{n<=x} d_kappa(n) against its main term")
    _add_common(p_div)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_runconfig(args)
        if args.command == "points":
            return cmd_points(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.which, _exponents_from_flags(args))
        if args.command == "maxscan":
            return cmd_maxscan(cfg)
        if args.command == "resonate":
            return cmd_resonate(cfg, args.cutoff, args.certificate)
        if args.command == "divisor":
            return cmd_divisor(cfg, args.kappa, args.limit, args.partial)
        parser.error(f"unknown command {args.command}")
    except (DomainError, divisor.ConfigurationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
