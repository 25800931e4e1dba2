"""Command-line entry point: ``inq-verify {verify,decompose,delta,list-claims}``.

Exit codes: 0 every report CONFIRMED, 2 some report REFUTED, 3 some report
INCONCLUSIVE (takes precedence over 2), 1 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .algebra import make_algebra
from .subspace import TolerancePolicy
from .verify import CLAIMS, INCONCLUSIVE, REFUTED, Report, compute_delta, run_claim

EXIT_OK, EXIT_USAGE, EXIT_REFUTED, EXIT_INCONCLUSIVE = 0, 1, 2, 3
SEED_MAX = 2**64 - 1


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    claims: tuple[str, ...] | str = "all"
    dims: tuple[int, ...] = ()
    weights: tuple[float, ...] | None = None
    seed: int = 0
    tol: TolerancePolicy = field(default_factory=TolerancePolicy)
    format: str = "text"
    out: str | None = None
    timings: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inq-verify", description="Verify p (x) (1-p) span and ideal identities in multi-matrix algebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--dims", help="factor sizes, e.g. 2,3")
        p.add_argument("--weights", help="trace weights, e.g. 0.5,0.5 (default uniform)")
        p.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
        p.add_argument("--tol-rel", type=float)
        p.add_argument("--tol-abs", type=float)
        p.add_argument("--tol-angle", type=float)
        p.add_argument("--format", choices=["json", "text"])
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--config", help="JSON file with the same keys; flags override it")
        p.add_argument("--timings", action="store_true", default=None,
                       help="record wall-clock durations (JSON is then not byte-stable)")

    v = sub.add_parser("verify", help="run claim verifications")
    v.add_argument("--claim", action="append", help="claim id (repeatable, default all)")
    common(v)
    common(sub.add_parser("decompose", help="decompose the joint kernel of M_n into irreducibles"))
    common(sub.add_parser("delta", help="compute the equality projection"))
    sub.add_parser("list-claims", help="print the registered claim ids")
    return parser


def _load_config(path: str) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a single JSON object")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file (if any) with flags; flags win."""
    base = _load_config(args.config) if args.config else {}
    known = {"claims", "dims", "weights", "seed", "tol", "format", "out", "timings"}
    unknown = set(base) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")

    claims = getattr(args, "claim", None) or base.get("claims", "all")
    if isinstance(claims, str) and claims != "all":
        claims = [claims]
    if claims != "all":
        claims = tuple(claims)
        if "all" in claims:
            claims = "all"

    dims = args.dims if args.dims is not None else base.get("dims")
    if dims is None:
        raise UsageError("--dims is required")
    dims = _int_list(dims) if isinstance(dims, str) else tuple(int(x) for x in dims)

    weights = args.weights if args.weights is not None else base.get("weights")
    if weights is not None:
        weights = _float_list(weights) if isinstance(weights, str) else tuple(float(x) for x in weights)

    seed = args.seed if args.seed is not None else base.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed <= SEED_MAX:
        raise UsageError(f"seed must be an integer in [0, 2^64 - 1], got {seed!r}")

    tol_base = base.get("tol", {})
    tol_kw = {k: tol_base[k] for k in ("rel", "abs", "angle") if k in tol_base}
    for k in ("rel", "abs", "angle"):
        flag = getattr(args, f"tol_{k}")
        if flag is not None:
            tol_kw[k] = flag
    try:
        tol = TolerancePolicy(**{k: float(v) for k, v in tol_kw.items()})
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None

    fmt = args.format or base.get("format", "text")
    if fmt not in ("json", "text"):
        raise UsageError(f"format must be json or text, got {fmt!r}")
    timings = args.timings if args.timings is not None else bool(base.get("timings", False))
    return RunConfig(claims, dims, weights, seed, tol, fmt, args.out or base.get("out"), timings)


def _threads() -> int:
    raw = os.environ.get("INQ_VERIFY_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise UsageError(f"INQ_VERIFY_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _select_claims(cfg: RunConfig, algebra) -> list[str]:
    if cfg.claims == "all":
        return [name for name, c in CLAIMS.items() if c.applies(algebra)]
    unknown = [c for c in cfg.claims if c not in CLAIMS]
    if unknown:
        raise UsageError(f"unknown claim {unknown[0]!r}; registered claims: {', '.join(CLAIMS)}")
    for name in cfg.claims:
        if not CLAIMS[name].applies(algebra):
            raise UsageError(f"claim {name!r} needs {CLAIMS[name].requirement}; got dims {list(algebra.dims)}")
    return list(dict.fromkeys(cfg.claims))


def exit_code(reports: Sequence[Report]) -> int:
    statuses = {r.status for r in reports}
    if INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    if REFUTED in statuses:
        return EXIT_REFUTED
    return EXIT_OK


def render(reports: Sequence[Report], cfg: RunConfig, extra_text: str = "") -> str:
    if cfg.format == "json":
        payload = [r.to_dict(cfg.timings) for r in reports]
        return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n"
    body = "\n\n".join(r.to_text() for r in reports)
    return body + ("\n" + extra_text if extra_text else "") + "\n"


def _decomposition_table(report: Report) -> str:
    m = report.measured
    lines = ["summands (sym | antisym):"]
    for part in ("sym", "antisym"):
        labels, dims = m[f"{part}_summand_labels"], m[f"{part}_summand_dims"]
        cells = ", ".join(f"{lbl}:{d}" for lbl, d in zip(labels, dims))
        lines.append(f"  {part:8s} {cells}  (total {sum(dims)})")
    return "\n".join(lines)


def _delta_entries(delta) -> list[list]:
    """Non-zero coefficients as ``[i, j, a, b, c, d, re, im]`` (zero-based)."""
    out = []
    for (i, j), blk in delta.blocks.items():
        for idx in zip(*np.nonzero(np.abs(blk) > 1e-12)):
            z = complex(blk[idx])
            out.append([i, j, *map(int, idx), round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0])
    return out


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command == "list-claims":
            for name, c in CLAIMS.items():
                print(f"{name:15s} {c.requirement}")
            return EXIT_OK
        cfg = resolve_config(args)
        try:
            A = make_algebra(cfg.dims, cfg.weights)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

        extra = ""
        if args.command == "verify":
            names = _select_claims(cfg, A)
            if not names:
                raise UsageError(f"no registered claim applies to dims {list(A.dims)}")
            with ThreadPoolExecutor(max_workers=min(_threads(), len(names))) as pool:
                reports = list(pool.map(lambda n: run_claim(n, A, cfg.seed, cfg.tol), names))
        elif args.command == "decompose":
            cfg = replace(cfg, claims=("decomposition",))
            _select_claims(cfg, A)
            reports = [run_claim("decomposition", A, cfg.seed, cfg.tol)]
            extra = _decomposition_table(reports[0])
        else:
            cfg = replace(cfg, claims=("delta",))
            _select_claims(cfg, A)
            delta, report = compute_delta(A, cfg.seed, cfg.tol)
            report.measured["delta_entries"] = _delta_entries(delta)
            reports = [report]
    except UsageError as exc:
        print(f"inq-verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    _emit(render(reports, cfg, extra), cfg)
    return exit_code(reports)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
