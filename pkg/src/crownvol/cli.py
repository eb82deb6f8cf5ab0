"""Command line driver.

    crownvol volume crown --n 3 --p 1 [--method auto|closed|quad|mc]
    crownvol volume disc --n 6 --samples 10000000
    crownvol sweep --n 3 --pmin 0.1 --pmax 10 --steps 20 --out sweep.csv
    crownvol check --suite all

Exit codes: 0 ok, 1 failed check, 2 usage, 3 convergence failure, 4 I/O.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import volumes as V
from .checks import SUITES, run_suite
from .errors import ConvergenceError, DomainError

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4
SWEEP_FIELDS = ["n", "P", "estimate", "stderr", "method", "seed", "asymptote", "small_P_limit"]


def sig12(x):
    """Round to 12 significant digits (keeps ints and None as they are)."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


@dataclass
class RunRecord:
    command: str
    params: dict
    estimate: float
    method: str
    stderr: float | None = None
    error_bound: float | None = None
    n_samples: int | None = None
    evaluations: int | None = None
    seed: int | None = None
    wall_time_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        d = {
            "command": self.command,
            "params": self.params,
            "method": self.method,
            "estimate": sig12(self.estimate),
            "stderr": sig12(self.stderr),
            "error_bound": sig12(self.error_bound),
            "n_samples": self.n_samples,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "wall_time_ms": round(self.wall_time_ms, 3),
        }
        d.update({k: sig12(v) for k, v in self.extra.items()})
        return {k: v for k, v in d.items() if v is not None}

    def text(self) -> str:
        d = self.as_dict()
        params = d.pop("params")
        lines = [f"{k}: {v}" for k, v in d.items()]
        lines.insert(1, "params: " + " ".join(f"{k}={v}" for k, v in params.items()))
        return "\n".join(lines)


def default_samples(n: int) -> int:
    return 10**6 if n <= 4 else 10**7


# ---------------------------------------------------------------------------
# computations returning (estimate, stderr, error_bound, n_samples, evaluations, seed, method)


def _crown(n: int, P: float, method: str, samples: int | None, seed: int, proposal: str):
    if n < 1:
        raise DomainError("n must be >= 1")
    if not P > 0:
        raise DomainError("P must be positive")
    if method == "auto":
        method = "closed" if n <= 3 else ("quad" if n == 4 else "mc")
    if method == "closed":
        if n > 3:
            raise DomainError("closed form available for n <= 3")
        val = {1: V.v1_closed, 2: V.v2_closed, 3: V.v3_closed}[n](P)
        return dict(estimate=float(val), stderr=0.0, method="closed")
    if method == "quad":
        if n > 4:
            raise DomainError("quadrature available for n <= 4")
        if n == 1:
            return dict(estimate=V.v1_closed(), stderr=0.0, method="closed")
        if n == 2:
            r = V.simplex_quadrature(V.crown_integrand, 2, P)
            return dict(estimate=r.value / 2.0, error_bound=r.abs_error_bound / 2.0,
                        evaluations=r.evaluations, method="quad")
        r = V.crown_volume_quadrature(n, P)
        return dict(estimate=r.value, error_bound=r.abs_error_bound, evaluations=r.evaluations, method="quad")
    if method == "mc":
        N = samples or default_samples(n)
        e = V.crown_volume_mc(n, P, N, seed, proposal)
        return dict(estimate=e.estimate, stderr=e.stderr, n_samples=e.n_samples, seed=seed, method="mc")
    raise DomainError(f"unknown method {method!r}")


DISC_CLOSED = {4: 1.0, 5: math.pi**2 / 6, 6: math.pi**2 / 3}


def _disc(n: int, method: str, samples: int | None, seed: int, proposal: str):
    if n < 4:
        raise DomainError("disc volume needs n >= 4")
    if method == "auto":
        method = "closed" if n == 4 else ("quad" if n <= 6 else "mc")
    if method == "closed":
        if n not in DISC_CLOSED:
            raise DomainError("closed form available for n <= 6")
        return dict(estimate=DISC_CLOSED[n], stderr=0.0, method="closed")
    if method == "quad":
        r = V.disc_volume_quadrature(n)
        return dict(estimate=r.value, error_bound=r.abs_error_bound, evaluations=r.evaluations, method="quad")
    if method == "mc":
        N = samples or default_samples(n)
        e = V.disc_volume_mc(n, N, seed, proposal)
        return dict(estimate=e.estimate, stderr=e.stderr, n_samples=e.n_samples, seed=seed, method="mc")
    raise DomainError(f"unknown method {method!r}")


def small_P_limit(n: int):
    """lim_{P->0} V_{n,P}; known for n <= 4."""
    if n == 1:
        return 1.0
    if n == 2:
        return 0.5
    if n == 3:
        return V.crown_small_P_limit(3, V.q3_closed())
    if n == 4:
        return V.crown_small_P_limit(4, V.q4_closed())
    return None


# ---------------------------------------------------------------------------
# commands


def _emit(text: str, out_path: str | None):
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


def cmd_volume(args) -> int:
    t0 = time.perf_counter()
    if args.kind == "crown":
        params = dict(kind="crown", n=args.n, P=args.p, method=args.method, samples=args.samples,
                      seed=args.seed, proposal=args.proposal)
        res = _crown(args.n, args.p, args.method, args.samples, args.seed, args.proposal)
    else:
        params = dict(kind="disc", n=args.n, method=args.method, samples=args.samples,
                      seed=args.seed, proposal=args.proposal)
        res = _disc(args.n, args.method, args.samples, args.seed, args.proposal)
    params = {k: v for k, v in params.items() if v is not None}
    rec = RunRecord(command=f"volume {args.kind}", params=params,
                    wall_time_ms=1e3 * (time.perf_counter() - t0), **res)
    body = json.dumps(rec.as_dict()) if args.json else rec.text()
    _emit(body + "\n", args.out)
    return EXIT_OK


def sweep_rows(n: int, pmin: float, pmax: float, steps: int, method: str, samples, seed: int, proposal: str):
    if not pmin > 0 or pmax < pmin:
        raise DomainError("need 0 < pmin <= pmax")
    if steps < 2:
        raise DomainError("need steps >= 2")
    rows = []
    lim = small_P_limit(n)
    for P in np.linspace(pmin, pmax, steps):
        P = float(P)
        r = _crown(n, P, method, samples, seed, proposal)
        stderr = r.get("stderr", r.get("error_bound", 0.0))
        rows.append({
            "n": n,
            "P": sig12(P),
            "estimate": sig12(r["estimate"]),
            "stderr": sig12(stderr),
            "method": r["method"],
            "seed": seed,
            "asymptote": sig12(V.crown_asymptote_large_P(n, P)),
            "small_P_limit": sig12(lim),
        })
    return rows


def cmd_sweep(args) -> int:
    rows = sweep_rows(args.n, args.pmin, args.pmax, args.steps, args.method, args.samples, args.seed, args.proposal)
    if args.json:
        text = json.dumps(rows) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if v is None else (f"{v:.12g}" if isinstance(v, float) else v)) for k, v in row.items()})
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    results = run_suite(args.suite, args.seed)
    ok = all(r.passed for r in results)
    if args.json:
        payload = {"suite": args.suite, "passed": ok,
                   "checks": [{**r.as_dict(), "value": sig12(r.value),
                               "tol": r.tol if math.isfinite(r.tol) else None} for r in results]}
        text = json.dumps(payload) + "\n"
    else:
        lines = []
        for r in results:
            tag = "PASS" if r.passed else "FAIL"
            tol = f"  tol={r.tol:.1e}" if math.isfinite(r.tol) else ""
            note = f"  ({r.note})" if r.note else ""
            lines.append(f"{tag}  [{r.suite}] {r.name}: {r.value:.12g}{tol}{note}")
        lines.append(f"{'ALL PASS' if ok else 'FAILURES'}: {sum(r.passed for r in results)}/{len(results)}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_CHECK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crownvol", description="Crown and disc moduli-space volumes.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")

    mc = _Parser(add_help=False)
    mc.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--proposal", choices=V.PROPOSALS, default="dirichlet_half")

    vol = sub.add_parser("volume", help="single volume")
    vsub = vol.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    vc = vsub.add_parser("crown", parents=[common, mc])
    vc.add_argument("--n", type=int, required=True)
    vc.add_argument("--p", type=float, required=True)
    vc.add_argument("--method", choices=["auto", "closed", "quad", "mc"], default="auto")
    vd = vsub.add_parser("disc", parents=[common, mc])
    vd.add_argument("--n", type=int, required=True)
    vd.add_argument("--method", choices=["auto", "closed", "quad", "mc"], default="auto")

    sw = sub.add_parser("sweep", parents=[common, mc], help="crown volume over a range of P")
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--pmin", type=float, required=True)
    sw.add_argument("--pmax", type=float, required=True)
    sw.add_argument("--steps", type=int, required=True)
    sw.add_argument("--method", choices=["auto", "closed", "quad", "mc"], default="auto")

    ck = sub.add_parser("check", parents=[common], help="identity suites")
    ck.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    ck.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    handler = {"volume": cmd_volume, "sweep": cmd_sweep, "check": cmd_check}[args.cmd]
    try:
        return handler(args)
    except DomainError as exc:
        print(f"crownvol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"crownvol: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"crownvol: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
