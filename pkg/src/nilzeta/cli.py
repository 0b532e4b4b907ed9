"""Command-line front end.

    nilzeta subgroup-zeta --presentation heisenberg -p 2 --max-n 3 --variant normal
    nilzeta twist-zeta --presentation heisenberg -p 3 --max-n 3
    nilzeta measure --matrix "[[p,0],[0,1]]" -p 3
    nilzeta lattice-canon --matrix "[[3,0],[2,1]]" -p 3
    nilzeta fit --coeffs 1,1,2,4,8 --max-deg 3
    nilzeta oracle-check --kind subgroups --presentation heisenberg -p 2 --precision 2
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import lattice, subgroups, zeta
from .errors import InputError, InvariantViolation, NilzetaError
from .malcev import FiniteQuotient, load_presentation

DEFAULT_MAX_DEG = 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    presentation: str | None = None
    prime: int | None = None
    max_n: int = 3
    variant: str = "all"
    precision: str = "auto"
    budget_elems: int = subgroups.ENUM_BUDGET
    workers: int = 1
    max_deg: int = DEFAULT_MAX_DEG
    out: str | None = None
    cache: str | None = None

    def __post_init__(self):
        if self.prime is not None and (self.prime < 2 or any(self.prime % d == 0 for d in range(2, int(self.prime**0.5) + 1))):
            raise InputError(f"{self.prime} is not prime")
        if self.budget_elems <= 0 or self.workers <= 0:
            raise InputError("budgets and worker counts must be positive")
        if self.max_n < 0:
            raise InputError("--max-n must be nonnegative")
        if self.precision != "auto":
            try:
                k = int(self.precision)
            except ValueError as exc:
                raise InputError(f"--precision must be 'auto' or an integer, got {self.precision!r}") from exc
            if k < 1:
                raise InputError("--precision must be >= 1")

    @property
    def fixed_precision(self) -> int | None:
        return None if self.precision == "auto" else int(self.precision)


# ---------------------------------------------------------------- counting with cache


class CountCache:
    """Counts keyed by (presentation digest, p, k, variant, n), one JSON file per entry."""

    def __init__(self, directory):
        self.dir = Path(directory) if directory else None
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    def _path(self, digest, p, k, variant, n):
        key = f"{digest}-{p}-{k}-{variant}-{n}"
        return self.dir / (hashlib.sha256(key.encode()).hexdigest()[:24] + ".json")

    def counter(self, budget):
        def count(pres, p, k, n, variant):
            if self.dir is None:
                return subgroups.count_at_precision(pres, p, k, n, variant, budget)
            path = self._path(pres.digest(), p, k, variant, n)
            if path.exists():
                return json.loads(path.read_text())["count"]
            value = subgroups.count_at_precision(pres, p, k, n, variant, budget)
            entry = {"presentation_digest": pres.digest(), "prime": p, "precision": k, "variant": variant, "n": n, "count": value}
            path.write_text(json.dumps(entry, sort_keys=True))
            return value

        return count


def _count_one(args):
    pres, p, n, variant, fixed, budget, cache_dir = args
    counter = CountCache(cache_dir).counter(budget)
    if fixed is not None:
        return counter(pres, p, fixed, n, variant), fixed, False
    res = subgroups.stabilized_count(pres, p, n, variant, budget=budget, counter=counter)
    return res.value, res.precision, True


def compute_counts(cfg: RunConfig, variant: str):
    pres = load_presentation(cfg.presentation)
    subgroups.check_variant(variant)
    if cfg.fixed_precision is not None:
        FiniteQuotient(pres, cfg.prime, cfg.fixed_precision)  # validates p and k early
    jobs = [(pres, cfg.prime, n, variant, cfg.fixed_precision, cfg.budget_elems, cfg.cache) for n in range(cfg.max_n + 1)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_count_one, jobs))
    else:
        results = [_count_one(j) for j in jobs]
    return pres, results


def _fit_report(counts, max_deg):
    fit = zeta.fit_rational(counts, max_deg)
    if isinstance(fit, zeta.RationalFunction):
        out = fit.to_json()
        out["expression"] = str(fit)
        out["validated_through"] = len(counts) - 1
        return out
    return fit.to_json()


def _growth_report(counts):
    K, c = zeta.growth_bound_check(counts)
    return {"K": str(K), "c": str(c)}


def run_subgroup_zeta(cfg: RunConfig) -> dict:
    pres, results = compute_counts(cfg, cfg.variant)
    counts = [r[0] for r in results]
    return {
        "command": "subgroup-zeta",
        "presentation": pres.name,
        "presentation_digest": pres.digest(),
        "prime": cfg.prime,
        "variant": cfg.variant,
        "counts": counts,
        "precision_used": max(r[1] for r in results),
        "precisions": [r[1] for r in results],
        "stabilized": all(r[2] for r in results),
        "fit": _fit_report(counts, cfg.max_deg),
        "growth": _growth_report(counts),
    }


def run_twist_zeta(cfg: RunConfig) -> dict:
    pres, results = compute_counts(cfg, "twist")
    counts = [r[0] for r in results]
    return {
        "command": "twist-zeta",
        "presentation": pres.name,
        "presentation_digest": pres.digest(),
        "prime": cfg.prime,
        "twist_counts": counts,
        "precision_used": max(r[1] for r in results),
        "precisions": [r[1] for r in results],
        "stabilized": all(r[2] for r in results),
        "fitted": _fit_report(counts, cfg.max_deg),
        "growth": _growth_report(counts),
    }


# ---------------------------------------------------------------- matrices


_TOKEN = re.compile(r"\"[^\"]*\"|[^\[\],\s\"]+")


def parse_scalar(text: str, p: int) -> Fraction:
    """'p^v*u', 'p', '-3', '1/3' and products of such factors."""
    text = str(text).strip().replace(" ", "")
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    value = Fraction(1)
    for factor in text.split("*"):
        m = re.fullmatch(r"p(?:\^(-?\d+))?", factor)
        if m:
            value *= Fraction(p) ** int(m.group(1) or 1)
            continue
        m = re.fullmatch(r"(\d+)\^(-?\d+)", factor)
        if m:
            value *= Fraction(int(m.group(1))) ** int(m.group(2))
            continue
        try:
            value *= Fraction(factor)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse matrix entry {text!r}") from exc
    return sign * value


def parse_matrix(text: str, p: int):
    """A JSON-like list of generator columns, returned as a list of rows."""
    try:
        quoted = _TOKEN.sub(lambda m: m.group(0) if m.group(0).startswith('"') else json.dumps(m.group(0)), text)
        data = json.loads(quoted)
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse matrix {text!r}") from exc
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise InputError("matrix must be a list of columns")
    cols = [[parse_scalar(x, p) for x in col] for col in data]
    if any(len(c) != len(cols) for c in cols):
        raise InputError("matrix must be square")
    return [[cols[j][i] for j in range(len(cols))] for i in range(len(cols))]


def _frac(x: Fraction):
    return int(x) if x.denominator == 1 else str(x)


def run_measure(args) -> dict:
    M = parse_matrix(args.matrix, args.p)
    piece = lattice.CosetPiece.of(M, args.p)
    mu = lattice.haar_coset_measure(piece)
    out = {"command": "measure", "prime": args.p, "measure": str(mu), "det_valuation": piece.det_valuation()}
    if args.oracle_k:
        oracle = lattice.residue_count_oracle(piece, args.oracle_k, args.budget_elems)
        vol = lattice.gl_volume(piece.dimension, args.p, args.oracle_k, args.budget_elems)
        out["oracle"] = str(oracle)
        out["gl_volume"] = str(vol)
        if oracle != mu * vol:
            raise InvariantViolation(f"residue oracle {oracle} != measure {mu} x GL volume {vol}")
    return out


def run_lattice(args) -> dict:
    M = parse_matrix(args.matrix, args.p)
    L = lattice.canonicalize(M, args.p)
    return {"command": "lattice-canon", "prime": args.p, "basis": [[_frac(x) for x in row] for row in L.entries], "exponents": list(L.exponents)}


def run_fit(args) -> dict:
    try:
        coeffs = [int(c) for c in args.coeffs.split(",") if c.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse coefficients {args.coeffs!r}") from exc
    fit = zeta.fit_rational(zeta.CoeffSeries(None, tuple(coeffs)), args.max_deg)
    if isinstance(fit, zeta.NoFit):
        return {"command": "fit", "numerator": None, "denominator": None, "reason": fit.reason, "residual_index": fit.residual_index}
    out = fit.to_json()
    out.update({"command": "fit", "validated_through": len(coeffs) - 1, "expression": str(fit)})
    return out


def run_oracle_check(args) -> dict:
    """Cross-check fast paths against brute force; exit code 5 on any disagreement."""
    if args.kind == "haar":
        if not args.matrix:
            raise InputError("--kind haar needs --matrix")
        args.oracle_k = args.oracle_k or 3
        return run_measure(args) | {"command": "oracle-check", "agree": True}
    pres = load_presentation(args.presentation)
    k = int(args.precision) if args.precision != "auto" else 1
    Q = FiniteQuotient(pres, args.p, k)
    if args.kind == "subgroups":
        brute = subgroups.brute_force_all_subgroups(Q)
        found = set()
        n = 0
        while Q.p**n <= Q.order:
            found |= subgroups.enumerate_subgroups(Q, n)
            n += 1
        if found != brute:
            raise InvariantViolation(f"enumeration found {len(found)} subgroups, brute force {len(brute)}")
        return {"command": "oracle-check", "kind": "subgroups", "order": Q.order, "subgroups": len(found), "agree": True}
    if args.kind == "characters":
        from .characters import mackey_oracle_report

        rep = mackey_oracle_report(Q)
        if rep["disagreements"]:
            raise InvariantViolation(f"Mackey tests disagree with the oracle on {rep['disagreements']} cases")
        return {"command": "oracle-check", "kind": "characters", "order": Q.order, **rep, "agree": True}
    raise InputError(f"unknown oracle kind {args.kind!r}")


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilzeta", description="Zeta functions of nilpotent groups at a prime.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, zeta_cmd=True):
        sp.add_argument("-p", type=int, required=True, help="the prime")
        sp.add_argument("--budget-elems", type=int, default=subgroups.ENUM_BUDGET)
        sp.add_argument("--format", choices=["json"], default="json")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")
        if zeta_cmd:
            sp.add_argument("--presentation", required=True, help="JSON file or shipped name")
            sp.add_argument("--max-n", type=int, default=3)
            sp.add_argument("--precision", default="auto", help="auto or a fixed k")
            sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
            sp.add_argument("--cache", default=None, help="directory for cached counts")
            sp.add_argument("--max-deg", type=int, default=DEFAULT_MAX_DEG)

    sp = sub.add_parser("subgroup-zeta", help="subgroup counts b_0..b_max_n and a rational fit")
    common(sp)
    sp.add_argument("--variant", default="all", help="all, normal, conjugacy or quotient-iso")
    sp = sub.add_parser("twist-zeta", help="twist-isoclass counts and a rational fit")
    common(sp)
    sp.add_argument("--variant", default="twist", help=argparse.SUPPRESS)
    sp = sub.add_parser("measure", help="Haar measure of A.GL_N(Z_p)")
    common(sp, zeta_cmd=False)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--oracle-k", type=int, default=0, help="also run the residue oracle mod p^k")
    sp = sub.add_parser("lattice-canon", help="canonical triangular basis of a lattice")
    common(sp, zeta_cmd=False)
    sp.add_argument("--matrix", required=True)
    sp = sub.add_parser("fit", help="fit a rational function to a coefficient list")
    sp.add_argument("--coeffs", required=True)
    sp.add_argument("--max-deg", type=int, default=DEFAULT_MAX_DEG)
    sp.add_argument("--format", choices=["json"], default="json")
    sp.add_argument("--out", default=None)
    sp = sub.add_parser("oracle-check", help="compare fast paths with brute-force oracles")
    common(sp, zeta_cmd=False)
    sp.add_argument("--kind", choices=["haar", "subgroups", "characters"], required=True)
    sp.add_argument("--presentation", default=None)
    sp.add_argument("--precision", default="1")
    sp.add_argument("--matrix", default=None)
    sp.add_argument("--oracle-k", type=int, default=0)
    return ap


def _config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        presentation=args.presentation,
        prime=args.p,
        max_n=args.max_n,
        variant=args.variant,
        precision=args.precision,
        budget_elems=args.budget_elems,
        workers=args.workers,
        max_deg=args.max_deg,
        out=args.out,
        cache=args.cache,
    )


def dispatch(args) -> dict:
    if args.command == "subgroup-zeta":
        return run_subgroup_zeta(_config(args))
    if args.command == "twist-zeta":
        return run_twist_zeta(_config(args))
    if args.command == "measure":
        return run_measure(args)
    if args.command == "lattice-canon":
        return run_lattice(args)
    if args.command == "fit":
        return run_fit(args)
    if args.command == "oracle-check":
        return run_oracle_check(args)
    raise InputError(f"unknown command {args.command}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report = dispatch(args)
    except NilzetaError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return exc.exit_code
    report["timing_seconds"] = round(time.perf_counter() - start, 3)
    text = json.dumps(report, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
