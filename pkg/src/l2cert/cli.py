"""Command line front end: ``l2cert <command> [flags]``.

Every command writes one JSON document with top-level fields
``config``, ``rows``, ``summary`` and ``verdict``.  ``--format csv``
flattens the rows instead.  Exit status: 0 success or PASS, 1 FAIL,
2 INCONCLUSIVE, 3 usage or runtime error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .complexes import (
    build_B,
    build_complex,
    build_K,
    build_X,
    pi2_basis,
    serialize_complex,
    tensor_complex,
    verify_d2,
    wedge_sphere,
)
from .group_algebra import augmentation
from .l2lab import (
    DEFAULT_CONSTRUCTION,
    FAIL,
    INCONCLUSIVE,
    PASS,
    build_y,
    build_Y,
    certify_Y,
    construct_gamma,
    hopf_accounting,
    integer_gamma_search,
    kunneth_check,
    luck_betti,
    solve_kernel_elements,
)
from .quotients import quotient_family, quotient_list
from .spectral import ball_norm, block_homology, markov_element

EXIT = {PASS: 0, "OK": 0, FAIL: 1, INCONCLUSIVE: 2}
EXIT_ERROR = 3
KESTEN_WINDOW = (0.84, 0.8661)
KESTEN_LIMIT = math.sqrt(3) / 2
DEFAULT_FAMILY = "sym:3;cyclic:27,81"
BOOL_KEYS = {"reproducible", "negative_control", "integer_search", "hopf"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file mirroring the flags")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help="overrides L2CERT_WORKERS")
    p.add_argument("--tol", type=float, default=1e-9, help="relative kernel cut")
    p.add_argument("--output", "-o", help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--reproducible", action="store_true", help="omit wall-clock timings")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="l2cert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"l2cert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-x", help="build a complex and verify d^2 = 0")
    p.add_argument("--complex", default="X")
    p.add_argument("--complex-out", help="write the serialized complex here")
    _common(p)

    p = sub.add_parser("pi2-verify", help="check the pi_2 basis columns are cycles")
    _common(p)

    p = sub.add_parser("betti", help="normalized Betti numbers over a quotient family")
    p.add_argument("--complex", default="X")
    p.add_argument("--family", default="sym:3..3")
    p.add_argument("--k-low", type=int, default=6)
    p.add_argument("--exact-limit", type=int, default=20000)
    p.add_argument("--hopf", action="store_true", help="also run the X/K dimension accounting")
    _common(p)

    p = sub.add_parser("kesten", help="ball compression norm of the Markov element")
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--radii", default="2,4,6,8")
    _common(p)

    p = sub.add_parser("prop-d", help="kernel elements u1, u2 of each factor")
    p.add_argument("--quotient", default="sym:3..4", help="single-factor quotient descriptor")
    p.add_argument("--radius", type=int, default=None, help="ball mode instead of quotients")
    p.add_argument("--nodes", type=int, default=64)
    _common(p)

    p = sub.add_parser("kunneth", help="Kunneth convolution identities")
    p.add_argument("--pair", default="B,BB", choices=("B,B", "B,BB", "BB,B", "B,pt"))
    p.add_argument("--family", default="sym:3..4")
    _common(p)

    p = sub.add_parser("construct-y", help="build the attaching matrix and Y")
    _gamma_flags(p)
    p.add_argument("--complex-out", help="write the serialized Y here")
    p.add_argument("--integer-search", action="store_true", help="search N for integer mode")
    _common(p)

    p = sub.add_parser("certify-y", help="Betti certification of Y over a family")
    _gamma_flags(p)
    p.add_argument("--family", default=DEFAULT_FAMILY)
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--min-members", type=int, default=3)
    p.add_argument("--exact-limit", type=int, default=20000)
    p.add_argument("--negative-control", action="store_true", help="use coordinate attaching")
    _common(p)
    return parser


def _gamma_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("rational", "integer", "coordinate"), default="rational")
    p.add_argument("--kernel-radius", type=int, default=6, help="ball radius for the kernel elements")
    p.add_argument("--kernel-quotient", default=None, help="quotient descriptor instead of a ball")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--den-limit", type=int, default=10**6)
    p.add_argument("--construction", default=DEFAULT_CONSTRUCTION)


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key = value")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        defaults = {}
        for k, v in cfg.items():
            if k in BOOL_KEYS:
                defaults[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                defaults[k] = v
        # flags given on the command line win over the file
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def resolve_workers(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("L2CERT_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"L2CERT_WORKERS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


# ----------------------------------------------------------------- commands

def cmd_build_x(args) -> dict:
    C = build_complex(args.complex)
    d2 = verify_d2(C)
    if args.complex_out:
        atomic_write(args.complex_out, serialize_complex(C))
    row = {"complex": C.name, "degrees": list(C.degrees), "euler_characteristic": C.euler_characteristic(),
           "d2_zero": {str(p): v for p, v in d2.items()}, "labels": {str(p): l for p, l in enumerate(C.labels)}}
    return {"rows": [row], "summary": {"d2_verified": True}, "verdict": "OK"}


def cmd_pi2_verify(args) -> dict:
    X = build_X()
    B = pi2_basis()
    prod = X.boundary(2) @ B
    zeros = sum(prod[r, c].is_zero() for r in range(prod.rows) for c in range(prod.cols))
    cols = []
    for c in range(B.cols):
        nz = [B[r, c] for r in range(B.rows) if not B[r, c].is_zero()]
        cols.append({"column": c, "nonzero": len(nz), "augmentations": [str(augmentation(x)) for x in nz]})
    K = build_K()
    k_equal = K.boundary(3) == B
    ok = zeros == prod.rows * prod.cols and k_equal and B.cols == 8
    summary = {"entries": prod.rows * prod.cols, "zero_entries": zeros, "columns": B.cols,
               "K_boundary3_equals_basis": k_equal}
    return {"rows": cols, "summary": summary, "verdict": "OK" if ok else FAIL}


def cmd_betti(args) -> dict:
    C = build_complex(args.complex)
    fam = quotient_family(args.family, args.seed)
    table = luck_betti(C, fam, k_low=args.k_low, exact_limit=args.exact_limit, workers=args.workers)
    summary = {"complex": C.name, "degrees": list(C.degrees), "chi": C.euler_characteristic(),
               "trend": table.summary(), "euler_identity": all(r.euler == r.euler_expected for r in table.rows)}
    if args.hopf:
        other = build_K() if C.name == "X" else build_X()
        ot = luck_betti(other, fam, k_low=args.k_low, exact_limit=args.exact_limit, workers=args.workers)
        tx, tk = (table, ot) if C.name == "X" else (ot, table)
        summary["hopf"] = hopf_accounting(tx, tk)
    return {"rows": [dict(r.to_dict(), complex=C.name) for r in table.rows], "summary": summary, "verdict": "OK"}


def cmd_kesten(args) -> dict:
    x = markov_element(1)
    radii = sorted({int(r) for r in str(args.radii).split(",") if r.strip()} | {args.radius})
    rows = []
    for r in radii:
        t0 = time.perf_counter()
        rows.append({"radius": r, "estimate": ball_norm(x, r, seed=args.seed), "seconds": time.perf_counter() - t0})
    est = {r["radius"]: r["estimate"] for r in rows}
    value = est[args.radius]
    monotone = all(b["estimate"] >= a["estimate"] - 1e-12 for a, b in zip(rows, rows[1:]))
    under = all(r["estimate"] <= KESTEN_LIMIT + 1e-6 for r in rows)
    inside = KESTEN_WINDOW[0] <= value <= KESTEN_WINDOW[1]
    summary = {"radius": args.radius, "estimate": value, "window": list(KESTEN_WINDOW), "in_window": inside,
               "nondecreasing": monotone, "below_limit": under, "limit": KESTEN_LIMIT}
    return {"rows": rows, "summary": summary, "verdict": PASS if inside and monotone and under else FAIL}


def cmd_prop_d(args) -> dict:
    rows = []
    if args.radius is not None:
        scales = [args.radius]
    else:
        scales = quotient_list(args.quotient, args.seed)
    for sc in scales:
        t0 = time.perf_counter()
        ke = solve_kernel_elements(sc, nodes=args.nodes)
        for f in ke.factors:
            row = {"scale": sc if isinstance(sc, int) else sc.label, "mode": ke.mode, "factor": f.s,
                   "residual": f.residual, "identity_coefficient_u1": f.identity_coefficient,
                   "u1_terms": len(f.u1), "u2_terms": len(f.u2)}
            if f.projector:
                row.update({k: v for k, v in f.projector.items()})
            rows.append(row)
        rows[-1]["seconds"] = time.perf_counter() - t0
    quotient_rows = [r for r in rows if r["mode"] == "quotient"]
    ok = all(r["residual"] <= 1e-10 for r in quotient_rows)
    summary = {"max_residual": max(r["residual"] for r in rows),
               "identity_coefficient_last": rows[-1]["identity_coefficient_u1"]}
    return {"rows": rows, "summary": summary, "verdict": "OK" if ok else FAIL}


def kunneth_pair(name: str):
    B1, B2, B3 = build_B(1), build_B(2), build_B(3)
    from .complexes import point_complex

    return {
        "B,B": (B1, B2),
        "B,BB": (B1, tensor_complex(B2, B3)),
        "BB,B": (tensor_complex(B1, B2), B3),
        "B,pt": (B1, point_complex()),
    }[name]


def cmd_kunneth(args) -> dict:
    C, D = kunneth_pair(args.pair)
    rep = kunneth_check(C, D, quotient_family(args.family, args.seed))
    summary = {"tensor": rep["tensor"], "degrees": rep["degrees"], "all_equal": rep["all_equal"]}
    return {"rows": rep["rows"], "summary": summary, "verdict": "OK" if rep["all_equal"] else FAIL}


def _attaching(args):
    construction = quotient_family(args.construction, args.seed)[0]
    ke = None
    if args.mode != "coordinate":
        if args.kernel_quotient:
            ke = solve_kernel_elements(quotient_family(args.kernel_quotient, args.seed)[0], den_limit=args.den_limit)
        else:
            ke = solve_kernel_elements(args.kernel_radius, den_limit=args.den_limit)
    am = construct_gamma(None, ke, args.mode, N=args.N, den_limit=args.den_limit, construction=construction)
    return ke, am, construction


def cmd_construct_y(args) -> dict:
    t0 = time.perf_counter()
    ke, am, construction = _attaching(args)
    Y = build_Y(am, "Y" if args.mode != "coordinate" else "KvS2")
    d2 = verify_d2(Y)
    if args.complex_out:
        atomic_write(args.complex_out, serialize_complex(Y))
    row = {"complex": Y.name, "degrees": list(Y.degrees), "euler_characteristic": Y.euler_characteristic(),
           "d2_zero": {str(p): v for p, v in d2.items()}, "attaching": am.to_dict(),
           "seconds": time.perf_counter() - t0}
    summary = {"provenance": am.to_dict()}
    if ke is not None:
        _, residual = build_y(ke)
        summary["y_boundary_residual"] = residual
        summary["kernel_residuals"] = ke.residuals
    if args.integer_search and ke is not None:
        rational = block_homology(Y, construction).kernel
        summary["integer_search"] = integer_gamma_search(ke, construction, rational)
    return {"rows": [row], "summary": summary, "verdict": "OK"}


def cmd_certify_y(args) -> dict:
    if args.negative_control:
        args.mode = "coordinate"
    ke, am, _ = _attaching(args)
    Y = build_Y(am, "KvS2" if args.mode == "coordinate" else "Y")
    verify_d2(Y)
    rep = certify_Y(Y, quotient_family(args.family, args.seed), threshold=args.threshold,
                    min_members=args.min_members, exact_limit=args.exact_limit, workers=args.workers)
    rows = [dict(r, complex=Y.name) for r in rep["rows"]]
    summary = {"reasons": rep["reasons"], "threshold": args.threshold, "min_members": args.min_members,
               "provenance": am.to_dict(),
               "max_normalized": [max(r["normalized"]) for r in rows if "normalized" in r]}
    return {"rows": rows, "summary": summary, "verdict": rep["verdict"]}


COMMANDS = {
    "build-x": cmd_build_x,
    "pi2-verify": cmd_pi2_verify,
    "betti": cmd_betti,
    "kesten": cmd_kesten,
    "prop-d": cmd_prop_d,
    "kunneth": cmd_kunneth,
    "construct-y": cmd_construct_y,
    "certify-y": cmd_certify_y,
}


# ------------------------------------------------------------------ output

def _strip_timings(obj):
    if isinstance(obj, dict):
        return {k: _strip_timings(v) for k, v in obj.items() if k != "seconds"}
    if isinstance(obj, list):
        return [_strip_timings(v) for v in obj]
    return obj


def _clean(obj):
    # JSON has no NaN/inf; numpy scalars become Python numbers
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def csv_text(report: dict) -> str:
    buf = io.StringIO()
    rows = report["rows"]
    if any("kernel" in r for r in rows):
        cols = ["complex", "quotient_label", "D", "degree", "kernel_dim", "normalized", "lowest_eigenvalues"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            if "kernel" not in r:
                continue
            for p, k in enumerate(r["kernel"]):
                low = r.get("lowest") or []
                lows = low[p] if p < len(low) else []
                w.writerow([r.get("complex", ""), r["label"], r["D"], p, k, repr(r["normalized"][p]),
                            " ".join(repr(float(v)) for v in lows)])
        return buf.getvalue()
    keys: list = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def atomic_write(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv: list[str] | None = None) -> tuple[int, dict | None]:
    """Execute one command; returns (exit status, report)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        args.workers = resolve_workers(args.workers)
    except UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return EXIT_ERROR, None
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("config",)}
    if args.reproducible:
        config.pop("workers", None)
    config["tool_version"] = __version__
    t0 = time.perf_counter()
    try:
        body = COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes an error report
        report = {"config": config, "rows": [], "summary": {"error": f"{type(exc).__name__}: {exc}"},
                  "verdict": "ERROR"}
        _emit(args, report)
        sys.stderr.write(f"l2cert {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR, report
    summary = dict(body["summary"])
    summary["seconds"] = time.perf_counter() - t0
    report = {"config": config, "rows": body["rows"], "summary": summary, "verdict": body["verdict"]}
    report = _clean(_strip_timings(report) if args.reproducible else report)
    _emit(args, report)
    return EXIT.get(report["verdict"], EXIT_ERROR), report


def _emit(args, report: dict) -> None:
    report = _clean(report)
    text = csv_text(report) if args.format == "csv" else json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.output:
        atomic_write(args.output, text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
