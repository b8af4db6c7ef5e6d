"""Command-line entry point.

    dshift COMMAND PROBLEM.json [--degree N] [--p 6,2] [--budget B] [--window W]
           [--mode exact|probe] [--format json|text] [--out FILE]
           [--cache-dir PATH] [--no-cache]

Exit codes: 0 success, 2 when any section is inconclusive, 1 on error.
Reports are cached on disk under ``$DSHIFT_CACHE_DIR`` (default
``~/.cache/dshift``), keyed by a hash of the command and canonical problem.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Any

from . import __version__
from .dirac import dirac_index, tuple_for, verify_index_formulas
from .exact import fraction_str
from .fock import verify_identities
from .lattice import Side, curvature, graded_dims
from .probe import decay_verdict
from .problem import ProblemError, ProblemSpec, parse_problem
from .schatten import commutator_spectrum, schatten_sum

COMMANDS = ("hilbert", "curvature", "schatten", "identities", "index", "verify", "probe", "all")
EXACT_SECTIONS = ("hilbert", "curvature", "schatten", "identities", "index", "verify")
CACHE_ENV = "DSHIFT_CACHE_DIR"

OK, ERROR, INCONCLUSIVE = 0, 1, 2


def _num(x: float) -> float | str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def section_hilbert(spec: ProblemSpec) -> dict:
    M = spec.submodule()
    rows = []
    for n in range(spec.cutoff + 1):
        inside, perp = graded_dims(M, n)
        rows.append({"degree": n, "submodule": inside, "quotient": perp})
    return {"status": "exact", "cutoff": spec.cutoff, "dims": rows}


def section_curvature(spec: ProblemSpec) -> dict:
    M = spec.submodule()
    deg = max(spec.cutoff, M.max_generator_degree + M.d + 3)
    out: dict[str, Any] = {"degree": deg}
    statuses = []
    for side in (Side.QUOTIENT, Side.SUBMODULE):
        rep = curvature(M, side, deg)
        statuses.append(rep.status)
        out[side.value] = {
            "status": rep.status,
            "K": rep.K,
            "window": list(rep.window),
            "differences": [[n, v] for n, v in rep.differences],
        }
    out["status"] = "exact" if all(s == "exact" for s in statuses) else "inconclusive"
    return out


def section_schatten(spec: ProblemSpec) -> dict:
    M = spec.submodule()
    axes = []
    statuses = []
    for k in range(1, M.d + 1):
        stream = commutator_spectrum(M, k, spec.budget)
        sums = []
        for p in spec.p:
            rep = schatten_sum(stream, p)
            statuses.append(rep.verdict)
            sums.append({
                "p": p,
                "status": rep.verdict,
                "value": _num(rep.value),
                "relative_increment": _num(rep.relative_increment),
            })
        fit = sums and schatten_sum(stream, spec.p[0]).fit
        axes.append({
            "axis": k,
            "entries": len(stream),
            "exhausted": stream.exhausted,
            "leading_sigma_sq": [[fraction_str(s), m] for s, m in stream.entries[:20]],
            "fit": {
                "status": fit.status,
                "alpha": _num(fit.alpha),
                "critical_p": _num(fit.critical_p),
                "residual": _num(fit.residual),
            } if fit else None,
            "sums": sums,
        })
    status = "inconclusive" if "inconclusive" in statuses else ("diverging" if "diverging" in statuses else "converged")
    return {"status": status, "budget": spec.budget, "axes": axes}


def section_identities(spec: ProblemSpec) -> dict:
    rep = verify_identities(spec.submodule(), spec.cutoff)
    out = {
        "status": rep.status,
        "cutoff": spec.cutoff,
        "max_degree": rep.max_degree,
        "defects": {k: fraction_str(v) for k, v in rep.defects.items()},
    }
    if rep.status == "exact":
        out["holds"] = rep.passed
    else:
        out["hint"] = f"need cutoff >= {spec.submodule().max_generator_degree + 2}"
    return out


def _index_dict(rep) -> dict:
    out = {
        "status": "exact" if rep.status == "stable" else "inconclusive",
        "index": rep.index,
        "dim_ker_plus": rep.dim_ker_plus,
        "dim_ker_minus": rep.dim_ker_minus,
        "blocks": list(rep.blocks),
        "window": rep.window,
        "per_block": [list(b) for b in rep.per_block],
    }
    if rep.required_N is not None:
        out["hint"] = f"need cutoff >= {rep.required_N}"
    return out


def section_index(spec: ProblemSpec) -> dict:
    M = spec.submodule()
    out = {}
    for side in (Side.QUOTIENT, Side.SUBMODULE):
        out[side.value] = _index_dict(dirac_index(tuple_for(M, spec.cutoff, side), spec.window))
    out["status"] = "exact" if all(v["status"] == "exact" for v in out.values()) else "inconclusive"
    return out


def section_verify(spec: ProblemSpec) -> dict:
    M = spec.submodule()
    chk = verify_index_formulas(M, spec.cutoff, spec.window)
    status = {"pass": "exact", "fail": "exact", "inconclusive": "inconclusive"}[chk.status]
    return {
        "status": status,
        "result": chk.status,
        "index_quotient": chk.index_quotient.index,
        "index_submodule": chk.index_submodule.index,
        "index_sum": chk.index_quotient.index + chk.index_submodule.index,
        "expected_sum": (-1) ** M.d * M.r,
        "K_quotient": chk.K_quotient,
        "K_submodule": chk.K_submodule,
        "checks": chk.checks,
        "index_status": [chk.index_quotient.status, chk.index_submodule.status],
    }


def section_probe(spec: ProblemSpec) -> dict:
    G = spec.generator_set()
    N = max(spec.cutoff, max(G.degrees(), default=0) + 4)
    cutoffs = (N - 4, N - 2, N)
    v = decay_verdict(G, cutoffs)
    status = {"decaying": "converged", "non-decaying": "diverging"}.get(v.verdict, "inconclusive")
    top = v.reports[-1]
    return {
        "status": status,
        "verdict": v.verdict,
        "cutoffs": list(cutoffs),
        "upper_half_max": {str(k): vals for k, vals in v.upper_half_max.items()},
        "per_axis": {str(k): t for k, t in v.per_axis.items()},
        "dims": top.dims,
        "singular_values": {str(a.k): [float(x) for x in a.singular_values[:50]] for a in top.axes},
        "fit": {str(a.k): {"status": a.fit.status, "critical_p": _num(a.fit.critical_p)} for a in top.axes},
    }


SECTIONS = {
    "hilbert": section_hilbert,
    "curvature": section_curvature,
    "schatten": section_schatten,
    "identities": section_identities,
    "index": section_index,
    "verify": section_verify,
    "probe": section_probe,
}


def sections_for(command: str, spec: ProblemSpec) -> tuple[str, ...]:
    if command == "all":
        return EXACT_SECTIONS + ("probe",) if spec.kind == "monomial" else ("probe",)
    return (command,)


def run(command: str, spec: ProblemSpec) -> tuple[dict, int]:
    """Execute ``command`` and return (report, exit code)."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    report: dict[str, Any] = {
        "tool": "dshift",
        "version": __version__,
        "command": command,
        "input": spec.canonical(),
        "sections": {},
        "timings": {},
    }
    code = OK
    for name in sections_for(command, spec):
        t0 = time.perf_counter()
        try:
            if name != "probe" and spec.kind != "monomial":
                raise ProblemError("generators", f"section {name!r} needs monomial generators")
            sec = SECTIONS[name](spec)
        except (ValueError, ArithmeticError) as exc:
            report["sections"][name] = {"status": "error", "module": name, "message": str(exc)}
            report["error"] = {"module": name, "message": str(exc)}
            report["timings"][name] = time.perf_counter() - t0
            return report, ERROR
        report["timings"][name] = time.perf_counter() - t0
        report["sections"][name] = sec
        if sec["status"] == "inconclusive":
            code = INCONCLUSIVE
    report["statuses"] = {k: v["status"] for k, v in report["sections"].items()}
    return report, code


def cache_key(command: str, spec: ProblemSpec) -> str:
    blob = json.dumps({"command": command, "spec": spec.canonical(), "version": __version__}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "dshift"


def report_body(report: dict) -> str:
    """Serialized report without timing fields (the part the cache reproduces)."""
    body = {k: v for k, v in report.items() if k != "timings"}
    return json.dumps(body, sort_keys=True, indent=2)


def run_cached(command: str, spec: ProblemSpec, cache_dir: Path | None) -> tuple[dict, int]:
    if cache_dir is None:
        return run(command, spec)
    key = cache_key(command, spec)
    path = cache_dir / key[:2] / f"{key}.json"
    if path.exists():
        stored = json.loads(path.read_text())
        report = stored["report"]
        report["timings"] = dict(report.get("timings", {}), cache="hit")
        return report, stored["exit_code"]
    report, code = run(command, spec)
    if code != ERROR:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"report": report, "exit_code": code}, sort_keys=True))
        tmp.replace(path)
    return report, code


def format_text(report: dict) -> str:
    lines = [f"dshift {report['version']} :: {report['command']}"]
    for name, sec in report["sections"].items():
        lines.append(f"[{sec.get('status', '?'):>12}] {name}")
        if name == "verify":
            lines.append(
                f"    ind quotient={sec['index_quotient']} ind submodule={sec['index_submodule']}"
                f" sum={sec['index_sum']} expected={sec['expected_sum']} ({sec['result']})"
            )
        elif name == "curvature":
            lines.append(f"    K quotient={sec['quotient']['K']} K submodule={sec['submodule']['K']}")
        elif name == "schatten":
            for ax in sec["axes"]:
                for s in ax["sums"]:
                    lines.append(f"    k={ax['axis']} p={s['p']}: {s['value']} ({s['status']})")
        elif name == "index":
            lines.append(f"    quotient={sec['quotient']['index']} submodule={sec['submodule']['index']}")
        elif name == "identities":
            for k, v in sec["defects"].items():
                lines.append(f"    {k}: {v}")
        elif name == "probe":
            lines.append(f"    verdict={sec['verdict']} cutoffs={sec['cutoffs']}")
        elif name == "hilbert":
            lines.append("    " + " ".join(f"{r['submodule']}/{r['quotient']}" for r in sec["dims"]))
        if "hint" in sec:
            lines.append(f"    hint: {sec['hint']}")
        for side in ("quotient", "submodule"):
            if isinstance(sec.get(side), dict) and "hint" in sec[side]:
                lines.append(f"    {side} hint: {sec[side]['hint']}")
    if "error" in report:
        lines.append(f"error in {report['error']['module']}: {report['error']['message']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dshift", description="Invariants of monomial submodules of the d-shift.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("problem", help="JSON problem file ('-' for stdin)")
    ap.add_argument("--degree", type=int, help="truncation cutoff N")
    ap.add_argument("--p", help="comma-separated Schatten exponents")
    ap.add_argument("--budget", type=int, help="max source degree for spectra")
    ap.add_argument("--window", type=int, help="stabilization window W for the index")
    ap.add_argument("--mode", choices=("exact", "probe"), default=None)
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--cache-dir", help=f"cache directory (default ${CACHE_ENV} or ~/.cache/dshift)")
    ap.add_argument("--no-cache", action="store_true")
    return ap


def apply_overrides(spec: ProblemSpec, args: argparse.Namespace) -> ProblemSpec:
    changes: dict[str, Any] = {}
    if args.degree is not None:
        if args.degree < 1:
            raise ProblemError("--degree", "must be >= 1")
        changes["cutoff"] = args.degree
    if args.p:
        try:
            ps = [float(x) for x in args.p.split(",") if x.strip()]
        except ValueError:
            raise ProblemError("--p", f"bad list {args.p!r}") from None
        if not ps or any(x < 1 for x in ps):
            raise ProblemError("--p", "exponents must be >= 1")
        changes["p"] = ps
    if args.budget is not None:
        if args.budget < 0:
            raise ProblemError("--budget", "must be >= 0")
        changes["budget"] = args.budget
    if args.window is not None:
        if args.window < 1:
            raise ProblemError("--window", "must be >= 1")
        changes["window"] = args.window
    return replace(spec, **changes) if changes else spec


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.problem == "-" else Path(args.problem).read_text(encoding="utf-8")
        spec = apply_overrides(parse_problem(text), args)
        mode = args.mode or ("exact" if spec.kind == "monomial" else "probe")
        if mode == "probe" and args.command not in ("probe", "all"):
            raise ProblemError("--mode", f"probe mode only runs 'probe' or 'all', not {args.command!r}")
        if mode == "exact" and spec.kind != "monomial":
            raise ProblemError("--mode", "exact mode needs monomial generators")
        command = "probe" if (mode == "probe" and args.command == "all") else args.command
        cache_dir = None if args.no_cache else (Path(args.cache_dir) if args.cache_dir else default_cache_dir())
        report, code = run_cached(command, spec, cache_dir)
    except (OSError, ProblemError, ValueError) as exc:
        err = {"tool": "dshift", "version": __version__, "error": {"module": "cli", "message": str(exc)},
               "input": {"problem": args.problem}}
        print(json.dumps(err, indent=2, sort_keys=True), file=sys.stderr)
        return ERROR
    out = format_text(report) if args.format == "text" else json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(out + "\n", encoding="utf-8")
    else:
        print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
