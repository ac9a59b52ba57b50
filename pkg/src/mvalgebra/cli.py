"""Command line front end.

Every command prints one JSON document on standard output (or writes it to
``-o``) and a one-line summary on standard error.  Exit status 0 means the
checks passed or the computation succeeded, 1 that a mathematical check
failed, 2 that the input could not be used.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .composed import (
    assemble,
    compose_explicit,
    components,
    ibl_witness,
    is_bv_infinity,
    munster_sachs_witness,
)
from .errors import (
    AxiomViolation,
    MVError,
    NotAMorphism,
    NotASolution,
    NotBialgebra,
    NotPrimitive,
    PoleOverflow,
    SchemaError,
    TruncationOverflow,
)
from .mvcat import (
    SymmetricMVAlgebra,
    diamond,
    exp_map,
    log_map,
    mv_morphism_witness,
    validate_mv,
)
from .qme import (
    derived_bracket_identity,
    higher_derived_bracket,
    is_qme_solution,
    mc_residual,
    pushforward,
    pushforward_via_diamond,
    qme_report,
)
from .serialize import Loader, TRUNC_KEYS, candidate_to_json, dumps, map_to_json

COMMANDS = ("validate", "check-morphism", "compose", "exp", "log", "qme-check", "pushforward", "brackets", "ibl-check")
EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2


@dataclass
class JobSpec:
    command: str
    inputs: list[str]
    trunc: dict = field(default_factory=dict)
    mode: str | None = None
    oracle: bool = False
    output: str | None = None
    bv: bool = False


@dataclass
class Outcome:
    code: int
    report: dict
    summary: str


def parse_trunc(text: str | None) -> dict:
    """``"D=4,H=3"`` -> ``{"D": 4, "H": 3}``."""
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep or key not in TRUNC_KEYS:
            raise SchemaError(f"bad --trunc entry {part!r}; expected D=..,H=..,L=..,P=..")
        try:
            out[key] = int(val)
        except ValueError:
            raise SchemaError(f"--trunc {key} must be an integer") from None
    return out


def _check_report(name: str, witness) -> dict:
    return {"check": name, "pass": witness is None, "witness": witness}


def _verdict(command: str, checks: list[dict], extra: dict | None = None) -> Outcome:
    ok = all(c["pass"] for c in checks)
    report = {"command": command, "pass": ok, "checks": checks}
    if extra:
        report.update(extra)
    failed = next((c["check"] for c in checks if not c["pass"]), None)
    summary = f"{command}: {'pass' if ok else 'FAIL at ' + failed} ({len(checks)} checks)"
    return Outcome(EXIT_OK if ok else EXIT_CHECK, report, summary)


def _need(job: JobSpec, n: int) -> list[str]:
    if len(job.inputs) != n:
        raise SchemaError(f"{job.command} takes {n} input file(s), got {len(job.inputs)}")
    return job.inputs


# ---------------------------------------------------------------- commands

def _validate(job: JobSpec, ld: Loader) -> Outcome:
    (path,) = _need(job, 1)
    A = ld.algebra_document(path)
    checks = validate_mv(A).to_json()["checks"]
    if job.bv:
        checks += [dict(c, check="bv:" + c["check"]) for c in is_bv_infinity(A).to_json()["checks"]]
    return _verdict("validate", [_norm(c) for c in checks])


def _norm(c: dict) -> dict:
    return {"check": c["check"], "pass": c["pass"], "witness": c.get("witness")}


def _check_morphism(job: JobSpec, ld: Loader) -> Outcome:
    (path,) = _need(job, 1)
    f = ld.map_document(path)
    return _verdict("check-morphism", [_check_report("Delta'' exp(f) = exp(f) Delta'", mv_morphism_witness(f))])


def _compose(job: JobSpec, ld: Loader) -> Outcome:
    f_path, g_path = _need(job, 2)
    f, g = ld.map_document(f_path), ld.map_document(g_path)
    symmetric = all(isinstance(A, SymmetricMVAlgebra) for A in (g.source, g.target, f.target))
    if symmetric and not job.oracle:
        h = assemble(compose_explicit(components(f), components(g)))
        how = "connected-unshuffle"
    else:
        h = diamond(f, g)
        how = "log(exp f o exp g)"
    doc = map_to_json(h, family=symmetric)
    return Outcome(EXIT_OK, {"command": "compose", "method": how, "result": doc},
                   f"compose: {len(h.images)} nonzero images via {how}")


def _exp_log(job: JobSpec, ld: Loader, fn: Callable, name: str) -> Outcome:
    (path,) = _need(job, 1)
    f = ld.map_document(path)
    method = "series" if job.oracle else "auto"
    h = fn(f, method=method)
    return Outcome(EXIT_OK, {"command": name, "method": method, "result": map_to_json(h)},
                   f"{name}: {len(h.images)} nonzero images")


def _qme_check(job: JobSpec, ld: Loader) -> Outcome:
    (path,) = _need(job, 1)
    S = ld.candidate_document(path)
    return _verdict("qme-check", [qme_report(S)])


def _pushforward(job: JobSpec, ld: Loader) -> Outcome:
    map_path, sol_path = _need(job, 2)
    f = ld.map_document(map_path)
    S = ld.candidate_document(sol_path)
    P = pushforward_via_diamond(f, S) if job.oracle else pushforward(f, S)
    checks = [_check_report("pushforward solves the QME in the target",
                            None if is_qme_solution(P) else {"candidate": P.to_json()})]
    return _verdict("pushforward", checks, {"result": candidate_to_json(P)})


def _brackets(job: JobSpec, ld: Loader) -> Outcome:
    (path,) = _need(job, 1)
    A, S, groups = ld.brackets_document(path)
    lhs, rhs = derived_bracket_identity(A, S)
    ident = None if lhs == rhs else {"hbar e^{-S/hbar} Delta e^{S/hbar}": lhs.to_json(), "sum l_n/n!": rhs.to_json()}
    res = mc_residual(A, S, verify=False)
    extra = {
        "mc_residual": res.to_json(),
        "solves_qme": not res.terms,
        "brackets": [
            {"n": len(g), "value": higher_derived_bracket(A, len(g), g).to_json()} for g in groups
        ],
    }
    return _verdict("brackets", [_check_report("derived bracket identity", ident)], extra)


def _ibl_check(job: JobSpec, ld: Loader) -> Outcome:
    (path,) = _need(job, 1)
    F = components(ld.map_document(path))
    if F.source.ring.mode.value == "k":
        raise SchemaError("ibl-check needs an hbar mode")
    checks = [_check_report("hbar^{n-1} divides f^m_n", ibl_witness(F))]
    extra = {"munster_sachs": _check_report("hbar^{k-1} part of f^m_n vanishes for m > k", munster_sachs_witness(F))}
    return _verdict("ibl-check", checks, extra)


_HANDLERS = {
    "validate": _validate,
    "check-morphism": _check_morphism,
    "compose": _compose,
    "exp": lambda job, ld: _exp_log(job, ld, exp_map, "exp"),
    "log": lambda job, ld: _exp_log(job, ld, log_map, "log"),
    "qme-check": _qme_check,
    "pushforward": _pushforward,
    "brackets": _brackets,
    "ibl-check": _ibl_check,
}

_CHECK_ERRORS = (AxiomViolation, NotAMorphism, NotASolution, NotBialgebra, NotPrimitive)


def _hint(exc: Exception) -> str | None:
    if isinstance(exc, TruncationOverflow):
        return "raise D with --trunc D=.."
    if isinstance(exc, PoleOverflow):
        return "raise P with --trunc P=.."
    return None


def run(job: JobSpec) -> Outcome:
    """Execute one job; never raises for mathematical or input errors."""
    if job.command not in _HANDLERS:
        return Outcome(EXIT_INPUT, {"command": job.command, "error": "unknown command"}, "unknown command")
    try:
        ld = Loader(job.trunc, job.mode)
        return _HANDLERS[job.command](job, ld)
    except _CHECK_ERRORS as exc:
        witness = exc.witness if isinstance(exc, AxiomViolation) else str(exc)
        check = exc.axiom if isinstance(exc, AxiomViolation) else type(exc).__name__
        report = {"command": job.command, "pass": False,
                  "checks": [{"check": check, "pass": False, "witness": witness}]}
        return Outcome(EXIT_CHECK, report, f"{job.command}: FAIL at {check}")
    except (MVError, ValueError) as exc:
        report = {"command": job.command, "error": type(exc).__name__, "message": str(exc)}
        hint = _hint(exc)
        if hint:
            report["hint"] = hint
        return Outcome(EXIT_INPUT, report, f"{job.command}: input error: {type(exc).__name__}: {exc}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mvalgebra", description="Exact computations with MV-algebras.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "validate": "check the MV-algebra axioms of an algebra document",
        "check-morphism": "test Delta'' exp(f) = exp(f) Delta' for a map document",
        "compose": "compose two map documents F G into F <> G",
        "exp": "exp(f) in the convolution algebra",
        "log": "log(phi) in the convolution algebra",
        "qme-check": "test Delta e^S = 0 for a candidate document",
        "pushforward": "push a QME solution along an MV-morphism: MAP SOLUTION",
        "brackets": "higher derived brackets and the Maurer-Cartan residual",
        "ibl-check": "hbar-divisibility of the components of a map between symmetric algebras",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("inputs", nargs="+", metavar="FILE")
        sp.add_argument("--trunc", help="truncation overrides, e.g. D=5,H=3 (may only enlarge)")
        sp.add_argument("--mode", choices=["k", "hbar", "hbar-aux", "laurent-aux"])
        sp.add_argument("--oracle", action="store_true", help="use the slow reference implementations")
        sp.add_argument("-o", "--output", help="write the JSON report here instead of standard output")
        if name == "validate":
            sp.add_argument("--bv", action="store_true", help="also test the BV-infinity operator orders")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        trunc = parse_trunc(args.trunc)
    except SchemaError as exc:
        print(f"{args.command}: input error: {exc}", file=sys.stderr)
        sys.stdout.write(dumps({"command": args.command, "error": "SchemaError", "message": str(exc)}))
        return EXIT_INPUT
    job = JobSpec(args.command, list(args.inputs), trunc, args.mode, args.oracle, args.output,
                  getattr(args, "bv", False))
    out = run(job)
    text = dumps(out.report)
    if job.output:
        Path(job.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(out.summary, file=sys.stderr)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
