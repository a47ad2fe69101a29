"""Command-line front end: every subcommand prints one JSON document on stdout.

Exit status is 0 on success, 2 on invalid input (with an error object on
stdout) and 64 on usage errors.  ``TWISTOPS_TOL`` overrides the default
tolerance of whichever check a subcommand runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .angles import Angle, parse_angle
from .classify import classify_pair, classify_U_twisted, result_to_json
from .errors import TwistOpsError, ValidationError
from .fock import build_fock, build_irrep, build_scalar_rep, max_relation_residual, relation_residuals
from .gallery import NAMES, build
from .ktheory import FgAbelian, extension_solve, k_to_json, k_universal, k_universal_recursive, pv_crossed
from .relations import Signature, format_word, normal_form, parse_word
from .serialize import (
    MATRICES_SCHEMA,
    check_schema_tag,
    dense_from_json,
    pair_from_json,
    pair_to_json,
    rep_from_json,
    rep_to_json,
)
from .spectral import joint_spectrum, universal_tuple_report
from .structured import wold_decompose

__all__ = ["main", "run", "EXIT_OK", "EXIT_INVALID", "EXIT_USAGE"]

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 2, 64

DEFAULT_TOLS = {"rep": 1e-10, "wold": 1e-8, "spectrum": 1e-8, "classify": 1e-6}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise _UsageError(message)


def _tol(args, kind: str) -> float:
    if args.tol is not None:
        return args.tol
    env = os.environ.get("TWISTOPS_TOL")
    if env:
        try:
            return float(env)
        except ValueError as exc:
            raise ValidationError(f"TWISTOPS_TOL={env!r} is not a number") from exc
    return DEFAULT_TOLS[kind]


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}", path=path) from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}", path=path) from exc


def _angle_arg(text: str) -> Angle:
    try:
        return parse_angle(text)
    except ValueError as exc:
        raise ValidationError(str(exc), angle=text) from exc


def _matrix_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"cannot parse integer matrix {text!r}") from exc


def _pair_ranks(text: str) -> tuple[FgAbelian, FgAbelian]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"expected 'rank0,rank1', got {text!r}") from exc
    return FgAbelian(a), FgAbelian(b)


# ---------------------------------------------------------------------------
# handlers


def _word_nf(args):
    sig = Signature.parse(args.sig)
    return normal_form(parse_word(args.word, sig), sig).to_json()


def _word_eq(args):
    sig = Signature.parse(args.sig)
    a = normal_form(parse_word(args.left, sig), sig)
    b = normal_form(parse_word(args.right, sig), sig)
    return {"equal": a == b, "left": a.to_json(), "right": b.to_json()}


def _build_rep(args):
    if getattr(args, "in_path", None):
        return rep_from_json(_load(args.in_path))
    sig = Signature.parse(args.sig)
    theta = _angle_arg(args.theta)
    L = args.trunc
    if args.kind == "scalar":
        return build_scalar_rep(theta, L, sig)
    if args.kind == "fock":
        return build_fock(sig, theta, L)
    I = [int(t) for t in args.I.split(",") if t.strip()] if args.I else []
    chars = [_angle_arg(t) for t in args.rho.split(",")] if args.rho else []
    if len(chars) != len(I):
        raise ValidationError(f"--rho needs one character angle per index in --I ({len(I)})")
    rho = {i: np.array([[c.phase(1)]]) for i, c in zip(I, chars)}
    return build_irrep(theta, sig, I, rho, L)


def _rep_build(args):
    return rep_to_json(_build_rep(args))


def _rep_check(args):
    rep = _build_rep(args)
    tol = _tol(args, "rep")
    res = relation_residuals(rep, depth=args.depth)
    witness = res.pop("faithfulness_witness")
    mx = max_relation_residual(res)
    return {
        "residuals": res,
        "max": mx,
        "ok": mx <= tol,
        "tol": tol,
        "faithfulness_witness": witness,
        "interior_size": int(rep.interior(args.depth).sum()),
        "dim": rep.dim,
        "note": "relations hold on interior labels of a finite window; no finite window is a faithful representation",
    }


def _pair_and_twist(args):
    if args.example:
        fx = build(args.example)
        if not args.theta:
            return fx, list(fx.pair), fx.twist
        if fx.name == "U":
            raise ValidationError("--theta cannot be combined with a U example; its twist is an operator")
        return fx, list(fx.pair), _angle_arg(args.theta)
    if not args.in_path:
        raise ValidationError("give --example SPEC or --in PAIR.json")
    ops, twist = pair_from_json(_load(args.in_path))
    if args.theta:
        twist = _angle_arg(args.theta)
    return None, ops, twist


def _wold(args):
    _, ops, twist = _pair_and_twist(args)
    wd = wold_decompose(ops, twist, m=args.m, tol=_tol(args, "wold"))
    out = wd.to_json()
    out["residual_max"] = wd.report.max if wd.report else None
    return out


def _spectrum(args):
    mats = []
    if args.in_path:
        obj = _load(args.in_path)
        check_schema_tag(obj, MATRICES_SCHEMA)
        mats = [dense_from_json(M) for M in obj["matrices"]]
    for diag in args.diag or []:
        angles = [_angle_arg(t) for t in diag.split(",")]
        mats.append(np.diag([a.phase(1) for a in angles]))
    if not mats:
        raise ValidationError("give --in MATRICES.json or at least one --diag")
    tol = _tol(args, "spectrum")
    js = joint_spectrum(mats, tol)
    out = js.to_json()
    out["report"] = universal_tuple_report(mats, tol)
    return out


def _classify(args):
    fx, ops, twist = _pair_and_twist(args)
    tol = _tol(args, "classify")
    if fx is not None and fx.name == "U":
        r = classify_U_twisted(ops, twist, [p.theta for p in fx.spec.parts], tol)
    else:
        if not isinstance(twist, Angle):
            raise ValidationError("classification needs the twist as an angle (--theta)")
        r = classify_pair(ops, twist, tol)
    return result_to_json(r)


def _k_universal(args):
    f = k_universal_recursive if args.recursive else k_universal
    return k_to_json(f(args.m, args.n))


def _k_pv(args):
    if args.in_path:
        obj = _load(args.in_path)
        K0, K1 = FgAbelian.from_json(obj["k0"]), FgAbelian.from_json(obj["k1"])
        a0, a1 = obj.get("a0"), obj.get("a1")
    else:
        K0, K1 = FgAbelian(args.k0), FgAbelian(args.k1)
        a0 = _matrix_arg(args.a0) if args.a0 else None
        a1 = _matrix_arg(args.a1) if args.a1 else None
    return k_to_json(pv_crossed(K0, K1, a0, a1))


def _k_ext(args):
    if args.in_path:
        obj = _load(args.in_path)
        ideal = tuple(FgAbelian.from_json(g) for g in obj["ideal"])
        quot = tuple(FgAbelian.from_json(g) for g in obj["quotient"])
        delta, exp = obj.get("delta"), obj.get("exp")
    else:
        if not (args.ideal and args.quotient):
            raise ValidationError("give --ideal and --quotient (or --in FILE)")
        ideal, quot = _pair_ranks(args.ideal), _pair_ranks(args.quotient)
        delta = _matrix_arg(args.delta) if args.delta else None
        exp = _matrix_arg(args.exp) if args.exp else None
    return k_to_json(extension_solve(ideal, quot, delta, exp))


def _gallery(args):
    if not args.spec:
        return {
            "names": list(NAMES),
            "formats": ["toeplitz:THETA", "torus:THETA", "D:N:THETA", "F:M:N:THETA", "U:SPEC;SPEC"],
        }
    fx = build(args.spec)
    return {
        "name": fx.name,
        "pair": pair_to_json(fx.pair, fx.twist),
        "expected": result_to_json(fx.expected),
    }


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=None, help="tolerance (default per command, or $TWISTOPS_TOL)")
    p.add_argument("--trunc", type=int, default=6, help="window size L for representations")
    p.add_argument("--out", default=None, help="write the JSON result to this file")
    p.add_argument("--format", choices=["json"], default="json")
    return p


def _add_pair_source(p):
    p.add_argument("--example", help="gallery spec, e.g. D:3:sqrt2m1")
    p.add_argument("--in", dest="in_path", help="pair file (twistops.pair/1)")
    p.add_argument("--theta", help="twist angle in turns (overrides the file)")


def _add_rep_source(p):
    p.add_argument("--sig", default="0,2", help="m,n")
    p.add_argument("--theta", default="sqrt2m1")
    p.add_argument("--kind", choices=["scalar", "fock", "irrep"], default="scalar")
    p.add_argument("--I", default="", help="irrep index set, e.g. 2 or 1,3")
    p.add_argument("--rho", default="", help="character angles for the indices in --I")
    p.add_argument("--in", dest="in_path", help="representation file (twistops.representation/1)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="twistops", description="Computations with doubly twisted isometries.")
    parser.add_argument("--version", action="version", version=f"twistops {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    word = sub.add_parser("word", help="symbolic words").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = word.add_parser("nf", parents=[common], help="normal form of a word")
    p.add_argument("--sig", required=True)
    p.add_argument("word")
    p.set_defaults(func=_word_nf)
    p = word.add_parser("eq", parents=[common], help="decide equality of two words")
    p.add_argument("--sig", required=True)
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=_word_eq)

    rep = sub.add_parser("rep", help="truncated representations").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = rep.add_parser("build", parents=[common], help="build and serialize a representation")
    _add_rep_source(p)
    p.set_defaults(func=_rep_build)
    p = rep.add_parser("check", parents=[common], help="relation residuals on the interior")
    _add_rep_source(p)
    p.add_argument("--depth", type=int, default=1)
    p.set_defaults(func=_rep_check)

    p = sub.add_parser("wold", parents=[common], help="Wold decomposition of a structured pair")
    _add_pair_source(p)
    p.add_argument("--m", type=int, default=0, help="number of unitary generators")
    p.set_defaults(func=_wold)

    p = sub.add_parser("spectrum", parents=[common], help="joint spectrum of commuting unitaries")
    p.add_argument("--in", dest="in_path", help="matrices file (twistops.matrices/1)")
    p.add_argument("--diag", action="append", help="diagonal unitary given by comma-separated angles")
    p.set_defaults(func=_spectrum)

    p = sub.add_parser("classify", parents=[common], help="classify a pair (types I-IV)")
    _add_pair_source(p)
    p.set_defaults(func=_classify)

    kt = sub.add_parser("ktheory", help="K-group computations").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = kt.add_parser("universal", parents=[common], help="K-groups of the universal algebra")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--recursive", action="store_true", help="use the structural recursion")
    p.set_defaults(func=_k_universal)
    p = kt.add_parser("pv", parents=[common], help="Pimsner-Voiculescu crossed product")
    p.add_argument("--k0", type=int, default=0)
    p.add_argument("--k1", type=int, default=0)
    p.add_argument("--a0", help="JSON integer matrix of id - alpha^-1 on K0")
    p.add_argument("--a1", help="JSON integer matrix of id - alpha^-1 on K1")
    p.add_argument("--in", dest="in_path")
    p.set_defaults(func=_k_pv)
    p = kt.add_parser("ext", parents=[common], help="six-term sequence of an extension")
    p.add_argument("--ideal", help="ranks 'r0,r1' of K(ideal)")
    p.add_argument("--quotient", help="ranks 'r0,r1' of K(quotient)")
    p.add_argument("--delta", help="JSON integer matrix K1(Q) -> K0(I)")
    p.add_argument("--exp", help="JSON integer matrix K0(Q) -> K1(I)")
    p.add_argument("--in", dest="in_path")
    p.set_defaults(func=_k_ext)

    p = sub.add_parser("gallery", parents=[common], help="list or build named examples")
    p.add_argument("spec", nargs="?")
    p.set_defaults(func=_gallery)
    return parser


def run(argv=None, stdout=None) -> int:
    """Execute one command; returns the exit status."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except TwistOpsError as exc:
        payload = exc.to_dict() if hasattr(exc, "to_dict") else {"error": type(exc).__name__, "message": str(exc), "details": {}}
        stdout.write(json.dumps(payload) + "\n")
        return EXIT_INVALID
    except (ValueError, KeyError, TypeError) as exc:
        payload = {"error": "ValidationError", "message": str(exc), "details": {"type": type(exc).__name__}}
        stdout.write(json.dumps(payload) + "\n")
        return EXIT_INVALID
    text = json.dumps(result, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        stdout.write(json.dumps({"out": args.out}) + "\n")
    else:
        stdout.write(text + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())
