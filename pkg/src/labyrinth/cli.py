"""Command-line front end.

Every verification command prints a JSON report

    {"version": ..., "config": ..., "checks": [...], "status": "pass" | "fail"}

and exits 0 when all checks pass, 1 when one fails (the first failing check
is repeated under "witness"), and 2 on malformed input or a guard violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .algebra import AlgebraError, ExactMatrix, RingSpec
from .axioms import axiom_suite
from .crosseffects import (
    ce_dim,
    decomposition,
    degree,
    deviation_formula_check,
    idempotent_relations,
    kernel_equals_image,
)
from .functors import DEFAULT_MAX_DIM, FunctorError, GuardError, build, random_arrow, reduced, table_functor
from .laby import LabyError, compose, identity, mazesum_from_json, named_set, random_mazesum
from .phi import (
    InvariantViolation,
    Phi,
    ambient,
    annihilation_profile,
    degree_coherent,
    functoriality_check,
    reconstruct,
    roundtrip_check,
)
from .quadratic import QuadraticError, extract, law_table_check

PRNG = "numpy.PCG64"
USAGE_ERRORS = (AlgebraError, FunctorError, GuardError, LabyError, QuadraticError, KeyError,
                TypeError, ValueError, json.JSONDecodeError)


class UsageError(Exception):
    pass


# plumbing -----------------------------------------------------------------


def _field(args) -> RingSpec:
    if args.field:
        return RingSpec.parse(args.field)
    ring = RingSpec.parse(args.ring)
    return ring if ring.is_field else RingSpec.fp(2)


def _config(args) -> dict:
    cfg = {
        "ring": str(RingSpec.parse(args.ring)),
        "field": str(_field(args)),
        "functor": args.functor,
        "seed": args.seed,
        "samples": args.samples,
        "max_set_size": args.max_size,
        "max_passages": args.max_passages,
        "max_dim": args.max_dim,
        "prng": PRNG,
    }
    for name, value in cfg.items():
        if name in ("samples", "max_set_size", "max_passages", "max_dim") and value <= 0:
            raise UsageError(f"{name} must be positive")
    return cfg


def _rng(args) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(args.seed))


def _functor(args, spec: str | None = None):
    if getattr(args, "table", None) is not None:
        return table_functor(args.table)
    return build(spec or args.functor, RingSpec.parse(args.ring), _field(args), args.max_dim)


def _load_table(args):
    """``--functor @file.json`` reads a functor table; its rings override the flags."""
    args.table = None
    if args.functor.startswith("@"):
        with open(args.functor[1:]) as fh:
            args.table = json.load(fh)
        args.ring = args.table["ring"]
        args.field = args.table["field"]


def _read_input(args):
    if args.input in (None, "-"):
        return json.load(sys.stdin)
    with open(args.input) as fh:
        return json.load(fh)


def _emit(obj, args):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


def _check(name: str, ok: bool, params: dict | None = None, witness: dict | None = None, **extra) -> dict:
    row = {"check": name, "params": params or {}, "status": "pass" if ok else "fail"}
    row.update(extra)
    if not ok and witness:
        row["witness"] = witness
    return row


def _finish(args, checks: list[dict], **extra) -> int:
    status = "pass" if all(c["status"] == "pass" for c in checks) else "fail"
    report = {"version": __version__, "config": _config(args), "checks": checks, "status": status}
    report.update(extra)
    if status == "fail":
        report["witness"] = next(c for c in checks if c["status"] != "pass")
    _emit(report, args)
    return 0 if status == "pass" else 1


def _sample_sets(rng, max_size: int, count: int) -> list[tuple]:
    return [named_set(int(rng.integers(1, max_size + 1))) for _ in range(count)]


# commands -----------------------------------------------------------------


def cmd_compose(args) -> int:
    data = _read_input(args)
    if isinstance(data, dict):
        data = [data["left"], data["right"]]
    if len(data) != 2:
        raise UsageError("compose expects two morphisms")
    ring = RingSpec.parse(args.ring) if args.ring_given else None
    left, right = (mazesum_from_json(obj, ring) for obj in data)
    _emit(compose(left, right, args.max_passages).to_json(), args)
    return 0


def cmd_eval(args) -> int:
    if args.input is not None:
        request = _read_input(args)
        ring = RingSpec.parse(request.get("ring", args.ring))
        field = RingSpec.parse(request["field"]) if "field" in request else (
            ring if ring.is_field else RingSpec.fp(2))
        F = build(request.get("functor", args.functor), ring, field, args.max_dim)
        s = mazesum_from_json(request["maze"], ring)
        phi = Phi(F)
        matrix = phi(s)
        _emit({"matrix": matrix.to_json(), "source_dim": matrix.cols, "target_dim": matrix.rows}, args)
        return 0
    _config(args)
    F = _functor(args)
    rng = _rng(args)
    ring = F.source_ring
    phi = Phi(F)
    checks = []
    for X in (named_set(n) for n in range(1, args.max_size + 1)):
        ok = phi(identity(ring, X)) == ExactMatrix.identity(F.target_field, phi.dim(X))
        checks.append(_check("identity", ok, {"set": list(X)}))
    for _ in range(args.samples):
        X, Z = _sample_sets(rng, args.max_size, 2)
        s = random_mazesum(ring, X, Z, rng)
        A = ambient(F, s)
        src = phi.basis(Z)
        try:
            phi(s)
            contained = True
        except InvariantViolation:
            contained = False
        checks.append(_check("well-defined", contained and A @ src.idempotent == A,
                             {"source": list(Z), "target": list(X)}, {"morphism": s.to_json()}))
    return _finish(args, checks)


def cmd_ce(args) -> int:
    _config(args)
    F = _functor(args)
    checks, dims = [], []
    for k in range(args.max_size + 1):
        dims.append(ce_dim(F, k))
        checks.append(_check("kernel=image", kernel_equals_image(F, (1,) * k), {"k": k}))
        rel = idempotent_relations(F, k)
        dec = decomposition(F, k)
        checks.append(_check("decomposition", all(rel.values()), {"k": k}, rel, dims=dec.dims))
    return _finish(args, checks, dims=dims)


def cmd_degree(args) -> int:
    _config(args)
    F = _functor(args)
    deg = degree(F, args.max_size)
    profile = annihilation_profile(F, args.max_size)
    checks = [_check("degree-coherence", degree_coherent(F, args.max_size), {"nmax": args.max_size},
                     {"profile": profile, "degree": deg})]
    return _finish(args, checks, degree=deg, profile=profile)


def cmd_devform(args) -> int:
    _config(args)
    F = _functor(args)
    rng = _rng(args)
    ring = F.source_ring
    checks = []
    shapes = [(m, n) for m in (1, 2) for n in (1, 2) if m <= args.max_size and n <= args.max_size]
    for m, n in shapes:
        for _ in range(args.samples):
            M = int(rng.integers(1, 3))
            widths = [int(w) for w in rng.integers(1, 3, size=m)]
            alphas = [random_arrow(ring, M, w, rng) for w in widths]
            betas = [random_arrow(ring, sum(widths), int(rng.integers(1, 3)), rng) for _ in range(n)]
            checks.append(deviation_formula_check(F, alphas, betas))
    return _finish(args, checks)


def cmd_axioms(args) -> int:
    _config(args)
    F = _functor(args)
    rng = _rng(args)
    ring = F.source_ring
    checks = axiom_suite(F, rng, args.samples, args.max_size)
    for _ in range(args.samples):
        X, Y, Z = _sample_sets(rng, args.max_size, 3)
        P = random_mazesum(ring, X, Y, rng)
        Q = random_mazesum(ring, Y, Z, rng)
        compose(P, Q, args.max_passages)
        checks.append(functoriality_check(F, P, Q))
    return _finish(args, checks)


def cmd_roundtrip(args) -> int:
    _config(args)
    F = _functor(args)
    rng = _rng(args)
    ring = F.source_ring
    checks = []
    shapes = [s for s in ((1, 1), (2, 2), (3, 2)) if max(s) <= args.max_size]
    for shape in shapes:
        for _ in range(args.samples):
            checks.append(roundtrip_check(F, random_arrow(ring, *shape, rng)))
    phi = Phi(F)
    for _ in range(args.samples):
        a, b, c = (int(v) for v in rng.integers(1, min(args.max_size, 2) + 1, size=3))
        alpha, beta = random_arrow(ring, a, b, rng), random_arrow(ring, b, c, rng)
        lhs = reconstruct(phi, alpha) @ reconstruct(phi, beta)
        rhs = reconstruct(phi, alpha @ beta)
        checks.append(_check("multiplicative", lhs == rhs, {"shape": [a, b, c]},
                             {"alpha": alpha.to_json(), "beta": beta.to_json()}))
    return _finish(args, checks)


def cmd_quad(args) -> int:
    _config(args)
    F = _functor(args)
    laws = law_table_check(F, _rng(args))
    G = F if ce_dim(F, 0) == 0 else reduced(F)
    data = extract(G).report()
    checks = [dict(row, check="law") for row in laws["laws"]]
    checks.append(_check("quadratic-data", data["status"] == "pass", {"functor": data["functor"]},
                         {"invariants": data["invariants"]}))
    return _finish(args, checks, variants=laws["variants"], data=data)


COMMANDS = {
    "compose": (cmd_compose, "compose two morphisms of the labyrinth category"),
    "eval": (cmd_eval, "evaluate a maze on cross-effects, or sample well-definedness"),
    "ce": (cmd_ce, "cross-effect dimensions, kernel = image and decomposition"),
    "degree": (cmd_degree, "degree detection and annihilation profile"),
    "devform": (cmd_devform, "sampled deviation formula"),
    "axioms": (cmd_axioms, "axiom instances and functoriality of evaluation"),
    "roundtrip": (cmd_roundtrip, "reconstruction of F from its evaluation"),
    "quad": (cmd_quad, "quadratic laws and quadratic data"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="labyrinth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--ring", default=None, help="zmod:m or fp:p (default zmod:2)")
        p.add_argument("--field", default=None, help="fp:p (default: the ring if prime, else fp:2)")
        p.add_argument("--functor", default="U",
                       help="functor descriptor, e.g. U, T2, Red(U), Sum(T2,T1), or @table.json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=20)
        p.add_argument("--max-size", type=int, default=3)
        p.add_argument("--max-passages", type=int, default=8)
        p.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
        p.add_argument("-i", "--input", default=None)
        p.add_argument("-o", "--output", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    args.ring_given = args.ring is not None
    if args.ring is None:
        args.ring = "zmod:2"
    handler = COMMANDS[args.command][0]
    try:
        _load_table(args)
        return handler(args)
    except KeyError as exc:
        print(f"labyrinth {args.command}: missing field {exc}", file=sys.stderr)
        return 2
    except (UsageError, *USAGE_ERRORS) as exc:
        print(f"labyrinth {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"labyrinth {args.command}: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"labyrinth {args.command}: invariant violated: {exc}", file=sys.stderr)
        _emit({"error": str(exc), "witness": exc.witness, "status": "fail"}, args)
        return 1


if __name__ == "__main__":
    sys.exit(main())
