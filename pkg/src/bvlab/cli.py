"""The ``bv`` command line."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib import resources
from pathlib import Path

from . import __version__
from .counting import BudgetExceeded, brute_force_exact_order, bv_count, exact_order_count
from .ffield import default_prime, is_prime
from .fibration import (
    BoundTooSmall,
    decomposition_search,
    fiber_torsion_model,
    intersection_table,
    kummer_class,
    section_class,
)
from .koszul import naturality
from .lattice import (
    LatticeError,
    discriminant,
    discriminant_certificate,
    elementary_divisors,
    even_unimodular_obstruction,
    is_primitive,
    named_lattice,
    omega_to_kummer,
    signature,
    upsilon_to_hyperelliptic,
    upsilon_to_omega,
)
from .pipeline import (
    MODEL_KINDS,
    ConstructionFailure,
    compute_report,
    compute_table,
    csv_rows,
    min_level,
    verify_report,
)
from .predictor import Verdict, predicted, slope_check

EXIT_USAGE = 64
EMBEDDINGS = ("upsilon-omega", "upsilon-hyperelliptic", "omega-kummer")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def schema(name: str) -> dict:
    """The JSON schema shipped for a command's output (or ``manifest``, ``error``)."""
    return json.loads(resources.files("bvlab").joinpath("schemas", f"{name}.json").read_text())


def dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- subcommands: each returns (text, exit code) ---------------------------------

def cmd_count(args) -> tuple[str, int]:
    if args.level < 1 or args.genus < 0:
        raise UsageError("level must be >= 1 and genus >= 0")
    out = {
        "level": args.level,
        "genus": args.genus,
        "count": bv_count(args.level, args.genus),
        "method": args.method if args.brute_force else "closed-form",
    }
    code = 0
    if args.exact_order or args.brute_force:
        out["exact_order_count"] = exact_order_count(args.level, args.genus)
    if args.brute_force:
        try:
            bf = brute_force_exact_order(args.level, args.genus, budget=args.budget, method=args.method)
        except BudgetExceeded as exc:
            out["brute_force"] = None
            out["brute_force_error"] = str(exc)
            return dump(out), 2
        out["brute_force"] = bf
        out["agreement"] = bf == out["exact_order_count"]
        code = 0 if out["agreement"] else 3
    return dump(out), code


def _embedding(name: str, g: int):
    if name == "upsilon-omega":
        return upsilon_to_omega(g)
    if name == "omega-kummer":
        return omega_to_kummer(g)
    if name == "upsilon-hyperelliptic":
        if g % 2 == 0 or g < 7:
            raise UsageError("upsilon-hyperelliptic needs odd genus g = 2i + 5 >= 7")
        return upsilon_to_hyperelliptic((g - 5) // 2)
    raise UsageError(f"unknown embedding {name!r}; choose from {', '.join(EMBEDDINGS)}")


def _embedding_json(name: str, g: int) -> dict:
    e = _embedding(name, g)
    return {
        "name": name,
        "source": e.source.to_dict(),
        "target": e.target.to_dict(),
        "matrix": [list(r) for r in e.matrix],
        "preserves_pairing": e.preserves_pairing(),
        "elementary_divisors": elementary_divisors(e.matrix),
        "primitive": is_primitive(e),
        "source_discriminant_certificate": discriminant_certificate(e.source),
    }


def cmd_lattice(args) -> tuple[str, int]:
    g = args.genus
    if args.check_embedding:
        return dump(_embedding_json(args.check_embedding, g)), 0
    if not args.name:
        raise UsageError("give --name or --check-embedding")
    param = args.i if args.name == "hyperelliptic" else g
    if param is None:
        raise UsageError("hyperelliptic needs --i")
    lat = named_lattice(args.name, param)
    sig = signature(lat)
    verdicts = {}
    for name in EMBEDDINGS:
        try:
            verdicts[name] = is_primitive(_embedding(name, g))
        except UsageError:
            verdicts[name] = None
    out = {
        **lat.to_dict(),
        "parameter": param,
        "discriminant": discriminant(lat),
        "signature": list(sig),
        "even": lat.is_even,
        "even_unimodular_obstruction": even_unimodular_obstruction(sig),
        "embeddings_primitive": verdicts,
        "genus": g,
    }
    return dump(out), 0


def cmd_mw(args) -> tuple[str, int]:
    if args.genus < 3:
        raise UsageError("genus must be >= 3")
    t = section_class(args.genus, args.m)
    out = {
        "genus": args.genus,
        "m": args.m,
        "class": list(t.cls.coords),
        "basis": list(t.lattice.basis_labels),
        "intersections": intersection_table(args.genus, args.m),
        "kummer_relation": kummer_class(args.m, args.genus) == t.cls,
    }
    code = 0
    if args.search:
        nef = [t.lattice.E, t.lattice.Gamma + args.genus * t.lattice.E]
        try:
            found = decomposition_search(t.cls, nef, bound=args.bound)
        except BoundTooSmall as exc:
            out["search"] = {"error": str(exc)}
            return dump(out), 2
        out["search"] = {
            "nef": [list(h.coords) for h in nef],
            "bound": args.bound,
            "candidates": [[list(r.coords), list(s.coords)] for r, s in found],
        }
    if args.torsion_level:
        fm = fiber_torsion_model(args.torsion_level)
        out["torsion_fibers"] = {
            "level": fm.level,
            "exact_order_counts": {str(d): k for d, k in sorted(fm.exact_order_counts.items())},
            "total": fm.total,
            "consistent": fm.check(),
        }
    return dump(out), code


def cmd_predict(args) -> tuple[str, int]:
    if args.genus < 5 or args.genus == 6:
        raise UsageError("closed forms exist for g = 5 and g >= 7")
    pred = predicted(args.genus)
    table = pred.table.triples()
    if args.csv:
        return csv_rows(table), 0
    out = {
        "genus": pred.genus,
        "parity": pred.parity,
        "i": pred.i,
        "betti": table,
        "unknown": [list(c) for c in pred.unknown_cells()],
        "natural": naturality(pred.table, skip_unknown=True),
    }
    if pred.parity == "odd" and pred.i >= 1:
        out["slopes"] = list(slope_check(pred.i))
    return dump(out), 0


def _run_model(args):
    if not is_prime(args.prime) or args.prime < 101:
        raise UsageError("--prime must be a prime >= 101")
    if args.genus < 3:
        raise UsageError("genus must be >= 3")
    if args.level < 2:
        raise UsageError("level must be >= 2")
    warnings = []
    if args.level < min_level(args.genus):
        warnings.append(f"level {args.level} is below ceil(sqrt((g+2)/2)) = {min_level(args.genus)}")
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    try:
        comp = compute_table(
            args.model, args.genus, args.level, args.prime, args.seed, orders=args.orders, threads=args.threads
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return comp, warnings


def cmd_compute(args) -> tuple[str, int]:
    try:
        comp, warnings = _run_model(args)
    except ConstructionFailure as exc:
        return dump({"error": "construction failure", "detail": str(exc)}), 2
    out = compute_report(comp, args.level, args.prime, args.seed)
    out["warnings"] = warnings
    code = 0 if out["natural"] else 1
    if args.csv:
        return csv_rows(out["betti"]), code
    return dump(out), code


def cmd_verify(args) -> tuple[str, int]:
    if args.genus < 5 or args.genus == 6:
        raise UsageError("verify needs g = 5 or g >= 7")
    try:
        comp, warnings = _run_model(args)
    except ConstructionFailure as exc:
        return dump({"error": "construction failure", "detail": str(exc)}), 2
    out, verdict = verify_report(comp, args.level, args.prime, args.seed)
    out["warnings"] = warnings
    code = {Verdict.MATCH: 0, Verdict.JUMPED: 2, Verdict.VIOLATION: 3}[verdict]
    if args.csv:
        return csv_rows(out["betti"]), code
    return dump(out), code


def _orders(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("orders must be comma-separated integers")


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bv", description="Paracanonical syzygies, K3 lattices and torsion counts over prime fields.")
    parser.add_argument("--version", action="version", version=f"bv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common_output(p):
        p.add_argument("--out", type=Path, help="write output here and a manifest beside it")

    p = sub.add_parser("count", help="count level-l Barth-Verra curves")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--exact-order", action="store_true", help="also count configurations of exact order l")
    p.add_argument("--brute-force", action="store_true", help="cross-check by enumeration")
    p.add_argument("--method", choices=("subsets", "compositions"), default="subsets")
    p.add_argument("--budget", type=int, default=10**7)
    common_output(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("lattice", help="Gram data and embedding checks")
    p.add_argument("--name", choices=("upsilon", "omega", "hyperelliptic"))
    p.add_argument("--genus", type=int, default=7)
    p.add_argument("--i", type=int, help="index for the hyperelliptic lattice (g = 2i + 5)")
    p.add_argument("--check-embedding", choices=EMBEDDINGS)
    common_output(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("mw", help="Mordell-Weil sections T_m")
    p.add_argument("--genus", type=int, default=3)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--search", action="store_true", help="run the effective-decomposition sieve")
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--torsion-level", type=int, help="also report the torsion fibre model at this level")
    common_output(p)
    p.set_defaults(func=cmd_mw)

    p = sub.add_parser("predict", help="closed-form Betti table")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--csv", action="store_true")
    common_output(p)
    p.set_defaults(func=cmd_predict)

    for name, func, text in (
        ("compute", cmd_compute, "Betti table of a degenerate paracanonical curve"),
        ("verify", cmd_verify, "compute and compare with the closed form"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--genus", type=int, required=True)
        p.add_argument("--level", type=int, required=True)
        p.add_argument("--prime", type=int, default=None, help="default: $BV_PRIME or 10007")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--orders", type=_orders, help="tree-like model: comma-separated orders d_1..d_g")
        p.add_argument("--model", choices=MODEL_KINDS, default="nodal")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--csv", action="store_true", help="emit p,q,dim rows instead of JSON")
        common_output(p)
        p.set_defaults(func=func)

    p = sub.add_parser("replay", help="rerun a manifest and compare output bytes")
    p.add_argument("manifest", type=Path)
    p.set_defaults(func=None)
    return parser


def _canonical_argv(args) -> list[str]:
    """Flags that fully determine the output, in a fixed order."""
    skip = {"func", "command", "out", "threads"}
    argv = [args.command]
    for key in sorted(vars(args)):
        if key in skip:
            continue
        val = getattr(args, key)
        flag = "--" + key.replace("_", "-")
        if val is None or val is False:
            continue
        if val is True:
            argv.append(flag)
        elif isinstance(val, tuple):
            argv += [flag, ",".join(map(str, val))]
        else:
            argv += [flag, str(val)]
    return argv


def run(argv: list[str]) -> tuple[str, int, argparse.Namespace]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "prime", "absent") is None:
        args.prime = default_prime()
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    try:
        text, code = args.func(args)
    except (UsageError, LatticeError) as exc:
        print(f"bv {args.command}: error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return text, code, args


def _replay(path: Path) -> int:
    try:
        manifest = json.loads(path.read_text())
        argv = list(manifest["argv"])
    except (OSError, ValueError, KeyError) as exc:
        print(f"bv replay: error: unreadable manifest: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text, code, _ = run(argv)
    digest = hashlib.sha256(text.encode()).hexdigest()
    sys.stdout.write(text)
    if digest != manifest.get("output_sha256"):
        print("bv replay: output differs from the recorded run", file=sys.stderr)
        return 1
    if code != manifest.get("exit_code"):
        print("bv replay: exit code differs from the recorded run", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv[:1] == ["replay"]:
        args = build_parser().parse_args(argv)
        return _replay(args.manifest)
    start = time.perf_counter()
    text, code, args = run(argv)
    elapsed = time.perf_counter() - start
    if args.out is None:
        sys.stdout.write(text)
        return code
    args.out.write_text(text)
    manifest = {
        "command": args.command,
        "argv": _canonical_argv(args),
        "parameters": {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items()) if k not in ("func", "out")},
        "tool_version": __version__,
        "timing": {"wall_seconds": round(elapsed, 6), "threads": getattr(args, "threads", 1)},
        "output": str(args.out),
        "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
        "exit_code": code,
    }
    Path(str(args.out) + ".manifest.json").write_text(dump(manifest))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
