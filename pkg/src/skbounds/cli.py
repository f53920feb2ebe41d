"""Command line entry point: ``skbounds <command> ...``.

Exit status is 0 on success, 1 when a check or criterion fails and 2 on
usage, parse or precondition errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings

import numpy as np

from .errors import SKBoundsError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(args, pairs: list[tuple[str, object]]) -> None:
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return f"{float(v):.9f}"
        return str(v)

    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["key", "value"])
        for k, v in pairs:
            w.writerow([k, fmt(v)])
        sys.stdout.write(buf.getvalue())
    elif args.format == "md":
        print("| key | value |\n|---|---|")
        for k, v in pairs:
            print(f"| {k} | {fmt(v)} |")
    else:
        width = max((len(k) for k, _ in pairs), default=0)
        for k, v in pairs:
            print(f"{k:<{width}}  {fmt(v)}")


def _load(path):
    from .fileio import parse_distribution

    return parse_distribution(path)


def _cfg(args, **extra):
    from .search.config import SearchConfig

    kw = {"seed": args.seed}
    if getattr(args, "restarts", None) is not None:
        kw["restarts"] = args.restarts
    kw.update({k: v for k, v in extra.items() if v is not None})
    return SearchConfig(**kw)


def _report_pairs(rep) -> list[tuple[str, object]]:
    pairs = [("quantity", rep.quantity), ("value", rep.value), ("certificate", rep.certificate)]
    pairs += [(f"residual {k}", v) for k, v in rep.residuals.items()]
    pairs += [(f"meta {k}", v) for k, v in rep.meta.items() if isinstance(v, (int, float, str, np.floating))]
    pairs += [("note", n) for n in rep.notes]
    return pairs


# --- commands ----------------------------------------------------------------------

def cmd_info(args):
    from .probkit import conditional_mutual_information as cmi, entropy, is_deterministic, roles

    d = _load(args.file)
    p = d.joint
    pairs = [("name", d.name or "-"), ("axes", ",".join(p.names)), ("shape", "x".join(map(str, p.shape)))]
    for n in p.names:
        pairs.append((f"H({n})", entropy(p, n)))
    x, y, z = roles(p)
    if x and y:
        pairs.append(("I(X;Y)", cmi(p, x, y)))
        if z:
            pairs.append(("I(X;Y|Z)", cmi(p, x, y, z)))
            pairs.append(("Z function of X,Y", is_deterministic(p, z, x + y)))
    _emit(args, pairs)
    return EXIT_OK


def cmd_psi_hat(args):
    p = _load(args.file).joint
    if args.method == "envelope":
        from .envelope.psi import psi_hat_envelope

        rep = psi_hat_envelope(p, args.grid, certify=args.certify)
        _emit(args, _report_pairs(rep))
    elif args.method == "search":
        from .search.problems import psi_hat_search

        if args.seed is None:
            raise _SeedMissing
        rep = psi_hat_search(p, _cfg(args, j_card=args.j_card))
        _emit(args, _report_pairs(rep))
    else:
        from .search.oracle import grid_oracle
        from .probkit import roles

        x, y, _ = roles(p)
        j = args.j_card or int(np.prod([p.size(a) for a in x + y]))
        val = grid_oracle(p, j, args.grid or 4)
        _emit(args, [("quantity", "psi_hat"), ("value", val), ("certificate", "oracle"), ("j_card", j)])
    return EXIT_OK


def cmd_witness(args):
    from .constructions import monotone_split, ternary_witness, verify_witness, xor_witness, ConditionNotMet
    from .probkit import FunctionTable, apply_function, marginalize

    d = _load(args.file)
    pxy = marginalize(d.joint, ("X", "Y")) if len(d.joint.names) > 2 else d.pmf
    op = args.kind
    if op == "verify":
        op = _guess_kind(d)
    if op == "xor":
        w, f = xor_witness(pxy), FunctionTable.xor()
    elif op == "monotone":
        w = monotone_split(pxy, args.op)
        f = {"AND": FunctionTable.and_, "OR": FunctionTable.or_, "SUM": FunctionTable.sum_}[args.op.upper()]()
    else:
        w, f = ternary_witness(pxy), FunctionTable.mod2_sum(2, 3)
        if isinstance(w, ConditionNotMet):
            _emit(args, [("result", "condition not met")] + [("violated", v) for v in w.violated]
                  + [(k, v) for k, v in w.values.items()])
            return EXIT_FAIL if args.kind == "verify" else EXIT_OK
    res = verify_witness(apply_function(pxy, f), w, w.kind)
    pairs = [("kind", w.kind), ("components", len(w))]
    pairs += [(f"weight {i}", float(v)) for i, v in enumerate(w.weights)]
    for i, q in enumerate(w.components):
        m = q.transpose(q.names).mass.sum(axis=tuple(range(2, q.mass.ndim)))
        pairs.append((f"component {i}", np.array2string(m, precision=9, separator=",").replace("\n", "")))
    pairs += [(f"param {k}", v) for k, v in w.params.items() if isinstance(v, (int, float, str))]
    pairs += [(f"residual {k}", v) for k, v in res.items()]
    _emit(args, pairs)
    if args.kind == "verify" and max(res.values()) > args.tol:
        return EXIT_FAIL
    return EXIT_OK


def _guess_kind(d) -> str:
    f = d.function
    if f is None:
        raise SKBoundsError("witness verify needs a file with a function table")
    c = f.cells
    if c.shape == (2, 3):
        return "ternary"
    if c.shape == (2, 2) and c[0, 0] == c[1, 1] and c[0, 1] == c[1, 0] and c[0, 0] != c[0, 1]:
        return "xor"
    if c.shape == (2, 2):
        return "monotone"
    raise SKBoundsError(f"no closed-form witness for a {c.shape[0]} x {c.shape[1]} table")


def cmd_hull(args):
    from .constructions import hull_membership

    d = _load(args.file)
    if d.function is None:
        raise SKBoundsError("hull needs a file with a function table")
    v = hull_membership(d.pmf, d.function, args.grid)
    pairs = [("inside", v.inside), ("method", v.method), ("k", v.k if v.k is not None else "-")]
    if v.message:
        pairs.append(("message", v.message))
    if v.witness is not None:
        pairs += [(f"weight {i}", float(w)) for i, w in enumerate(v.witness.weights)]
    _emit(args, pairs)
    return EXIT_OK


def cmd_tables(args):
    from .tables import classify_table, enumerate_tables, falsify_invalid

    if args.action == "enumerate":
        counts = enumerate_tables(args.nx, args.ny, args.nz)
        _emit(args, [(k, v) for k, v in counts.items()])
        return EXIT_OK
    if args.file is None:
        raise SKBoundsError(f"tables {args.action} needs a distribution file with a function table")
    d = _load(args.file)
    if d.function is None:
        raise SKBoundsError("file has no function table")
    c = classify_table(d.function)
    pairs = [("kind", c.kind)]
    if c.rows is not None:
        pairs += [("rows", c.rows), ("cols", c.cols)]
    if args.action == "falsify":
        if c.valid:
            _emit(args, pairs + [("falsify", "table is valid; nothing to falsify")])
            return EXIT_OK
        fal = falsify_invalid(d.function)
        pairs += [("succeeded", fal.succeeded), ("gap", fal.gap), ("I(X;Y)", fal.mutual_information),
                  ("psi_hat", fal.psi_hat),
                  ("law", np.array2string(fal.law.mass, precision=9, separator=",").replace("\n", ""))]
        if fal.message:
            pairs.append(("message", fal.message))
        _emit(args, pairs)
        return EXIT_OK if fal.succeeded else EXIT_FAIL
    _emit(args, pairs)
    return EXIT_OK


def cmd_delta_bar(args):
    from .envelope.psi import delta_bar

    d = _load(args.file)
    rep = delta_bar(d.pmf if d.function is not None else d.joint, variant=args.variant)
    _emit(args, _report_pairs(rep))
    return EXIT_OK


def cmd_psi_delta(args):
    from .search.delta import psi_delta_evaluate

    rep = psi_delta_evaluate(_load(args.file).joint, args.delta, _cfg(args))
    _emit(args, _report_pairs(rep))
    return EXIT_OK


def cmd_sow(args):
    from .search.problems import sow_evaluate

    rep = sow_evaluate(_load(args.file).joint, args.direction, _cfg(args))
    _emit(args, _report_pairs(rep))
    return EXIT_OK


def cmd_intrinsic(args):
    from .search.problems import intrinsic_information

    rep = intrinsic_information(_load(args.file).joint, _cfg(args))
    _emit(args, _report_pairs(rep))
    return EXIT_OK


def cmd_lower_bound(args):
    from .search.problems import interactive_lower_bound

    rep = interactive_lower_bound(_load(args.file).joint, args.depth, args.m, _cfg(args))
    _emit(args, _report_pairs(rep))
    return EXIT_OK


def cmd_erasure(args):
    from .constructions import erasure_capacity, erasure_source
    from .probkit import JointPmf
    from .search.problems import sow_evaluate

    d = _load(args.file)
    if len(d.pmf.names) != 1:
        raise SKBoundsError("erasure expects a file with a single axis (the law of X)")
    px = JointPmf(("X",), d.pmf.mass)
    g = [int(v) for v in args.g.split(",")] if args.g else list(range(px.mass.size))
    exact = erasure_capacity(px, g, args.eps)
    rep = sow_evaluate(erasure_source(px, g, args.eps), "X->Y", _cfg(args))
    _emit(args, [("closed form (1-eps)H(X|Z)", exact), ("search s_ow", rep.value), ("gap", exact - rep.value)])
    return EXIT_OK


def cmd_verify(args):
    from . import verifiers as V

    fuzz_sizes = None
    if args.check == "identity":
        r = V.th1_identity_check(V.FuzzSpec(args.seed, args.trials or 1000,
                                            {"X": 3, "Y": 3, "Z": 3, "T": 3, "J": 3}))
        _emit(args, [("max discrepancy", r.max_discrepancy), ("trials", r.trials)])
        return EXIT_OK if r.max_discrepancy <= 1e-9 else EXIT_FAIL
    if args.check == "thm5":
        r = V.thm5_check(V.FuzzSpec(args.seed, args.trials or 200), args.grid or 10)
        _emit(args, [("trials", r.trials), ("violations", len(r.violations)), ("max excess", r.max_excess)])
        return EXIT_OK if not r.violations else EXIT_FAIL
    if args.check == "rectangle":
        fails = 0
        pairs = []
        for n in (1, 2):
            r = V.rectangle_check(args.nx, args.ny, n, seed=args.seed)
            fails += len(r.counterexamples)
            pairs += [(f"n={n} pairs", r.pairs_checked), (f"n={n} revealing", r.antecedent_true),
                      (f"n={n} counterexamples", len(r.counterexamples)), (f"n={n} exhaustive", r.exhaustive)]
        _emit(args, pairs)
        return EXIT_OK if fails == 0 else EXIT_FAIL
    if args.file is None:
        raise SKBoundsError(f"verify {args.check} needs a distribution file")
    d = _load(args.file)
    if args.check == "tensorize":
        r = V.tensorization_check(d.joint, _cfg(args))
        _emit(args, [("single letter", r.single), ("iid value", r.iid_value), ("iid residual", r.iid_residual),
                     ("search best n=2", r.search_best), ("gap", r.gap), ("witness", r.witness_source)])
        return EXIT_OK if r.iid_residual <= 1e-12 and r.gap >= -1e-3 else EXIT_FAIL
    # km: every deterministic map pair at n = 1 and a seeded sample at n = 2
    pxy = d.pmf
    from .envelope.psi import delta_bar

    dbar = delta_bar(pxy).value
    rng = np.random.default_rng(args.seed)
    worst = np.inf
    count = 0
    for n in (1, 2):
        size = 2 ** n
        parts = list(V.set_partitions(size, 4))
        pairs_ = [(a, b) for a in parts for b in parts]
        if n == 2:
            pairs_ = [pairs_[i] for i in rng.choice(len(pairs_), size=min(args.trials or 100, len(pairs_)),
                                                    replace=False)]
        for a, b in pairs_:
            worst = min(worst, V.km_bound_check(pxy, V.ProtocolMaps(n, a, b), dbar))
            count += 1
    _emit(args, [("delta_bar", dbar), ("map pairs", count), ("min slack", worst)])
    return EXIT_OK if worst >= -1e-9 else EXIT_FAIL


def cmd_report(args):
    from .report import SUITES, run_report

    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}", file=sys.stderr)
        return EXIT_USAGE
    status, _ = run_report(args.suite, args.out, seed=args.seed)
    return status


class _SeedMissing(Exception):
    pass


# --- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="skbounds", description="Bounds on secret-key capacity for finite sources.")
    ap.add_argument("--format", choices=("text", "csv", "md"), default="text")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, fn, help_, file=True, seed=False, optional_file=False):
        sp = sub.add_parser(name, help=help_)
        if file:
            sp.add_argument("file", nargs="?" if optional_file else None)
        if seed:
            sp.add_argument("--seed", type=int, required=True)
            sp.add_argument("--restarts", type=int)
        sp.set_defaults(fn=fn)
        return sp

    cmd("info", cmd_info, "entropies and mutual informations of a law")

    sp = cmd("psi-hat", cmd_psi_hat, "one-shot upper bound")
    sp.add_argument("--method", choices=("envelope", "search", "oracle"), default="envelope")
    sp.add_argument("--grid", type=int, help="envelope or oracle resolution k")
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--j-card", type=int)
    sp.add_argument("--certify", action="store_true", help="also compute a dual lower estimate")

    sp = cmd("witness", cmd_witness, "closed-form decompositions", file=False)
    sp.add_argument("kind", choices=("xor", "monotone", "ternary", "verify"))
    sp.add_argument("file")
    sp.add_argument("--op", default="AND", choices=("AND", "OR", "SUM"))
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = cmd("hull", cmd_hull, "is P_XY in the hull of Z-preserving product laws")
    sp.add_argument("--grid", type=int, default=40)

    sp = sub.add_parser("tables", help="classify, enumerate or falsify function tables")
    sp.add_argument("action", choices=("classify", "enumerate", "falsify"))
    sp.add_argument("file", nargs="?")
    sp.add_argument("--nx", type=int, default=2)
    sp.add_argument("--ny", type=int, default=2)
    sp.add_argument("--nz", type=int, default=2)
    sp.set_defaults(fn=cmd_tables)

    sp = cmd("delta-bar", cmd_delta_bar, "residual envelope for Z = X xor Y")
    sp.add_argument("--variant", choices=("proof", "statement"), default="proof")

    sp = cmd("psi-delta", cmd_psi_delta, "heuristic estimate at leakage level Delta", seed=True)
    sp.add_argument("--delta", type=float, required=True)

    sp = cmd("sow", cmd_sow, "one-way rate lower bound", seed=True)
    sp.add_argument("--direction", choices=("X->Y", "Y->X"), default="X->Y")

    cmd("intrinsic", cmd_intrinsic, "intrinsic information", seed=True)

    sp = cmd("lower-bound", cmd_lower_bound, "interactive lower bound", seed=True)
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--m", type=int, default=1)

    sp = cmd("erasure", cmd_erasure, "erasure source: closed form against search", seed=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--g", help="comma-separated Z = g(X) labels (default: identity)")

    sp = sub.add_parser("verify", help="executable checks")
    sp.add_argument("check", choices=("identity", "thm5", "tensorize", "rectangle", "km"))
    sp.add_argument("file", nargs="?")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--nx", type=int, default=2)
    sp.add_argument("--ny", type=int, default=2)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("report", help="run an acceptance suite and write CSV + markdown")
    sp.add_argument("--suite", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            status = args.fn(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return status
    except _SeedMissing:
        print("skbounds: error: this command is randomized; pass --seed", file=sys.stderr)
        return EXIT_USAGE
    except (SKBoundsError, FileNotFoundError, ValueError, KeyError) as e:
        print(f"skbounds: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
