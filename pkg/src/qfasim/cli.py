"""Command-line entry point: ``qfasim <verb> ...``.

Exit codes: 0 ACCEPT / pass, 1 REJECT / fail, 2 UNDETERMINED, 3 machine or
input error, 4 usage error, 5 computation refused or failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from . import corpus, halting, resolvent, transforms, zoo
from .evolution import ACCEPT, EXACT, REJECT, Criterion, classify_probabilities, format_scalar, step_simulate
from .linalg import LinAlgError
from .model import MachineError, load_machine, serialize_machine, validate_wellformed

EXIT_CODES = {ACCEPT: 0, REJECT: 1}
EXIT_UNDETERMINED, EXIT_INPUT, EXIT_USAGE, EXIT_COMPUTE = 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def load(ref: str):
    """A machine from a JSON path or a ``zoo:<id>`` reference."""
    if ref.startswith("zoo:"):
        return zoo.get(ref[4:]).spec
    path = Path(ref)
    if not path.is_file():
        raise FileNotFoundError(f"no such machine file: {ref}")
    return load_machine(path)


def _fmt(v):
    if isinstance(v, (Fraction, float, complex)):
        return format_scalar(v)
    if isinstance(v, dict):
        return {k: _fmt(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [_fmt(w) for w in v]
    return v


def sci(v: Fraction) -> str:
    """12 significant digits without float underflow (generator gaps go far below 1e-308)."""
    if v == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = 12
        return f"{Decimal(v.numerator) / Decimal(v.denominator):.11E}"


def _lengths(spec, n_max: int) -> list:
    return [spec.alphabet[0] * n for n in range(n_max + 1)]


# ---------------------------------------------------------------------------
# verbs; each returns (results, passed, exit code)


def cmd_run(args):
    spec = load(args.machine)
    report = validate_wellformed(spec, len(args.input), sample_cap=16)
    if not report.ok:
        raise MachineError(f"machine is not well-formed (deviation {report.max_deviation})")
    crit = Criterion.parse(args.criterion)
    trace = step_simulate(spec, args.input, t_max=args.t_max)
    verdict = classify_probabilities(trace.p_acc, trace.p_rej, trace.residual, crit, exact=trace.backend == EXACT)
    res = {"machine": spec.name, "p_acc": trace.p_acc, "p_rej": trace.p_rej, "residual": trace.residual,
           "steps": len(trace.steps), "backend": trace.backend, "criterion": str(crit),
           "verdict": verdict.verdict, "acc_interval": list(verdict.acc_interval)}
    return res, verdict.verdict != "UNDETERMINED", EXIT_CODES.get(verdict.verdict, EXIT_UNDETERMINED)


def cmd_analyze(args):
    spec = load(args.machine)
    rep = halting.analyze_halting(spec, args.input, check_recursion=args.recursion)
    res = {"halting": rep.to_dict(), "linear_bound": halting.linear_bound(spec, len(args.input))}
    if args.spectral:
        est = halting.spectral_runtime_estimate(spec, args.input)
        res["spectral"] = {k: _fmt(v) for k, v in est.__dict__.items()}
    return res, True, 0


def cmd_accept_prob(args):
    spec = load(args.machine)
    x = args.input
    if args.method == "series":
        acc, rej = resolvent.series_check(spec, x, terms=args.terms)
        res = {"method": "series", "terms": args.terms, "p_acc": acc, "p_rej": rej}
    elif args.method == "resolvent":
        r = resolvent.acceptance_resolvent(spec, x)
        res = {"method": r.method, "p_acc": r.p_acc, "p_rej": r.p_rej, "reachable": r.reachable,
               "fallback": r.fallback}
        if r.note:
            res["note"] = r.note
    else:
        rep = resolvent.cofactor_resolvent(spec, x, use_clows=True)
        res = {"method": "clow-check", "p_acc": rep.p_acc, "p_rej": rep.p_rej, "det": rep.det,
               "numerator_acc": rep.numerator_acc, "numerator_rej": rep.numerator_rej,
               "dimension": len(rep.nodes)}
    return res, True, 0


def cmd_transform(args):
    specs = [load(m) for m in args.machines]
    params = {}
    for key in ("alpha", "beta"):
        if getattr(args, key) is not None:
            params[key] = Fraction(getattr(args, key))
    if args.variant:
        params["variant"] = args.variant
    out, cert = transforms.certify(args.name, specs, **params)
    checks = []
    for x in _lengths(specs[0], args.n_max) if args.n_max is not None else []:
        chk = transforms.check_relation(cert, specs, out, x)
        checks.append({"input": x, "expected": list(chk.expected), "observed": list(chk.observed), "ok": chk.ok})
    if args.output:
        Path(args.output).write_text(serialize_machine(out))
    res = {"certificate": cert.to_dict(), "states": len(out.states), "checks": checks}
    if args.output:
        res["written"] = args.output
    passed = all(c["ok"] for c in checks)
    return res, passed, 0 if passed else 1


def cmd_gap(args):
    from .classical import assemble_gap_pair
    spec = load(args.machine)
    pair = assemble_gap_pair(spec)
    xs = [args.input] if args.input is not None else _lengths(spec, args.n_max)
    for x in xs:
        pair.verify(x)
    res = pair.to_dict()
    if not args.full:
        for c in res["checks"]:
            for key in ("gap_n1", "gap_n1_scaled", "gap_n2", "f1", "f2", "combiner_gap"):
                c[key] = sci(Fraction(c[key]))
        res.pop("f1")
        res.pop("f2")
    passed = all(c.ok for c in pair.checks)
    return res, passed, 0 if passed else 1


def _suite_halting(n_max, machines):
    out = []
    for ref in machines or ["zoo:a3", "zoo:coin", "zoo:accept", "zoo:reject"]:
        spec = load(ref)
        rep = halting.verify_linear_bound(spec, range(n_max + 1))
        out.append({"machine": ref, "ok": rep.ok, "inputs": len(rep.rows),
                    "violations": [r.input for r in rep.violations()]})
    return out


def _suite_transforms(n_max, machines):
    out = []
    for label, spec, cert, ins in corpus.transform_corpus():
        ok, bad = True, []
        for n in range(n_max + 1):
            chk = transforms.check_relation(cert, ins, spec, "a" * n)
            if not chk.ok:
                ok = False
                bad.append(chk.input)
        out.append({"transform": label, "ok": ok, "failing_inputs": bad})
    return out


def _suite_gap(n_max, machines):
    from .classical import assemble_gap_pair
    out = []
    for ref in machines or ["zoo:accept", "zoo:reject", "zoo:coin"]:
        spec = load(ref)
        pair = assemble_gap_pair(spec)
        for x in _lengths(spec, n_max):
            c = pair.verify(x)
            out.append({"machine": ref, "input": x, "ok": c.ok, "det_identity": c.det_identity,
                        "minor_identity": c.minor_identity, "product_identity": c.product_identity,
                        "combiner_sign": c.combiner_sign, "p_acc": format_scalar(c.p_acc)})
    return out


def _suite_zoo(n_max, machines):
    out = []
    for ref in machines or [f"zoo:{i}" for i in zoo.zoo_ids()]:
        entry = zoo.get(ref[4:] if ref.startswith("zoo:") else ref)
        rows = entry.certify()
        out.append({"machine": entry.id, "ok": all(ok for _, _, ok in rows), "rows": len(rows),
                    "failing_inputs": [r.input for r, _, ok in rows if not ok]})
    return out


SUITES = {"halting": _suite_halting, "transforms": _suite_transforms, "gap": _suite_gap, "zoo": _suite_zoo}
SUITE_DEFAULT_N = {"halting": 20, "transforms": 3, "gap": 1, "zoo": 0}


def cmd_verify(args):
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    n_max = SUITE_DEFAULT_N[args.suite] if args.n_max is None else args.n_max
    rows = SUITES[args.suite](n_max, args.machine)
    passed = all(r["ok"] for r in rows)
    return {"suite": args.suite, "n_max": n_max, "rows": rows}, passed, 0 if passed else 1


def cmd_zoo(args):
    if not args.id:
        return {"ids": list(zoo.zoo_ids())}, True, 0
    entry = zoo.get(args.id)
    res = {"id": entry.id, "citation": entry.citation, "states": len(entry.spec.states),
           "behavior": entry.behavior_dict(), "notes": list(entry.notes)}
    if args.export:
        d = Path(args.export)
        d.mkdir(parents=True, exist_ok=True)
        stem = entry.id.replace("(", "_").replace(")", "").replace("/", "-").replace(",", "_")
        (d / f"{stem}.json").write_text(serialize_machine(entry.spec))
        (d / f"{stem}.behavior.json").write_text(json.dumps(entry.behavior_dict(), indent=2))
        res["written"] = [str(d / f"{stem}.json"), str(d / f"{stem}.behavior.json")]
    return res, True, 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qfasim", description="Two-way quantum finite automata toolkit.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable report")
        return sp

    sp = common(sub.add_parser("run", help="simulate and classify one input"))
    sp.add_argument("machine", help="machine JSON path or zoo:<id>")
    sp.add_argument("input")
    sp.add_argument("--t-max", type=int)
    sp.add_argument("--criterion", default="BOUNDED(1/3)")
    sp.set_defaults(fn=cmd_run)

    sp = common(sub.add_parser("analyze", help="halting chain and linear bound"))
    sp.add_argument("machine")
    sp.add_argument("input")
    sp.add_argument("--recursion", action="store_true", help="also check the subspace recursion")
    sp.add_argument("--spectral", action="store_true", help="add the spectral runtime diagnostic")
    sp.set_defaults(fn=cmd_analyze)

    sp = common(sub.add_parser("accept-prob", help="acceptance probability by series, resolvent or clows"))
    sp.add_argument("machine")
    sp.add_argument("input")
    sp.add_argument("--method", choices=("series", "resolvent", "clow-check"), default="resolvent")
    sp.add_argument("--terms", type=int, default=200)
    sp.set_defaults(fn=cmd_accept_prob)

    sp = common(sub.add_parser("transform", help="apply a certified transform"))
    sp.add_argument("name", choices=transforms.transform_names())
    sp.add_argument("machines", nargs="+")
    sp.add_argument("--alpha")
    sp.add_argument("--beta")
    sp.add_argument("--variant")
    sp.add_argument("--n-max", type=int, help="check the relation on inputs up to this length")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_transform)

    sp = common(sub.add_parser("gap", help="build and verify the gap pair of a rational qfa"))
    sp.add_argument("machine")
    sp.add_argument("input", nargs="?")
    sp.add_argument("--n-max", type=int, default=1)
    sp.add_argument("--full", action="store_true", help="print gaps and scalings as exact fractions")
    sp.set_defaults(fn=cmd_gap)

    sp = common(sub.add_parser("verify", help="run an invariant suite"))
    sp.add_argument("--suite", required=True)
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--machine", action="append", help="restrict the suite to these machines")
    sp.set_defaults(fn=cmd_verify)

    sp = common(sub.add_parser("zoo", help="list, show or export zoo machines"))
    sp.add_argument("id", nargs="?")
    sp.add_argument("--export", metavar="DIR")
    sp.set_defaults(fn=cmd_zoo)
    return p


def _print_human(results, indent=0):
    pad = "  " * indent
    for k, v in results.items():
        if isinstance(v, dict):
            print(f"{pad}{k}:")
            _print_human(v, indent + 1)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            print(f"{pad}{k}:")
            for row in v:
                print(f"{pad}  - " + ", ".join(f"{a}={_fmt(b)}" for a, b in row.items()))
        else:
            print(f"{pad}{k}: {_fmt(v)}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    want_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        results, passed, code = args.fn(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (LinAlgError, MemoryError) as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    except (FileNotFoundError, MachineError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if want_json:
        report = {"command": args.verb, "inputs": {"machine": getattr(args, "machine", None),
                                                   "input": getattr(args, "input", None)},
                  "results": _fmt(results), "pass": passed}
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        _print_human(results)
    return code


if __name__ == "__main__":
    sys.exit(main())
