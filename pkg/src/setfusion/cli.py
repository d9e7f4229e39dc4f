"""Command-line front end.

Every run produces one report document.  ``--format json`` prints it as
JSON; the default ``human`` format renders the same document as tables.

Exit codes: 0 success, 1 input error, 2 budget exhausted (report still
printed), 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .constructions import (
    Construction, CyclicSequence, RuleSet, build_generation_circuit, evaluate_cyclic, format_construction,
    format_cyclic, generation_input, graph_preimages, parse_certificate, simulate_generation,
    transform_by_injection,
)
from .core import DiscreteSpace, GroundSet, Subset
from .fusion import Lambda, compile_lambda, format_lambda, parse_lambda, verify_lambda
from .solvers import (
    SearchBudget, bounds_report, finiteness_test, random_graph_experiment, solve_discrete, solve_rho,
    solve_rho_can_neq, solve_side_count,
)
from .solvers.budget import EXACT, INFINITE, ComplexityResult
from .solvers.canonical import NEQ_CAP
from .spaces import (
    function_from_graph, graph_from_function, graph_stars, is_catalog_name, make_generators,
    neq, parse_catalog, phi_index_map,
)

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


# -- input helpers ---------------------------------------------------------------

def load_target(text: str, ground: GroundSet) -> Subset:
    """Catalog name, path to a 0/1 file, or an inline 0/1 string."""
    if is_catalog_name(text):
        a = parse_catalog(text)
        if a.ground != ground:
            raise InputError(f"catalog set {text} does not live over the chosen space")
        return a
    if os.path.exists(text):
        return ground.parse(Path(text).read_text())
    return ground.parse(text)


def budget_from(args) -> SearchBudget:
    return SearchBudget(args.budget_depth, args.budget_states, args.budget_seconds)


def result_doc(r: ComplexityResult) -> dict:
    doc = {
        "measure": r.measure, "status": r.status, "value": r.value,
        "spent": r.spent, "budget": r.budget, "detail": _plain(r.detail),
    }
    if r.witness is not None:
        doc["witness"] = certificate_text(r.witness)
    return doc


def certificate_text(w, target: Subset | None = None, space: DiscreteSpace | None = None) -> str:
    if isinstance(w, Construction):
        return format_construction(w)
    if isinstance(w, CyclicSequence):
        return format_cyclic(w)
    if isinstance(w, Lambda):
        if target is None or space is None:
            return "\n".join(f"{e} {h}" for e, h in w.ordered())
        return format_lambda(w, space, target)
    raise InputError("witness has no certificate form")


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items() if not isinstance(v, (Construction, CyclicSequence))}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)


# -- rendering -----------------------------------------------------------------

def render_human(doc: dict) -> str:
    lines = [f"command: {' '.join(doc['command'])}"]
    for item in doc.get("results", []):
        lines.append("")
        lines.extend(_table([(k, v) for k, v in item.items() if k not in ("witness", "rows", "table")]))
        if "table" in item:
            lines.append("")
            lines.extend(_grid(item["table"]))
        if "witness" in item:
            lines.append("witness:")
            lines.extend("  " + ln for ln in item["witness"].rstrip("\n").splitlines())
    lines.append("")
    lines.append(f"elapsed: {doc['elapsed']} s")
    return "\n".join(lines)


def _table(pairs) -> list[str]:
    if not pairs:
        return []
    width = max(len(k) for k, _ in pairs)
    out = []
    for k, v in pairs:
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        out.append(f"{k.ljust(width)} | {v}")
    return out


def _grid(table: dict) -> list[str]:
    header, body = table["header"], table["rows"]
    cells = [header] + [[str(c) for c in row] for row in body]
    widths = [max(len(str(r[i])) for r in cells) for i in range(len(header))]
    fmt = lambda row: " | ".join(str(c).ljust(w) for c, w in zip(row, widths))  # noqa: E731
    return [fmt(header), "-+-".join("-" * w for w in widths)] + [fmt(r) for r in body]


# -- subcommands ---------------------------------------------------------------

MEASURES = {"d": "D", "dcap": "intersections", "dcup": "unions", "rho": "rho", "rho-ultra": "rho_ultra"}


def cmd_solve(args) -> tuple[list[dict], int]:
    space = make_generators(args.space)
    targets = [load_target(t, space.ground) for t in args.target]
    budget = budget_from(args)
    if args.measure == "d":
        r = solve_discrete(targets, space, budget)
    else:
        if len(targets) != 1:
            raise InputError("only --measure d accepts several targets")
        a = targets[0]
        if args.measure in ("dcap", "dcup"):
            r = solve_side_count(a, space, MEASURES[args.measure], budget)
        else:
            r = solve_rho(a, space, args.method, budget, ultra=args.measure == "rho-ultra")
    doc = result_doc(r)
    if isinstance(r.witness, Lambda):
        doc["witness"] = format_lambda(r.witness, space, targets[0])
    if args.emit and r.witness is not None:
        Path(args.emit).write_text(doc["witness"])
        doc["certificate_path"] = args.emit
    return [doc], EXIT_OK if r.status in (EXACT, INFINITE) else EXIT_BUDGET


def cmd_verify(args) -> tuple[list[dict], int]:
    if args.kind == "lambda":
        path = args.lambda_path or args.certificate
        if not path:
            raise InputError("verify lambda needs --lambda FILE")
        desc, a, lam = _read_lambda(path, args)
        space = make_generators(desc)
        ok, witness = verify_lambda(a, space, lam, mode=args.mode)
        doc = {"kind": "lambda", "valid": ok, "pairs": len(lam), "mode": args.mode}
        if not ok:
            doc["witness"] = _lambda_failure(witness, a.ground)
        return [doc], EXIT_OK if ok else EXIT_VERIFY
    if not args.certificate:
        raise InputError(f"verify {args.kind} needs --certificate FILE")
    obj = parse_certificate(Path(args.certificate).read_text(),
                            make_generators(args.space) if args.space else None)
    if isinstance(obj, Construction) != (args.kind == "construction"):
        raise InputError(f"certificate is not a {args.kind} certificate")
    if not args.target:
        raise InputError("verify needs --target")
    targets = [load_target(t, obj.space.ground) for t in args.target]
    if isinstance(obj, Construction):
        got = obj.output_values()
        if len(targets) != len(got):
            raise InputError(f"certificate marks {len(got)} outputs but {len(targets)} targets were given")
        cost = obj.cost
    else:
        got = [evaluate_cyclic(obj)[0]]
        if len(targets) != 1:
            raise InputError("cyclic certificates have exactly one output")
        cost = (len(obj.gates), obj.n_intersections, len(obj.gates) - obj.n_intersections)
    ok = all(x == t for x, t in zip(got, targets))
    doc = {"kind": args.kind, "valid": ok, "cost": list(cost)}
    if not ok:
        for x, t in zip(got, targets):
            if x != t:
                diff = (x.bits ^ t.bits) & -(x.bits ^ t.bits)
                pos = diff.bit_length() - 1
                doc["witness"] = f"element {x.ground.labels[pos]} differs: got {x.to_string()}, want {t.to_string()}"
                break
    return [doc], EXIT_OK if ok else EXIT_VERIFY


def _read_lambda(path: str, args):
    text = Path(path).read_text()
    desc, a, lam = parse_lambda(text, make_generators(args.space).ground if args.space else None)
    if args.space and args.space != desc:
        raise InputError(f"lambda certificate is for {desc}, not {args.space}")
    if args.target:
        want = load_target(args.target[0], a.ground)
        if want != a:
            raise InputError("lambda certificate target differs from --target")
    return desc, a, lam


def _lambda_failure(witness, ground: GroundSet) -> str:
    if isinstance(witness, tuple):
        f, w = witness
        return f"semi-filter with minimal sets {list(f.minimal)} is above {ground.labels[w]} and preserves every pair"
    return f"closure disagrees with membership at {ground.labels[witness]}"


def cmd_compile(args) -> tuple[list[dict], int]:
    if not args.lambda_path:
        raise InputError("compile needs --lambda FILE")
    desc, a, lam = _read_lambda(args.lambda_path, args)
    space = make_generators(desc)
    ok, witness = verify_lambda(a, space, lam)
    if not ok:
        return [{"valid": False, "witness": _lambda_failure(witness, a.ground)}], EXIT_VERIFY
    out, _ = compile_lambda(a, space, lam, target=args.to, check=False)
    text = format_cyclic(out) if args.to == "cyclic" else format_construction(out)
    n_int = out.n_intersections if args.to == "cyclic" else out.cost[1]
    doc = {"target": args.to, "pairs": len(lam), "intersections": n_int,
           "steps": len(out.gates) if args.to == "cyclic" else len(out.steps), "witness": text}
    if args.emit:
        Path(args.emit).write_text(text)
        doc["certificate_path"] = args.emit
    return [doc], EXIT_OK


def cmd_finiteness(args) -> tuple[list[dict], int]:
    space = make_generators(args.space)
    a = load_target(args.target[0], space.ground)
    fin = finiteness_test(a, space)
    doc = {"finite": fin.finite}
    if not fin.finite:
        x, y = fin.pair
        doc["pair"] = [str(space.ground.labels[x]), None if y is None else str(space.ground.labels[y])]
    return [doc], EXIT_OK


def cmd_transfer(args) -> tuple[list[dict], int]:
    n = args.n
    if args.certificate:
        obj = parse_certificate(Path(args.certificate).read_text())
        if not isinstance(obj, Construction) or obj.space.descriptor != f"bool:{2 * n}":
            raise InputError(f"transfer expects an acyclic construction over bool:{2 * n}")
        stars = graph_stars(1 << n, 1 << n)
        c = transform_by_injection(obj, phi_index_map(n), stars, graph_preimages(n))
        doc = {"direction": "backward", "n": n, "value": c.value.to_string(),
               "cost": list(c.cost), "source_cost": list(obj.cost), "witness": format_construction(c)}
        if args.emit:
            Path(args.emit).write_text(doc["witness"])
        return [doc], EXIT_OK
    if not args.target:
        raise InputError("transfer needs --target or --certificate")
    if args.direction == "forward":
        g = load_target(args.target[0], GroundSet.grid(1 << n, 1 << n))
        f = function_from_graph(g)
        return [{"direction": "forward", "n": n, "graph": g.to_string(), "function": f.to_string()}], EXIT_OK
    f = load_target(args.target[0], GroundSet.hypercube(2 * n))
    g = graph_from_function(f)
    return [{"direction": "backward", "n": n, "function": f.to_string(), "graph": g.to_string()}], EXIT_OK


def cmd_neq(args) -> tuple[list[dict], int]:
    n_size = args.n
    if not 2 <= n_size <= NEQ_CAP:
        raise InputError(f"--n must lie in [2, {NEQ_CAP}]")
    budget = budget_from(args)
    space = graph_stars(n_size, n_size)
    a = neq(n_size)
    rows = []
    code = EXIT_OK

    def add(name, r: ComplexityResult):
        nonlocal code
        rows.append([name, r.status, r.value])
        if r.status not in (EXACT, INFINITE):
            code = EXIT_BUDGET

    dcap = solve_side_count(a, space, "intersections", budget)
    add("D_cap", dcap)
    rho = solve_rho(a, space, "auto", budget)
    add("rho", rho)
    if n_size <= 5:
        add("rho_ultra", solve_rho(a, space, "auto", budget, ultra=True))
    add("rho_can", solve_rho_can_neq(n_size))
    if rho.exact:
        seq, _ = compile_lambda(a, space, rho.witness)
        rows.append(["D_circ_cap (compiled)", "exact", seq.n_intersections])
    table = {"header": ["measure", "status", "value"], "rows": rows}
    return [{"N": n_size, "table": table}], code


def _parse_rules(text: str) -> list[tuple[int, int, int]]:
    rules = []
    for chunk in text.split(";"):
        if chunk.strip():
            parts = chunk.split(",")
            if len(parts) != 3:
                raise InputError(f"rule {chunk!r} must have three indices")
            rules.append(tuple(int(p) for p in parts))
    return rules


def cmd_genrules(args) -> tuple[list[dict], int]:
    r = RuleSet(args.m, _parse_rules(args.rules))
    seq = build_generation_circuit(r)
    doc = {"m": r.m, "rules": len(r.rules), "and_gates": seq.n_intersections}
    if args.input is not None:
        y = [int(v) for v in args.input.split(",") if v.strip()]
        want = simulate_generation(r, y)
        got = _circuit_accepts(seq, r, y)
        doc.update({"input": sorted(y), "closure": want, "circuit": got})
        ok = want == got
    else:
        mismatches = 0
        for mask in range(1 << r.m):
            y = [i + 1 for i in range(r.m) if mask >> i & 1]
            mismatches += simulate_generation(r, y) != _circuit_accepts(seq, r, y)
        doc.update({"inputs_checked": 1 << r.m, "mismatches": mismatches})
        ok = mismatches == 0
    if args.emit:
        Path(args.emit).write_text(format_cyclic(seq))
        doc["certificate_path"] = args.emit
    return [doc], EXIT_OK if ok else EXIT_VERIFY


def _circuit_accepts(seq: CyclicSequence, r: RuleSet, y) -> bool:
    value, _ = evaluate_cyclic(seq)
    point = seq.space.ground.index(generation_input(r, y))
    return bool(value.bits >> point & 1)


def cmd_experiment(args) -> tuple[list[dict], int]:
    if args.name != "random-graph":
        raise InputError(f"unknown experiment {args.name!r}")
    sizes = tuple(int(x) for x in args.sizes.split(","))
    if any(n not in (2, 3) for n in sizes):
        raise InputError("random-graph experiment supports N in {2, 3}")
    rep = random_graph_experiment(sizes, args.samples, args.seed, budget_from(args), args.jobs)
    docs = []
    for n in sizes:
        dist = rep.distribution(n)
        rows = [[rho, d, cnt] for (rho, d), cnt in sorted(dist.items())]
        docs.append({"N": n, "samples": args.samples, "seed": args.seed, "rejected": rep.rejected[n],
                     "table": {"header": ["rho", "D_cap", "count"], "rows": rows}})
    bad = rep.violations()
    docs.append({"violations": len(bad), "note": rep.note})
    return docs, EXIT_OK if not bad else EXIT_VERIFY


def cmd_bounds(args) -> tuple[list[dict], int]:
    if args.kind == "counting":
        if args.k is None or args.m is None:
            raise InputError("bounds counting needs --k and --m")
        rep = bounds_report("counting", k=args.k, m=args.m)
        return [{"kind": "counting", "k": args.k, "m": args.m, "s": rep.value}], EXIT_OK
    if args.lambda_path:
        desc, a, lam = _read_lambda(args.lambda_path, args)
        space = make_generators(desc)
    else:
        if not args.space or not args.target:
            raise InputError("bounds cubic needs --lambda or --space and --target")
        space = make_generators(args.space)
        a = load_target(args.target[0], space.ground)
        r = solve_rho(a, space, "auto", budget_from(args))
        if not r.exact:
            return [result_doc(r)], EXIT_BUDGET
        lam = r.witness
    ok, _ = verify_lambda(a, space, lam)
    if not ok:
        return [{"kind": "cubic", "valid": False}], EXIT_VERIFY
    rep = bounds_report("cubic", a=a, space=space, lam=lam)
    return [{"kind": "cubic", "t": len(lam), "m": len(space), "total_ops": rep.value,
             "intersections": rep.detail["intersections"], "unions": rep.detail["unions"]}], EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--space", help="space descriptor, e.g. stars:4x4 or bool:2")
    common.add_argument("--target", action="append", help="catalog name, 0/1 file path or inline 0/1 string")
    common.add_argument("--lambda", dest="lambda_path", help="pair-family certificate file")
    common.add_argument("--certificate", help="construction or cyclic certificate file")
    common.add_argument("--emit", help="write the witness certificate to this path")
    common.add_argument("--budget-depth", type=int, default=3)
    common.add_argument("--budget-states", type=int, default=10**8)
    common.add_argument("--budget-seconds", type=float, default=300.0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="setfusion", description="Exact discrete and cover complexity of small set families.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("solve", parents=[common], help="compute one complexity measure")
    q.add_argument("--measure", choices=sorted(MEASURES), required=True)
    q.add_argument("--method", choices=("auto", "lambda_search", "set_cover", "hitting_set"), default="auto")
    q.set_defaults(run=cmd_solve, needs=("space", "target"))

    q = sub.add_parser("verify", parents=[common], help="check a certificate")
    q.add_argument("kind", choices=("construction", "cyclic", "lambda"))
    q.add_argument("--mode", choices=("closure", "enumerate"), default="closure")
    q.set_defaults(run=cmd_verify, needs=())

    q = sub.add_parser("compile", parents=[common], help="turn a pair family into a construction")
    q.add_argument("--to", choices=("cyclic", "acyclic"), default="cyclic")
    q.set_defaults(run=cmd_compile, needs=())

    q = sub.add_parser("finiteness", parents=[common], help="finiteness test")
    q.set_defaults(run=cmd_finiteness, needs=("space", "target"))

    q = sub.add_parser("transfer", parents=[common], help="map sets or constructions through phi")
    q.add_argument("--direction", choices=("forward", "backward"), default="forward")
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(run=cmd_transfer, needs=())

    q = sub.add_parser("neq", parents=[common], help="all measures for NEQ(N)")
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(run=cmd_neq, needs=())

    q = sub.add_parser("genrules", parents=[common], help="generation circuit for a rule set")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--rules", required=True, help="triples a,b,c separated by ';'")
    q.add_argument("--input", help="comma-separated initial set; omit to check every input")
    q.set_defaults(run=cmd_genrules, needs=())

    q = sub.add_parser("experiment", parents=[common], help="reporting experiments")
    q.add_argument("name", choices=("random-graph",))
    q.add_argument("--sizes", default="2,3")
    q.add_argument("--samples", type=int, default=20)
    q.set_defaults(run=cmd_experiment, needs=())

    q = sub.add_parser("bounds", parents=[common], help="counting or realized cubic bound")
    q.add_argument("kind", choices=("counting", "cubic"))
    q.add_argument("--k", type=int)
    q.add_argument("--m", type=int)
    q.set_defaults(run=cmd_bounds, needs=())
    return p


def run(argv: list[str]) -> tuple[int, dict]:
    """Execute one command; returns the exit code and the report document."""
    start = time.monotonic()
    doc: dict = {"command": list(argv), "results": []}
    try:
        args = build_parser().parse_args(argv)
        for need in args.needs:
            if not getattr(args, need):
                raise InputError(f"--{need} is required for {args.command}")
        doc["results"], code = args.run(args)
    except (InputError, ValueError, OSError) as exc:
        doc["error"] = str(exc)
        code = EXIT_INPUT
        args = None
    doc["exit_code"] = code
    doc["elapsed"] = round(time.monotonic() - start, 3)
    if args is not None:
        doc["format"] = args.format
    else:
        doc["format"] = "json" if any(a in ("--format=json",) for a in argv) or _flag_value(argv, "--format") == "json" else "human"
    return code, doc


def _flag_value(argv: list[str], flag: str):
    for i, a in enumerate(argv[:-1]):
        if a == flag:
            return argv[i + 1]
    return None


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, doc = run(argv)
    fmt = doc.pop("format")
    if "error" in doc and fmt == "human":
        print(f"error: {doc['error']}", file=sys.stderr)
        return code
    if fmt == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(render_human(doc))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
