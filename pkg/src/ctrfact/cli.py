"""Command-line front end.

Exit codes: 0 verdict true or suites pass, 1 verdict false or a suite fails,
2 usage or input error, 3 the routes of a cross-check disagree.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .causal import (
    CausalCycleError, CauseQueryError, EquationalState, actual_cause_via_counterfactuals,
    enumerate_actual_causes, find_but_witness, is_actual_cause,
)
from .checker import closest_states, model_check, relativize
from .formulas import Formula, ParseError, atoms_of, parse_formula, render_formula, term_from_formula
from .modelfile import LoadedModel, ModelError, load_model
from .qbf import (
    OpenFormulaError, QbfFormatError, alternation_depth, encode_actual_cause, encode_mc, eval_qbf,
    export_qcir, export_qdimacs, parse_qcir, parse_qdimacs, qbf_size, quantifier_prefix,
)
from .states import BoundExceededError, IncompatibleStateError
from .validation import DEFAULT_SUITES, SUITES, run_suites

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR, EXIT_DISAGREE = 0, 1, 2, 3

_INPUT_ERRORS = (ModelError, ParseError, CauseQueryError, CausalCycleError, BoundExceededError,
                 IncompatibleStateError, QbfFormatError, OpenFormulaError, OSError, ValueError)


class CliError(Exception):
    pass


class Report:
    """Collects text lines and a JSON payload; only one of them is printed."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []
        self.data: dict = {}

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self, out) -> None:
        if self.fmt == "json":
            out.write(json.dumps(self.data, indent=2, sort_keys=True) + "\n")
        else:
            out.write("\n".join(self.lines) + ("\n" if self.lines else ""))


def _formula(text: str, what: str) -> Formula:
    try:
        return parse_formula(text)
    except ParseError as exc:
        raise CliError(f"cannot parse {what} {text!r}: {exc}") from None


def _term(text: str):
    f = _formula(text, "term")
    try:
        return term_from_formula(f)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _equational(model: LoadedModel, command: str) -> EquationalState:
    if not model.equational:
        raise CliError(f"'{command}' needs an equational model (a file with an 'equations' map)")
    return model.state


def _check_args(model: LoadedModel):
    ctx = model.context
    return ctx.gamma, model.plain_state, ctx.constraint, ctx.sigma


def _verdicts(report: Report, verdicts: dict[str, bool]) -> int:
    report.data["verdicts"] = verdicts
    for route, value in verdicts.items():
        report.line(f"{route}: {str(value).lower()}")
    values = set(verdicts.values())
    if len(values) > 1:
        report.data["agree"] = False
        report.line("DISAGREEMENT between routes")
        return EXIT_DISAGREE
    report.data["agree"] = True
    report.data["verdict"] = values.pop()
    return EXIT_TRUE if report.data["verdict"] else EXIT_FALSE


# -- subcommands --------------------------------------------------------------

def cmd_check(args, report: Report) -> int:
    model = load_model(args.model)
    psi = _formula(args.formula, "formula")
    gamma, state, constraint, extra = _check_args(model)
    report.data.update(command="check", formula=render_formula(psi))
    report.line(f"formula: {render_formula(psi)}")
    verdicts = {}
    if args.via in ("brute", "both"):
        verdicts["brute"] = model_check(psi, gamma, state, constraint, extra)
    if args.via in ("qbf", "both"):
        verdicts["qbf"] = eval_qbf(encode_mc(psi, gamma, state, constraint, extra))
    return _verdicts(report, verdicts)


def cmd_closest(args, report: Report) -> int:
    model = load_model(args.model)
    phi = _formula(args.formula, "formula")
    gamma, state, constraint, extra = _check_args(model)
    restricted, ctx = relativize(phi, gamma, state, constraint, extra)
    members = closest_states(phi, restricted, ctx)
    report.data.update(command="closest", formula=render_formula(phi),
                       closest=[{"base": sorted(render_formula(w) for w in s.base),
                                 "valuation": sorted(s.valuation)} for s in members])
    report.line(f"closest {render_formula(phi)}-states ({len(members)}):")
    for s in members:
        report.line(f"  {s}")
    return EXIT_TRUE if members else EXIT_FALSE


def _cause_figure(args, state: EquationalState, highlight, effect: Formula, title: str) -> None:
    if args.figure:
        from .plotting import draw_causal_graph
        draw_causal_graph(state, args.figure, highlight, atoms_of(effect), title)


def cmd_cause(args, report: Report) -> int:
    model = load_model(args.model)
    state = _equational(model, "cause")
    term = _term(args.term)
    effect = _formula(args.effect, "effect")
    report.data.update(command="cause", term=str(term), effect=render_formula(effect))
    report.line(f"is {term} an actual cause of {render_formula(effect)}?")
    routes = {"interventions": ("interventions",), "counterfactuals": ("counterfactuals",),
              "qbf": ("qbf",), "both": ("interventions", "counterfactuals"),
              "all": ("interventions", "counterfactuals", "qbf")}[args.via]
    verdicts = {}
    for route in routes:
        if route == "interventions":
            verdicts[route] = is_actual_cause(state, term, effect)
            witness = find_but_witness(state, term, effect)
            if witness is not None:
                signs, frozen = witness
                report.data["witness"] = {"intervention": signs, "frozen": sorted(frozen)}
                report.line(f"but-condition witness: set {signs}, freeze {sorted(frozen)}")
        elif route == "counterfactuals":
            verdicts[route] = actual_cause_via_counterfactuals(state, term, effect)
        else:
            verdicts[route] = eval_qbf(encode_actual_cause(term, effect, state), method="bdd")
    code = _verdicts(report, verdicts)
    _cause_figure(args, state, term.atoms, effect, f"{term} => {render_formula(effect)}")
    return code


def cmd_causes(args, report: Report) -> int:
    model = load_model(args.model)
    state = _equational(model, "causes")
    effect = _formula(args.effect, "effect")
    found = enumerate_actual_causes(state, effect, args.max_size)
    report.data.update(command="causes", effect=render_formula(effect), max_size=args.max_size,
                       causes=[str(t) for t in found])
    report.line(f"actual causes of {render_formula(effect)} with at most {args.max_size} literal(s):")
    for t in found:
        report.line(f"  {t}")
    if not found:
        report.line("  (none)")
    highlight = set().union(*(t.atoms for t in found)) if found else set()
    _cause_figure(args, state, highlight, effect, f"causes of {render_formula(effect)}")
    return EXIT_TRUE if found else EXIT_FALSE


def _split_cause_query(text: str) -> tuple[str, str] | None:
    s = text.strip()
    if not (s.startswith("cause") and s[5:].lstrip().startswith("(") and s.endswith(")")):
        return None
    inner = s[5:].lstrip()[1:-1]
    depth = 0
    for k, ch in enumerate(inner):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return inner[:k], inner[k + 1:]
    raise CliError("a cause query reads cause(TERM, EFFECT)")


def cmd_encode(args, report: Report) -> int:
    model = load_model(args.model)
    query = _split_cause_query(args.query)
    if query is not None:
        state = _equational(model, "encode cause(...)")
        term, effect = _term(query[0]), _formula(query[1], "effect")
        qbf = encode_actual_cause(term, effect, state)
        kind = "cause"
    else:
        psi = _formula(args.query, "formula")
        gamma, state, constraint, extra = _check_args(model)
        qbf = encode_mc(psi, gamma, state, constraint, extra)
        kind = "check"
    text = export_qcir(qbf) if args.qbf_format == "qcir" else export_qdimacs(qbf)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    report.data.update(command="encode", kind=kind, format=args.qbf_format, output=args.output,
                       size=qbf_size(qbf), prefix=quantifier_prefix(qbf),
                       alternations=alternation_depth(qbf))
    report.line(f"wrote {args.qbf_format} encoding of the {kind} query to {args.output}")
    report.line(f"size {qbf_size(qbf)}, prefix {quantifier_prefix(qbf)}, "
                f"{alternation_depth(qbf)} alternation(s)")
    return EXIT_TRUE


def detect_qbf_format(text: str) -> str:
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.upper().startswith("#QCIR"):
            return "qcir"
        if s.startswith("c") or s.startswith("p"):
            if s.startswith("p"):
                return "qdimacs"
            continue
        break
    raise CliError("unrecognized QBF file: expected a QCIR or QDIMACS header")


def cmd_eval_qbf(args, report: Report) -> int:
    text = Path(args.path).read_text(encoding="utf-8")
    fmt = detect_qbf_format(text)
    qbf = parse_qcir(text) if fmt == "qcir" else parse_qdimacs(text)
    value = eval_qbf(qbf, method=args.method)
    report.data.update(command="eval-qbf", format=fmt, verdict=value)
    report.line(f"{fmt}: {str(value).lower()}")
    return EXIT_TRUE if value else EXIT_FALSE


def cmd_validate(args, report: Report) -> int:
    results = run_suites(args.suite, args.seed, args.samples)
    report.data.update(command="validate", seed=args.seed, samples=args.samples,
                       suites=[r.as_dict() for r in results],
                       passed=all(r.passed for r in results))
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        report.line(f"{status} {r.name}: {r.instances} instances, {r.failure_count} failure(s), "
                    f"{r.seconds:.2f}s")
        for msg in r.failures:
            report.line(f"    {msg}")
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "validation.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["suite", "passed", "instances", "failures", "seconds"])
            for r in results:
                w.writerow([r.name, r.passed, r.instances, r.failure_count, f"{r.seconds:.3f}"])
        from .plotting import plot_validation_summary
        plot_validation_summary(results, out / "validation.png")
        report.line(f"report written to {out}")
    return EXIT_TRUE if all(r.passed for r in results) else EXIT_FALSE


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctrfact", description="Counterfactual conditionals and actual cause over causal bases.")
    parser.add_argument("--format", dest="report_format", choices=("text", "json"), default="text",
                        help="report format (default: text)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="model check a formula at the model's state")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--via", choices=("brute", "qbf", "both"), default="brute")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("closest", help="list the closest states satisfying a formula")
    p.add_argument("model")
    p.add_argument("formula")
    p.set_defaults(func=cmd_closest)

    p = sub.add_parser("cause", help="decide whether a term is an actual cause of an effect")
    p.add_argument("model")
    p.add_argument("term")
    p.add_argument("effect")
    p.add_argument("--via", choices=("interventions", "counterfactuals", "qbf", "both", "all"),
                   default="interventions",
                   help="both = interventions and counterfactuals; all adds the QBF encoding")
    p.add_argument("--figure", metavar="PNG", help="draw the causal graph with the query marked")
    p.set_defaults(func=cmd_cause)

    p = sub.add_parser("causes", help="enumerate actual causes of an effect")
    p.add_argument("model")
    p.add_argument("effect")
    p.add_argument("--max-size", type=int, default=2)
    p.add_argument("--figure", metavar="PNG")
    p.set_defaults(func=cmd_causes)

    p = sub.add_parser("encode", help="write a QBF encoding of a query")
    p.add_argument("model")
    p.add_argument("query", help="a formula, or cause(TERM, EFFECT)")
    p.add_argument("--format", dest="qbf_format", choices=("qcir", "qdimacs"), default="qcir")
    p.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("eval-qbf", help="evaluate a QCIR or QDIMACS file")
    p.add_argument("path")
    p.add_argument("--method", choices=("auto", "recursive", "bdd"), default="auto")
    p.set_defaults(func=cmd_eval_qbf)

    p = sub.add_parser("validate", help="run the property and differential suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--suite", action="append", choices=sorted(SUITES),
                   help=f"repeatable; default: {', '.join(DEFAULT_SUITES)}")
    p.add_argument("--report-dir", metavar="DIR", help="also write validation.csv and validation.png")
    p.set_defaults(func=cmd_validate)
    return parser


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_TRUE
    report = Report(args.report_format)
    try:
        code = args.func(args, report)
    except (CliError, *_INPUT_ERRORS) as exc:
        if args.report_format == "json":
            out.write(json.dumps({"command": args.command, "error": str(exc)}) + "\n")
        err.write(f"error: {exc}\n")
        return EXIT_ERROR
    report.emit(out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
