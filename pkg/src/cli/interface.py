"""
pGCL Analysis CLI - single entry point for the analysis toolkit
Command-line interface over the parser, explorer, chain solver, sampler and
reduction gadgets.

stdout carries only data (program text, CSV, key=value lines); status and
errors go to stderr.

Exit codes:
    0  success / certified
    1  parse or usage error
    2  budget exhausted
    3  frontier or state cap exceeded
"""

import argparse
import os
import sys
from typing import Callable, Dict, List, Optional, TextIO

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from pgcl.core import NotOrdinaryProgramError, format_rational, parse_rational, pretty
from pgcl.parser import ParseError, parse_file, parse_valuation_file
from analysis.chain_solver import (
    StateCapExceeded, decide_expectation_bound, dump_chain, extract_chain, format_steps, solve_chain,
)
from analysis.config import DEFAULT_CONFIG, AnalysisConfig
from analysis.explorer import (
    BudgetExhausted, Certified, FrontierCapExceeded, PartialSumRow, certify_lower_expectation,
    certify_lower_termination, certify_runtime_exceeds, iter_partial_sums, rows_to_csv,
)
from analysis.sampler import estimate, format_report
from reductions.gadgets import GADGETS, build_gadget

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_CAP = 3


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 means budget exhausted here."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _rational_arg(text: str):
    try:
        return parse_rational(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="pgcl", description="Analyse pGCL programs")
    parser.add_argument("--jobs", type=_positive_int, default=None,
                        help="worker threads for exploration and sampling")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def program_command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("program", help="program file")
        sub.add_argument("--valuation", default=None, help="start valuation file (default: all zero)")
        return sub

    sub = commands.add_parser("parse", help="syntax check and pretty-print")
    sub.add_argument("program")
    sub.add_argument("--multiline", action="store_true")

    sub = program_command("explore", help_text="CSV of partial sums per depth")
    sub.add_argument("--var", default=None)
    sub.add_argument("--depth", type=_natural, default=10)
    sub.add_argument("--frontier-cap", type=_positive_int, default=None)

    sub = program_command("certify-lower", help_text="certify q < E(v)")
    sub.add_argument("--var", required=True)
    sub.add_argument("--bound", type=_rational_arg, required=True)
    sub.add_argument("--budget", type=_natural, required=True)
    sub.add_argument("--frontier-cap", type=_positive_int, default=None)

    sub = program_command("certify-termination", help_text="certify p < Pr(termination)")
    sub.add_argument("--bound", type=_rational_arg, required=True)
    sub.add_argument("--budget", type=_natural, required=True)
    sub.add_argument("--frontier-cap", type=_positive_int, default=None)

    sub = program_command("certify-runtime-exceeds", help_text="certify c < expected runtime")
    sub.add_argument("--bound", type=_rational_arg, required=True)
    sub.add_argument("--budget", type=_natural, required=True)
    sub.add_argument("--frontier-cap", type=_positive_int, default=None)

    sub = program_command("exact", help_text="exact solve of a finite-state program")
    sub.add_argument("--cap", type=_positive_int, default=None, help="state cap")
    sub.add_argument("--dump-chain", action="store_true")
    sub.add_argument("--var", action="append", default=[])
    sub.add_argument("--bound", type=_rational_arg, default=None,
                     help="decide LEXP / REXP / EXP for the first --var")

    sub = program_command("reduce", help_text="emit a reduction gadget for an ordinary program")
    sub.add_argument("--gadget", choices=sorted(GADGETS), required=True)
    sub.add_argument("--output", default=None, help="write PATH and PATH.notes")

    sub = program_command("sample", help_text="seeded Monte-Carlo estimate")
    sub.add_argument("--n", type=_positive_int, required=True)
    sub.add_argument("--seed", type=_natural, required=True)
    sub.add_argument("--step-cap", type=_positive_int, default=None)
    sub.add_argument("--var", default=None)
    return parser


class AnalysisCLI:
    """Runs one parsed invocation"""

    def __init__(self, args: argparse.Namespace, out: Optional[TextIO] = None, err: Optional[TextIO] = None):
        self.args = args
        self.out = out or sys.stdout
        self.err = err or sys.stderr
        self.config = DEFAULT_CONFIG.with_overrides(
            jobs=args.jobs,
            frontier_cap=getattr(args, "frontier_cap", None),
            state_cap=getattr(args, "cap", None),
            step_cap=getattr(args, "step_cap", None),
        )

    def status(self, message: str):
        print(message, file=self.err)

    def emit(self, text: str):
        self.out.write(text)

    def _load(self):
        program = parse_file(self.args.program)
        valuation = parse_valuation_file(getattr(self.args, "valuation", None))
        return program, valuation

    def _on_row(self, row: PartialSumRow):
        if row.depth and row.depth % 100 == 0:
            self.status(f"⏳ depth {row.depth}: frontier {row.frontier_size}")

    def run(self) -> int:
        handlers: Dict[str, Callable[[], int]] = {
            "parse": self.cmd_parse,
            "explore": self.cmd_explore,
            "certify-lower": self.cmd_certify_lower,
            "certify-termination": self.cmd_certify_termination,
            "certify-runtime-exceeds": self.cmd_certify_runtime,
            "exact": self.cmd_exact,
            "reduce": self.cmd_reduce,
            "sample": self.cmd_sample,
        }
        return handlers[self.args.command]()

    def cmd_parse(self) -> int:
        program = parse_file(self.args.program)
        self.emit(pretty(program, multiline=self.args.multiline) + "\n")
        self.status("✅ Syntax OK")
        return EXIT_OK

    def cmd_explore(self) -> int:
        program, valuation = self._load()
        self.status(f"🔍 Exploring to depth {self.args.depth}")
        rows = iter_partial_sums(program, valuation, self.args.var, self.args.depth, self.config, self._on_row)
        self.emit(rows_to_csv(rows))
        return EXIT_OK

    def _report_certificate(self, outcome, label: str) -> int:
        if isinstance(outcome, Certified):
            self.emit(f"result=certified\ndepth={outcome.depth}\nwitness={format_rational(outcome.witness_value)}\n")
            self.status(f"✅ {label} certified at depth {outcome.depth}")
            return EXIT_OK
        assert isinstance(outcome, BudgetExhausted)
        row = outcome.last_row
        self.emit(f"result=budget_exhausted\ndepth={row.depth if row else 'none'}\n")
        self.status(f"⏳ {label} not certified within budget {self.args.budget}")
        return EXIT_BUDGET

    def cmd_certify_lower(self) -> int:
        program, valuation = self._load()
        outcome = certify_lower_expectation(program, valuation, self.args.var, self.args.bound,
                                            self.args.budget, self.config, self._on_row)
        return self._report_certificate(outcome, f"E({self.args.var}) > {format_rational(self.args.bound)}")

    def cmd_certify_termination(self) -> int:
        program, valuation = self._load()
        outcome = certify_lower_termination(program, valuation, self.args.bound, self.args.budget,
                                            self.config, self._on_row)
        return self._report_certificate(outcome, f"Pr(term) > {format_rational(self.args.bound)}")

    def cmd_certify_runtime(self) -> int:
        program, valuation = self._load()
        outcome = certify_runtime_exceeds(program, valuation, self.args.bound, self.args.budget,
                                          self.config, self._on_row)
        return self._report_certificate(outcome, f"E(↓) > {format_rational(self.args.bound)}")

    def cmd_exact(self) -> int:
        program, valuation = self._load()
        variables: List[str] = self.args.var
        if self.args.bound is not None and not variables:
            raise UsageError("exact --bound needs at least one --var")
        self.status(f"🔍 Extracting chain (cap {self.config.state_cap})")
        chain = extract_chain(program, valuation, self.config.state_cap)
        self.status(f"✅ {chain.size} states, {len(chain.terminals)} terminal")
        result = solve_chain(chain, variables)

        lines = [f"termination_probability={format_rational(result.termination_probability)}"]
        lines += [f"E({var})={format_rational(result.expected_outcomes[var])}" for var in variables]
        lines.append(f"E(↓)={format_steps(result.expected_steps)}")
        lines.append(f"AST={'true' if result.ast else 'false'}")
        lines.append(f"PAST={'true' if result.past else 'false'}")
        if self.args.bound is not None:
            verdict = decide_expectation_bound(result, variables[0], self.args.bound)
            lines.append(f"LEXP={'true' if verdict.lexp else 'false'}")
            lines.append(f"REXP={'true' if verdict.rexp else 'false'}")
            lines.append(f"EXP={'true' if verdict.exp else 'false'}")
        self.emit("\n".join(lines) + "\n")
        if self.args.dump_chain:
            self.emit(dump_chain(chain))
        return EXIT_OK

    def cmd_reduce(self) -> int:
        program, valuation = self._load()
        gadget = build_gadget(self.args.gadget, program, valuation)
        notes = gadget.render_notes()
        text = gadget.render()
        if self.args.output:
            with open(self.args.output, "w", encoding="utf-8") as handle:
                handle.write(text)
            with open(self.args.output + ".notes", "w", encoding="utf-8") as handle:
                handle.write(notes)
            self.status(f"✅ Wrote {self.args.output} and {self.args.output}.notes")
        else:
            commented = "".join(f"// {line}\n" for line in notes.splitlines())
            self.emit(commented + text)
        return EXIT_OK

    def cmd_sample(self) -> int:
        program, valuation = self._load()
        self.status(f"🎲 Sampling {self.args.n} runs (seed {self.args.seed})")
        report = estimate(program, valuation, self.args.var, self.args.n, self.args.seed,
                          step_cap=self.config.step_cap, config=self.config)
        self.emit(format_report(report))
        if report.step_capped:
            self.status(f"⏳ {report.step_capped} runs hit the step cap")
        return EXIT_OK


def run_cli(argv: Optional[List[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Run one invocation and return its exit code."""
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return AnalysisCLI(args, out, err).run()
    except SystemExit as exc:
        # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except UsageError as exc:
        print(f"❌ {exc}", file=err)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"❌ Parse error: {exc}", file=err)
        return EXIT_USAGE
    except NotOrdinaryProgramError as exc:
        print(f"❌ {exc}", file=err)
        return EXIT_USAGE
    except (FrontierCapExceeded, StateCapExceeded) as exc:
        print(f"❌ {exc}", file=err)
        return EXIT_CAP
    except (OSError, ValueError) as exc:
        print(f"❌ Error: {exc}", file=err)
        return EXIT_USAGE


def main():
    """Main entry point"""
    try:
        sys.exit(run_cli(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n👋 Interrupted", file=sys.stderr)
        sys.exit(130)
