"""plangen: PDDL problem generation, planning, validation and dataset assembly.

Exit codes: 0 success, 1 negative result (invalid plan, unsolved problem,
DPGC diagnostics), 2 usage or input error, 3 I/O or external tool failure.
Data goes to stdout or files; diagnostics and logs go to stderr.
"""

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from dataset.assembler import assemble, parse_ratios
from dataset.storage import ManifestMismatch, load_tuples, read_split, write_dataset
from dataset.tokens import COUNTERS, DEFAULT_LIMIT, get_counter, token_stats
from dataset.tuples import Encoding, load_batch_dir
from planning.errors import PddlError
from planning.parser import parse_domain, parse_plan, parse_problem
from planning.render import render_domain, render_plan, render_problem
from pipeline.orchestrator import PipelineConfig, PipelineError, run_pipeline
from tools.anonymizer import InconsistentTuple, anonymize_tuple
from tools.codec import DecodeFailure, decode_plan, encode_plan
from tools.curriculum import CurriculumItem
from tools.dpgc import InvalidDpgc, load_dpgc, validate_dpgc
from tools.external import ConversionFailure, ExternalFailure, ExternalSolver, InvalidExternalPlan
from tools.generator import BatchExhausted, SamplingFailure, generate_batch, write_batch
from tools.planner import GroundingExplosion, Heuristic, InternalSolver, SearchConfig, Strategy, Unsolved
from tools.reporting import (
    curriculum_figure,
    token_length_figure,
    valid_plan_rate_figure,
    valid_plan_rate_table,
    write_html_report,
)
from tools.validator import InvalidInputs, Outcome, PlanValidator, format_report, val_cross_check
from training.cost_model import IncompatibleParams, compare, inference_total, load_params, planner_total, rl_total
from training.prompts import export_sft
from training.rewards import DEFAULT_EPSILON, score_candidates, split_candidates
from utils.config import Settings, configure_logging, load_settings
from utils.export import DataExporter
from utils.fileio import IoFailure, atomic_directory, atomic_write_text, read_jsonl, read_text, write_jsonl

logger = logging.getLogger("plangen")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_FAILURE = 3

USAGE_ERRORS = (
    PddlError,
    InvalidDpgc,
    InvalidInputs,
    IncompatibleParams,
    DecodeFailure,
    InconsistentTuple,
    GroundingExplosion,
    ValueError,
)
STREAM = "-"

FAILURE_ERRORS = (IoFailure, OSError, ExternalFailure, ConversionFailure, InvalidExternalPlan, ManifestMismatch)
NEGATIVE_ERRORS = (BatchExhausted, SamplingFailure)


class UsageError(Exception):
    """Invalid flag combination detected after argument parsing."""


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _load_pair(args):
    domain = parse_domain(read_text(args.domain))
    problem = parse_problem(read_text(args.problem), domain, strict_domain_name=args.strict_domain_name)
    return domain, problem


def _seed(args, settings: Settings) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return settings.seed if settings.seed is not None else 0


def _jobs(args, settings: Settings) -> int:
    jobs = getattr(args, "jobs", None)
    return jobs if jobs is not None else settings.jobs


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _read_input(path: Optional[Path]) -> str:
    """Text of ``path``; ``-`` or no path reads standard input."""
    if path is None or str(path) == STREAM:
        return sys.stdin.read()
    return read_text(path)


def _write_output(path: Optional[Path], text: str) -> None:
    """Write ``text`` to ``path``; ``-`` or no path writes standard output."""
    if path is None or str(path) == STREAM:
        _emit(text)
    else:
        atomic_write_text(path, text if text.endswith("\n") else text + "\n")


def _search_config(args, seed: int) -> SearchConfig:
    strategy = Strategy(args.strategy)
    heuristic = Heuristic(args.heuristic) if args.heuristic else (
        Heuristic.ZERO if strategy is Strategy.BREADTH_FIRST else Heuristic.GOAL_COUNT
    )
    options = {"strategy": strategy, "heuristic": heuristic, "seed": seed}
    if args.max_expansions is not None:
        options["max_expansions"] = args.max_expansions
    return SearchConfig(**options)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args, settings: Settings) -> int:
    domain, problem = _load_pair(args)
    report = PlanValidator(domain, problem).validate(read_text(args.plan))
    if args.json:
        _emit(DataExporter.to_json(report.to_dict()))
    else:
        _emit(format_report(report, verbose=args.verbose))

    if args.external_val is not None:
        binary = args.external_val or settings.val_binary
        if not binary:
            raise UsageError("--external-val needs a path or PLANGEN_VAL")
        external = val_cross_check(binary, args.domain, args.problem, args.plan)
        if external is not report.outcome:
            logger.warning("VAL disagrees: %s vs %s", external.value, report.outcome.value)
        else:
            logger.info("VAL agrees: %s", external.value)
    return EXIT_OK if report.is_valid else EXIT_NEGATIVE


def cmd_plan(args, settings: Settings) -> int:
    domain, problem = _load_pair(args)
    if args.external:
        solver = ExternalSolver(args.external, timeout=args.timeout)
    else:
        solver = InternalSolver(_search_config(args, _seed(args, settings)))
    result = solver.solve(domain, problem)
    if isinstance(result, Unsolved):
        sys.stderr.write(f"{result}: {result.message or 'no plan found'} ({result.expansions} expansions)\n")
        return EXIT_NEGATIVE
    text = render_plan(result) + "\n"
    if args.output:
        atomic_write_text(args.output, text)
    else:
        _emit(text)
    return EXIT_OK


def cmd_gen(args, settings: Settings) -> int:
    domain = parse_domain(read_text(args.domain))
    config = load_dpgc(args.dpgc)
    if args.check:
        diagnostics = validate_dpgc(config, domain)
        for diagnostic in diagnostics:
            sys.stderr.write(f"{diagnostic}\n")
        if not diagnostics:
            _emit("ok")
        return EXIT_NEGATIVE if diagnostics else EXIT_OK

    if args.count is None or args.count < 1 or not args.out_dir:
        raise UsageError("gen needs --count >= 1 and --out-dir")
    seed = _seed(args, settings)
    solver = ExternalSolver(args.external, timeout=args.timeout) if args.external else None
    pairs = generate_batch(
        domain,
        config,
        args.count,
        seed,
        planner_cfg=_search_config(args, seed),
        solver=solver,
        solve_problems=not args.no_solve,
        jobs=_jobs(args, settings),
        progress=args.progress,
    )
    write_batch(domain, pairs, args.out_dir, dpgc_file=str(args.dpgc), seed=seed)
    solved = sum(1 for p in pairs if p.solved)
    _emit(f"{len(pairs)} problems, {solved} solved -> {args.out_dir}")
    return EXIT_OK


def cmd_anonymize(args, settings: Settings) -> int:
    domain, problem = _load_pair(args)
    plan = parse_plan(read_text(args.plan))
    new_domain, new_problem, new_plan, symbols = anonymize_tuple(domain, problem, plan)
    with atomic_directory(args.out_dir) as staging:
        (staging / "domain.pddl").write_text(render_domain(new_domain), encoding="utf-8")
        (staging / "problem.pddl").write_text(render_problem(new_problem), encoding="utf-8")
        (staging / "plan.txt").write_text(render_plan(new_plan) + "\n", encoding="utf-8")
    if args.map_out:
        atomic_write_text(args.map_out, symbols.to_json() + "\n")
    _emit(str(args.out_dir))
    return EXIT_OK


def cmd_encode(args, settings: Settings) -> int:
    _write_output(args.output, encode_plan(parse_plan(_read_input(args.plan))))
    return EXIT_OK


def cmd_decode(args, settings: Settings) -> int:
    _write_output(args.output, decode_plan(_read_input(args.compact)))
    return EXIT_OK


def cmd_assemble(args, settings: Settings) -> int:
    ratios = parse_ratios(args.ratios)
    seed = _seed(args, settings)
    tuples = load_batch_dir(args.in_dir, Encoding(args.encoding))
    if not tuples:
        raise UsageError(f"no solved tuples under {args.in_dir}")
    held_out = [d for d in (args.held_out or "").split(",") if d]
    splits = assemble(tuples, ratios, seed, held_out)
    config = {
        "command": "assemble",
        "ratios": list(ratios),
        "seed": seed,
        "encoding": args.encoding,
        "held_out_domains": held_out,
    }
    manifest = write_dataset(splits, tuples, args.out, config)
    _emit(DataExporter.to_markdown_table([{"split": k, "tuples": v} for k, v in manifest.counts.items()]))
    if splits.duplicates:
        sys.stderr.write(f"{len(splits.duplicates)} duplicate tuples discarded (see dedup.log)\n")
    return EXIT_OK


def _validation_rows(tuples):
    rows = []
    for item in tuples:
        try:
            domain = parse_domain(item.domain_text)
            problem = parse_problem(item.problem_text, domain)
            plan_text = decode_plan(item.plan_text) if item.encoding.compact else item.plan_text
            outcome = PlanValidator(domain, problem).validate(plan_text).outcome
        except (PddlError, DecodeFailure, InvalidInputs):
            outcome = Outcome.MALFORMED
        rows.append({"domain": item.domain_name, "outcome": outcome})
    return rows


def cmd_stats(args, settings: Settings) -> int:
    tuples = load_tuples(args.dataset)
    counter = get_counter(args.counter)
    stats = token_stats(tuples, args.limit, counter)
    result = {"tokens": stats.to_dict()}
    rate_table = None
    if args.validate:
        rate_table = valid_plan_rate_table(_validation_rows(tuples))
        result["valid_plan_rate"] = rate_table.to_dict(orient="records")

    if args.json:
        _emit(DataExporter.to_json(result))
    else:
        _emit(DataExporter.frame_to_markdown(stats.to_frame()))
        if rate_table is not None:
            _emit("\n" + DataExporter.frame_to_markdown(rate_table))

    if args.html:
        figures = [token_length_figure(tuples, args.limit, counter)]
        if rate_table is not None:
            figures.append(valid_plan_rate_figure(rate_table))
        curriculum_file = Path(args.dataset) / "train_curriculum.jsonl"
        if curriculum_file.is_file():
            items = [
                CurriculumItem(r["index"], r["source_id"], r["anonymize"], Fraction(r["probability"]))
                for r in read_jsonl(curriculum_file)
            ]
            figures.append(curriculum_figure(items))
        write_html_report(figures, args.html)
    return EXIT_OK


def cmd_score(args, settings: Settings) -> int:
    domain, problem = _load_pair(args)
    candidates = split_candidates(read_text(args.candidates))
    if not candidates:
        raise UsageError(f"no candidates in {args.candidates}")
    group = score_candidates(domain, problem, candidates, tuple_id=args.tuple_id, epsilon=args.epsilon)
    for record, advantage in zip(group.records, group.advantages):
        _emit(f"candidate {record.candidate_index}: {record.outcome.value} reward {record.reward:+.1f} advantage {advantage:+.6f}")
    summary = group.summary()
    _emit(f"valid plan rate: {summary['valid_plan_rate']}%")
    if args.jsonl:
        write_jsonl(args.jsonl, group.to_records())
    return EXIT_OK


def cmd_cost(args, settings: Settings) -> int:
    params_planner, params_rl = load_params(args.params)
    if args.compare:
        comparison = compare(params_planner, params_rl, e_max=args.e_max)
        if args.json:
            _emit(DataExporter.to_json(comparison.to_dict()))
            return EXIT_OK
        rows = [_cost_row(comparison.planner), _cost_row(comparison.rl)]
        _emit(DataExporter.to_markdown_table(rows))
        _emit(f"\ndelta (verifier-reward - planner-based): {comparison.delta:g}")
        _emit(comparison.narrative())
        return EXIT_OK

    reports = [planner_total(params_planner), rl_total(params_rl), inference_total(params_rl)]
    if args.json:
        _emit(DataExporter.to_json([r.to_dict() for r in reports]))
    else:
        _emit(DataExporter.to_markdown_table([_cost_row(r) for r in reports]))
    return EXIT_OK


def _cost_row(report) -> dict:
    return {
        "regime": report.regime,
        "data_generation": f"{report.data_generation:g}",
        "training": f"{report.training:g}",
        "total": f"{report.total:g}",
    }


def cmd_pipeline(args, settings: Settings) -> int:
    config = PipelineConfig.load(args.config)
    # --seed or PLANGEN_SEED replace the file's seed; PLANGEN_JOBS only fills in an unset jobs
    seed = args.seed if getattr(args, "seed", None) is not None else settings.seed
    jobs = getattr(args, "jobs", None)
    if jobs is None and config.jobs == 1:
        jobs = settings.jobs
    result = run_pipeline(config, output=args.out, jobs=jobs, progress=args.progress, seed=seed)
    _emit(f"{result.output}: {result.splits.counts()}")
    return EXIT_OK


def cmd_export_sft(args, settings: Settings) -> int:
    tuples = read_split(args.dataset, args.split)
    count = export_sft(tuples, args.output)
    _emit(f"{count} records -> {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common(suppress: bool) -> argparse.ArgumentParser:
    default = argparse.SUPPRESS if suppress else None
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default, help="random seed (fallback: PLANGEN_SEED)")
    common.add_argument("--jobs", type=int, default=default, help="worker processes (fallback: PLANGEN_JOBS)")
    common.add_argument(
        "--verbose", action="store_true", default=argparse.SUPPRESS if suppress else False,
        help="debug logging and detailed reports",
    )
    return common


def _pair_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--domain", required=True, type=Path)
    parser.add_argument("--problem", required=True, type=Path)
    parser.add_argument(
        "--strict-domain-name", action="store_true",
        help="reject problems whose :domain differs from the domain name",
    )


def _search_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.GREEDY_BEST_FIRST.value)
    parser.add_argument("--heuristic", choices=[h.value for h in Heuristic])
    parser.add_argument("--max-expansions", type=int)
    parser.add_argument("--external", metavar="TEMPLATE",
                        help="external planner command with {domain} {problem} [{plan}] placeholders")
    parser.add_argument("--timeout", type=float, default=ExternalSolver.DEFAULT_TIMEOUT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plangen", description=__doc__.splitlines()[0], parents=[_common(False)])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    common = _common(True)

    p = sub.add_parser("validate", parents=[common], help="validate a plan")
    _pair_args(p)
    p.add_argument("--plan", required=True, type=Path)
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.add_argument("--external-val", nargs="?", const="", metavar="VAL",
                   help="cross-check with a VAL binary (default: PLANGEN_VAL)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", parents=[common], help="solve a problem")
    _pair_args(p)
    _search_args(p)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("gen", parents=[common], help="generate problems from a DPGC")
    p.add_argument("--domain", required=True, type=Path)
    p.add_argument("--dpgc", required=True, type=Path)
    p.add_argument("--count", type=int)
    p.add_argument("--out-dir", type=Path, help="batch directory")
    p.add_argument("--check", action="store_true", help="only report DPGC diagnostics")
    p.add_argument("--no-solve", action="store_true", help="skip planning")
    p.add_argument("--progress", action="store_true")
    _search_args(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("anonymize", parents=[common], help="anonymise one tuple")
    _pair_args(p)
    p.add_argument("--plan", required=True, type=Path)
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--map-out", type=Path, help="write the symbol map as JSON")
    p.set_defaults(func=cmd_anonymize)

    p = sub.add_parser("encode", parents=[common], help="standard plan -> compact")
    p.add_argument("--plan", type=Path, help="standard plan file (default: standard input)")
    p.add_argument("-o", "--output", type=Path, help="compact plan file (default: standard output)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common], help="compact plan -> standard")
    p.add_argument("--compact", type=Path, help="compact plan file (default: standard input)")
    p.add_argument("-o", "--output", type=Path, help="standard plan file (default: standard output)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("assemble", parents=[common], help="assemble batches into a dataset")
    p.add_argument("--in-dir", required=True, type=Path)
    p.add_argument("--ratios", default="0.8,0.2")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default=Encoding.STANDARD.value)
    p.add_argument("--held-out", metavar="DOMAINS", help="comma-separated domains routed to the test split")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("stats", parents=[common], help="token statistics of a dataset")
    p.add_argument("--dataset", required=True, type=Path, help="dataset directory or JSONL file")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--counter", choices=sorted(COUNTERS), default="whitespace")
    p.add_argument("--validate", action="store_true", help="also report per-domain valid plan rates")
    p.add_argument("--json", action="store_true")
    p.add_argument("--html", type=Path, help="write plotly figures to this HTML file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("score", parents=[common], help="reward compact candidate plans")
    _pair_args(p)
    p.add_argument("--candidates", required=True, type=Path)
    p.add_argument("--tuple-id", default="")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--jsonl", type=Path, help="write per-candidate records")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("cost", parents=[common], help="training cost model")
    p.add_argument("--params", required=True, type=Path)
    p.add_argument("--compare", action="store_true")
    p.add_argument("--e-max", type=int, default=1000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("pipeline", parents=[common], help="run an end-to-end pipeline config")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, help="override the config's output directory")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("export-sft", parents=[common], help="export a split as SFT records")
    p.add_argument("--dataset", required=True, type=Path)
    p.add_argument("--split", choices=["train", "validation", "test"], default="train")
    p.add_argument("-o", "--output", required=True, type=Path)
    p.set_defaults(func=cmd_export_sft)

    return parser


def _exit_code(error: BaseException) -> int:
    if isinstance(error, PipelineError) and error.__cause__ is not None:
        return _exit_code(error.__cause__)
    if isinstance(error, FAILURE_ERRORS):
        return EXIT_FAILURE
    if isinstance(error, NEGATIVE_ERRORS):
        return EXIT_NEGATIVE
    if isinstance(error, USAGE_ERRORS + (UsageError,)):
        return EXIT_USAGE
    return EXIT_FAILURE


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = load_settings()
    except ValueError as e:
        sys.stderr.write(f"plangen: {e}\n")
        return EXIT_USAGE
    configure_logging(args.verbose, settings.log_level)

    try:
        return args.func(args, settings)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"plangen {args.command}: {e}\n")
        return EXIT_USAGE
    except Exception as e:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"plangen {args.command}: {type(e).__name__}: {e}\n")
        return _exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
