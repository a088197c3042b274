"""
cmdkit command line.

    build      CMD summary, optional DOT export
    validate   model invariant check (exit 1 on violations)
    diff       classified changes between two model versions
    impact     method-level (and class-level) impact of the changes
    order      integration / regression test order with stub plans
    coverage   interaction coverage of a trace file
    select     regression test selection and prioritization
    stats      class-level vs. CMD-level graph metrics
    increment  diff, impact, strategy and selection in one pass
    store      split a trace file into a persisted trace store

Exit codes: 0 success, 1 findings (violations, unmet --require), 2 usage or
input errors.
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import click

from analysis import IncrementPipeline
from analysis.change_analysis import (
    ImpactAnalyzer,
    class_level_impact,
    impact,
    methods_in_classes,
    reduction_ratio,
)
from analysis.cmd_graph import EdgeLabel, build_cmd
from analysis.coverage import Criterion, CoverageEvaluator
from analysis.dot_export import export_dot
from analysis.regression_select import SelectionGranularity, select_tests
from analysis.test_strategy import generate_strategy
from config.config import Config
from dsl.model_parser import parse_model
from dsl.trace_parser import parse_traces
from dsl.trace_store_io import load_trace_store, save_trace_store
from models.errors import CmdKitError
from models.program_model import ProgramModel, validate
from models.trace import TraceStore

from .report import TABLE, TSV, render_rows, stats, stats_lines

logger = logging.getLogger(__name__)

FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
TRACES = click.Path(exists=True, path_type=Path)


class CliError(click.ClickException):
    """An input problem reported by the library; printed to stderr, exit code 2."""
    exit_code = 2


def reports_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CmdKitError as e:
            raise CliError(str(e)) from e
    return wrapper


def _config(ctx: click.Context) -> Config:
    return ctx.obj["config"]


def _fmt(ctx: click.Context) -> str:
    return ctx.obj["format"]


def emit(ctx: click.Context, rows: Iterable[Sequence[str]]) -> None:
    """One line per row: space separated, or tab separated under --format tsv."""
    sep = "\t" if _fmt(ctx) == TSV else " "
    for row in rows:
        click.echo(sep.join(row))


def read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise CliError(f"{path}: not valid UTF-8 (byte {e.start})") from e


def read_model(path: Path, check: bool = True) -> ProgramModel:
    model = parse_model(read_text(path), model_id=path.stem, file=str(path))
    if check:
        report = validate(model)
        if not report.ok:
            first = report.violations[0]
            raise CliError(f"{path}: invalid model ({len(report)} violation(s)); first: "
                           f"{first.code.value} {first.message}")
    return model


def read_traces(path: Path, model: Optional[ProgramModel], ctx: click.Context) -> TraceStore:
    """A .trc file, or a directory written by `store`."""
    if path.is_dir():
        return load_trace_store(path, model)
    default_criticality = _config(ctx).selection.default_criticality
    return parse_traces(read_text(path), model=model, file=str(path),
                        default_criticality=default_criticality)


def _specs(raw: Optional[str]) -> List[str]:
    if not raw:
        return []
    return [tag.strip() for tag in raw.split(",") if tag.strip()]


@click.group()
@click.option("--format", "fmt", type=click.Choice([TABLE, TSV]), default=None,
              help="Output layout (default from CMDKIT_FORMAT or table).")
@click.option("-v", "--verbose", is_flag=True, help="Log debug output to stderr.")
@click.option("-q", "--quiet", is_flag=True, help="Only log errors.")
@click.pass_context
def cli(ctx: click.Context, fmt: Optional[str], verbose: bool, quiet: bool) -> None:
    """Class Message Diagram toolkit: change impact, test order, coverage and regression selection."""
    config = Config()
    level = "DEBUG" if verbose else "ERROR" if quiet else config.logging.level
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format=config.logging.format,
                        stream=sys.stderr)
    ctx.ensure_object(dict)
    ctx.obj["config"] = config
    ctx.obj["format"] = fmt or config.report.format


@cli.command()
@click.argument("model_file", type=FILE)
@click.option("--dot", "dot_file", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the CMD as Graphviz DOT to this file.")
@click.pass_context
@reports_errors
def build(ctx: click.Context, model_file: Path, dot_file: Optional[Path]) -> None:
    """Build the CMD of MODEL_FILE and summarize it."""
    cmd = build_cmd(read_model(model_file))
    rows = [("Method nodes", str(len(cmd.method_nodes))), ("Data nodes", str(len(cmd.data_nodes)))]
    rows += [(f"{label.value} edges", str(len(cmd.edges_labeled(label)))) for label in EdgeLabel]
    for line in render_rows(rows, _fmt(ctx)):
        click.echo(line)
    if dot_file is not None:
        dot_file.write_text(export_dot(cmd), encoding="utf-8")
        logger.info(f"Wrote {dot_file}")


@cli.command(name="validate")
@click.argument("model_file", type=FILE)
@click.pass_context
@reports_errors
def validate_cmd(ctx: click.Context, model_file: Path) -> None:
    """Check MODEL_FILE against the model invariants."""
    report = validate(read_model(model_file, check=False))
    emit(ctx, [(v.code.value, v.message) for v in report.violations])
    if not report.ok:
        ctx.exit(1)


@cli.command()
@click.argument("old_file", type=FILE)
@click.argument("new_file", type=FILE)
@click.pass_context
@reports_errors
def diff(ctx: click.Context, old_file: Path, new_file: Path) -> None:
    """List the changes from OLD_FILE to NEW_FILE."""
    changes = ImpactAnalyzer(read_model(old_file), read_model(new_file)).diff()
    emit(ctx, [(e.kind.value, e.granularity.value, e.subject) for e in changes.entries])


@cli.command(name="impact")
@click.argument("old_file", type=FILE)
@click.argument("new_file", type=FILE)
@click.option("--class-level", is_flag=True, help="Also report the class-level baseline and reduction ratio.")
@click.pass_context
@reports_errors
def impact_cmd(ctx: click.Context, old_file: Path, new_file: Path, class_level: bool) -> None:
    """Methods and variables impacted by the changes from OLD_FILE to NEW_FILE."""
    analyzer = ImpactAnalyzer(read_model(old_file), read_model(new_file))
    impacted = impact(analyzer.cmd_new, analyzer.diff())
    emit(ctx, [tuple(line.split(" ", 1)) for line in impacted.lines(analyzer.cmd_new.node_key)])
    if class_level:
        classes = class_level_impact(analyzer.new, impacted.seed, analyzer.cmd_new)
        total = methods_in_classes(analyzer.new, classes)
        emit(ctx, [("class", name) for name in sorted(classes)])
        emit(ctx, [("reduction", f"{reduction_ratio(len(impacted.methods), total):.4f}")])


@cli.command()
@click.argument("model_file", type=FILE)
@click.option("--impacted-from", "old_file", type=FILE,
              help="Restrict the order to methods impacted since this older model.")
@click.option("--top-down", is_flag=True, help="Emit levels top-down instead of bottom-up.")
@click.option("--dot", "dot_file", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the strategy as Graphviz DOT to this file.")
@click.pass_context
@reports_errors
def order(ctx: click.Context, model_file: Path, old_file: Optional[Path], top_down: bool,
          dot_file: Optional[Path]) -> None:
    """Test order for MODEL_FILE, one `level <k>: <item>` line per item."""
    top_down = top_down or _config(ctx).strategy.direction == "top-down"
    model = read_model(model_file)
    if old_file is not None:
        analyzer = ImpactAnalyzer(read_model(old_file), model)
        strategy = generate_strategy(analyzer.cmd_new, impact(analyzer.cmd_new, analyzer.diff()), top_down)
    else:
        strategy = generate_strategy(build_cmd(model), top_down=top_down)
    for line in strategy.lines():
        click.echo(line)
    if dot_file is not None:
        dot_file.write_text(export_dot(strategy), encoding="utf-8")


@cli.command()
@click.argument("model_file", type=FILE)
@click.argument("trace_file", type=TRACES)
@click.option("--criterion", default=Criterion.POLY_MESSAGE.value, show_default=True,
              type=click.Choice([c.value for c in Criterion] + ["all"]))
@click.option("--cycle-cap", type=click.IntRange(min=1), help="Limit on enumerated simple cycles.")
@click.option("--require", type=click.FloatRange(0.0, 1.0),
              help="Exit 1 unless every reported ratio reaches this value.")
@click.pass_context
@reports_errors
def coverage(ctx: click.Context, model_file: Path, trace_file: Path, criterion: str,
             cycle_cap: Optional[int], require: Optional[float]) -> None:
    """Coverage of TRACE_FILE (a .trc file or stored directory) on the CMD of MODEL_FILE."""
    config = _config(ctx)
    model = read_model(model_file)
    traces = read_traces(trace_file, model, ctx)
    evaluator = CoverageEvaluator(build_cmd(model), cycle_cap=cycle_cap or config.coverage.cycle_cap,
                                  path_cap=config.coverage.path_cap)
    if criterion == "all":
        reports = evaluator.evaluate_all(traces)
    else:
        reports = [evaluator.evaluate(Criterion(criterion), traces)]

    sep = "\t" if _fmt(ctx) == TSV else " "
    for report in reports:
        click.echo(sep.join([report.criterion.value, f"{report.covered}/{report.required}", f"{report.ratio:.4f}"]))
        for item in report.uncovered:
            click.echo(f"  uncovered {item}")
    if require is not None and any(r.ratio < require for r in reports):
        ctx.exit(1)


@cli.command()
@click.argument("old_file", type=FILE)
@click.argument("new_file", type=FILE)
@click.argument("trace_file", type=TRACES)
@click.option("--changed-specs", help="Comma-separated spec tags whose expected behavior changed.")
@click.option("--granularity", type=click.Choice([g.value for g in SelectionGranularity]), default=None)
@click.pass_context
@reports_errors
def select(ctx: click.Context, old_file: Path, new_file: Path, trace_file: Path,
           changed_specs: Optional[str], granularity: Optional[str]) -> None:
    """Tests from TRACE_FILE (captured on OLD_FILE; a .trc file or stored directory) to rerun for NEW_FILE."""
    old = read_model(old_file)
    analyzer = ImpactAnalyzer(old, read_model(new_file))
    impacted = impact(analyzer.cmd_new, analyzer.diff())
    store = read_traces(trace_file, old, ctx)
    result = select_tests(store, impacted, _specs(changed_specs),
                          granularity or _config(ctx).selection.granularity)
    emit(ctx, [tuple(line.split(" ", 1)) for line in result.lines()])


@cli.command(name="stats")
@click.argument("model_file", type=FILE)
@click.pass_context
@reports_errors
def stats_cmd(ctx: click.Context, model_file: Path) -> None:
    """Graph metrics of MODEL_FILE at class and CMD level."""
    for line in stats_lines(stats(read_model(model_file)), _fmt(ctx)):
        click.echo(line)


@cli.command()
@click.argument("old_file", type=FILE)
@click.argument("new_file", type=FILE)
@click.argument("trace_file", type=TRACES, required=False)
@click.option("--changed-specs", help="Comma-separated spec tags whose expected behavior changed.")
@click.pass_context
@reports_errors
def increment(ctx: click.Context, old_file: Path, new_file: Path, trace_file: Optional[Path],
              changed_specs: Optional[str]) -> None:
    """Run the whole per-increment loop from OLD_FILE to NEW_FILE."""
    old = read_model(old_file)
    pipeline = IncrementPipeline(_config(ctx), old, read_model(new_file))
    store = read_traces(trace_file, old, ctx) if trace_file is not None else None
    result = pipeline.run(store, _specs(changed_specs))

    click.echo("# changes")
    emit(ctx, [(e.kind.value, e.granularity.value, e.subject) for e in result.changes.entries])
    click.echo("# impact")
    emit(ctx, [tuple(line.split(" ", 1)) for line in result.impact.lines(pipeline.cmd_new.node_key)])
    emit(ctx, [("class", name) for name in sorted(result.impacted_classes)])
    emit(ctx, [("reduction", f"{result.reduction:.4f}")])
    click.echo("# strategy")
    for line in result.strategy.lines():
        click.echo(line)
    if result.selection is not None:
        click.echo("# selection")
        emit(ctx, [tuple(line.split(" ", 1)) for line in result.selection.lines()])


@cli.command()
@click.argument("trace_file", type=FILE)
@click.argument("directory", type=click.Path(file_okay=False, path_type=Path))
@click.option("--model", "model_file", type=FILE, help="Resolve and check traces against this model.")
@click.pass_context
@reports_errors
def store(ctx: click.Context, trace_file: Path, directory: Path, model_file: Optional[Path]) -> None:
    """Persist TRACE_FILE as one .trc per test plus index.tsv in DIRECTORY."""
    model = read_model(model_file) if model_file is not None else None
    traces = read_traces(trace_file, model, ctx)
    if traces.model_id is None and model is not None:
        traces.model_id = model.model_id
    save_trace_store(traces, directory)
    emit(ctx, [("stored", str(len(traces)), str(directory))])


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return its exit code instead of exiting."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="cmdkit",
                          standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return result if isinstance(result, int) else 0
