#!/usr/bin/env python3
"""
CLI for spectral adversarial representation learning runs
"""
import logging
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional, Tuple

import click
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from app.config import settings
from app.datasets import SplitSpec, load_csv, load_dataset_spec, split
from app.engine.bisection import bisect_alpha
from app.engine.bounds import Bounds, compute_bounds
from app.engine.evaluation import evaluate_embeddings, evaluate_encoder
from app.engine.kernels import MEDIAN_HEURISTIC, fit_kernel_model
from app.engine.solver import Problem, SolverConfig, build_problem_kernel, build_problem_linear, embed, feature_weights, solve
from app.engine.sweep import default_grid, sweep_solutions
from app.errors import EXIT_IO, EXIT_OK, EXIT_USAGE, InvalidLabel, SarlError
from app.generators import MixtureGenerator
from app.models import Dataset, SolverMode, TradeoffPoint
from app.schemas import (
    BisectionReport,
    BoundsReport,
    EvaluationSummary,
    KernelConfig,
    PointReport,
    RunConfig,
    RunReport,
)
from app.storage import load_encoder, read_embeddings, save_encoder, write_embeddings, write_report, write_tradeoff_csv
from app.validators import RunConfigValidator

console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger("sarl")

BOUND_SLACK = 1e-9


class SarlGroup(click.Group):
    """Click group that maps every failure to one documented exit code."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            err_console.print("Aborted!")
            sys.exit(1)
        except SarlError as e:
            err_console.print(f"[red]Error:[/red] {e.detail}")
            sys.exit(e.exit_code)
        except ValidationError as e:
            err_console.print(f"[red]Invalid configuration:[/red] {e}")
            sys.exit(EXIT_USAGE)
        except OSError as e:
            err_console.print(f"[red]I/O error:[/red] {e}")
            sys.exit(EXIT_IO)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


@click.group(cls=SarlGroup)
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
def cli(verbose: bool):
    """Spectral adversarial representation learning - global optima, bounds and trade-off sweeps"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


# ================================================================
# SHARED OPTIONS AND HELPERS
# ================================================================

def data_options(f):
    """Dataset, split and kernel options shared by bounds, solve and sweep."""
    options = [
        click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False), help="Training CSV (or the file to split)"),
        click.option("--test", "test_path", type=click.Path(dir_okay=False), help="Test CSV, encoded with the training statistics"),
        click.option("--spec", "spec_path", required=True, type=click.Path(dir_okay=False), help="Dataset spec JSON"),
        click.option("--train-fraction", type=float, help="Split --data into train/test with this fraction"),
        click.option("--seed", default=0, help="Seed for splits and the bandwidth subsample"),
        click.option("--standardize/--no-standardize", default=None, help="Override the spec's standardization flag"),
        click.option("--mode", type=click.Choice([m.value for m in SolverMode]), default=SolverMode.LINEAR.value),
        click.option("--kernel", "kernel_family", type=click.Choice(["linear", "polynomial", "rbf"]), help="Kernel family (kernel mode)"),
        click.option("--degree", type=int, help="Polynomial degree"),
        click.option("--coef0", type=float, help="Polynomial offset"),
        click.option("--bandwidth", help=f"RBF bandwidth or '{MEDIAN_HEURISTIC}'"),
        click.option("--out", "output_dir", default=settings.OUTPUT_DIR, show_default=True, type=click.Path(file_okay=False)),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _kernel_config(kernel_family, degree, coef0, bandwidth, mode: str) -> Optional[KernelConfig]:
    given = {k: v for k, v in (("family", kernel_family), ("degree", degree), ("coef0", coef0)) if v is not None}
    if bandwidth is not None:
        try:
            given["bandwidth"] = float(bandwidth)
        except ValueError:
            given["bandwidth"] = bandwidth
    if not given and mode != SolverMode.KERNEL.value:
        return None
    return KernelConfig(**given)


def _run_config(command: str, **values) -> RunConfig:
    kernel = _kernel_config(
        values.pop("kernel_family", None), values.pop("degree", None), values.pop("coef0", None),
        values.pop("bandwidth", None), values.get("mode", SolverMode.LINEAR.value),
    )
    config = RunConfig(command=command, kernel=kernel, **values)
    result = RunConfigValidator.validate(config)
    if not result["valid"]:
        raise click.UsageError("; ".join(result["errors"]))
    return config


def _load(config: RunConfig) -> Tuple[Dataset, Optional[Dataset]]:
    spec = load_dataset_spec(config.spec_path)
    if config.standardize is not None:
        spec = spec.model_copy(update={"standardize": config.standardize})
    if config.test_path is not None:
        train = load_csv(config.data_path, spec)
        return train, load_csv(config.test_path, spec, reference=train)
    dataset = load_csv(config.data_path, spec)
    if config.train_fraction is not None:
        return split(dataset, SplitSpec(train_fraction=config.train_fraction, seed=config.seed))
    return dataset, None


def _problem(config: RunConfig, train: Dataset) -> Problem:
    if config.mode == SolverMode.KERNEL:
        model = fit_kernel_model((config.kernel or KernelConfig()).to_spec(), train.X, seed=config.seed)
        return build_problem_kernel(model, train.Y, train.S)
    return build_problem_linear(train.X, train.Y, train.S)


def _solver_config(config: RunConfig, lam: float = 0.5) -> SolverConfig:
    return SolverConfig(
        lam=lam, max_rank=config.max_rank, include_zero_eigenvectors=config.include_zero_eigenvectors,
    )


def _report(config: RunConfig, train: Dataset, test: Optional[Dataset], problem: Optional[Problem] = None) -> RunReport:
    report = RunReport(
        config=config,
        n_train=train.n_samples,
        n_test=None if test is None else test.n_samples,
        rho=None if problem is None else problem.rho,
        rng={"algorithm": settings.RNG_ALGORITHM, "seed": config.seed},
    )
    if problem is not None and problem.kernel is not None:
        report.resolved_bandwidth = problem.kernel.resolved_bandwidth
    return report


def _check_sandwich(bounds: Bounds, points: List[TradeoffPoint]):
    for point in points:
        if not bounds.contains_alpha(point.J_s, slack=BOUND_SLACK):
            logger.warning("J_s=%.12g at lambda=%.6g lies outside [alpha_min, alpha_max]", point.J_s, point.lam)


def _bounds_table(bounds: Bounds) -> Table:
    table = Table(title="Attainable MSE bounds")
    table.add_column("Bound", style="cyan")
    table.add_column("Value", justify="right", style="green")
    for name, value in bounds.to_dict().items():
        table.add_row(name, f"{value:.6g}")
    return table


def _points_table(points: List[TradeoffPoint], title: str) -> Table:
    table = Table(title=title)
    table.add_column("lambda", justify="right")
    table.add_column("r", justify="right", style="magenta")
    table.add_column("J_y", justify="right", style="green")
    table.add_column("J_s", justify="right", style="yellow")
    evaluated = any(p.target_accuracy is not None for p in points)
    if evaluated:
        table.add_column("target acc", justify="right")
        table.add_column("adversary acc", justify="right")
    for p in points:
        row = [f"{p.lam:.4g}", str(p.r), f"{p.J_y:.6g}", f"{p.J_s:.6g}"]
        if evaluated:
            row += [f"{p.target_accuracy:.4f}", f"{p.adversary_accuracy:.4f}"]
        table.add_row(*row)
    return table


def _evaluation_panel(summary: EvaluationSummary) -> Panel:
    return Panel(
        f"target accuracy    {summary.target_accuracy:.4f}  (prior {summary.target_prior:.4f})\n"
        f"adversary accuracy {summary.adversary_accuracy:.4f}  (prior {summary.adversary_prior:.4f})\n"
        f"delta*             {summary.delta_star:.4f}",
        title=f"Frozen encoder, r={summary.r}",
    )


def _sidecar(path: str, tag: str) -> Path:
    """z_test.csv -> z_test.<tag>.json, next to the file it describes."""
    p = Path(path)
    return p.with_name(f"{p.stem}.{tag}.json")


@contextmanager
def _stage(timings: dict, stage: str):
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = timings.get(stage, 0.0) + time.perf_counter() - start


# ================================================================
# COMMANDS
# ================================================================

@cli.command()
@click.option("--n", "n", default=5000, show_default=True, help="Total samples (multiple of 4)")
@click.option("--seed", default=0, show_default=True)
@click.option("--train-fraction", default=settings.TRAIN_FRACTION, show_default=True)
@click.option("--out", "out", required=True, type=click.Path(file_okay=False), help="Output directory")
def synth(n: int, seed: int, train_fraction: float, out: str):
    """Generate the Gaussian-mixture train/test CSVs and their dataset spec"""
    config = _run_config("synth", n_samples=n, seed=seed, train_fraction=train_fraction, output_dir=out)
    timings = {}
    with _stage(timings, "generate"):
        dataset = MixtureGenerator.generate(n, seed=seed)
        train, test = split(dataset, SplitSpec(train_fraction=train_fraction, seed=seed))
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with _stage(timings, "write"):
        for name, part in (("train.csv", train), ("test.csv", test)):
            MixtureGenerator.to_frame(part).to_csv(out_dir / name, index=False, float_format=settings.FLOAT_FORMAT)
        (out_dir / "spec.json").write_text(MixtureGenerator.dataset_spec().model_dump_json(indent=2), encoding="utf-8")
    report = _report(config, train, test)
    report.timings = timings
    path = write_report(out_dir / "report.json", report)
    console.print(
        f"[green]Wrote {train.n_samples} training and {test.n_samples} test samples to {out_dir}[/green] "
        f"(rng {settings.RNG_ALGORITHM}, seed {seed}); report to {path}"
    )


@cli.command()
@data_options
def bounds(**options):
    """Compute the attainable target/adversary MSE bounds"""
    config = _run_config("bounds", **options)
    train, test = _load(config)
    problem = _problem(config, train)
    result = compute_bounds(problem)
    report = _report(config, train, test, problem)
    report.bounds = BoundsReport(**result.to_dict())
    console.print(_bounds_table(result))
    path = write_report(Path(config.output_dir) / "bounds.json", report)
    console.print(f"[green]Report written to {path}[/green]")


@cli.command("solve")
@data_options
@click.option("--lambda", "lam", type=float, help="Trade-off weight in [0, 1]")
@click.option("--alpha-tol", type=float, help="Tolerable adversary MSE (runs bisection)")
@click.option("--epsilon", type=float, help="Bisection tolerance on J_s")
@click.option("--max-iter", default=settings.BISECT_MAX_ITER, show_default=True)
@click.option("--include-zero/--minimal-rank", "include_zero_eigenvectors", default=False)
@click.option("--max-rank", type=int)
@click.option("--evaluate", is_flag=True, help="Train logistic heads on the frozen encoder")
def solve_cmd(**options):
    """Solve one trade-off (--lambda) or bisect to a leakage target (--alpha-tol)"""
    config = _run_config("solve", **options)
    timings = {}
    with _stage(timings, "load"):
        train, test = _load(config)
    with _stage(timings, "problem"):
        problem = _problem(config, train)
        bounds_ = compute_bounds(problem)
    report = _report(config, train, test, problem)
    report.bounds = BoundsReport(**bounds_.to_dict())

    with _stage(timings, "solve"):
        if config.alpha_tol is not None:
            result = bisect_alpha(
                problem, config.alpha_tol, config.epsilon, max_iter=config.max_iter,
                config=_solver_config(config), bounds=bounds_,
            )
            encoder, J_y, J_s = result.encoder, result.J_y, result.J_s
            report.bisection = BisectionReport(
                alpha_tol=config.alpha_tol, epsilon=config.epsilon, iterations=result.iterations,
                trace=[{"lambda": step.lam, "J_s": step.J_s} for step in result.trace],
            )
        else:
            encoder, J_y, J_s = solve(problem, _solver_config(config, config.lam))

    point = TradeoffPoint(lam=encoder.lam, r=encoder.r, J_y=J_y, J_s=J_s)
    _check_sandwich(bounds_, [point])
    if config.evaluate:
        with _stage(timings, "evaluate"):
            evaluation = evaluate_encoder(encoder, train, test)
        report.evaluation = EvaluationSummary(**evaluation.to_dict())
        point = point.with_accuracies(evaluation.target_accuracy, evaluation.adversary_accuracy)
    report.points = [PointReport(**vars(point))]
    if encoder.mode == SolverMode.LINEAR:
        report.feature_weights = feature_weights(encoder, train.feature_names)

    out_dir = Path(config.output_dir)
    report.encoder_path = str(save_encoder(encoder, out_dir / "encoder"))
    report.timings = timings
    path = write_report(out_dir / "report.json", report)

    console.print(_points_table([point], "Solution"))
    if report.evaluation is not None:
        console.print(_evaluation_panel(report.evaluation))
    console.print(f"[green]Encoder written to {report.encoder_path}; report to {path}[/green]")


@cli.command()
@data_options
@click.option("--grid", help="Comma-separated lambda values")
@click.option("--points", default=settings.SWEEP_POINTS, show_default=True, help="Evenly spaced lambdas when no --grid")
@click.option("--include-zero/--minimal-rank", "include_zero_eigenvectors", default=False)
@click.option("--max-rank", type=int)
@click.option("--workers", default=settings.SWEEP_WORKERS, show_default=True)
@click.option("--evaluate", is_flag=True, help="Add test accuracies for every lambda")
def sweep(grid: Optional[str], points: int, **options):
    """Solve a lambda grid and write the trade-off table"""
    try:
        lambda_grid = [float(v) for v in grid.split(",")] if grid else default_grid(points)
    except ValueError:
        raise click.BadParameter(f"cannot parse lambda grid {grid!r}", param_hint="--grid")
    config = _run_config("sweep", lambda_grid=lambda_grid, **options)
    timings = {}
    with _stage(timings, "load"):
        train, test = _load(config)
    with _stage(timings, "problem"):
        problem = _problem(config, train)
        bounds_ = compute_bounds(problem)
    with _stage(timings, "sweep"):
        solutions = sweep_solutions(problem, lambda_grid, config=_solver_config(config), workers=config.workers)
    results = [TradeoffPoint(lam=s.encoder.lam, r=s.encoder.r, J_y=s.J_y, J_s=s.J_s) for s in solutions]
    _check_sandwich(bounds_, results)

    if config.evaluate:
        with _stage(timings, "evaluate"):
            evaluated = []
            for solution, point in zip(solutions, results):
                evaluation = evaluate_encoder(solution.encoder, train, test)
                evaluated.append(point.with_accuracies(evaluation.target_accuracy, evaluation.adversary_accuracy))
            results = evaluated

    out_dir = Path(config.output_dir)
    write_tradeoff_csv(out_dir / "tradeoff.csv", results)
    report = _report(config, train, test, problem)
    report.bounds = BoundsReport(**bounds_.to_dict())
    report.points = [PointReport(**vars(p)) for p in results]
    report.timings = timings
    path = write_report(out_dir / "report.json", report)

    console.print(_bounds_table(bounds_))
    console.print(_points_table(results, f"Trade-off sweep ({problem.mode.value})"))
    console.print(f"[green]Trade-off table written to {out_dir / 'tradeoff.csv'}; report to {path}[/green]")


@cli.command("embed")
@click.option("--encoder", "encoder_path", required=True, type=click.Path(dir_okay=False))
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False))
@click.option("--spec", "spec_path", required=True, type=click.Path(dir_okay=False))
@click.option("--reference", "reference_path", type=click.Path(dir_okay=False), help="Training CSV whose encoding statistics to reuse")
@click.option("--out", "out", required=True, type=click.Path(dir_okay=False), help="Embedding CSV to write")
def embed_cmd(encoder_path: str, data_path: str, spec_path: str, reference_path: Optional[str], out: str):
    """Write embeddings of a dataset through a stored encoder (report in <out>.report.json)"""
    config = _run_config(
        "embed", encoder_path=encoder_path, data_path=data_path, spec_path=spec_path,
        reference_path=reference_path, output_path=out,
    )
    timings = {}
    with _stage(timings, "load"):
        encoder = load_encoder(encoder_path)
        spec = load_dataset_spec(spec_path)
        reference = load_csv(reference_path, spec) if reference_path else None
        dataset = load_csv(data_path, spec, reference=reference)
    with _stage(timings, "embed"):
        Z = embed(encoder, dataset.X)
    write_embeddings(out, Z, dataset.y_labels, dataset.s_labels)
    report = RunReport(
        config=config,
        n_train=None if reference is None else reference.n_samples,
        n_embedded=dataset.n_samples,
        encoder_path=encoder_path,
        timings=timings,
    )
    if encoder.kernel is not None:
        report.resolved_bandwidth = encoder.kernel.resolved_bandwidth
    path = write_report(_sidecar(out, "report"), report)
    console.print(f"[green]Wrote {dataset.n_samples} embeddings (r={encoder.r}) to {out}; report to {path}[/green]")


@cli.command("eval")
@click.option("--train", "train_path", required=True, type=click.Path(dir_okay=False), help="Training embeddings CSV")
@click.option("--test", "test_path", required=True, type=click.Path(dir_okay=False), help="Test embeddings CSV")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Report JSON [default: <test>.eval.json]")
def eval_cmd(train_path: str, test_path: str, report_path: Optional[str]):
    """Fit target/adversary logistic heads on stored embeddings and report test accuracy"""
    report_path = report_path or str(_sidecar(test_path, "eval"))
    config = _run_config("eval", data_path=train_path, test_path=test_path, output_path=report_path)
    timings = {}
    with _stage(timings, "load"):
        Z_train, y_train, s_train = read_embeddings(train_path)
        Z_test, y_test, s_test = read_embeddings(test_path)
    if any(labels is None for labels in (y_train, s_train, y_test, s_test)):
        raise InvalidLabel("Embedding files need y_label and s_label columns")
    with _stage(timings, "evaluate"):
        evaluation = evaluate_embeddings(Z_train, y_train, s_train, Z_test, y_test, s_test)
    summary = EvaluationSummary(**evaluation.to_dict())
    report = RunReport(
        config=config, n_train=Z_train.shape[1], n_test=Z_test.shape[1], evaluation=summary, timings=timings,
    )
    path = write_report(report_path, report)
    console.print(_evaluation_panel(summary))
    console.print(f"[green]Evaluation written to {path}[/green]")



if __name__ == "__main__":
    cli()
