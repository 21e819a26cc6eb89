"""
Command-line interface for the TL1 matrix completion toolkit
"""

import functools
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import pandas as pd
from pydantic import ValidationError

from config import settings
from . import __version__
from .admm import solve as run_solver
from .errors import MatrixCompletionError, NumericalError
from .evaluation.campaign import CampaignConfig, run_campaign_config
from .evaluation.metrics import relative_error
from .evaluation.presets import PRESETS, get_preset
from .evaluation.tuning import (
    TuningContext,
    TuningGrid,
    TuningObjective,
    a_sweep,
    grid_search,
    synthetic_zeta,
)
from .logging_config import setup_logging
from .models import Regularizer, SolverConfig
from .services.prox_check_service import ProxCheckService
from .services.realdata_service import DATASET_PARSERS, RealDataService
from .synthetic import SamplingScheme, ScenarioSpec, make_instance
from .utils.file_parser import (
    read_entries,
    read_json,
    read_matrix,
    read_observations,
    write_frame,
    write_json,
    write_matrix,
    write_observations,
)

logger = logging.getLogger(__name__)

EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
METHODS = click.Choice([r.value for r in Regularizer])


def handle_errors(func):
    """Map package failures onto the CLI exit codes"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except NumericalError as exc:
            click.echo(f"❌ Numerical failure: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_NUMERICAL)
        except (MatrixCompletionError, ValidationError, ValueError, KeyError, FileNotFoundError) as exc:
            click.echo(f"❌ {exc}", err=True)
            raise click.exceptions.Exit(EXIT_USAGE)
    return wrapper


def _output_dir(path: Optional[Path], command: str) -> Path:
    if path is None:
        settings.create_directories()
    directory = Path(path) if path is not None else settings.OUTPUT_DIR / command
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _given(**options: Any) -> Dict[str, Any]:
    return {key: value for key, value in options.items() if value is not None}


def _load_grid(path: Optional[Path]) -> TuningGrid:
    return TuningGrid.model_validate(read_json(path)) if path is not None else TuningGrid()


def _parse_floats(text: str) -> List[float]:
    try:
        return [float(token) for token in text.split(",") if token.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got '{text}'") from exc


@click.group()
@click.version_option(__version__)
@click.option("--log-level", default=None, help="Overrides LOG_LEVEL")
@click.option("--log-file", default=None, help="Overrides LOG_FILE")
def cli(log_level: Optional[str], log_file: Optional[str]):
    """TL1-regularized matrix completion: solver, benchmarks and real-data evaluation"""
    errors = settings.validate_config()
    if errors:
        raise click.UsageError("Invalid configuration: " + "; ".join(errors))
    setup_logging(log_level or settings.LOG_LEVEL, log_file or settings.LOG_FILE)
    logger.debug("Using %s", type(settings).__name__)


@cli.command()
@click.option("--scheme", type=click.Choice(["1", "2", "3"]), default="1", show_default=True)
@click.option("--m1", type=int, required=True)
@click.option("--m2", type=int, required=True)
@click.option("--rank", "r", type=int, required=True)
@click.option("--sr", "sampling_ratio", type=float, required=True, help="Sampling ratio n / (m1 m2)")
@click.option("--snr", "snr_db", type=float, default=None, help="SNR in dB; omit for noiseless data")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@handle_errors
def simulate(scheme, m1, m2, r, sampling_ratio, snr_db, seed, out_dir):
    """Generate a synthetic low-rank matrix and its sampled, noisy observations"""
    spec = ScenarioSpec(
        m1=m1, m2=m2, r=r, scheme=SamplingScheme(int(scheme)), sampling_ratio=sampling_ratio,
        snr_db=snr_db, seed=seed,
    )
    instance = make_instance(spec)
    directory = _output_dir(out_dir, "simulate")

    write_observations(directory / "observations.txt", instance.observations)
    write_matrix(directory / "truth.txt", instance.truth)
    write_json(directory / "scenario.json", {
        "version": __version__,
        "scenario": spec.model_dump(mode="json"),
        "n": instance.observations.n,
        "noise_sigma": instance.noise_sigma,
        "suggested_zeta": synthetic_zeta(instance.truth),
    })
    click.echo(f"✅ {spec.label}: {instance.observations.n} observations written to {directory}")


@cli.command()
@click.option("--obs", "obs_path", type=EXISTING_FILE, required=True)
@click.option("--method", type=METHODS, default=Regularizer.TL1.value, show_default=True)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--a", type=float, default=None)
@click.option("--zeta", type=float, default=None)
@click.option("--rho", type=float, default=None)
@click.option("--tau", type=float, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--max-iters", type=int, default=None)
@click.option("--rank-threshold", type=float, default=None)
@click.option("--truth", "truth_path", type=EXISTING_FILE, default=None, help="Reports RE against it")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@handle_errors
def solve(obs_path, method, lam, a, zeta, rho, tau, tol, max_iters, rank_threshold, truth_path, out_dir):
    """Run ADMM on an observation file"""
    obs = read_observations(obs_path)
    truth = read_matrix(truth_path) if truth_path is not None else None
    if zeta is None and truth is not None:
        zeta = synthetic_zeta(truth)
    config = SolverConfig.model_validate(_given(
        **{"lambda": lam}, a=a, zeta=zeta, rho=rho, tau=tau, tol=tol, max_iters=max_iters,
        rank_threshold=rank_threshold, regularizer=method,
    ))
    report = run_solver(obs, config)

    summary = report.summary()
    summary["version"] = __version__
    summary["observations"] = str(obs_path)
    if truth is not None:
        summary["relative_error"] = relative_error(report.estimate, truth)

    directory = _output_dir(out_dir, "solve")
    write_matrix(directory / "estimate.txt", report.estimate)
    write_json(directory / "report.json", summary)

    status = "✅" if report.converged else "⚠️"
    line = f"{status} {report.iterations} iterations, rank {report.estimated_rank}"
    if "relative_error" in summary:
        line += f", RE {summary['relative_error']:.6g}"
    click.echo(line)


@cli.command()
@click.option("--obs", "obs_path", type=EXISTING_FILE, required=True)
@click.option("--truth", "truth_path", type=EXISTING_FILE, default=None)
@click.option("--validation", "validation_path", type=EXISTING_FILE, default=None)
@click.option("--grid", "grid_path", type=EXISTING_FILE, default=None, help="TuningGrid JSON")
@click.option("--method", type=METHODS, default=None, help="Overrides the grid's regularizer")
@click.option("--workers", type=int, default=settings.MAX_WORKERS, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@handle_errors
def tune(obs_path, truth_path, validation_path, grid_path, method, workers, out_dir):
    """Grid search over (lambda, a) scored by RE against a truth or TRMSE on validation entries"""
    if (truth_path is None) == (validation_path is None):
        raise click.UsageError("Pass exactly one of --truth or --validation")

    obs = read_observations(obs_path)
    grid = _load_grid(grid_path)
    zeta_given = "zeta" in grid.fixed.model_fields_set
    if method is not None:
        grid = grid.with_fixed(regularizer=method)

    if truth_path is not None:
        truth = read_matrix(truth_path)
        objective = TuningObjective.RE_VS_TRUTH
        context = TuningContext(truth=truth)
        if not zeta_given:
            grid = grid.with_fixed(zeta=synthetic_zeta(truth))
    else:
        _, _, validation = read_entries(validation_path)
        objective = TuningObjective.TRMSE_ON_VALIDATION
        context = TuningContext(validation=validation)

    result = grid_search(obs, grid, objective, context, workers)

    directory = _output_dir(out_dir, "tune")
    write_frame(directory / "surface.csv", pd.DataFrame([p.as_row() for p in result.surface]))
    write_json(directory / "best.json", {
        "version": __version__,
        "objective": objective.value,
        "best_score": result.best_score,
        "best_point": result.best_point.as_row(),
        "best_config": result.best_config.to_json_dict(),
        "grid": grid.model_dump(mode="json", by_alias=True),
    })
    click.echo(
        f"✅ best {objective.value} {result.best_score:.6g} at a={result.best_point.a:g}, "
        f"lambda={result.best_point.lambda_multiplier:g} x ||Y||_F"
    )


@cli.command()
@click.option("--campaign", "campaign_path", type=EXISTING_FILE, default=None, help="CampaignConfig JSON")
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None)
@click.option("--trials", type=int, default=None, help="Overrides the campaign's trial count")
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--workers", type=int, default=settings.MAX_WORKERS, show_default=True)
@click.option("--timing/--no-timing", default=False, help="Keep wall-clock seconds in the records CSV")
@handle_errors
def bench(campaign_path, preset, trials, out_dir, workers, timing):
    """Tune once per scenario and method, then evaluate over fresh trials"""
    if (campaign_path is None) == (preset is None):
        raise click.UsageError("Pass exactly one of --campaign or --preset")

    campaign = (
        CampaignConfig.model_validate(read_json(campaign_path))
        if campaign_path is not None else get_preset(preset)
    )
    if trials is not None:
        campaign = CampaignConfig.model_validate({**campaign.model_dump(by_alias=True), "trials": trials})

    result = run_campaign_config(campaign, workers)
    result.metadata["campaign"] = campaign.model_dump(mode="json", by_alias=True)
    result.metadata["preset"] = preset

    directory = _output_dir(out_dir, "bench")
    write_frame(directory / "records.csv", result.records_frame(include_timing=timing))
    write_frame(directory / "aggregates.csv", result.aggregates_frame())
    write_json(directory / "campaign.json", result.to_json_dict())

    for aggregate in result.aggregates:
        click.echo(
            f"{aggregate.scenario} {aggregate.method}: RE {aggregate.mean_relative_error:.4f} "
            f"({aggregate.std_relative_error:.4f}), rank {aggregate.mean_estimated_rank:.1f}"
        )
    click.echo(f"✅ {len(result.records)} trials written to {directory}")


@cli.command()
@click.option("--scenario", "scenario_path", type=EXISTING_FILE, required=True, help="ScenarioSpec JSON")
@click.option("--a-values", default="10,100,1000", show_default=True, help="Comma-separated values of a")
@click.option("--grid", "grid_path", type=EXISTING_FILE, default=None, help="TuningGrid JSON")
@click.option("--workers", type=int, default=settings.MAX_WORKERS, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def asweep(scenario_path, a_values, grid_path, workers, out_path):
    """Best RE and estimated rank as a function of a"""
    scenario = ScenarioSpec.model_validate(read_json(scenario_path))
    grid = _load_grid(grid_path)
    values = _parse_floats(a_values)

    rows = a_sweep(scenario, values, grid, workers)

    if out_path is None:
        out_path = _output_dir(None, "asweep") / "asweep.csv"
    write_frame(out_path, pd.DataFrame([row.as_row() for row in rows]))
    write_json(Path(out_path).with_suffix(".json"), {
        "version": __version__,
        "scenario": scenario.model_dump(mode="json"),
        "a_values": values,
        "grid": grid.model_dump(mode="json", by_alias=True),
        "rows": [row.as_row() for row in rows],
    })
    for row in rows:
        click.echo(f"a={row.a:g}: RE {row.best_relative_error:.4f}, rank {row.estimated_rank}")
    click.echo(f"✅ a-sweep written to {out_path}")


@cli.command()
@click.option("--dataset", type=click.Choice(sorted(DATASET_PARSERS)), required=True)
@click.option("--train", "train_path", type=EXISTING_FILE, required=True)
@click.option("--test", "test_path", type=EXISTING_FILE, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--grid", "grid_path", type=EXISTING_FILE, default=None, help="TuningGrid JSON")
@click.option("--workers", type=int, default=settings.MAX_WORKERS, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@handle_errors
def realdata(dataset, train_path, test_path, seed, grid_path, workers, out_dir):
    """Tune on half the test ratings and report TRMSE and rank on the other half"""
    grid = _load_grid(grid_path)
    service = RealDataService(grid=grid, workers=workers)
    ratings = service.load(dataset, train_path, test_path)
    result = service.evaluate(ratings, seed)

    payload = result.to_json_dict()
    payload.update({
        "version": __version__,
        "train": str(train_path),
        "test": str(test_path),
        "grid": grid.model_dump(mode="json", by_alias=True),
        "validation_fraction": service.validation_fraction,
        "zeta": settings.RATING_ZETA,
        "prediction_bounds": list(service.prediction_bounds),
    })
    directory = _output_dir(out_dir, "realdata")
    write_json(directory / f"{dataset}.json", payload)

    for outcome in result.outcomes:
        click.echo(
            f"{outcome.method}: TRMSE {outcome.evaluation_trmse:.4f}, rank {outcome.estimated_rank}"
        )
    click.echo(f"✅ results written to {directory}")


@cli.command("prox-check")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
@handle_errors
def prox_check(samples, seed, out_path):
    """Compare the closed-form TL1 prox with a brute-force minimizer on random inputs"""
    service = ProxCheckService(samples=samples, seed=seed)
    report = service.run()
    if out_path is None:
        out_path = _output_dir(None, "prox-check") / "prox_check.json"
    write_json(out_path, {"version": __version__, **service.to_json_dict(), **report.to_json_dict()})

    if report.passed:
        click.echo(f"✅ {samples} cases, worst gap {report.worst_gap:.3g}")
        return
    for case in report.violations[:10]:
        click.echo(f"❌ x={case.x:.6g} mu={case.mu:.6g} a={case.a:.6g}: gap {case.gap:.3g}")
    click.echo(f"❌ {len(report.violations)} of {samples} cases violate the oracle")
    raise click.exceptions.Exit(EXIT_VIOLATION)