"""Command-line entry point.

Exit codes: 0 success, 2 input error (missing/malformed files, off-grid
splits), 3 computation failure (estimation or partitioning breakdown),
64 usage error (invalid flag values).  The output directory defaults to the
current directory and can be overridden by --out-dir or the PRODYN_OUT
environment variable (the flag wins).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import files, lti, stepinfo, synth
from .crossval import (DEFAULT_PREDICTOR_THRESHOLD, DEFAULT_STEP_HOURS,
                       evaluate_split, run_protocol)
from .errors import (AllStartsFailed, ProdynError, SegmentTooShort,
                     SplitOffGrid, StepTooLarge)
from .fitting import FitOptions
from .series import ingest_events, normalize

EXIT_INPUT = 2
EXIT_COMPUTE = 3
EXIT_USAGE = 64

click.UsageError.exit_code = EXIT_USAGE


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _out_dir(explicit: str | None) -> Path:
    if explicit:
        path = Path(explicit)
    else:
        path = Path(os.environ.get("PRODYN_OUT", "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _read_dataset(path: str):
    try:
        return files.read_dataset(path)
    except (OSError, ValueError, ProdynError) as exc:
        _fail(EXIT_INPUT, f"cannot read dataset: {exc}")


def _read_model(path: str):
    try:
        return files.read_model(path)
    except (OSError, ValueError, ProdynError) as exc:
        _fail(EXIT_INPUT, f"cannot read model file: {exc}")


def _fit_options(order: int, max_iterations: int, rel_tolerance: float,
                 allow_unstable: bool) -> FitOptions:
    if order != 1:
        raise click.UsageError("only --order 1 is supported")
    return FitOptions(
        order=order,
        max_iterations=max_iterations,
        rel_tolerance=rel_tolerance,
        stability_constraint=not allow_unstable,
    )


@click.group()
def main():
    """Identify, validate and analyze production-process models."""


@main.command()
@click.option("--data", required=True, help="Dataset CSV (t_h,u_goal_m,y_depth_m).")
@click.option("--order", default=1, show_default=True, help="Model order.")
@click.option("--split", "split_hour", required=True, type=float,
              help="Estimation/validation split hour.")
@click.option("--out", "out_path", default=None, help="Model file path.")
@click.option("--out-dir", default=None, help="Output directory.")
@click.option("--max-iterations", default=200, show_default=True)
@click.option("--rel-tolerance", default=1e-10, show_default=True)
@click.option("--allow-unstable", is_flag=True, default=False,
              help="Drop the stability constraint on the fitted pole.")
def identify(data, order, split_hour, out_path, out_dir, max_iterations,
             rel_tolerance, allow_unstable):
    """Fit a model on the data before the split, validate on the rest."""
    if split_hour <= 0:
        raise click.UsageError("--split must be positive")
    options = _fit_options(order, max_iterations, rel_tolerance, allow_unstable)
    dataset = _read_dataset(data)
    pair = normalize(dataset)
    try:
        best, est_m, val_m, _ = evaluate_split(pair, split_hour, options)
    except SplitOffGrid as exc:
        _fail(EXIT_INPUT, str(exc))
    except (AllStartsFailed, SegmentTooShort) as exc:
        _fail(EXIT_COMPUTE, f"estimation failed: {exc}")

    model_path = Path(out_path) if out_path else _out_dir(out_dir) / "model.json"
    files.write_model(model_path, best.tf, pair.offset_u, pair.offset_y,
                      dataset.period)
    payload = {
        "model": files.model_to_dict(best.tf, pair.offset_u, pair.offset_y,
                                     dataset.period),
        "est": files.metrics_to_dict(est_m),
        "val": files.metrics_to_dict(val_m),
    }
    click.echo(json.dumps(payload, indent=2))


@main.command()
@click.option("--data", required=True, help="Dataset CSV.")
@click.option("--step", default=DEFAULT_STEP_HOURS, show_default=True, type=float,
              help="Partition step, hours.")
@click.option("--order", default=1, show_default=True)
@click.option("--out-dir", default=None, help="Output directory.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True, help="Report form echoed to stdout.")
@click.option("--predictor-threshold", default=DEFAULT_PREDICTOR_THRESHOLD,
              show_default=True, type=float)
@click.option("--max-iterations", default=200, show_default=True)
@click.option("--rel-tolerance", default=1e-10, show_default=True)
@click.option("--allow-unstable", is_flag=True, default=False)
def protocol(data, step, order, out_dir, fmt, predictor_threshold,
             max_iterations, rel_tolerance, allow_unstable):
    """Run the partitioned estimate/validate study; write report files."""
    if step <= 0:
        raise click.UsageError("--step must be positive")
    options = _fit_options(order, max_iterations, rel_tolerance, allow_unstable)
    dataset = _read_dataset(data)
    pair = normalize(dataset)
    try:
        report = run_protocol(pair, options, step=step,
                              predictor_threshold=predictor_threshold)
    except StepTooLarge as exc:
        _fail(EXIT_COMPUTE, f"StepTooLarge: {exc}")

    out = _out_dir(out_dir)
    files.write_report(report, out / "report.json")
    files.write_figure_table(report, out / "figure2.csv")
    if fmt == "json":
        click.echo(files.report_text(report), nl=False)
    else:
        click.echo(files.figure_table_text(report), nl=False)
    click.echo(f"chosen partition: {report.chosen_partition}", err=True)
    click.echo(f"predictor partition: {report.predictor_partition}", err=True)


@main.command()
@click.option("--model", "model_path", required=True, help="Model file.")
@click.option("--amplitude", required=True, type=float,
              help="Constant input level, meters per hour.")
@click.option("--horizon", required=True, type=float, help="Hours to simulate.")
@click.option("--period", default=0.05, show_default=True, type=float,
              help="Trajectory sample period, hours.")
@click.option("--out", "out_path", default=None, help="Trajectory CSV path.")
@click.option("--out-dir", default=None)
def step(model_path, amplitude, horizon, period, out_path, out_dir):
    """Step-response analysis: settling time, peak, steady state, state class."""
    if horizon <= 0 or period <= 0 or horizon < period:
        raise click.UsageError("need --horizon >= --period > 0")
    tf, _, _, _ = _read_model(model_path)
    metrics, response = stepinfo.step_metrics(tf, amplitude, horizon, period)
    traj_path = Path(out_path) if out_path else _out_dir(out_dir) / "step_response.csv"
    files.write_trajectory(response, traj_path)
    click.echo(json.dumps(metrics.as_dict(), indent=2))


@main.command()
@click.option("--model", "model_path", required=True, help="Model file.")
@click.option("--plan", "plan_path", required=True,
              help="Input plan CSV (dataset format; output column optional).")
@click.option("--out", "out_path", default=None,
              help="Output CSV (default: beside the plan, *_sim.csv).")
def simulate(model_path, plan_path, out_path):
    """Simulate a goal plan through a model; depths come out absolute."""
    tf, offset_u, offset_y, _ = _read_model(model_path)
    try:
        t0, period, goals = files.read_plan(plan_path)
    except (OSError, ValueError) as exc:
        _fail(EXIT_INPUT, f"cannot read plan: {exc}")
    response = lti.simulate(tf, goals - offset_u, period, t0=t0,
                            input_label=f"plan {plan_path}")
    out = Path(out_path) if out_path else Path(plan_path).with_name(
        Path(plan_path).stem + "_sim.csv")
    shifted = lti.Response(t0=response.t0, period=response.period,
                           values=response.values + offset_y,
                           input_label=response.input_label)
    files.write_trajectory(shifted, out)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--samples", default=181, show_default=True, type=int)
@click.option("--period", default=1.0, show_default=True, type=float)
@click.option("--mean-increment", default=2.06, show_default=True, type=float)
@click.option("--plan", "plan_kind", type=click.Choice(["jitter", "steady"]),
              default="jitter", show_default=True)
@click.option("--plan-seed", default=None, type=int,
              help="Seed for the jittered plan (defaults to --seed).")
@click.option("--sigma", default=0.0, show_default=True, type=float,
              help="Noise level as a fraction of the output range.")
@click.option("--num", default="0.6646", show_default=True,
              help="Numerator coefficients, ascending, comma-separated.")
@click.option("--den", default="0.6687,1", show_default=True,
              help="Denominator coefficients, ascending, comma-separated.")
@click.option("--base-u", default=0.0, show_default=True, type=float)
@click.option("--base-y", default=0.0, show_default=True, type=float)
@click.option("--campaign-fixture", "campaign_fixture", is_flag=True,
              default=False,
              help="Regenerate the committed regression fixture; other flags ignored.")
@click.option("--out", "out_path", default=None, help="Dataset CSV path.")
@click.option("--truth-out", default=None, help="Truth sidecar path.")
@click.option("--out-dir", default=None)
def synth_cmd(seed, samples, period, mean_increment, plan_kind, plan_seed,
              sigma, num, den, base_u, base_y, campaign_fixture, out_path,
              truth_out, out_dir):
    """Generate a synthetic dataset from a known model."""
    if campaign_fixture:
        spec = synth.fixture_spec()
    else:
        if samples < 3:
            raise click.UsageError("--samples must be at least 3")
        if sigma < 0:
            raise click.UsageError("--sigma must be non-negative")
        try:
            tf = lti.make_tf([float(c) for c in num.split(",")],
                             [float(c) for c in den.split(",")])
        except (ValueError, ProdynError) as exc:
            raise click.UsageError(f"bad model coefficients: {exc}")
        if plan_kind == "steady":
            increments = synth.steady_increments(samples - 1, mean_increment)
        else:
            increments = synth.jittered_increments(
                samples - 1, mean_increment,
                plan_seed if plan_seed is not None else seed)
        spec = synth.SynthSpec(tf=tf, increments=increments,
                               noise_fraction=sigma, seed=seed, period=period,
                               base_u=base_u, base_y=base_y)
    dataset, truth = synth.generate(spec)
    out = Path(out_path) if out_path else _out_dir(out_dir) / "synthetic.csv"
    files.write_dataset(dataset, out)
    truth_path = Path(truth_out) if truth_out else out.with_name(
        out.stem + "_truth.json")
    files.write_truth(truth, truth_path)
    click.echo(f"wrote {out} and {truth_path}")


main.add_command(synth_cmd, name="synth")


@main.command()
@click.option("--events", "events_path", required=True,
              help="Raw events CSV (t_h,goal_m,depth_m).")
@click.option("--period", default=1.0, show_default=True, type=float)
@click.option("--out", "out_path", default=None, help="Dataset CSV path.")
@click.option("--out-dir", default=None)
def ingest(events_path, period, out_path, out_dir):
    """Resample raw operational-report events to a uniform dataset."""
    if period <= 0:
        raise click.UsageError("--period must be positive")
    try:
        events = files.read_raw_events(events_path)
        dataset = ingest_events(events, period)
    except (OSError, ValueError, ProdynError) as exc:
        _fail(EXIT_INPUT, f"cannot ingest events: {exc}")
    out = Path(out_path) if out_path else _out_dir(out_dir) / "dataset.csv"
    files.write_dataset(dataset, out)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP facade for the planner UI."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
