import logging
from typing import Optional, Tuple

import click

from .config import RunConfigProfile
from .constants import DEFAULT_CONFIG_PATH, PROTOCOLS
from .core import ExperimentClient, create_experiment_client
from .exceptions import FaultToleranceViolation
from .util import logger


CLICK_CONTEXT_SETTINGS = dict(
    # Don't cutoff command help docs
    max_content_width=500,
)
pass_config = click.make_pass_decorator(ExperimentClient)

protocol_option = click.option(
    "--protocol",
    type=click.Choice(PROTOCOLS),
    default=None,
    help="Protocol to use instead of the configured one",
)


@click.group(context_settings=CLICK_CONTEXT_SETTINGS)
@click.option(
    "--profile",
    "profile_name",
    help="Name of the run profile to use",
    default=None,
)
@click.option(
    "--config-path",
    "--config",
    "config_path",
    default=DEFAULT_CONFIG_PATH,
    help="Path of the ion-cnot-sim JSON config",
)
@click.option("--verbose", "-v", is_flag=True, help="Log at debug level")
@click.option("--seed", type=int, default=None, help="Master seed")
@click.option("--workers", type=int, default=None, help="Size of the worker pool")
@click.option("--weight-cap", type=int, default=None, help="Largest subset weight to enumerate")
@click.option("--delta", type=float, default=None, help="Tolerated truncation probability")
@click.option("--out", "out_dir", default=None, help="Output directory")
@click.pass_context
def cli(ctx, profile_name, config_path, verbose, seed, workers, weight_cap, delta, out_dir):
    if verbose:
        logger.setLevel(logging.DEBUG)
    config = RunConfigProfile.from_json_file(config_path, profile_name).with_overrides(
        seed=seed,
        workers=workers,
        weight_cap=weight_cap,
        delta=delta,
        out_dir=out_dir,
    )
    logger.debug("Config: %s", config)
    ctx.obj = create_experiment_client(config)


@cli.command(name="verify-ft")
@protocol_option
@click.option(
    "--drop-tag",
    "drop_tags",
    multiple=True,
    help="Remove schedule steps with this tag, e.g. f-2",
)
@pass_config
def cmd_verify_ft(client: ExperimentClient, protocol: Optional[str], drop_tags: Tuple[str]):
    """Inject every single fault and check that none causes a logical failure"""
    report = client.verify_ft(protocol, drop_tags)
    for failure in report.failures:
        print(failure)
    if not report.passed:
        raise FaultToleranceViolation(
            f"{report.protocol}: {len(report.failures)} of {report.checked} single faults fail",
            report.failures,
        )
    print(f"{report.protocol}: all {report.checked} single faults corrected")


@cli.command(name="sweep")
@pass_config
def cmd_sweep(client: ExperimentClient):
    """Logical failure bounds of the sweep protocols over the configured grid"""
    path, crossings = client.sweep()
    print(path)
    for pair, value in crossings.items():
        print(f"logical-Z break-even {pair}: {value if value is not None else 'none'}")


@cli.command(name="resources")
@pass_config
def cmd_resources(client: ExperimentClient):
    """Gate counts, junction crossings and durations of the sweep protocols"""
    paths, crossings = client.resources()
    for path in paths:
        print(path)
    for pair, value in crossings.items():
        print(f"duration break-even {pair}: {value if value is not None else 'none'}")


@cli.command(name="export")
@click.argument("results_file", required=False)
@click.option("--schedule-name", default=None, help="Built-in schedule to write as text")
@click.option("--dump-schedule", default=None, help="Path of the schedule text")
@click.option("--dump-circuit", type=click.Choice(PROTOCOLS), default=None, help="Protocol whose circuit text to write")
@click.option("--output", default=None, help="Path of the exported CSV")
@pass_config
def cmd_export(
    client: ExperimentClient,
    results_file: Optional[str],
    schedule_name: Optional[str],
    dump_schedule: Optional[str],
    dump_circuit: Optional[str],
    output: Optional[str],
):
    """
    Re-weight stored subset estimates onto the configured grid, or write
    schedule and circuit text
    """
    if not any((results_file, schedule_name, dump_circuit)):
        raise click.exceptions.ClickException(
            "Give a results file, --schedule-name or --dump-circuit"
        )
    if results_file:
        print(client.export(results_file, output))
    if schedule_name:
        print(client.export_schedule(schedule_name, dump_schedule))
    if dump_circuit:
        print(client.export_circuit(dump_circuit))


@cli.command(name="run")
@protocol_option
@click.option(
    "--traditional-shots",
    type=int,
    default=0,
    help="Also run a plain Monte Carlo with this many shots",
)
@pass_config
def cmd_run(client: ExperimentClient, protocol: Optional[str], traditional_shots: int):
    """Logical failure bounds at the configured noise point"""
    report = client.run_point(protocol, traditional_shots)
    for failure_type, bounds in report["bounds"].items():
        print(
            f"{report['protocol']} logical-{failure_type}: "
            f"{bounds['lower']:.4g} <= pL <= {bounds['upper']:.4g}"
        )
    if "traditional" in report:
        for failure_type in ("Z", "X"):
            estimate = report["traditional"][failure_type]
            print(
                f"{report['protocol']} traditional logical-{failure_type}: "
                f"{estimate['rate']:.4g} +- {estimate['std_error']:.2g}"
            )
