# -*- coding: utf-8 -*-
"""Command Line Interface for TRT-SNN."""

import functools
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import click
import numpy as np

from trtsnn.dataset.synthetic import SyntheticTaskSpec
from trtsnn.dataset.synthetic import save_spike_dataset
from trtsnn.dataset.synthetic import synth_generate
from trtsnn.diagnostics.asfr import asfr
from trtsnn.diagnostics.fisher import fisher_profile
from trtsnn.diagnostics.landscape import landscape_2d
from trtsnn.diagnostics.report import format_table
from trtsnn.diagnostics.report import write_asfr_csv
from trtsnn.diagnostics.report import write_csv
from trtsnn.diagnostics.report import write_fisher_csv
from trtsnn.diagnostics.report import write_landscape_csv
from trtsnn.diagnostics.report import write_vanishing_csv
from trtsnn.diagnostics.vanishing import vanishing_probe
from trtsnn.learner.base_learner import TRTLearner
from trtsnn.learner.config import load_config
from trtsnn.learner.config import with_overrides
from trtsnn.objectives.losses import sdt_ce_loss
from trtsnn.utils.config import parse_overrides
from trtsnn.utils.config import runtime_settings
from trtsnn.utils.exception import ConfigError
from trtsnn.utils.exception import TRTSNNError
from trtsnn.utils.tools import format_float
from trtsnn.utils.tools import median
from trtsnn.utils.tools import setup_logging


logger = logging.getLogger(__name__)

CONTEXT_SETTINGS = {
    "help_option_names": ["-h", "--help"],
    "show_default": True,
}

OVERRIDE_SETTINGS = dict(CONTEXT_SETTINGS, ignore_unknown_options=True)

_override_args = click.argument("args", nargs=-1, type=click.UNPROCESSED)


def _reported(func):
    """Turn library errors into a one-line reason and a nonzero exit."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as err:
            if err.unknown_keys:
                raise click.UsageError(f"no such option: --{err.unknown_keys[0]}") from None
            raise click.ClickException(str(err)) from None
        except (TRTSNNError, OSError) as err:
            raise click.ClickException(str(err)) from None

    return wrapper


def _overrides(args: Sequence[str]) -> Dict[str, str]:
    try:
        return parse_overrides(args)
    except ConfigError as err:
        raise click.UsageError(str(err)) from None


def _config_and_overrides(args: Sequence[str]) -> Tuple[Optional[str], Dict[str, str]]:
    """Split ``[CONFIG_PATH] --key=value ...`` into the file and the overrides."""
    positional = [a for a in args if not a.startswith("--")]
    if len(positional) > 1:
        raise click.UsageError(f"expected at most one config file, got {' '.join(positional)}")
    if positional and not Path(positional[0]).is_file():
        raise click.BadParameter(f"{positional[0]!r} is not a file", param_hint="CONFIG_PATH")
    overrides = _overrides([a for a in args if a.startswith("--")])
    source = positional[0] if positional else None
    logger.info("settings from %s with %d command-line overrides", source or "defaults", len(overrides))
    return source, overrides


def _split_floats(value: str) -> List[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}") from None


@click.group(context_settings=CONTEXT_SETTINGS)
@click.version_option()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Logging level (default: TRTSNN_LOG_LEVEL or INFO).",
)
def cli(log_level: Optional[str]) -> None:
    """Command Line Interface for TRT-SNN."""
    setup_logging(log_level or runtime_settings().log_level)


@cli.command(context_settings=OVERRIDE_SETTINGS)
@_override_args
@click.option("--resume", is_flag=True, help="Continue from the run directory's LATEST checkpoint.")
@_reported
def train(args: Tuple[str, ...], resume: bool) -> None:
    """Train a network; settings come from CONFIG_PATH and --key=value overrides."""
    config = load_config(*_config_and_overrides(args))
    learner = TRTLearner(config)
    if resume:
        learner.resume()
    history = learner.fit()
    if history:
        last = history[-1]
        click.echo(f"epoch {last.epoch}: test_acc={last.test_acc:.4f} test_loss={last.test_loss:.5f}")
    click.echo(f"run directory: {learner.run_dir}")


@cli.command(name="eval", context_settings=OVERRIDE_SETTINGS)
@click.argument("checkpoint", type=click.Path(exists=True))
@_override_args
@click.option("--split", "which", type=click.Choice(["test", "train"]), default="test", help="Data split.")
@_reported
def evaluate(checkpoint: str, args: Tuple[str, ...], which: str) -> None:
    """Evaluate CHECKPOINT; --key=value overrides may point at other data."""
    learner = TRTLearner.from_checkpoint(checkpoint, **_overrides(args))
    dataset = learner.data.test if which == "test" else learner.data.train
    loss, acc = learner.evaluate(dataset)
    click.echo(format_table([[which, len(dataset), loss, acc]], ["split", "samples", "loss", "accuracy"]))


@cli.command(name="gen-data")
@click.argument("output", type=click.Path(dir_okay=False))
@click.option("--samples", type=int, default=1000, help="Number of samples.")
@click.option("--classes", type=int, default=10, help="Number of classes.")
@click.option("--neurons", type=int, default=40, help="Input neurons.")
@click.option("--groups", type=int, default=5, help="Neuron groups.")
@click.option("-T", "--steps", "steps", type=int, default=10, help="Timesteps.")
@click.option("--base-rate", type=float, default=0.02, help="Spike probability outside the class window.")
@click.option("--peak-rate", type=float, default=0.6, help="Spike probability inside the class window.")
@click.option("--noise", type=float, default=0.02, help="Background noise probability.")
@click.option("--seed", type=int, default=0, help="Generator seed.")
@_reported
def gen_data(output, samples, classes, neurons, groups, steps, base_rate, peak_rate, noise, seed) -> None:
    """Write a synthetic temporal spike dataset to OUTPUT."""
    try:
        spec = SyntheticTaskSpec(
            classes=classes,
            neurons=neurons,
            T=steps,
            groups=groups,
            base_rate=base_rate,
            peak_rate=peak_rate,
            noise=noise,
            seed=seed,
        )
    except ValueError as err:
        raise click.BadParameter(str(err).splitlines()[0]) from None
    data = synth_generate(spec, samples)
    path = save_spike_dataset(output, data, meta=spec.model_dump())
    click.echo(f"wrote {len(data)} samples [{steps} x {neurons}] to {path}")


@cli.group()
def diagnose() -> None:
    """Analysis instruments over a checkpoint."""


def _diagnostic_setup(checkpoint: str, samples: int, out_dir: Optional[str]):
    learner = TRTLearner.from_checkpoint(checkpoint)
    count = min(samples, len(learner.data.train))
    inputs, labels = learner.data.train.time_major(range(count))
    out = Path(out_dir) if out_dir else learner.run_dir / "diagnostics"
    return learner, inputs, labels, out


_samples_option = click.option("--samples", type=int, default=32, help="Training samples used.")
_out_option = click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="CSV directory.")


@diagnose.command()
@click.argument("checkpoint", type=click.Path(exists=True))
@_samples_option
@_out_option
@_reported
def fisher(checkpoint: str, samples: int, out_dir: Optional[str]) -> None:
    """Fisher information trace per timestep and its centroid."""
    learner, inputs, _, out = _diagnostic_setup(checkpoint, samples, out_dir)
    profile = fisher_profile(learner.model, inputs, learner.epoch)
    path = write_fisher_csv(out / "fisher.csv", [profile])
    rows = [[t, value] for t, value in enumerate(profile.traces, start=1)]
    click.echo(format_table(rows, ["t", "I_t"]))
    click.echo(f"IC = {format_float(profile.centroid) or 'undefined'}; wrote {path}")


@diagnose.command()
@click.argument("checkpoint", type=click.Path(exists=True))
@click.option("--gammas", default="", help="Comma-separated decay factors (default: the model's).")
@_samples_option
@_out_option
@_reported
def tgrad(checkpoint: str, gammas: str, samples: int, out_dir: Optional[str]) -> None:
    """Same-step vs carried-back gradient norms per layer and timestep."""
    learner, inputs, labels, out = _diagnostic_setup(checkpoint, samples, out_dir)
    rows = vanishing_probe(learner.model, inputs, labels, _split_floats(gammas), learner.config.loss)
    path = write_vanishing_csv(out / "tgrad.csv", rows)
    table = [[r.gamma, r.layer, r.t, r.grad_p, r.grad_t, "yes" if r.vanished else ""] for r in rows]
    click.echo(format_table(table, ["gamma", "layer", "t", "grad_p", "grad_t", "vanished"]))
    click.echo(f"wrote {path}")


@diagnose.command()
@click.argument("checkpoint", type=click.Path(exists=True))
@click.option("--grid", type=int, default=21, help="Odd number of points per axis.")
@click.option("--span", type=float, default=1.0, help="Half-width of each axis in direction units.")
@click.option("--seeds", default="0,1", help="Seeds of the two directions.")
@_samples_option
@_out_option
@_reported
def landscape(checkpoint: str, grid: int, span: float, seeds: str, samples: int, out_dir: Optional[str]) -> None:
    """2D loss slice around the checkpoint along filter-normalized directions."""
    learner, inputs, labels, out = _diagnostic_setup(checkpoint, samples, out_dir)
    seed_values = [int(v) for v in _split_floats(seeds)]
    if len(seed_values) != 2:
        raise click.BadParameter("--seeds needs exactly two values")

    def loss_fn(model):
        outputs, _ = model.forward(inputs, training=False)
        return sdt_ce_loss(outputs, labels).total

    result = landscape_2d(learner.model, loss_fn, (grid, grid), span, tuple(seed_values))
    path = write_landscape_csv(out / "landscape.csv", result)
    finite = result.losses[np.isfinite(result.losses)]
    summary = [[result.center, finite.min() if finite.size else None, finite.max() if finite.size else None]]
    click.echo(format_table(summary, ["center", "min", "max"]))
    click.echo(f"wrote {path}")


@diagnose.command(name="asfr")
@click.argument("checkpoint", type=click.Path(exists=True))
@_samples_option
@_out_option
@_reported
def asfr_command(checkpoint: str, samples: int, out_dir: Optional[str]) -> None:
    """Average spike firing rate of every spiking layer."""
    learner, inputs, _, out = _diagnostic_setup(checkpoint, samples, out_dir)
    _, trace = learner.model.forward(inputs, training=False)
    rates = asfr(trace)
    path = write_asfr_csv(out / "asfr.csv", rates)
    click.echo(format_table(sorted(rates.items()), ["layer", "rate"]))
    click.echo(f"wrote {path}")


def _final_gap(learner: TRTLearner) -> float:
    """``test_loss - train_loss`` after training, both the test criterion."""
    train_loss, _ = learner.evaluate(learner.data.train)
    return learner.history[-1].test_loss - train_loss


@cli.command(context_settings=OVERRIDE_SETTINGS)
@_override_args
@click.option("--kinds", default="SDT_CE,TET,TRT", help="Loss kinds to compare.")
@click.option("--seeds", type=int, default=5, help="Seeds per kind (0..seeds-1).")
@_reported
def compare(args: Tuple[str, ...], kinds: str, seeds: int) -> None:
    """Train each loss kind over several seeds; report median accuracy and loss gap."""
    base = load_config(*_config_and_overrides(args))
    root = Path(base.run_dir) / "compare"
    rows, summary = [], []
    for kind in [k.strip() for k in kinds.split(",") if k.strip()]:
        accs, gaps = [], []
        for seed in range(seeds):
            config = with_overrides(
                base, {"loss.kind": kind, "seed": str(seed), "run_dir": str(root / kind / f"seed{seed}")}
            )
            learner = TRTLearner(config)
            history = learner.fit()
            gap = _final_gap(learner)
            accs.append(history[-1].test_acc)
            gaps.append(gap)
            rows.append([kind, seed, format_float(history[-1].test_acc), format_float(gap)])
        summary.append([kind, median(accs), median(gaps)])
    write_csv(root / "compare.csv", ["kind", "seed", "test_acc", "gap"], rows)
    click.echo(format_table(summary, ["kind", "median test_acc", "median gap"]))
    click.echo(f"wrote {root / 'compare.csv'}")


@cli.command(context_settings=OVERRIDE_SETTINGS)
@_override_args
@click.option("--key", "sweep_key", required=True, help="Dotted config key to vary, e.g. loss.eta.")
@click.option("--values", "sweep_values", required=True, help="Comma-separated values.")
@_reported
def sweep(args: Tuple[str, ...], sweep_key: str, sweep_values: str) -> None:
    """Train once per value of one config key; report final test accuracy."""
    base = load_config(*_config_and_overrides(args))
    root = Path(base.run_dir) / "sweep"
    rows = []
    for value in [v.strip() for v in sweep_values.split(",") if v.strip()]:
        config = with_overrides(base, {sweep_key: value, "run_dir": str(root / f"{sweep_key}={value}")})
        history = TRTLearner(config).fit()
        last = history[-1]
        rows.append([value, last.test_acc, last.test_loss, last.train_total])
    write_csv(
        root / "sweep.csv",
        [sweep_key, "test_acc", "test_loss", "train_total"],
        [[v, format_float(a), format_float(b), format_float(c)] for v, a, b, c in rows],
    )
    click.echo(format_table(rows, [sweep_key, "test_acc", "test_loss", "train_total"]))
