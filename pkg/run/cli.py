"""
Command-line entry point.

    python -m run.cli summarize --bills-path bills.jsonl
    python -m run.cli run --bills-path bills.jsonl --roster-path roster.csv --output-dir outputs
    python -m run.cli generate --output-dir synth --seed 7

Settings resolve as: command-line flags > --config file > config/default.yaml
> RunConfig defaults. Exit codes: 0 success, 1 usage/config error, 2 data
error, 3 computation error.
"""
import os
import sys
import shutil
import logging
import argparse
import tempfile
from dataclasses import asdict, dataclass, fields
from typing import Optional, Tuple

import pandas as pd
import pytz
import yaml

from data.generate_dataset import SynthConfig, generate, write_dataset
from data.ingest import MonthIndex, filter_bills, load_roster, parse_chamber, read_bills, reconcile_ids, summarize
from models.centrality import DEFAULT_MAX_ITER, DEFAULT_TOL, DISTANCES, centrality_frame
from models.influence import bill_scores_frame, influence_frame
from models.tempnet import DecayRate, build_monthly, decay_accumulate, dump_tensors
from run.sweep import MEASURES, SweepSettings, half_life_sweep, legislator_index
from utils.log_utils import setup_logger
from utils.metrics import AGGREGATIONS, REL_DIFF_MODES, window_frame
from utils.plotting import histogram_plot, window_plot
from utils.reports import provenance_line, save_table
from utils.utils import (ComputationError, ConfigError, DataError, config_digest, create_output_dirs,
                         file_digest, flatten_config, load_config)

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'config', 'default.yaml')

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTATION = 0, 1, 2, 3

SYNTH_FIELDS = tuple(f.name for f in fields(SynthConfig))
# settings that never change report contents stay out of the provenance hash
NON_RESULT_FIELDS = ('bills_path', 'roster_path', 'aliases_path', 'output_dir', 'jobs', 'timezone', 'log_level')


def _as_tuple(value, cast, name):
    if value is None:
        return ()
    if isinstance(value, str):
        value = [v for v in value.replace(',', ' ').split() if v]
    elif not isinstance(value, (list, tuple, set)):
        value = [value]
    try:
        return tuple(cast(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid value for {name}: {value!r}")


def _as_bool(value, name):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ('true', 'yes', '1', 'false', 'no', '0'):
        return value.strip().lower() in ('true', 'yes', '1')
    raise ConfigError(f"{name} must be a boolean, got {value!r}")


def _ordered_subset(values, allowed, name):
    unknown = [v for v in values if v not in allowed]
    if unknown or not values:
        raise ConfigError(f"{name} must be a nonempty subset of {', '.join(allowed)}; got {', '.join(values) or 'nothing'}")
    return tuple(v for v in allowed if v in values)


@dataclass
class RunConfig:
    bills_path: Optional[str] = None
    roster_path: Optional[str] = None
    aliases_path: Optional[str] = None
    output_dir: str = 'outputs'
    chamber: str = 'House'
    half_lives: Tuple[float, ...] = (6.0, 12.0, 24.0)
    window_months: int = 4
    measures: Tuple[str, ...] = MEASURES
    aggregations: Tuple[str, ...] = AGGREGATIONS
    rel_diff_mode: str = 'window_averaged'
    closeness_distance: str = 'reciprocal'
    congress_reset: bool = False
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    bin_width: float = 0.05
    jobs: int = 1
    plots: bool = True
    export_series: bool = False
    dump_tensors: bool = False
    timezone: str = 'UTC'
    log_level: str = 'INFO'
    # generate
    seed: int = 2024
    n_legislators: int = 50
    party_split: float = 0.5
    n_months: int = 60
    bills_per_month: int = 30
    min_cosponsors: int = 2
    max_cosponsors: int = 8
    base_pass_prob: float = 0.1
    influence_boost: float = 0.3
    elite_set_size: int = 5
    elite_weight: float = 2.0
    enact_prob: float = 0.3
    start_congress: int = 111

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration key(s): {', '.join(unknown)}")
        config = cls(**{k: v for k, v in values.items() if v is not None})
        return config.normalized()

    def normalized(self):
        try:
            self.chamber = parse_chamber(self.chamber).value
            self.half_lives = _as_tuple(self.half_lives, float, 'half_lives')
            self.measures = _ordered_subset(_as_tuple(self.measures, str, 'measures'), MEASURES, 'measures')
            self.aggregations = _ordered_subset(_as_tuple(self.aggregations, str, 'aggregations'),
                                                AGGREGATIONS, 'aggregations')
            for name in ('window_months', 'max_iter', 'jobs', 'seed', 'n_legislators', 'n_months',
                         'bills_per_month', 'min_cosponsors', 'max_cosponsors', 'elite_set_size', 'start_congress'):
                setattr(self, name, int(getattr(self, name)))
            for name in ('tol', 'bin_width', 'party_split', 'base_pass_prob', 'influence_boost', 'elite_weight',
                         'enact_prob'):
                setattr(self, name, float(getattr(self, name)))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid configuration value: {e}")
        for name in ('congress_reset', 'plots', 'export_series', 'dump_tensors'):
            setattr(self, name, _as_bool(getattr(self, name), name))

        if not self.half_lives or any(not h > 0 for h in self.half_lives):
            raise ConfigError(f"half_lives must be a nonempty list of positive numbers, got {self.half_lives}")
        self.half_lives = tuple(sorted(set(self.half_lives)))
        if self.window_months < 1:
            raise ConfigError("window_months must be at least 1")
        if self.rel_diff_mode not in REL_DIFF_MODES:
            raise ConfigError(f"rel_diff_mode must be one of {', '.join(REL_DIFF_MODES)}")
        if self.closeness_distance not in DISTANCES:
            raise ConfigError(f"closeness_distance must be one of {', '.join(DISTANCES)}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if str(self.timezone) not in pytz.all_timezones_set:
            raise ConfigError(f"Unknown timezone '{self.timezone}'")
        if not isinstance(logging.getLevelName(str(self.log_level).upper()), int):
            raise ConfigError(f"Unknown log level '{self.log_level}'")
        return self

    def synth_config(self):
        return SynthConfig(**{name: getattr(self, name) for name in SYNTH_FIELDS})

    def sweep_settings(self):
        return SweepSettings(
            measures=self.measures,
            aggregations=self.aggregations,
            window_months=self.window_months,
            rel_diff_mode=self.rel_diff_mode,
            closeness_distance=self.closeness_distance,
            congress_reset=self.congress_reset,
            chamber=parse_chamber(self.chamber),
            tol=self.tol,
            max_iter=self.max_iter,
            bin_width=self.bin_width,
        )

    def digest(self):
        values = {k: v for k, v in asdict(self).items() if k not in NON_RESULT_FIELDS and k not in SYNTH_FIELDS}
        return config_digest(values)


def _read_config_file(path):
    try:
        return flatten_config(load_config(path))
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Config file {path} is not valid YAML: {e}")
    except AttributeError:
        raise ConfigError(f"Config file {path} must hold a mapping of settings")


def resolve_config(args, defaults_path=DEFAULT_CONFIG) -> RunConfig:
    values = {}
    if defaults_path and os.path.exists(defaults_path):
        values.update(_read_config_file(defaults_path))
    if getattr(args, 'config', None):
        values.update(_read_config_file(args.config))
    values.update({k: v for k, v in vars(args).items() if k not in ('command', 'config')})
    return RunConfig.from_dict(values)


def _require(config, *names):
    for name in names:
        if not getattr(config, name):
            raise ConfigError(f"--{name.replace('_', '-')} is required")


def _input_digests(config):
    digests = {}
    for name in ('bills_path', 'roster_path', 'aliases_path'):
        path = getattr(config, name)
        if path:
            try:
                digests[os.path.basename(path)] = file_digest(path)
            except OSError as e:
                raise DataError(f"Cannot read {path}: {e}")
    return digests


def cmd_summarize(config: RunConfig):
    _require(config, 'bills_path')
    bills = filter_bills(read_bills(config.bills_path), config.chamber)
    table = summarize(bills)
    logger.info("Summarized %d %s bills over %d Congress(es)", len(bills), config.chamber, len(table))
    os.makedirs(config.output_dir, exist_ok=True)
    path = os.path.join(config.output_dir, 'bill_summary.csv')
    save_table(table, path, provenance_line(config.digest(), _input_digests(config)))
    return path


def load_inputs(config: RunConfig):
    _require(config, 'bills_path', 'roster_path')
    errors = []
    bills = filter_bills(read_bills(config.bills_path, errors=errors), config.chamber)
    roster_records, aliases = load_roster(config.roster_path, config.aliases_path)
    bills, roster, unresolved = reconcile_ids(bills, roster_records, aliases)
    if not bills:
        raise DataError(f"No {config.chamber} bills to analyze in {config.bills_path}")
    logger.info("Loaded %d bills (%d bad record(s), %d unresolved id(s)), %d legislators",
                len(bills), len(errors), len(unresolved), len(roster))
    return bills, roster


def write_reports(sweep, config, month_index, report_dir, provenance):
    summary = [(r.measure, r.aggregation, r.half_life, r.mean_rel_diff, r.se,
                r.distribution.n_windows if r.distribution is not None else 0)
               for r in sweep.configurations()]
    save_table(pd.DataFrame(summary, columns=['measure', 'aggregation', 'half_life', 'mean_rel_diff', 'se',
                                              'n_windows']),
               os.path.join(report_dir, 'summary.csv'), provenance)

    for result in sweep.configurations():
        name = f"{result.measure}_{result.aggregation}_hl{result.half_life:g}"
        windows = window_frame(result.stats)
        save_table(windows, os.path.join(report_dir, 'windows', f"{name}.csv"), provenance)
        if result.distribution is not None:
            save_table(result.distribution.histogram, os.path.join(report_dir, 'histograms', f"{name}.csv"),
                       provenance)
        if config.plots:
            title = f"{result.measure} ({result.aggregation}), half-life {result.half_life:g} months"
            window_plot(windows, os.path.join(report_dir, 'plots', f"{name}_windows.svg"), title)
            if result.distribution is not None:
                histogram_plot(result.distribution.histogram,
                               os.path.join(report_dir, 'plots', f"{name}_histogram.svg"), title)

    if config.export_series:
        for half_life, run in sorted(sweep.runs.items()):
            if 'influence' in config.measures:
                save_table(influence_frame(run.party, month_index),
                           os.path.join(report_dir, 'series', f"influence_hl{half_life:g}.csv"), provenance)
            if run.centrality is not None and run.centrality.values:
                save_table(centrality_frame(run.centrality, month_index),
                           os.path.join(report_dir, 'series', f"centrality_hl{half_life:g}.csv"), provenance)
            for measure, scores in sorted(run.scores.items()):
                save_table(bill_scores_frame(scores),
                           os.path.join(report_dir, 'series', f"bill_scores_{measure}_hl{half_life:g}.csv"),
                           provenance)


def cmd_run(config: RunConfig):
    bills, roster = load_inputs(config)
    month_index = MonthIndex.from_bills(bills)
    horizon = month_index.horizon(bills)
    logger.info("Analysis months %s .. %s (%d months)", month_index.label(1), month_index.label(horizon), horizon)
    provenance = provenance_line(config.digest(), _input_digests(config))

    os.makedirs(config.output_dir, exist_ok=True)
    final_dir = os.path.join(config.output_dir, 'reports')
    work_dir = tempfile.mkdtemp(prefix='.reports_', dir=config.output_dir)
    try:
        sweep = half_life_sweep(bills, roster, month_index, config.half_lives, config.sweep_settings(),
                                horizon=horizon, jobs=config.jobs, keep_series=config.export_series)
        write_reports(sweep, config, month_index, work_dir, provenance)
        if config.dump_tensors:
            monthly_pass, monthly_tot = build_monthly(bills, horizon, month_index, legislator_index(bills, roster))
            congress_of = month_index.congress_of if config.congress_reset else None
            for half_life in config.half_lives:
                tensor = decay_accumulate(monthly_pass, monthly_tot, DecayRate(half_life), congress_of=congress_of)
                dump_tensors(tensor, os.path.join(work_dir, 'tensors'))
    except BaseException:
        shutil.rmtree(work_dir, ignore_errors=True)
        raise

    if os.path.exists(final_dir):
        shutil.rmtree(final_dir)
    os.replace(work_dir, final_dir)
    logger.info("Reports for %d configuration(s) written to %s", len(sweep), final_dir)
    return final_dir


def cmd_generate(config: RunConfig):
    bills, roster = generate(config.synth_config())
    paths = write_dataset(bills, roster, config.output_dir)
    logger.info("Synthetic dataset written to %s", config.output_dir)
    return paths


COMMANDS = {'summarize': cmd_summarize, 'run': cmd_run, 'generate': cmd_generate}


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; usage errors exit 1 here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(parser):
    parser.add_argument('--config', type=str, help='YAML config file (sectioned or flat key: value)')
    parser.add_argument('--output-dir', dest='output_dir', type=str, help='Output directory (default: outputs)')
    parser.add_argument('--chamber', type=str, help='House or Senate (default: House)')
    parser.add_argument('--timezone', type=str, help='pytz timezone for log file names (default: UTC)')
    parser.add_argument('--log-level', dest='log_level', type=str, help='Logging level (default: INFO)')


def build_parser():
    parser = ArgumentParser(description='Temporal cosponsorship influence and bill passage analysis.')
    subparsers = parser.add_subparsers(dest='command', required=True)
    suppress = argparse.SUPPRESS

    summarize_parser = subparsers.add_parser('summarize', help='Per-Congress bill summary table', argument_default=suppress)
    summarize_parser.add_argument('--bills-path', dest='bills_path', type=str, help='Bills JSONL file')
    _add_common(summarize_parser)

    run_parser = subparsers.add_parser('run', help='Full half-life sweep and report bundle', argument_default=suppress)
    run_parser.add_argument('--bills-path', dest='bills_path', type=str, help='Bills JSONL file')
    run_parser.add_argument('--roster-path', dest='roster_path', type=str, help='Roster CSV file')
    run_parser.add_argument('--aliases-path', dest='aliases_path', type=str, help='Alias CSV file (optional)')
    run_parser.add_argument('--half-lives', dest='half_lives', type=float, nargs='+', help='Half-lives in months (default: 6 12 24)')
    run_parser.add_argument('--window-months', dest='window_months', type=int, help='Window length in months (default: 4)')
    run_parser.add_argument('--measures', nargs='+', choices=MEASURES, help='Scores to evaluate (default: all four)')
    run_parser.add_argument('--aggregations', nargs='+', choices=AGGREGATIONS, help='Bill aggregations (default: mean max)')
    run_parser.add_argument('--rel-diff-mode', dest='rel_diff_mode', choices=REL_DIFF_MODES, help='Relative difference mode (default: window_averaged)')
    run_parser.add_argument('--closeness-distance', dest='closeness_distance', choices=DISTANCES, help='Closeness edge length (default: reciprocal)')
    run_parser.add_argument('--congress-reset', dest='congress_reset', action='store_true', help='Restart accumulation at each Congress')
    run_parser.add_argument('--tol', type=float, help='Eigenvector convergence tolerance (default: 1e-10)')
    run_parser.add_argument('--max-iter', dest='max_iter', type=int, help='Eigenvector iteration cap (default: 10000)')
    run_parser.add_argument('--bin-width', dest='bin_width', type=float, help='Histogram bin width (default: 0.05)')
    run_parser.add_argument('--jobs', type=int, help='Worker processes over half-lives (default: 1)')
    run_parser.add_argument('--no-plots', dest='plots', action='store_false', help='Skip SVG plots')
    run_parser.add_argument('--export-series', dest='export_series', action='store_true', help='Write influence, centrality and bill-score tables')
    run_parser.add_argument('--dump-tensors', dest='dump_tensors', action='store_true', help='Write decayed tensor triples')
    _add_common(run_parser)

    generate_parser = subparsers.add_parser('generate', help='Write a synthetic dataset', argument_default=suppress)
    for field in fields(SynthConfig):
        generate_parser.add_argument(f"--{field.name.replace('_', '-')}", dest=field.name, type=field.type,
                                     help=f"default: {field.default}")
    _add_common(generate_parser)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logger()
    try:
        config = resolve_config(args)
        log_file = create_output_dirs(config.output_dir, config.timezone)
        setup_logger(log_file, logging.getLevelName(config.log_level.upper()))
        logger.info("Running '%s' (config %s)", args.command, config.digest()[:12])
        COMMANDS[args.command](config)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_USAGE
    except DataError as e:
        logger.error("Data error: %s", e)
        return EXIT_DATA
    except ComputationError as e:
        logger.error("Computation error: %s", e)
        return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
