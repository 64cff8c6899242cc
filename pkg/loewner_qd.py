#!/usr/bin/env python3
"""
Loewner QD Command Line
Runs chordal, multi-slit, radial and oracle jobs from JSON files and writes
CSV traces plus optional SVG/PNG figures.

Exit codes: 0 success, 1 unreadable job, 2 numerical failure (partial CSV
written), 3 check deviation above tolerance.
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import qd_config as config
from src.errors import JobError, LoewnerQDError
from src.evolution.chordal import trace
from src.evolution.multislit import multi_trace
from src.evolution.radial import radial_trace
from src.evolution.run_config import RunConfig
from src.evolution.trace_result import TraceResult
from src.oracle.zipper import DISC, polyline_driving, radial_polyline_driving, sup_deviation
from src.ui.jobs import Job, polyline_for_oracle
from src.ui.plots import write_png, write_svg

logger = logging.getLogger('loewner_qd')

COMMANDS = ('trace', 'multi', 'radial', 'oracle', 'check')
EXIT_OK, EXIT_JOB, EXIT_NUMERICAL, EXIT_CHECK = 0, 1, 2, 3


def configure_logging(environ: Optional[Dict[str, str]] = None):
    """Set the library log level from the environment (off by default)"""
    environ = os.environ if environ is None else environ
    name = environ.get(config.LOGGING['env_var'], 'off').strip().lower()
    level = config.LOGGING['levels'].get(name)
    if name not in config.LOGGING['levels']:
        print(f"unknown {config.LOGGING['env_var']}={name!r}, logging stays off", file=sys.stderr)
    if level is None:
        logging.getLogger('src').setLevel(logging.CRITICAL + 1)
        logger.setLevel(logging.CRITICAL + 1)
        return
    logging.basicConfig(level=getattr(logging, level), format=config.LOGGING['format'],
                        stream=sys.stderr)
    logging.getLogger('src').setLevel(getattr(logging, level))
    logger.setLevel(getattr(logging, level))


def build_config(job: Job, cli_overrides: Dict[str, object]) -> RunConfig:
    """qd_config defaults, then the job's config block, then command-line flags"""
    return RunConfig().updated(job.overrides).updated(cli_overrides)


def execute(command: str, job: Job, cfg: RunConfig) -> Tuple[TraceResult, Optional[list], Optional[float]]:
    """Run one command; returns the result, reference vertices and (check) deviation"""
    if command == 'trace':
        qd, start, segments, path = job.chordal_inputs()
        return trace(qd, start, segments, cfg), path.vertices if path else None, None
    if command == 'multi':
        qd, starts, weights, capacity = job.multi_inputs()
        return multi_trace(qd, starts, weights, capacity, cfg), None, None
    if command == 'radial':
        qd, start, capacity = job.radial_inputs()
        return radial_trace(qd, start, capacity, cfg), None, None
    if command == 'oracle':
        path = polyline_for_oracle(job)
        if path.domain == DISC:
            return radial_polyline_driving(path, cfg.n_subdiv), path.vertices, None
        oracle = polyline_driving(path, cfg.n_subdiv, cfg.tol_newton, cfg.oracle_refine)
        return oracle, path.vertices, None
    if command == 'check':
        qd, start, segments, path = job.chordal_inputs()
        if path is None:
            raise JobError(f"{job.source}: check needs a 'lattice' or 'path'")
        chordal = trace(qd, start, segments, cfg)
        oracle = polyline_driving(path, cfg.n_subdiv, cfg.tol_newton, cfg.oracle_refine)
        return chordal, path.vertices, sup_deviation(chordal, oracle)
    raise JobError(f"unknown command {command!r}")


def run_job(command: str, job_file: str, outputs: Dict[str, Optional[str]],
            cli_overrides: Dict[str, object], tolerance: Optional[float] = None) -> int:
    try:
        job = Job.load(job_file)
        cfg = build_config(job, cli_overrides)
    except (JobError, LoewnerQDError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_JOB

    try:
        result, vertices, deviation = execute(command, job, cfg)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_JOB
    except LoewnerQDError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if outputs.get('csv'):
        with open(outputs['csv'], 'w', encoding='utf-8', newline='') as handle:
            result.to_csv(handle)
        logger.info("wrote %s", outputs['csv'])
    elif deviation is None:
        sys.stdout.write(result.to_csv())
    if outputs.get('svg'):
        write_svg(result, outputs['svg'], vertices)
    if outputs.get('png'):
        write_png(result, outputs['png'], vertices)

    if result.stop_reason == 'numerical_failure':
        print(f"{job_file}: stopped early: {result.message}", file=sys.stderr)
        return EXIT_NUMERICAL
    if deviation is not None:
        limit = job.tolerance if tolerance is None else tolerance
        print(f"sup_deviation={deviation!r} tolerance={limit!r}")
        return EXIT_OK if deviation < limit else EXIT_CHECK
    return EXIT_OK


def _outputs(job_file: str, args: argparse.Namespace, many: bool) -> Dict[str, Optional[str]]:
    if not many:
        return {'csv': args.csv, 'svg': args.svg, 'png': args.png}
    base = Path(args.out_dir) if args.out_dir else Path(job_file).parent
    stem = base / Path(job_file).stem
    return {'csv': f"{stem}.csv",
            'svg': f"{stem}.svg" if args.plot else None,
            'png': f"{stem}.png" if args.plot else None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='loewner-qd',
        description='Driving functions of Loewner slits made of quadratic-differential trajectories.')
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--job', nargs='+', required=True, help='JSON job file(s)')
    parser.add_argument('--csv', help='CSV output (single job; default stdout)')
    parser.add_argument('--svg', help='SVG figure output (single job)')
    parser.add_argument('--png', help='PNG figure output (single job)')
    parser.add_argument('--out-dir', help='output directory when several jobs are given')
    parser.add_argument('--plot', action='store_true', help='write figures for several jobs')
    parser.add_argument('--jobs', type=int, default=1, help='worker processes for several jobs')
    parser.add_argument('--h', type=float, help='step size')
    parser.add_argument('--order', type=int, help='Taylor order (1-8)')
    parser.add_argument('--s', type=float, help='startup capacity time')
    parser.add_argument('--n-subdiv', type=int, help='oracle subdivisions per edge')
    parser.add_argument('--refine', type=int, help='oracle rows per elementary slit')
    parser.add_argument('--multi-mode', choices=('derived', 'printed'))
    parser.add_argument('--radial-mode', choices=('residue', 'origin', 'printed'))
    parser.add_argument('--tol', type=float, help='check tolerance (overrides the job)')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    overrides = {'h': args.h, 'order': args.order, 's': args.s, 'n_subdiv': args.n_subdiv,
                 'oracle_refine': args.refine, 'multi_mode': args.multi_mode,
                 'radial_mode': args.radial_mode}
    many = len(args.job) > 1
    if many and args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    tasks = [(args.command, job_file, _outputs(job_file, args, many), overrides, args.tol)
             for job_file in args.job]

    if many and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes: List[int] = list(pool.map(run_job, *zip(*tasks)))
    else:
        codes = [run_job(*task) for task in tasks]
    return max(codes)


if __name__ == '__main__':
    sys.exit(main())
