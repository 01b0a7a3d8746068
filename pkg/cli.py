"""
Command-line front end.

    python cli.py instance.cnf [--bce off|pre|dyn] [--stats] [--oracle-check]
                               [--cache-cap N] [--timeout S]
    python cli.py --bench DIR [--modes off,pre,dyn] [--jobs N] [--timeout S]
"""
import argparse
import csv
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from joblib import Parallel, delayed
from pydantic import BaseModel, Field, ValidationError

from core.config import get_settings
from core.exceptions import (CountTimeout, DimacsParseError, OracleBoundExceeded,
                             OracleMismatch, ProjCountError)
from core.logger_config import logger
from models.formula import parse_dimacs
from services.counter import BceMode, CountResult, count
from services.oracle import brute_force_projected_count

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_TIMEOUT = 3
EXIT_ORACLE_MISMATCH = 4

CSV_HEADER = ["instance", "mode", "status", "count", "wall_s", "decisions",
              "blocked_removed", "blocked_per_decision", "cache_hits"]


class RunConfig(BaseModel):
    input_path: Path
    mode: BceMode = BceMode.DYN
    stats: bool = False
    oracle_check: bool = False
    cache_cap: Optional[int] = Field(default=None, ge=1)
    timeout_seconds: Optional[float] = Field(default=None, gt=0)


def _count_file(path: Path, mode: BceMode, cache_cap: Optional[int],
                timeout: Optional[float]):
    formula = parse_dimacs(path.read_bytes())
    return formula, count(formula, mode, cache_cap=cache_cap, timeout=timeout)


def _print_result(result: CountResult, with_stats: bool, out: TextIO) -> None:
    out.write("c s type pmc\n")
    if with_stats:
        stats = result.stats
        out.write(f"c stat decisions {stats.decisions}\n")
        out.write(f"c stat blocked_removed {stats.blocked_removed}\n")
        out.write(f"c stat cache_hits {stats.cache_hits}\n")
        out.write(f"c stat cache_stores {stats.cache_stores}\n")
        out.write(f"c stat max_depth {stats.max_depth}\n")
        out.write(f"c stat sat_leaf_calls {stats.sat_leaf_calls}\n")
    out.write(f"c s exact arb int {result.count}\n")


def run(config: RunConfig, out: Optional[TextIO] = None) -> int:
    """Counts one instance and prints competition-style output."""
    start = time.monotonic()
    try:
        formula, result = _count_file(config.input_path, config.mode,
                                      config.cache_cap, config.timeout_seconds)
    except OSError as e:
        logger.error(f"[COUNT] cannot read {config.input_path}: {e}")
        return EXIT_INPUT_ERROR
    except DimacsParseError as e:
        logger.error(f"[PARSE] {config.input_path}: {e}")
        return EXIT_INPUT_ERROR
    except CountTimeout as e:
        logger.error(f"[COUNT] {config.input_path}: {e}")
        return EXIT_TIMEOUT

    if config.oracle_check:
        try:
            expected = brute_force_projected_count(formula)
        except OracleBoundExceeded as e:
            logger.warning(f"[ORACLE] check skipped: {e}")
        else:
            if expected != result.count:
                error = OracleMismatch(result.count, expected)
                logger.error(f"[ORACLE] {config.input_path}: {error}")
                return EXIT_ORACLE_MISMATCH
            logger.info(f"[ORACLE] count {expected} confirmed")

    _print_result(result, config.stats, out or sys.stdout)
    logger.info(f"[COUNT] {config.input_path} solved in {time.monotonic() - start:.3f}s")
    return EXIT_OK


def _bench_one(path: Path, mode: BceMode, cache_cap: Optional[int],
               timeout: Optional[float]) -> List[str]:
    start = time.monotonic()
    try:
        _, result = _count_file(path, mode, cache_cap, timeout)
    except CountTimeout:
        return [path.name, mode.value, "TIMEOUT", "TIMEOUT", f"{time.monotonic() - start:.3f}",
                "", "", "", ""]
    except (OSError, ProjCountError) as e:
        logger.error(f"[BENCH] {path.name} ({mode.value}): {e}")
        return [path.name, mode.value, "ERROR", "ERROR", f"{time.monotonic() - start:.3f}",
                "", "", "", ""]
    wall = time.monotonic() - start
    stats = result.stats
    per_decision = stats.blocked_removed / max(stats.decisions, 1)
    return [path.name, mode.value, "OK", str(result.count), f"{wall:.3f}", str(stats.decisions),
            str(stats.blocked_removed), f"{per_decision:.4f}", str(stats.cache_hits)]


def list_instances(directory: Path) -> List[Path]:
    return sorted(p for p in directory.iterdir() if p.is_file() and not p.name.startswith("."))


def benchmark(directory: Path, modes: Sequence[BceMode], cache_cap: Optional[int] = None,
              timeout: Optional[float] = None, jobs: int = 1, out: Optional[TextIO] = None) -> int:
    """One CSV row per (instance, mode), in input order."""
    instances = list_instances(Path(directory))
    tasks = [(path, BceMode(mode)) for path in instances for mode in modes]
    logger.info(f"[BENCH] {len(instances)} instances x {len(modes)} modes, jobs={jobs}")
    rows = Parallel(n_jobs=jobs)(
        delayed(_bench_one)(path, mode, cache_cap, timeout) for path, mode in tasks
    )
    writer = csv.writer(out or sys.stdout, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    return EXIT_OK


def _parse_modes(text: str) -> List[BceMode]:
    try:
        return [BceMode(part.strip().lower()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("modes must be a comma-separated subset of off,pre,dyn")


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(description="Projected model counter with blocked-clause elimination")
    parser.add_argument("input", nargs="?", type=Path, help="DIMACS CNF file")
    parser.add_argument("--bce", choices=[m.value for m in BceMode], default=settings.default_mode,
                        help="blocked-clause elimination: off, pre (root only) or dyn (every decision)")
    parser.add_argument("--stats", action="store_true", help="print 'c stat' lines")
    parser.add_argument("--oracle-check", action="store_true",
                        help="compare with brute-force enumeration when small enough")
    parser.add_argument("--cache-cap", type=int, default=settings.cache_cap,
                        help="reset the component cache when it holds this many entries")
    parser.add_argument("--timeout", type=float, default=None, help="seconds per count")
    parser.add_argument("--bench", type=Path, default=None, help="benchmark every instance in DIR")
    parser.add_argument("--modes", type=_parse_modes, default=list(BceMode),
                        help="benchmark modes, e.g. off,dyn")
    parser.add_argument("--jobs", type=int, default=settings.bench_jobs, help="parallel benchmark workers")
    parser.add_argument("--log-level", default=None, help="override PROJCOUNT_LOG_LEVEL")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        logger.setLevel(args.log_level.upper())
    if args.bench is not None:
        if not args.bench.is_dir():
            logger.error(f"[BENCH] not a directory: {args.bench}")
            return EXIT_INPUT_ERROR
        return benchmark(args.bench, args.modes, args.cache_cap, args.timeout, args.jobs)
    if args.input is None:
        parser.error("an input file or --bench DIR is required")
    try:
        config = RunConfig(input_path=args.input, mode=args.bce, stats=args.stats,
                           oracle_check=args.oracle_check, cache_cap=args.cache_cap,
                           timeout_seconds=args.timeout)
    except ValidationError as e:
        logger.error(f"invalid options: {e}")
        return EXIT_INPUT_ERROR
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
