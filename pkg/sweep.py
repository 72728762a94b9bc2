#!/usr/bin/env python3
"""
Run Acceptance Checks

Runs the acceptance checks of the strong-separation logic tools over their
parameter grids in a process pool and prints cases, failures and errors per
check.

Copyright (c) 2025 Konrad Rieck. MIT License
"""

import argparse
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed

import numpy as np
import pandas as pd
from sklearn.model_selection import ParameterGrid
from tqdm import tqdm

from checks.registry import checks

logger = logging.getLogger(__name__)


def _plain(params):
    # Grids are built with numpy ranges; workers get native ints
    return {k: v.item() if isinstance(v, np.generic) else v for k, v in params.items()}


def parse_args():
    parser = argparse.ArgumentParser(description="Acceptance checks")
    parser.add_argument(
        "-c",
        "--max-combi",
        type=int,
        default=100,
        help="Maximum number of combinations per check (default: 100)",
    )
    parser.add_argument(
        "-s",
        "--seed",
        type=int,
        default=0,
        help="Seed for sampling combinations (default: 0)",
    )
    parser.add_argument(
        "-f",
        "--failures",
        action="store_true",
        default=False,
        help="Print failure records",
    )
    parser.add_argument(
        "checks",
        type=str,
        nargs="+",
        metavar="<check>",
        help=f"Checks to run or 'all'. Available: {list(checks)}",
    )
    args = parser.parse_args()

    if "all" in args.checks:
        args.checks = list(checks)
    unknown = sorted(set(args.checks) - set(checks))
    if unknown:
        parser.error(f"unknown checks: {unknown}")
    return args


def sample_grid(check_name, max_combi, seed):
    """Parameter combinations of a check, subsampled to max_combi."""
    grid = [_plain(p) for p in ParameterGrid(checks[check_name].get_param_grid())]
    if len(grid) <= max_combi:
        return grid
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(grid), size=max_combi, replace=False)
    return [grid[i] for i in sorted(picked)]


def run_check(check_name, params):
    check = checks[check_name](**params)
    failures = check.run()
    return {"cases": check.cases, "failures": failures, "error": None}


def sweep(check_names, max_combi, seed):
    """Run every combination of the named checks and collect one row each."""
    jobs = [
        (name, params)
        for name in check_names
        for params in sample_grid(name, max_combi, seed)
    ]
    rows = []
    with ProcessPoolExecutor() as executor:
        futures = {executor.submit(run_check, *job): job for job in jobs}
        for future in tqdm(as_completed(futures), total=len(jobs), leave=False):
            name, params = futures[future]
            try:
                result = future.result()
            except Exception as e:
                logger.error("Check %s failed with %s: %s", name, params, e)
                result = {"cases": 0, "failures": [], "error": str(e)}
            rows.append({"check": name, "params": params, **result})
    return pd.DataFrame(rows, columns=["check", "params", "cases", "failures", "error"])


def main():
    args = parse_args()
    logging.basicConfig(level=logging.WARNING)

    frame = sweep(args.checks, args.max_combi, args.seed)
    frame["failed"] = frame["failures"].map(len)
    frame["errored"] = frame["error"].notna().astype(int)
    summary = frame.groupby("check", sort=False).agg(
        runs=("cases", "size"),
        cases=("cases", "sum"),
        failures=("failed", "sum"),
        errors=("errored", "sum"),
    )

    for name in args.checks:
        row = summary.loc[name]
        print(f"- check: {name}")
        for column in summary.columns:
            print(f"  {column}: {int(row[column])}")
        if args.failures:
            for records in frame.loc[frame["check"] == name, "failures"]:
                for record in records:
                    print(f"  - {record}")

    if summary["failures"].sum() or summary["errors"].sum():
        raise SystemExit(1)


if __name__ == "__main__":
    main()
