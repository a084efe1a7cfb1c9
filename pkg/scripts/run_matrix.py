"""Run one or more experiment configs and print where the tables landed.

    python3 scripts/run_matrix.py configs/pd_scripted.json configs/rps_scripted.json --jobs 4
"""

import argparse
import sys

from cfgames.harness import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("configs", nargs="+")
    ap.add_argument("--jobs", type=int)
    ap.add_argument("--resume", action="store_true")
    args = ap.parse_args()
    status = 0
    for path in args.configs:
        result = run_experiment(ExperimentConfig.load(path), jobs=args.jobs, resume=args.resume)
        cells = result.manifest["cells"]
        print(f"{path}: {len(cells)} cells, {len(result.failed)} not ok -> {result.out_dir / 'tables.txt'}")
        status |= bool(result.failed)
    return status


if __name__ == "__main__":
    sys.exit(main())
