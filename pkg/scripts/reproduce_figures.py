"""Write the CSV dataset behind every preset into a directory.

    python scripts/reproduce_figures.py --out-dir data --jobs 4
"""
import argparse
import pathlib
import time

from bandgap_esd.experiments import PRESET_NAMES, check_orderings, run_preset
from bandgap_esd.table import to_csv, write_text


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="data", help="directory for <preset>.csv files")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    ap.add_argument("--presets", nargs="*", default=list(PRESET_NAMES), choices=PRESET_NAMES)
    args = ap.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.presets:
        t0 = time.perf_counter()
        table = run_preset(name, jobs=args.jobs)
        write_text(to_csv(table), str(out / f"{name}.csv"))
        print(f"{name:6s} {len(table):7d} rows  {time.perf_counter() - t0:6.2f}s")

    for res in check_orderings():
        print(res.line())


if __name__ == "__main__":
    main()
