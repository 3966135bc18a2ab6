"""Run every bundled scenario and write the figure data under an output directory.

    python scripts/reproduce_figures.py [--outdir figures] [--only fig3 fig7]
"""
import argparse
import time
from pathlib import Path

from nhjump import cli
from nhjump.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--only", nargs="*", default=list(cli.BUNDLED))
    args = ap.parse_args()
    outdir = Path(args.outdir)
    for name in args.only:
        scn = load_scenario(cli.bundled_path(name))
        t0 = time.perf_counter()
        paths = cli.execute(scn, str(outdir / name))
        print(f"{name:9s} {time.perf_counter() - t0:6.1f}s  " + " ".join(p.name for p in paths))


if __name__ == "__main__":
    main()
