#!/usr/bin/env python3
"""End-to-end figure pipeline: run the sweep and the Oseledets pullback,
then render both canonical figures with the tentplots frontend (must be
installed separately from frontend/)."""

import pathlib
import shutil
import subprocess
import sys

from tentcocycle.experiments import main as cli


def run():
    out = pathlib.Path("out")
    out.mkdir(exist_ok=True)
    rc = cli([
        "sweep", "--eps", "0.04,0.02,0.01,0.005", "--driver", "iid_uniform(0,1,0,1)",
        "--steps", "20000", "--seed", "42", "--backend", "exact",
        "--out", str(out / "sweep.csv"),
    ])
    if rc:
        return rc
    rc = cli([
        "oseledets", "--eps", "0.01", "--driver", "constant(1,1)", "--depth", "200",
        "--out", str(out / "oseledets.txt"),
    ])
    if rc:
        return rc
    for script, src, dst in (
        ("tentplots-sweep", out / "sweep.csv", out / "sweep.svg"),
        ("tentplots-oseledets", out / "oseledets.txt", out / "oseledets.svg"),
    ):
        if shutil.which(script) is None:
            print(f"{script} not installed; skipping figure (pip install -e frontend/)", file=sys.stderr)
            continue
        subprocess.run([script, str(src), str(dst)], check=True)
        print(f"wrote {dst}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
