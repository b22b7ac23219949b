"""Second-Oseledets-vector figure: step plot of the dumped density with the
sign function overlaid and the BV envelope from the dump header annotated."""

from __future__ import annotations

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ._schema import SchemaError, read_density_dump


def plot_oseledets(dump_path, out_path) -> None:
    dump = read_density_dump(dump_path, require=("bv_norm",))
    xs = dump.x
    vs = dump.values

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.stairs(vs, xs, color="tab:blue", lw=1.4, label="second Oseledets vector")
    ax.stairs([-1.0, 1.0], [-1.0, 0.0, 1.0], color="tab:gray", ls="--", lw=1.0,
              label="sign function")
    bv = float(dump.header["bv_norm"])
    env = float(dump.header.get("bv_envelope", 15))
    eps = dump.header.get("eps", "?")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title(
        rf"Second Oseledets vector, $\varepsilon$={eps}: "
        rf"$\|v\|_{{BV}}$={bv:.3f} (envelope {env:g})",
        fontsize=10,
    )
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print("usage: tentplots-oseledets DENSITY_DUMP OUT_IMAGE", file=sys.stderr)
        return 2
    try:
        plot_oseledets(argv[0], argv[1])
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
