"""Second-exponent sweep figure: measured points with error bars, the
-eps*E[a+b] prediction line, and the two-state Markov reference curve."""

from __future__ import annotations

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ._schema import SchemaError, read_sweep_csv


def plot_lambda2_sweep(csv_path, out_path) -> None:
    table = read_sweep_csv(csv_path)
    eps = table.column("eps")
    lam2 = table.column("lambda2")
    err = table.column("err")
    mc = table.column("mc_lambda2")
    pred = table.column("predicted")

    order = sorted(range(len(eps)), key=lambda i: eps[i])
    eps = [eps[i] for i in order]
    lam2 = [lam2[i] for i in order]
    err = [err[i] for i in order]
    mc = [mc[i] for i in order]
    pred = [pred[i] for i in order]

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.errorbar(eps, lam2, yerr=err, fmt="o", color="tab:blue", capsize=3,
                label=r"measured $\lambda_2$", zorder=3)
    ax.plot(eps, pred, "--", color="tab:gray", label=r"prediction $-\varepsilon\,E[a+b]$")
    ax.plot(eps, mc, "-", color="tab:orange", alpha=0.8,
            label="two-state Markov reference")
    ax.set_xlabel(r"leakage strength $\varepsilon$")
    ax.set_ylabel(r"$\lambda_2$  (nats / step)")
    title = "Second Lyapunov exponent vs leakage"
    if "slope" in table.footer:
        title += f"   (fitted slope {float(table.footer['slope']):.4f})"
    ax.set_title(title, fontsize=10)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print("usage: tentplots-sweep SWEEP_CSV OUT_IMAGE", file=sys.stderr)
        return 2
    try:
        plot_lambda2_sweep(argv[0], argv[1])
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
