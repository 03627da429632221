"""Caputo vs T-Caputo curves on (0, t_max]; optionally plot them.

    python scripts/curve_agreement.py --plot curves.png
"""

import argparse
from collections import defaultdict

from fracmim.frac_deriv import agreement_curves

CASES = {"cos": [0.1, 0.3, 0.6, 0.9], "sin": [1.1, 1.3, 1.6, 1.9]}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--t-max", type=float, default=20.0)
    parser.add_argument("--samples", type=int, default=400)
    parser.add_argument("--plot", help="write a figure (needs matplotlib)")
    args = parser.parse_args()

    curves = {}
    for name, alphas in CASES.items():
        points = agreement_curves(name, alphas, args.t_max, args.samples)
        by_alpha = defaultdict(list)
        for p in points:
            by_alpha[p.alpha].append(p)
        for alpha, pts in sorted(by_alpha.items()):
            diff = max(abs(p.caputo - p.tcaputo) for p in pts)
            print(f"{name} alpha={alpha}: max |caputo - tcaputo| = {diff:.3e}")
        curves[name] = by_alpha

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
        for row, (name, by_alpha) in enumerate(curves.items()):
            for alpha, pts in sorted(by_alpha.items()):
                t = [p.t for p in pts]
                axes[row, 0].plot(t, [p.tcaputo for p in pts], label=f"alpha={alpha}")
                axes[row, 1].plot(t, [p.caputo for p in pts], label=f"alpha={alpha}")
            axes[row, 0].set_title(f"T-Caputo of {name} t")
            axes[row, 1].set_title(f"Caputo of {name} t")
            axes[row, 0].legend(fontsize=7)
        for ax in axes[-1]:
            ax.set_xlabel("t")
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
