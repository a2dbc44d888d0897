"""Scatter plot of a polygamy sweep.

    cohlab sweep polygamy --dims 2x3 --samples 10000 --seed 1 --out sweep.csv
    python3 samples/plot_polygamy.py sweep.csv sweep.png
"""
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

src = sys.argv[1]
dst = sys.argv[2] if len(sys.argv) > 2 else "polygamy.png"
df = pd.read_csv(src, comment="#")

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
axes[0].scatter(df.c12, (1 - df.c1) * (1 - df.c2), s=2)
x = [df.c12.min(), df.c12.max()]
axes[0].plot(x, [1 - v for v in x], "k--", lw=1)
axes[0].set_xlabel("C(rho_AB)")
axes[0].set_ylabel("(1 - C(rho_A)) (1 - C(rho_B))")

axes[1].scatter(df.c12, df.gap_cor1_sym, s=2)
axes[1].axhline(0, color="k", lw=1)
axes[1].set_xlabel("C(rho_AB)")
axes[1].set_ylabel("symmetric-form gap")

fig.tight_layout()
fig.savefig(dst, dpi=150)
