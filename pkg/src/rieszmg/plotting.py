"""Optional PNG rendering of the figure data (needs matplotlib)."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def _groups(tab, keys):
    idx = [tab.header.index(k) for k in keys]
    out = {}
    for r in tab.rows:
        out.setdefault(tuple(r[i] for i in idx), []).append(r)
    return out


def _xy(tab, rows, xname, yname):
    xi, yi = tab.header.index(xname), tab.header.index(yname)
    return np.array([r[xi] for r in rows], float), np.array([r[yi] for r in rows], float)


def render_figures(tabs, out_dir, dpi=120):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    written = []

    def save(fig, name):
        p = out / f"{name}.png"
        fig.tight_layout()
        fig.savefig(p, dpi=dpi)
        plt.close(fig)
        written.append(p)

    t = tabs["ck_vs_level"]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for (a,), rows in _groups(t, ["alpha"]).items():
        ax.plot(*_xy(t, rows, "level", "C_k"), marker="o", ms=3, label=f"alpha={a}")
    ax.set_xlabel("level k")
    ax.set_ylabel("C_k")
    ax.legend()
    save(fig, "ck_vs_level")

    t = tabs["coarse_symbols"]
    groups = _groups(t, ["alpha"])
    fig, axes = plt.subplots(1, len(groups), figsize=(3.2 * len(groups), 3), squeeze=False)
    for ax, ((a,), rows) in zip(axes[0], groups.items()):
        for name in t.header[2:]:
            ax.plot(*_xy(t, rows, "x", name), lw=1)
        ax.set_title(f"alpha={a}")
        ax.set_xlabel("x")
    save(fig, "coarse_symbols")

    for name, yname in (("f_vs_gs", "g_s"), ("delta_s", "delta_s"), ("kappa_minus_1", "kappa_minus_1")):
        t = tabs[name]
        groups = _groups(t, ["alpha"])
        fig, axes = plt.subplots(1, len(groups), figsize=(3.2 * len(groups), 3), squeeze=False)
        for ax, ((a,), rows) in zip(axes[0], groups.items()):
            by_s = _groups(type(t)(t.header, rows), ["s"])
            for (s,), sub in by_s.items():
                ax.plot(*_xy(t, sub, "x", yname), lw=1, label=f"s={s}")
            if name == "f_vs_gs":
                first = next(iter(by_s.values()))
                ax.plot(*_xy(t, first, "x", "f"), "k--", lw=1, label="f")
            ax.set_title(f"alpha={a}")
            ax.set_xlabel("x")
        axes[0][0].legend(fontsize=7)
        save(fig, name)

    t = tabs["g_monotone"]
    groups = _groups(t, ["alpha"])
    fig, axes = plt.subplots(1, len(groups), figsize=(3.2 * len(groups), 3), squeeze=False)
    for ax, ((a,), rows) in zip(axes[0], groups.items()):
        for (k,), sub in _groups(type(t)(t.header, rows), ["k"]).items():
            ax.plot(*_xy(t, sub, "x", "g"), lw=1)
        ax.set_title(f"alpha={a}")
        ax.set_xlabel("x")
    save(fig, "g_monotone")
    return written
