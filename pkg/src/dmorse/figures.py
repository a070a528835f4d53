"""PNG renderings of the report tables (headless matplotlib)."""
from __future__ import annotations

import os
from collections import defaultdict

import numpy as np


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _by(rows, key):
    groups = defaultdict(list)
    for r in rows:
        groups[r[key]].append(r)
    return groups


def _curves(path, rows, group, xcol, ycol, xlabel, ylabel, label_fmt, hline=None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for g, rs in sorted(_by(rows, group).items()):
        ok = [r for r in rs if np.isfinite(r[ycol])]
        ax.plot([r[xcol] for r in ok], [r[ycol] for r in ok], label=label_fmt.format(g))
    if hline is not None:
        ax.axhline(hline, color="k", ls="--", lw=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render(out_dir, tables, wigner_meta) -> list[str]:
    """Write one PNG per report table into out_dir/figures; returns relative paths."""
    fdir = os.path.join(out_dir, "figures")
    os.makedirs(fdir, exist_ok=True)
    made = []

    def target(name):
        made.append(os.path.join("figures", name))
        return os.path.join(fdir, name)

    _curves(target("fig1_potential.png"), tables["fig1_potential"], "alpha", "x", "V",
            "x", "V(x) / D", "alpha = {:.3g}")
    _curves(target("fig2_density.png"), tables["fig2_density"], "alpha", "x", "density_x",
            "x", "|psi0(x)|^2", "alpha = {:.3g}")
    _curves(target("fig_ng.png"), tables["fig_ng"], "x0", "alpha", "eta_ng",
            "alpha", "eta_NG", "x0 = {:g}", hline=tables["fig_ng_baseline"])
    _curves(target("fig5_3_nc.png"), tables["fig5_3_nc"], "x0", "alpha", "eta_nc",
            "alpha", "eta_NC", "x0 = {:g}", hline=tables["fig5_3_baseline"])
    _curves(target("fig_nc_vs_ng.png"), tables["fig_nc_vs_ng"], "x0", "eta_ng", "eta_nc",
            "eta_NG", "eta_NC", "x0 = {:g}")
    _curves(target("fig_ep.png"), tables["fig_ep"], "x0", "alpha", "entropy_nats",
            "alpha", "EP (nats)", "x0 = {:g}")
    _curves(target("fig6_qfi.png"), tables["fig6_qfi"], "x0", "alpha", "qfi_closed",
            "alpha", "QFI", "x0 = {:g}")

    plt = _pyplot()
    w = tables["fig5_2_wigner"]
    xs = np.unique([r["x"] for r in w])
    ps = np.unique([r["p"] for r in w])
    W = np.array([r["W0"] for r in w]).reshape(len(xs), len(ps))
    fig, ax = plt.subplots(figsize=(5, 4))
    lim = float(np.max(np.abs(W)))
    mesh = ax.pcolormesh(xs, ps, W.T, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
    fig.colorbar(mesh, ax=ax, label="W0")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_title("alpha = {alpha:.3g}, x0 = {x0:g}".format(**wigner_meta))
    fig.tight_layout()
    fig.savefig(target("fig5_2_wigner.png"), dpi=120)
    plt.close(fig)
    return made
