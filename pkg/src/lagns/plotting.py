"""Report figures written next to the CSV outputs."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.dpi": 100,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "legend.frameon": False,
}


def _save(fig, path):
    fig.tight_layout()
    # no Software/date metadata so repeated runs give identical bytes
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_diagnostics(diag, path, title=None):
    """Four-panel time history from a diagnostics column dict (see ``read_diagnostics``)."""
    t = diag["t"]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(2, 2, figsize=(9, 6.5))
        a = ax[0, 0]
        e0 = diag["E"][0]
        a.plot(t, diag["E"], label="E(t)")
        a.plot(t, diag["E"] + diag["cumV"], label=r"E(t) + $\int_0^t V$")
        a.axhline(e0, color="k", ls=":", label="$e_0$")
        a.set_xlabel("t")
        a.set_title("energy-entropy balance")
        a.legend()

        a = ax[0, 1]
        for key, ls in (("inf_v", "-"), ("sup_v", "-"), ("inf_theta", "--"), ("sup_theta", "--")):
            a.plot(t, diag[key], ls=ls, label=key)
        a.set_xlabel("t")
        a.set_title("field bounds")
        a.legend(ncol=2)

        a = ax[1, 0]
        for key in ("Linf_dev", "L2_dev", "L2_grad"):
            y = diag[key]
            if np.all(y > 0):
                a.semilogy(t, y, label=key)
        a.set_xlabel("t")
        a.set_title("deviation from (1, 0, 1)")
        if a.get_legend_handles_labels()[0]:
            a.legend()

        a = ax[1, 1]
        a.plot(t, diag["log_Y_N"], label=r"$\log Y_N$")
        a.plot(t, -t, "k:", label="$-t$")
        a.set_xlabel("t")
        a.set_title("effective-flux decay")
        a.legend()
        if title:
            fig.suptitle(title)
        _save(fig, path)


def plot_snapshots(snapshots, path):
    """Profiles of ``v``, ``u``, ``theta`` for ``[(time, snapshot_dict), ...]``."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
        cmap = plt.get_cmap("viridis")
        for k, (t, snap) in enumerate(snapshots):
            c = cmap(k / max(1, len(snapshots) - 1))
            for a, key in zip(ax, ("v", "u", "theta")):
                a.plot(snap["x"], snap[key], color=c, label=f"t={t:g}")
        for a, key in zip(ax, ("v", "u", r"$\theta$")):
            a.set_ylabel(key)
        ax[-1].set_xlabel("mass coordinate x")
        ax[0].legend(ncol=4, fontsize=7)
        _save(fig, path)


def plot_convergence(rows, path, mode="space"):
    """Log-log error against ``dx`` (space) or ``dt`` (time) with a reference slope."""
    h = np.array([r.dx if mode == "space" else r.dt for r in rows])
    e = np.array([r.error for r in rows])
    slope = 2 if mode == "space" else 1
    with plt.rc_context(STYLE):
        fig, a = plt.subplots(figsize=(5, 4))
        if np.all(e > 0):
            a.loglog(h, e, "o-", label="max-norm error")
            a.loglog(h, e[-1] * (h / h[-1]) ** slope, "k:", label=f"slope {slope}")
            a.legend()
        else:
            a.plot(h, e, "o-")
        a.set_xlabel("dx" if mode == "space" else "dt")
        a.set_ylabel("error")
        _save(fig, path)


def plot_truncation(rows, path):
    L = np.array([r[0] for r in rows])
    d = np.array([r[1] for r in rows])
    with plt.rc_context(STYLE):
        fig, a = plt.subplots(figsize=(5, 4))
        if np.all(d > 0):
            a.semilogy(L, d, "o-")
        else:
            a.plot(L, d, "o-")
        a.set_xlabel("truncation length L")
        a.set_ylabel("interior discrepancy vs largest L")
        _save(fig, path)
