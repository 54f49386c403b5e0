"""PNG figures of scenario results.

matplotlib is imported on first use only, with the non-interactive Agg
backend, so the numerical core never depends on it.
"""

import os

import numpy as np

from .errors import ConfigError


def _pyplot():
    try:
        import matplotlib
    except ImportError:
        raise ConfigError("figures need matplotlib; install the 'plot' extra", "--plot")
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _by_chi(table):
    chi = table.column("chi")
    for c in dict.fromkeys(chi.tolist()):
        yield c, chi == c


def plot_surfaces(result, directory):
    plt = _pyplot()
    t = result.tables["surfaces"]
    paths = []
    for chi, sel in _by_chi(t):
        R = t.column("R")[sel]
        n_states = sum(c.startswith("E_") for c in t.columns)
        fig, ax = plt.subplots(figsize=(6, 4.5))
        N_all = np.stack([t.column(f"N_{j}")[sel] for j in range(n_states)])
        vmax = max(1.0, float(N_all.max()))
        for j in range(n_states):
            E = t.column(f"E_{j}")[sel]
            sc = ax.scatter(R, E, c=N_all[j], s=3, cmap="viridis", vmin=0, vmax=vmax)
        E_all = np.stack([t.column(f"E_{j}")[sel] for j in range(n_states)])
        top = float(E_all[:, -1].max())
        ax.set_ylim(float(E_all.min()) - 0.02, top + 0.1 * (top - float(E_all.min())))
        for label, entry in result.summary["crossings"][repr(chi)].items():
            if entry["r"] is not None:
                ax.axvline(entry["r"], color="0.6", lw=0.6, ls=":")
                ax.annotate(label, (entry["r"], 0.02), xycoords=("data", "axes fraction"),
                            ha="center", fontsize=8)
        fig.colorbar(sc, ax=ax, label="<N>")
        ax.set_xlabel("R (bohr)")
        ax.set_ylabel("E (hartree)")
        ax.set_title(f"polariton surfaces, chi = {chi:g} a.u.")
        fig.tight_layout()
        path = os.path.join(directory, f"surfaces_chi{chi:g}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths


def plot_splittings(result, directory):
    plt = _pyplot()
    t = result.tables["splittings"]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    chi, var, cross, gap = (t.column("chi"), t.column("variant"), t.column("crossing"),
                            t.column("gap").astype(float))
    styles = {"pf": "-o", "rabi": "--s", "jc": ":^"}
    for v in dict.fromkeys(var.tolist()):
        for c in dict.fromkeys(cross.tolist()):
            sel = (var == v) & (cross == c)
            ax.semilogy(chi[sel].astype(float), np.abs(gap[sel]), styles.get(v, "-"),
                        ms=3, label=f"{v} {c}")
    ax.set_xlabel("chi (a.u.)")
    ax.set_ylabel("splitting (hartree)")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    path = os.path.join(directory, "splittings.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def _series(result, name, quantities, ylabel, directory, fname):
    plt = _pyplot()
    t = result.tables[name]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for chi, sel in _by_chi(t):
        for q in quantities:
            if q in t.columns:
                ax.plot(t.column("time")[sel], t.column(q)[sel], lw=1,
                        label=f"{q}, chi = {chi:g}" if len(quantities) > 1 else f"chi = {chi:g}")
    ax.set_xlabel("t (a.u.)")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    fig.tight_layout()
    path = os.path.join(directory, fname)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_downconversion(result, directory):
    plt = _pyplot()
    t = result.tables["downconversion"]
    rhos = [c for c in t.columns if c.startswith("rho_") and c != "rho_sum"]
    chis = list(_by_chi(t))
    fig, axes = plt.subplots(len(chis), 1, figsize=(6, 2.6 * len(chis) + 0.8),
                             sharex=True, squeeze=False)
    for ax, (chi, sel) in zip(axes[:, 0], chis):
        for i, q in enumerate(rhos):
            ax.plot(t.column("time")[sel], t.column(q)[sel], lw=1, color=f"C{i}",
                    label=q.replace("rho_", "n = "))
        ax.set_ylabel("rho_n")
        ax.set_title(f"chi = {chi:g} a.u.", fontsize=9)
    axes[0, 0].legend(fontsize=7, ncol=3)
    axes[-1, 0].set_xlabel("t (a.u.)")
    fig.tight_layout()
    path = os.path.join(directory, "pfs_populations.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [_series(result, "downconversion", ["photon_number"], "<N>", directory,
                    "photon_number.png"), path]


def plot_dissociation(result, directory):
    return [_series(result, "dissociation", ["dissociation"], "dissociation probability",
                    directory, "dissociation.png")]


PLOTTERS = {
    "surfaces": plot_surfaces,
    "splittings": plot_splittings,
    "downconversion": plot_downconversion,
    "dissociation": plot_dissociation,
}


def plot_result(result, directory):
    os.makedirs(directory, exist_ok=True)
    return PLOTTERS[result.scenario](result, directory)
