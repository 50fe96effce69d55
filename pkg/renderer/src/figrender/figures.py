"""Figure builders for the five trajectory-CSV layouts.

Each builder takes the scenario output directory and returns a matplotlib
Figure with a fixed canvas size and panel layout:

* ``fig1`` - coefficient flow: one panel, all q_l(t) curves with the
  initially-largest one highlighted in red.
* ``fig2`` - Bell-model run: six panels; 3D Bloch trajectories of both spins
  (initial points marked with green crosses) plus purity, tau, projector
  occupation, and free energy time series.
* ``fig3`` - truncated-block run: one 3D panel with the unit sphere, the
  trajectory, a green cross at the start, a blue axis line along the applied
  field with a blue cross at its unit point, and a cyan cross at the thermal
  equilibrium point computed from the run record.
* ``fig4`` - coupled-spin mean-field run: two 3D panels (spin a, spin b),
  green crosses at the start; a red cross marks the tail point when the
  verdict file classifies the run as a fixed point.
* ``fig5`` - Bloch-matrix collapse: three stacked panels; purity (linear),
  entanglement (log), and all Bloch-matrix singular values (log).
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import InputError, meta_float, read_meta, read_table

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5")


def _sphere(ax, radius=1.0):
    u = np.linspace(0, 2 * np.pi, 24)
    v = np.linspace(0, np.pi, 16)
    x = radius * np.outer(np.cos(u), np.sin(v))
    y = radius * np.outer(np.sin(u), np.sin(v))
    z = radius * np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(x, y, z, color="0.85", linewidth=0.3)
    ax.set_box_aspect((1, 1, 1))
    for setter in (ax.set_xlim, ax.set_ylim, ax.set_zlim):
        setter(-1.05, 1.05)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")


def _cross(ax, point, color):
    ax.scatter(*point, marker="x", s=80, color=color, depthshade=False, zorder=5)


def build_fig1(indir: str):
    _, data = read_table(os.path.join(indir, "schmidt_q.csv"))
    ts, qs = data[:, 0], data[:, 1:]
    if qs.shape[1] < 2:
        raise InputError("schmidt_q.csv: need at least two coefficient columns")
    winner = int(np.argmax(qs[0]))
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    for i in range(qs.shape[1]):
        if i != winner:
            ax.plot(ts, qs[:, i], color="0.5", linewidth=0.9)
    ax.plot(ts, qs[:, winner], color="red", linewidth=1.6, label=f"q{winner + 1} (initial max)")
    ax.set_xlabel("t")
    ax.set_ylabel("coefficients")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="center right", fontsize=8)
    fig.tight_layout()
    return fig


_FIG2_HEADER = ("t", "kax", "kay", "kaz", "kbx", "kby", "kbz", "purity", "tau", "PB", "UH")


def build_fig2(indir: str):
    names, data = read_table(os.path.join(indir, "bell_traj.csv"), expected_prefix=_FIG2_HEADER)
    col = {n: data[:, i] for i, n in enumerate(names)}
    fig = plt.figure(figsize=(8.0, 9.6), dpi=120)
    ax_a = fig.add_subplot(3, 2, 1, projection="3d")
    ax_b = fig.add_subplot(3, 2, 2, projection="3d")
    for ax, prefix, label in ((ax_a, "ka", "spin a"), (ax_b, "kb", "spin b")):
        _sphere(ax)
        xs, ys, zs = col[prefix + "x"], col[prefix + "y"], col[prefix + "z"]
        ax.plot(xs, ys, zs, linewidth=0.7, color="tab:blue")
        _cross(ax, (xs[0], ys[0], zs[0]), "green")
        ax.set_title(label, fontsize=9)
    panels = (("purity", "purity", {}), ("tau", "entanglement", {}),
              ("PB", "projector occupation", {}), ("UH", "free energy", {}))
    for i, (name, label, _) in enumerate(panels):
        ax = fig.add_subplot(3, 2, 3 + i)
        ax.plot(col["t"], col[name], linewidth=0.9)
        ax.set_xlabel("t")
        ax.set_ylabel(label)
    fig.tight_layout()
    return fig


def build_fig3(indir: str):
    _, data = read_table(os.path.join(indir, "trunc_traj.csv"), expected_prefix=("t", "kx", "ky", "kz"))
    meta = read_meta(os.path.join(indir, "run.meta"))
    src = os.path.join(indir, "run.meta")
    w = np.array([meta_float(meta, k, src) for k in ("wEx", "wEy", "wEz")])
    beta_w = meta_float(meta, "beta_omega_E", src)
    w_norm = np.linalg.norm(w)
    if w_norm == 0:
        raise InputError(f"{src}: zero field vector")
    w_hat = w / w_norm
    thermal = -np.tanh(beta_w / 2.0) * w_hat

    fig = plt.figure(figsize=(5.6, 5.6), dpi=120)
    ax = fig.add_subplot(1, 1, 1, projection="3d")
    _sphere(ax)
    ax.plot(data[:, 1], data[:, 2], data[:, 3], linewidth=0.6, color="tab:orange")
    _cross(ax, data[0, 1:4], "green")
    ax.plot(*np.column_stack((-w_hat, w_hat)), color="blue", linewidth=1.0)
    _cross(ax, w_hat, "blue")
    _cross(ax, thermal, "cyan")
    fig.tight_layout()
    return fig


_FIG4_HEADER = ("t", "kax", "kay", "kaz", "kbx", "kby", "kbz")


def _read_verdict(indir: str):
    path = os.path.join(indir, "mfa_verdict.csv")
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 2:
        return None
    cells = lines[1].split(",")
    return cells[2] if len(cells) >= 3 else None


def build_fig4(indir: str):
    names, data = read_table(os.path.join(indir, "mfa_traj.csv"), expected_prefix=_FIG4_HEADER)
    verdict = _read_verdict(indir)
    fig = plt.figure(figsize=(9.0, 4.8), dpi=120)
    for i, (prefix, label) in enumerate((("ka", "spin a"), ("kb", "spin b"))):
        ax = fig.add_subplot(1, 2, 1 + i, projection="3d")
        _sphere(ax)
        cols = {n: data[:, j] for j, n in enumerate(names)}
        xs, ys, zs = cols[prefix + "x"], cols[prefix + "y"], cols[prefix + "z"]
        ax.plot(xs, ys, zs, linewidth=0.5, color="tab:blue")
        _cross(ax, (xs[0], ys[0], zs[0]), "green")
        if verdict == "fixed_point":
            _cross(ax, (xs[-1], ys[-1], zs[-1]), "red")
        title = label if verdict is None else f"{label} ({verdict})"
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return fig


def build_fig5(indir: str):
    names, data = read_table(os.path.join(indir, "bloch_svd.csv"), expected_prefix=("t", "purity", "tau"))
    sv_cols = [i for i, n in enumerate(names) if n.startswith("sv")]
    if not sv_cols:
        raise InputError("bloch_svd.csv: no singular-value columns found")
    ts = data[:, 0]
    fig, axes = plt.subplots(3, 1, figsize=(6.4, 8.4), dpi=120, sharex=True)
    axes[0].plot(ts, data[:, 1], linewidth=0.9)
    axes[0].set_ylabel("purity")
    axes[1].semilogy(ts, np.maximum(data[:, 2], 1e-300), linewidth=0.9)
    axes[1].set_ylabel("entanglement")
    for i in sv_cols:
        axes[2].semilogy(ts, np.maximum(data[:, i], 1e-300), linewidth=0.8)
    axes[2].set_ylabel("singular values")
    axes[2].set_xlabel("t")
    fig.tight_layout()
    return fig


_BUILDERS = {
    "fig1": build_fig1,
    "fig2": build_fig2,
    "fig3": build_fig3,
    "fig4": build_fig4,
    "fig5": build_fig5,
}


def build_figure(figure_id: str, indir: str):
    if figure_id not in _BUILDERS:
        raise InputError(f"unknown figure id {figure_id!r}; choose from {sorted(_BUILDERS)}")
    return _BUILDERS[figure_id](indir)


def render(figure_id: str, indir: str, outpath: str) -> None:
    fig = build_figure(figure_id, indir)
    try:
        fig.savefig(outpath)
    finally:
        plt.close(fig)
