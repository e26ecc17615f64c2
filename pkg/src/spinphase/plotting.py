"""Figures for the ``report`` command, rendered off-screen to image files."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _sphere_wire(ax, n=24):
    u = np.linspace(0, 2 * np.pi, n)
    w = np.linspace(0, np.pi, n // 2)
    x = np.outer(np.cos(u), np.sin(w))
    y = np.outer(np.sin(u), np.sin(w))
    z = np.outer(np.ones_like(u), np.cos(w))
    ax.plot_wireframe(x, y, z, color="0.85", linewidth=0.4)


def plot_loop(loop, path, rp2=None, n=1000):
    """Loop in the Bloch ball, with its segment directions on the unit sphere."""
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    _sphere_wire(ax)
    pts = loop.sample(n)[:, 1:]
    ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], color="C0", label="loop")
    if rp2 is not None:
        for j, seg in enumerate(rp2.segments):
            t = np.linspace(seg.t0, seg.t1, max(8, int(n * (seg.t1 - seg.t0))))
            w = rp2.evaluate(t)
            ax.plot(w[:, 0], w[:, 1], w[:, 2], color="C1", lw=0.8,
                    label="direction" if j == 0 else None)
    ax.scatter([0], [0], [0], color="k", s=8)
    ax.set_box_aspect((1, 1, 1))
    ax.set_xlim(-1, 1)
    ax.set_ylim(-1, 1)
    ax.set_zlim(-1, 1)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_title(loop.name or "loop")
    ax.legend(loc="upper left")
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_lift(lift, path):
    """Chord distance and amplitude moduli of a horizontal lift against time."""
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    top.plot(lift.times, lift.r, color="C0")
    top.set_ylabel("r")
    labels = ("|z-1|", "|z0|", "|z+1|")
    for m in range(3):
        bottom.plot(lift.times, np.abs(lift.states[:, m]), label=labels[m])
    bottom.set_xlabel("t")
    bottom.set_ylabel("amplitude")
    bottom.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
