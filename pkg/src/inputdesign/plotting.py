"""Figures written next to the CSV outputs (non-interactive backend)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def membership_figure(l1, scaled, path, title="Generated inputs"):
    """Scatter of ``(||u||_1, (||f(u) - r||_2 + 1) ||u||_1)`` against the line y = x."""
    l1 = np.asarray(l1, dtype=float)
    scaled = np.asarray(scaled, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4))
    if l1.size:
        lo = min(l1.min(), scaled.min())
        hi = max(l1.max(), scaled.max())
        pad = 0.05 * (hi - lo) if hi > lo else 1.0
        line = np.array([lo - pad, hi + pad])
        ax.plot(line, line, "r-", lw=1, label="y = x")
        ax.plot(l1, scaled, "b+", label="inputs")
        ax.legend(loc="upper left")
    ax.set_xlabel(r"$\|u\|_1$")
    ax.set_ylabel(r"$(\|f(u)-r^*\|_2+1)\,\|u\|_1$")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def spectrum_figure(w, path, title="Optimal spectral weights"):
    w = np.asarray(w, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.stem(np.arange(w.size), w, basefmt=" ")
    ax.set_xlabel("frequency bin k")
    ax.set_ylabel(r"$|U_k|^2$")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def error_figure(designed, baseline, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.boxplot([designed, baseline])
    ax.set_xticks([1, 2], ["designed", "random"])
    ax.set_ylabel(r"$\|\hat\theta-\theta\|^2$")
    ax.set_yscale("log")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
