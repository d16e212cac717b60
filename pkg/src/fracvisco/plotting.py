"""Figure rendering for the CLI's --plot flag.

Matplotlib is forced onto the Agg backend here: the CLI writes files and
must never require a display.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import SampledSignal

__all__ = ["save_curve", "save_modulus"]


def save_curve(signal: SampledSignal, path: str, *, ylabel: str, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    finite = np.isfinite(signal.values)
    ax.plot(signal.t[finite], signal.values[finite], lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_modulus(omega, re, im, path: str, *, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(omega, re, lw=1.2, label="storage (Re)")
    ax.plot(omega, im, lw=1.2, label="loss (Im)")
    ax.set_xscale("log")
    ax.set_xlabel("omega")
    ax.set_ylabel("modulus")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
