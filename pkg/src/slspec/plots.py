"""Figure rendering for the report paths.

Every CLI report writes delimited series (CSV) and, next to them, the same
series rendered as PNG figures.  Rendering is headless (Agg) and carries no
run-dependent metadata, so repeated runs produce identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIG_KW = {"figsize": (6.0, 3.6), "dpi": 130}


def _finish(fig, ax, path, title, xlabel, ylabel):
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def render_residuals(path, spectrum):
    """Deviation of sqrt(s_n) from its asymptotic head, against n."""
    fig, ax = plt.subplots(**_FIG_KW)
    res = spectrum.residuals()
    ax.plot(np.arange(1, len(res) + 1), res, "o-", ms=3, lw=0.8)
    ax.axhline(0.0, color="k", lw=0.6)
    _finish(fig, ax, path, f"eigenvalue residuals ({spectrum.regime})",
            "n", "sqrt(s_n) - head(n)")


def render_alphas(path, index, two_spectra, quadrature=None):
    fig, ax = plt.subplots(**_FIG_KW)
    ax.plot(index, two_spectra, "o-", ms=3, lw=0.8, label="two-spectra formula")
    if quadrature is not None:
        ax.plot(index, quadrature, "x--", ms=4, lw=0.8, label="direct quadrature")
    ax.axhline(1.0, color="k", lw=0.6)
    ax.legend(loc="best", fontsize=8)
    _finish(fig, ax, path, "norming constants", "n", "alpha_n")


def _step_xy(sigma):
    bp = np.asarray(sigma.breakpoints)
    x = np.repeat(bp, 2)[1:-1]
    y = np.repeat(np.asarray(sigma.values), 2)
    return x, y


def render_sigma(path, sigma_hat, sigma_true=None):
    fig, ax = plt.subplots(**_FIG_KW)
    x, y = _step_xy(sigma_hat)
    ax.plot(x, y, lw=1.4, label="recovered")
    if sigma_true is not None:
        xt, yt = _step_xy(sigma_true)
        ax.plot(xt, yt, "--", lw=1.0, label="reference")
    ax.legend(loc="best", fontsize=8)
    _finish(fig, ax, path, "sigma profile", "x", "sigma(x)")
