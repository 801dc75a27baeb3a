"""Gram matrices and biorthogonal expansions for perturbed sine/cosine systems.

Gram entries use the exact product-to-sum integrals, so basis diagnostics
carry no quadrature error; expansions solve the Gram system for the
coefficients of f against the (generally non-orthogonal) family.  Also
provides the first-order difference estimate for cosine moments at two
nearby frequency sequences, with its cubic remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PiecewiseSigma, SlspecError, Spectrum

_HEADS = {
    "integer": lambda k: math.pi * k,
    "half_integer": lambda k: math.pi * (k - 0.5),
    "integer_minus_one": lambda k: math.pi * (k - 1.0),
}


class NotRieszLike(SlspecError):
    """Gram matrix too ill-conditioned for a stable expansion."""


@dataclass(frozen=True)
class FrequencySystem:
    """Family e_k = sin(f_k x) or cos(f_k x) with near-head frequencies."""

    frequencies: tuple
    kind: str
    head: str

    def __post_init__(self):
        if self.kind not in ("sine", "cosine"):
            raise ValueError("kind must be 'sine' or 'cosine'")
        if self.head not in _HEADS:
            raise ValueError(f"unknown head class {self.head!r}")
        fr = tuple(float(v) for v in self.frequencies)
        low = 0.0 if self.kind == "cosine" else 1e-12
        if any(not math.isfinite(v) or v < low for v in fr):
            raise ValueError("frequencies must be nonnegative (positive for sines)")
        if any(b <= a for a, b in zip(fr, fr[1:])):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", fr)

    def __len__(self):
        return len(self.frequencies)

    def deviation_profile(self):
        head = _HEADS[self.head]
        return np.array([f - head(k) for k, f in enumerate(self.frequencies, start=1)])

    def evaluate(self, k, x):
        f = self.frequencies[k - 1]
        x = np.asarray(x, dtype=float)
        return np.sin(f * x) if self.kind == "sine" else np.cos(f * x)


def _sinc(t):
    t = np.asarray(t, dtype=float)
    out = np.where(t == 0.0, 1.0, np.sin(np.where(t == 0.0, 1.0, t)) / np.where(t == 0.0, 1.0, t))
    return out


def gram_matrix(sys, n):
    """n x n matrix of inner products integral_0^1 e_j e_k dx, exactly."""
    if n > len(sys):
        raise ValueError("truncation exceeds the number of frequencies")
    f = np.asarray(sys.frequencies[:n])
    dif = f[:, None] - f[None, :]
    tot = f[:, None] + f[None, :]
    if sys.kind == "sine":
        return 0.5 * (_sinc(dif) - _sinc(tot))
    return 0.5 * (_sinc(dif) + _sinc(tot))


# ---------------------------------------------------------------------------
# moments of a profile against trigonometric weights


def _piecewise_moment(sigma, a, weight):
    bp = np.asarray(sigma.breakpoints)
    v = np.asarray(sigma.values)
    x0, x1 = bp[:-1], bp[1:]
    if weight == "cos":
        if a == 0.0:
            parts = x1 - x0
        else:
            parts = (np.sin(a * x1) - np.sin(a * x0)) / a
    elif weight == "sin":
        if a == 0.0:
            return 0.0
        parts = (np.cos(a * x0) - np.cos(a * x1)) / a
    elif weight == "t_sin":
        if a == 0.0:
            return 0.0
        parts = (np.sin(a * x1) / a**2 - x1 * np.cos(a * x1) / a) \
            - (np.sin(a * x0) / a**2 - x0 * np.cos(a * x0) / a)
    else:
        raise ValueError(weight)
    return float(np.dot(v, parts))


_GL20 = np.polynomial.legendre.leggauss(20)


def _callable_moment(f, a, weight):
    nodes, wts = _GL20
    panels = max(4, math.ceil(abs(a) / 3.0))
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (edges[:-1, None] + half[:, None] * (nodes[None, :] + 1.0)).ravel()
    w = (half[:, None] * np.broadcast_to(wts, (panels, len(nodes)))).ravel()
    fx = np.array([float(f(xi)) for xi in x])
    if weight == "cos":
        g = np.cos(a * x)
    elif weight == "sin":
        g = np.sin(a * x)
    elif weight == "t_sin":
        g = x * np.sin(a * x)
    else:
        raise ValueError(weight)
    return float(np.dot(w, fx * g))


def moment(f, a, weight="cos"):
    """integral_0^1 f(t) * w(a t) dt with w in {cos, sin, t*sin}.

    Piecewise-constant profiles use closed forms; callables are integrated
    with frequency-scaled Gauss panels.
    """
    if isinstance(f, PiecewiseSigma):
        return _piecewise_moment(f, float(a), weight)
    return _callable_moment(f, float(a), weight)


def _norm_sq(f):
    if isinstance(f, PiecewiseSigma):
        return float(np.dot(np.square(f.values),
                            np.diff(np.asarray(f.breakpoints))))
    return _callable_moment(lambda x: f(x) ** 2, 0.0, "cos")


def expand_in_basis(f, sys, n):
    """Coefficients of f in the truncated family, plus the L2 residual.

    Solves G c = b with b_k the moments of f against e_k.  A Gram condition
    number above 1e6 raises NotRieszLike: the family has drifted too far
    from its orthogonal head to expand against.
    """
    G = gram_matrix(sys, n)
    cond = float(np.linalg.cond(G))
    if cond > 1e6:
        raise NotRieszLike(f"Gram condition number {cond:.3g} exceeds 1e6")
    weight = "sin" if sys.kind == "sine" else "cos"
    b = np.array([moment(f, sys.frequencies[k], weight) for k in range(n)])
    c = np.linalg.solve(G, b)
    res_sq = _norm_sq(f) - 2.0 * float(c @ b) + float(c @ G @ c)
    return c, math.sqrt(max(res_sq, 0.0))


@dataclass(frozen=True)
class FourierDiffResult:
    """First-order estimate of cosine-moment differences and its remainder."""

    nu: np.ndarray
    residuals: np.ndarray
    cubic_constant: float | None


def fourier_diff(f, lams, mus):
    """nu_n = -integral t f(t) sin((lam_n+mu_n)t/2) dt and the cubic remainder.

    residual_n = integral f (cos lam_n t - cos mu_n t) dt - (lam_n - mu_n) nu_n,
    reported with the fitted constant max |residual| / |lam - mu|^3.
    Accepts Spectrum objects (their sqrt is used) or raw frequency arrays.
    """
    lam = lams.lambdas if isinstance(lams, Spectrum) else np.asarray(lams, dtype=float)
    mu = mus.lambdas if isinstance(mus, Spectrum) else np.asarray(mus, dtype=float)
    if lam.shape != mu.shape:
        raise ValueError("sequences must have equal length")
    nu = np.array([-moment(f, 0.5 * (a + b), "t_sin") for a, b in zip(lam, mu)])
    diff = np.array([moment(f, a, "cos") - moment(f, b, "cos")
                     for a, b in zip(lam, mu)])
    residuals = diff - (lam - mu) * nu
    gaps = np.abs(lam - mu)
    mask = gaps > 0
    C = float(np.max(np.abs(residuals[mask]) / gaps[mask] ** 3)) if np.any(mask) else None
    return FourierDiffResult(nu, residuals, C)
