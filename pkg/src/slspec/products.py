"""Characteristic entire functions synthesized from their zeros.

A zero sequence with head pi(k-1/2) determines the cosine-type function

    Phi(lambda) = prod_k (z_k^2 - lambda^2) / (pi(k-1/2))^2 ,

and analogously sine-type heads pi*k give lambda * prod (z_k^2-lambda^2)/(pi k)^2,
Neumann-type heads pi(k-1) give (lambda^2 - z_1^2) * prod_{k>=2} (...)/(pi(k-1))^2.
Raw products converge too slowly to truncate, so each explicit factor is
divided by the matching factor of the reference function (cos, sin, or
lambda*sin), which is multiplied back in closed form; beyond the known zeros
the factors are completed with modeled zeros head(k) + g/(pi k), the
coefficient g fitted from the tail of the data.  Everything is a function of
x = lambda^2 (times a lambda prefactor in the sine-type case), evaluated
through the cos/sinc pair, so no complex arithmetic is needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import REGIME_HEADS, SlspecError, Spectrum
from .ode import _cos_sinc


class MultipleZeroError(SlspecError):
    """Zero sequences must be simple (self-adjoint, simple spectra)."""


# reference structure per regime; for "neumann" the k=1 factor is the special
# (x - z_1^2) prefactor and ratio factors start at k=2
_REGIME_KIND = {
    "HalfIntegerCos": "cos",
    "HalfIntegerSin": "cos",
    "IntegerSin": "sin",
    "IntegerCos": "neumann",
}

_TAIL_MIN_TERMS = 100_000

# |lambda - head| below which the reference factor pair switches to the
# analytically cancelled form
_POLE_WINDOW = 0.25


@dataclass(frozen=True)
class ZeroSequence:
    """Positive strictly increasing zeros with a regime tag.

    ``tail_count`` is the number of explicitly known zeros (defaults to all
    supplied); beyond it the product is completed from the regime head and
    the fitted 1/k drift of the data.
    """

    zeros: tuple
    regime: str
    tail_count: int = 0

    def __post_init__(self):
        if self.regime not in _REGIME_KIND:
            raise ValueError(f"unknown regime tag {self.regime!r}")
        z = tuple(float(v) for v in self.zeros)
        if len(z) == 0:
            raise ValueError("need at least one zero")
        if any(v <= 0 or not math.isfinite(v) for v in z):
            raise ValueError("zeros must be positive and finite")
        for a, b in zip(z, z[1:]):
            if b == a:
                raise MultipleZeroError("repeated zero in sequence")
            if b < a:
                raise ValueError("zeros must be increasing")
        head = REGIME_HEADS[self.regime]
        for k in range(max(1, len(z) // 2), len(z) + 1):
            if abs(z[k - 1] - head(k)) > 1.5:
                raise ValueError(
                    f"zero {k} deviates from the {self.regime} head by more than "
                    "half a spacing; wrong regime tag?")
        object.__setattr__(self, "zeros", z)
        object.__setattr__(self, "tail_count", self.tail_count or len(z))
        if self.tail_count > len(z):
            raise ValueError("tail_count exceeds the number of zeros")

    @classmethod
    def from_spectrum(cls, spectrum: Spectrum):
        return cls(tuple(math.sqrt(s) for s in spectrum.eigenvalues), spectrum.regime)

    def __len__(self):
        return self.tail_count

    def heads(self):
        head = REGIME_HEADS[self.regime]
        return np.array([head(k) for k in range(1, self.tail_count + 1)])

    def tail_coefficient(self):
        """Fitted g in z_k ~ head(k) + g/(pi k), from the last half."""
        K = self.tail_count
        if K < 8:
            return 0.0
        k = np.arange(K // 2 + 1, K + 1)
        dev = np.array(self.zeros[K // 2: K]) - self.heads()[K // 2: K]
        basis = 1.0 / (math.pi * k)
        return float(np.dot(dev, basis) / np.dot(basis, basis))


def _tail_log(seq, x):
    """log of the completed product of modeled factors beyond tail_count."""
    g = seq.tail_coefficient()
    if abs(g) < 1e-13:
        return 0.0
    K = seq.tail_count
    head = REGIME_HEADS[seq.regime]
    guard = head(K + 1) - 0.3
    if x > guard * guard:
        raise ValueError("lambda lies beyond the range resolved by the known zeros")
    k_big = max(_TAIL_MIN_TERMS, 20 * K)
    k = np.arange(K + 1, k_big + 1, dtype=float)
    kind = _REGIME_KIND[seq.regime]
    if kind == "sin":
        hk = math.pi * k
    elif kind == "neumann":
        hk = math.pi * (k - 1.0)
    else:
        hk = math.pi * (k - 0.5)
    d = g / (math.pi * k)
    t = (2.0 * hk * d + d * d) / (hk * hk - x)
    remainder = 2.0 * g / (math.pi**2 * k_big)
    return float(np.sum(np.log1p(t))) + remainder


def _stable_pair(kind, x, head_j):
    """Reference(x) / (head_j^2 - x), cancellation-free near the pole.

    cos(pi*m + pi/2 + d) = (-1)^(m+1) sin d and sin(pi*m + d) = (-1)^m sin d
    let the vanishing reference and vanishing denominator cancel exactly
    when sqrt(x) approaches head_j.
    """
    lam = math.sqrt(x) if x > 0 else 0.0
    close = x > 0 and abs(lam - head_j) < _POLE_WINDOW
    if kind == "cos":
        if not close:
            C, _ = _cos_sinc(x)
            return C / (head_j * head_j - x)
        j = round(head_j / math.pi + 0.5)
        d = lam - head_j
        sinc = math.sin(d) / d if d != 0 else 1.0
        return (-1.0) ** (j + 1) * sinc / (head_j + lam)
    # sine-type references share S(x) = sin(lambda)/lambda
    if not close:
        _, S = _cos_sinc(x)
        return S / (head_j * head_j - x)
    m = round(head_j / math.pi)
    d = lam - head_j
    sinc = math.sin(d) / d if d != 0 else 1.0
    return (-1.0) ** (m + 1) * sinc / (lam * (head_j + lam))


def _eval_sq(seq, x, skip=None):
    """Even part of the product at x = lambda^2, optionally deflating one zero.

    With ``skip = n`` the factor (z_n^2 - x) is removed, which is what the
    derivative at the n-th zero needs.
    """
    kind = _REGIME_KIND[seq.regime]
    K = seq.tail_count
    z2 = np.asarray(seq.zeros[:K]) ** 2
    heads = seq.heads()

    first = 1 if kind == "neumann" else 0  # 0-based index of first ratio factor
    num = z2[first:] - x
    den = heads[first:] ** 2 - x

    # fold the reference with the denominator factor nearest to lambda when
    # that pair is close to cancelling; otherwise any factor works
    lam = math.sqrt(x) if x > 0 else -1.0
    j_pair = first + 1
    if lam >= 0:
        jn = int(np.argmin(np.abs(heads[first:] - lam))) + first + 1
        if abs(heads[jn - 1] - lam) < _POLE_WINDOW:
            j_pair = jn

    val = math.exp(_tail_log(seq, x)) * _stable_pair(kind, x, heads[j_pair - 1])
    den[j_pair - 1 - first] = 1.0
    if skip is not None and skip >= first + 1:
        num[skip - 1 - first] = 1.0
    val *= float(np.prod(num / den))

    if kind == "neumann" and skip != 1:
        val *= x - z2[0]
    return val


def product_eval(zeros, lam):
    """Value at real lambda of the entire function with the given zeros.

    Even in lambda (odd in the sine-type regime): the computation depends on
    lambda only through lambda^2 and a sign.
    """
    lam = float(lam)
    x = lam * lam
    val = _eval_sq(zeros, x)
    if _REGIME_KIND[zeros.regime] == "sin":
        return lam * val
    return val


def product_derivative_at_zero(zeros, n):
    """d/dlambda of the synthesized function at its n-th positive zero."""
    K = zeros.tail_count
    if not 1 <= n <= K:
        raise ValueError("zero index out of range")
    if K < 50:
        warnings.warn("fewer than 50 zeros supplied; derivative accuracy degrades",
                      stacklevel=2)
    zn = zeros.zeros[n - 1]
    x = zn * zn
    kind = _REGIME_KIND[zeros.regime]
    if kind == "neumann" and n == 1:
        return 2.0 * zn * _eval_sq(zeros, x, skip=1)
    deflated = _eval_sq(zeros, x, skip=n)
    if kind == "sin":
        return -2.0 * zn * zn * deflated
    return -2.0 * zn * deflated


def reference_ratio_at_imag(zeros, nu):
    """Phi(i nu) / Reference(i nu) in real arithmetic; tends to 1 as nu grows.

    Checks the normalization of the synthesized product against the
    asymptotics that pins its scale.
    """
    x = -float(nu) ** 2
    kind = _REGIME_KIND[zeros.regime]
    K = zeros.tail_count
    z2 = np.asarray(zeros.zeros[:K]) ** 2
    h2 = zeros.heads() ** 2
    first = 1 if kind == "neumann" else 0
    ratio = float(np.prod((z2[first:] - x) / (h2[first:] - x)))
    ratio *= math.exp(_tail_log(zeros, x))
    if kind == "neumann":
        ratio *= (z2[0] - x) / (-x)
    return ratio
