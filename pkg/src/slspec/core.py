"""Domain types shared by every stage of the pipeline.

The antiderivative sigma of the potential is stored piecewise constant on
[0, 1]; boundary conditions are a pair (H, h) with the convention that the
value ``inf`` selects a Dirichlet endpoint.  Spectra are kept as energies
s_n = lambda_n^2 together with a regime tag naming the asymptotic head of
sqrt(s_n).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf

#: regime tag -> head function of the 1-based index n, giving the asymptotic
#: center of lambda_n = sqrt(s_n)
REGIME_HEADS = {
    "HalfIntegerCos": lambda n: math.pi * (n - 0.5),
    "IntegerSin": lambda n: math.pi * n,
    "IntegerCos": lambda n: math.pi * (n - 1.0),
    "HalfIntegerSin": lambda n: math.pi * (n - 0.5),
}


class SlspecError(Exception):
    """Base class for errors raised by this package."""


class InvalidPotential(SlspecError):
    """Sigma data is malformed (non-finite values, bad grid)."""


class InvalidBoundary(SlspecError):
    """Boundary data is malformed."""


def _as_float(x):
    v = float(x)
    if v == -INF:
        raise InvalidBoundary("-inf is not an admissible boundary parameter")
    return v


@dataclass(frozen=True)
class PiecewiseSigma:
    """Piecewise-constant antiderivative sigma on [0, 1].

    ``breakpoints`` is strictly increasing, starts at 0 and ends at 1;
    ``values`` holds the constant value of sigma on each of the
    ``len(breakpoints) - 1`` cells.  A jump of sigma of size m at an interior
    breakpoint represents a point mass m of the potential there.
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(bp) < 2 or bp[0] != 0.0 or bp[-1] != 1.0:
            raise InvalidPotential("breakpoints must run from 0.0 to 1.0")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise InvalidPotential("breakpoints must be strictly increasing")
        if len(vals) != len(bp) - 1:
            raise InvalidPotential("need exactly one value per cell")
        if not all(math.isfinite(v) for v in vals):
            raise InvalidPotential("sigma values must be finite")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value, cells=1):
        edges = np.linspace(0.0, 1.0, cells + 1)
        return cls(tuple(edges), (float(value),) * cells)

    @classmethod
    def from_cell_values(cls, values):
        values = tuple(float(v) for v in values)
        edges = np.linspace(0.0, 1.0, len(values) + 1)
        return cls(tuple(edges), values)

    @property
    def cells(self):
        return len(self.values)

    @property
    def lengths(self):
        bp = self.breakpoints
        return tuple(bp[i + 1] - bp[i] for i in range(len(bp) - 1))

    def value_at(self, x):
        """Value of sigma at x (right-continuous at interior breakpoints)."""
        i = int(np.searchsorted(self.breakpoints, x, side="right")) - 1
        i = min(max(i, 0), self.cells - 1)
        return self.values[i]

    def mean(self):
        return sum(v * l for v, l in zip(self.values, self.lengths))

    def shifted(self, c):
        return PiecewiseSigma(self.breakpoints, tuple(v + c for v in self.values))

    def l2_distance(self, other):
        """L2(0,1) distance between two piecewise-constant functions."""
        grid = sorted(set(self.breakpoints) | set(other.breakpoints))
        acc = 0.0
        for a, b in zip(grid, grid[1:]):
            m = 0.5 * (a + b)
            acc += (self.value_at(m) - other.value_at(m)) ** 2 * (b - a)
        return math.sqrt(acc)

    def to_dict(self):
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["breakpoints"]), tuple(d["values"]))


@dataclass(frozen=True)
class BoundaryData:
    """Boundary pair (H, h); ``inf`` means a Dirichlet condition.

    H applies at x=0 (u^[1](0) = H u(0)), h at x=1 (u^[1](1) + h u(1) = 0).
    ``h=None`` marks a template whose right-endpoint parameter is not yet
    known (used by SpectralData before reconstruction fills it in).
    """

    H: float
    h: float | None

    def __post_init__(self):
        object.__setattr__(self, "H", _as_float(self.H))
        if self.h is not None:
            object.__setattr__(self, "h", _as_float(self.h))

    @classmethod
    def template(cls, H):
        return cls(H, None)

    @property
    def dirichlet_left(self):
        return self.H == INF

    @property
    def dirichlet_right(self):
        return self.h == INF

    def to_dict(self):
        enc = lambda v: "inf" if v == INF else v
        return {"H": enc(self.H), "h": None if self.h is None else enc(self.h)}

    @classmethod
    def from_dict(cls, d):
        dec = lambda v: INF if v == "inf" else v
        h = d.get("h")
        return cls(dec(d["H"]), None if h is None else dec(h))


def regime_for_bc(bc):
    """Asymptotic regime tag of the spectrum of (sigma, H, h)."""
    if bc.dirichlet_left:
        return "IntegerSin" if bc.dirichlet_right else "HalfIntegerCos"
    return "HalfIntegerSin" if bc.dirichlet_right else "IntegerCos"


@dataclass(frozen=True)
class Spectrum:
    """Strictly increasing positive energies s_n with a regime tag.

    The tag fixes the asymptotic head of lambda_n = sqrt(s_n); construction
    rejects sequences whose tail deviates from the head by more than half a
    level spacing, which catches data labelled with the wrong regime.
    """

    eigenvalues: tuple
    regime: str

    def __post_init__(self):
        if self.regime not in REGIME_HEADS:
            raise ValueError(f"unknown regime tag {self.regime!r}")
        ev = tuple(float(s) for s in self.eigenvalues)
        if len(ev) == 0:
            raise ValueError("empty spectrum")
        if any(not math.isfinite(s) or s <= 0.0 for s in ev):
            raise ValueError("eigenvalues must be finite and positive")
        if any(b <= a for a, b in zip(ev, ev[1:])):
            raise ValueError("eigenvalues must be strictly increasing")
        head = REGIME_HEADS[self.regime]
        n0 = max(1, len(ev) // 2)
        for n in range(n0, len(ev) + 1):
            if abs(math.sqrt(ev[n - 1]) - head(n)) > 1.5:
                raise ValueError(
                    f"sqrt(s_{n}) deviates from the {self.regime} head by more "
                    "than half a level spacing; wrong regime tag?"
                )
        object.__setattr__(self, "eigenvalues", ev)

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def lambdas(self):
        return np.sqrt(np.asarray(self.eigenvalues))

    def heads(self):
        head = REGIME_HEADS[self.regime]
        return np.array([head(n) for n in range(1, len(self) + 1)])

    def residuals(self):
        """lambda_n minus its asymptotic head."""
        return self.lambdas - self.heads()

    def to_dict(self):
        return {"regime": self.regime, "eigenvalues": list(self.eigenvalues)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["eigenvalues"]), d["regime"])


@dataclass(frozen=True)
class SpectralData:
    """Pairs {s_n, alpha_n} plus the boundary template they belong to."""

    spectrum: Spectrum
    alphas: tuple
    boundary_regime: BoundaryData = field(default_factory=lambda: BoundaryData.template(INF))

    def __post_init__(self):
        al = tuple(float(a) for a in self.alphas)
        if len(al) != len(self.spectrum):
            raise ValueError("need one norming constant per eigenvalue")
        if any(not math.isfinite(a) or a <= 0.0 for a in al):
            raise ValueError("norming constants must be finite and positive")
        object.__setattr__(self, "alphas", al)

    def __len__(self):
        return len(self.alphas)

    def to_dict(self):
        d = {"eigenvalues": list(self.spectrum.eigenvalues), "alphas": list(self.alphas)}
        H = self.boundary_regime.H
        d["H"] = "inf" if H == INF else H
        d["regime"] = self.spectrum.regime
        return d

    @classmethod
    def from_dict(cls, d):
        H = d.get("H", "inf")
        H = INF if H == "inf" else float(H)
        regime = d.get("regime")
        if regime is None:
            regime = "HalfIntegerCos" if H == INF else "IntegerCos"
        spec = Spectrum(tuple(d["eigenvalues"]), regime)
        return cls(spec, tuple(d["alphas"]), BoundaryData.template(H))


# ---------------------------------------------------------------------------
# operations


def project_sigma(source, cells):
    """L2 projection of a sigma profile onto `cells` uniform cells.

    `source` is either a callable on [0, 1] or a list of (x, sigma(x))
    samples, which are interpolated linearly.  Returns the cell averages.
    """
    if cells < 1:
        raise ValueError("cells must be >= 1")
    edges = np.linspace(0.0, 1.0, cells + 1)
    if callable(source):
        # 20-point Gauss rule per cell; exact for smooth profiles, and the
        # nodes are interior so grid-aligned jumps are averaged exactly.
        nodes, weights = np.polynomial.legendre.leggauss(20)
        vals = []
        for a, b in zip(edges, edges[1:]):
            x = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            fx = np.array([float(source(xi)) for xi in x])
            if not np.all(np.isfinite(fx)):
                raise InvalidPotential("sigma descriptor returned a non-finite value")
            vals.append(float(np.dot(weights, fx)) * 0.5)
        return PiecewiseSigma(tuple(edges), tuple(vals))

    pts = sorted((float(x), float(y)) for x, y in source)
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise InvalidPotential("samples contain non-finite values")
    if len(pts) < 1:
        raise InvalidPotential("need at least one sample")
    vals = []
    for a, b in zip(edges, edges[1:]):
        grid = np.union1d(xs[(xs > a) & (xs < b)], [a, b])
        fg = np.interp(grid, xs, ys)
        vals.append(float(np.trapezoid(fg, grid)) / (b - a))
    return PiecewiseSigma(tuple(edges), tuple(vals))


def gauge_transform(sigma, bc, shift):
    """Shift (sigma, H, h) along the spectrum-preserving direction.

    Returns (sigma + shift, (H - shift, h + shift)); an infinite H or h is
    left untouched.  The transformed triple defines the same operator.
    """
    shift = float(shift)
    if not math.isfinite(shift):
        raise ValueError("shift must be finite")
    H = bc.H if bc.H == INF else bc.H - shift
    if bc.h is None:
        h = None
    else:
        h = bc.h if bc.h == INF else bc.h + shift
    return sigma.shifted(shift), BoundaryData(H, h)


# ---------------------------------------------------------------------------
# JSON file helpers (>= 15 significant digits; Python float repr gives 17)


def dump_json(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True)
    with open(path, "w") as f:
        f.write(text + "\n")


def load_json(path):
    with open(path) as f:
        return json.load(f)
