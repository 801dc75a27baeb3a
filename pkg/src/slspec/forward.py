"""Forward spectral quantities of a triple (sigma, H, h) by shooting.

Eigenvalues are zeros of a boundary form of the shooting solution, bracketed
from the regime asymptotics with exact-count certification, and refined by
bisection plus secant polish.  Norming constants integrate the square of the
x=1-normalized eigenfunction with composite Gauss panels.  The resolvent
trace ratio realizes the Green-function identity

    sum_n 2 / ((s_n - s) alpha_n) = Psi2(sqrt s) / (sqrt s * Psi1(sqrt s))

for the operator with u(0) = 0, u^[1](1) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    INF,
    BoundaryData,
    InvalidBoundary,
    SlspecError,
    Spectrum,
    SpectralData,
    regime_for_bc,
)
from .ode import (
    RIGHT_TO_LEFT,
    StateVector,
    _cell_pieces,
    _cos_sinc,
    _count_many,
    propagate,
)

_S_FLOOR = 1e-12


class SpectrumSearchError(SlspecError):
    """An eigenvalue bracket could not be established or certified."""


class QuadratureError(SlspecError):
    """Norming-constant quadrature failed to converge."""


class NearPoleError(SlspecError):
    """Requested energy sits too close to an eigenvalue."""


def _shoot_many(sigma, s, init_u1, init_u, right_to_left):
    """Vectorized shot across all cells; returns (u1, u, log_scale) arrays."""
    s = np.asarray(s, dtype=float)
    u1 = np.full_like(s, float(init_u1))
    u = np.full_like(s, float(init_u))
    logs = np.zeros_like(s)
    bp = sigma.breakpoints
    s_min = float(np.min(s))
    idx = range(sigma.cells - 1, -1, -1) if right_to_left else range(sigma.cells)
    for i in idx:
        length = bp[i + 1] - bp[i]
        if right_to_left:
            length = -length
        sg = sigma.values[i]
        pieces = _cell_pieces(s_min, length)
        step = length / pieces
        z = s * step * step
        C, S = _cos_sinc(z)
        lS = step * S
        for _ in range(pieces):
            nu1 = (C - sg * lS) * u1 - (sg * sg + s) * lS * u
            nu = lS * u1 + (C + sg * lS) * u
            big = np.maximum(np.abs(nu1), np.abs(nu))
            scale = np.where(big > 1e120, big, 1.0)
            u1, u = nu1 / scale, nu / scale
            logs += np.log(scale)
    return u1, u, logs


def _char_many(sigma, bc, s):
    """Boundary-form values whose zeros are exactly the eigenvalues."""
    if bc.h is None:
        raise InvalidBoundary("boundary template has unknown h")
    if bc.h != INF:
        u1, u, _ = _shoot_many(sigma, s, -bc.h, 1.0, right_to_left=True)
        if bc.H == INF:
            return u
        return u1 - bc.H * u
    if bc.H != INF:
        u1, u, _ = _shoot_many(sigma, s, bc.H, 1.0, right_to_left=False)
        return u
    # doubly Dirichlet: x=1-normalized solution, value at x=0
    u1, u, _ = _shoot_many(sigma, s, 1.0, 0.0, right_to_left=True)
    return u


def char_value(sigma, bc, s):
    """Characteristic boundary form at energy s (scalar)."""
    if not math.isfinite(s):
        raise ValueError("s must be finite")
    return float(_char_many(sigma, bc, np.array([float(s)]))[0])


def _bracket_centers(bc, count):
    """Asymptotic centers of lambda_n from the regime heads."""
    n = np.arange(1, count + 1, dtype=float)
    if bc.dirichlet_left:
        if bc.dirichlet_right:
            return math.pi * n
        return math.pi * (n - 0.5) + bc.h / (math.pi * n)
    if bc.dirichlet_right:
        return math.pi * (n - 0.5) + bc.H / (math.pi * n)
    return math.pi * (n - 1.0) + (bc.H + bc.h) / (math.pi * n)


def compute_spectrum(sigma, bc, count):
    """First `count` eigenvalues of (sigma, H, h), certified by counting.

    Brackets start at the regime head plus h-correction with half-width
    pi/2*(1+2/n), are widened on failure, localized with the exact
    eigenvalue counter, and polished on the characteristic function.
    Requires a positive operator; data violating the positivity
    normalization raises SpectrumSearchError.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    n_idx = np.arange(1, count + 1)
    centers = _bracket_centers(bc, count)
    widths = 0.5 * math.pi * (1.0 + 2.0 / n_idx)

    lo = np.maximum(centers - widths, 1e-6) ** 2
    hi = np.maximum(centers + widths, 2e-6) ** 2
    for attempt in range(6):
        c_lo = _count_many(sigma, bc, lo)
        c_hi = _count_many(sigma, bc, hi)
        bad_lo = (c_lo > n_idx - 1) & (lo > _S_FLOOR)
        bad_hi = c_hi < n_idx
        # a lower bracket pinned at the floor that still counts too many
        # eigenvalues means the operator is not positive
        pinned = (c_lo > n_idx - 1) & (lo <= _S_FLOOR)
        if np.any(pinned):
            k = int(n_idx[pinned][0])
            raise SpectrumSearchError(
                f"eigenvalue {k} is not above 0; shift the potential by a "
                "constant (positivity normalization)")
        if not (np.any(bad_lo) or np.any(bad_hi)):
            break
        grow = widths * (2.0 ** (attempt + 1))
        lo = np.where(bad_lo, np.maximum(np.sqrt(lo) - grow, 1e-6) ** 2, lo)
        hi = np.where(bad_hi, (np.sqrt(hi) + grow) ** 2, hi)
    else:
        k = int(n_idx[bad_lo | bad_hi][0])
        raise SpectrumSearchError(f"no bracket for eigenvalue index {k} after expansion")

    # localize with the counter until each bracket holds exactly one root
    for _ in range(240):
        c_lo = _count_many(sigma, bc, lo)
        c_hi = _count_many(sigma, bc, hi)
        done = (c_lo == n_idx - 1) & (c_hi == n_idx)
        if np.all(done):
            break
        mid = 0.5 * (lo + hi)
        c_mid = _count_many(sigma, bc, mid)
        take_lo = (~done) & (c_mid <= n_idx - 1)
        take_hi = (~done) & (c_mid > n_idx - 1)
        lo = np.where(take_lo, mid, lo)
        hi = np.where(take_hi, mid, hi)
    else:
        raise SpectrumSearchError("count-guided localization failed to settle")

    f_lo = _char_many(sigma, bc, lo)
    f_hi = _char_many(sigma, bc, hi)
    if np.any(f_lo * f_hi > 0):
        k = int(n_idx[f_lo * f_hi > 0][0])
        raise SpectrumSearchError(f"no sign change around eigenvalue index {k}")

    for _ in range(80):
        mid = 0.5 * (lo + hi)
        f_mid = _char_many(sigma, bc, mid)
        left = f_lo * f_mid <= 0
        hi = np.where(left, mid, hi)
        f_hi = np.where(left, f_mid, f_hi)
        lo = np.where(left, lo, mid)
        f_lo = np.where(left, f_lo, f_mid)
        if np.max((hi - lo) / np.maximum(1.0, hi)) < 1e-15:
            break

    root = 0.5 * (lo + hi)
    f_a, a = f_lo.copy(), lo.copy()
    f_b, b = f_hi.copy(), hi.copy()
    for _ in range(3):
        denom = f_b - f_a
        ok = denom != 0
        cand = np.where(ok, b - f_b * (b - a) / np.where(ok, denom, 1.0), root)
        inside = (cand > lo) & (cand < hi)
        cand = np.where(inside, cand, 0.5 * (a + b))
        f_c = _char_many(sigma, bc, cand)
        a, f_a = b, f_b
        b, f_b = cand, f_c
        root = cand

    root = np.sort(root)
    # completeness certificate just beyond the last computed eigenvalue
    gap = root[-1] - root[-2] if count > 1 else max(1.0, root[-1])
    for probe in (root[-1] + 0.45 * gap, root[-1] + 0.31 * gap):
        n_found = int(_count_many(sigma, bc, np.array([probe]))[0])
        if n_found == count:
            break
    else:
        raise SpectrumSearchError(
            f"count certificate failed: expected {count}, counter says {n_found}")
    return Spectrum(tuple(float(s) for s in root), regime_for_bc(bc))


# ---------------------------------------------------------------------------
# norming constants

_GL_CACHE = {}


def _gl(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _eigenfunction_entries(sigma, bc, s):
    """Left-edge states of the eigenfunction, normalized u(1)=1."""
    _, trace = propagate(sigma, s, StateVector(-bc.h, 1.0), RIGHT_TO_LEFT)
    if np.max(np.abs(trace.log_scale)) > 0:
        raise QuadratureError("eigenfunction overflowed during propagation")
    return trace.u1[::-1][:-1], trace.u[::-1][:-1]


def _quad_square(sigma, s, u1_entry, u_entry, panels_per_rad, order):
    """Integral of u^2 over [0,1] from per-cell closed-form evaluation."""
    nodes, weights = _gl(order)
    omega = math.sqrt(abs(s))
    bp = np.asarray(sigma.breakpoints)
    lengths = np.diff(bp)
    p = np.maximum(1, np.ceil(panels_per_rad * omega * lengths)).astype(int)
    cell = np.repeat(np.arange(sigma.cells), p)
    within = np.concatenate([np.arange(k) for k in p])
    plen = lengths[cell] / p[cell]
    # panel-local node positions, measured from the cell's left edge
    t = (within * plen)[:, None] + plen[:, None] * 0.5 * (nodes[None, :] + 1.0)
    C, S = _cos_sinc(s * t * t)
    vals = np.asarray(sigma.values)
    ua = u_entry[cell][:, None]
    upa = (u1_entry[cell] + vals[cell] * u_entry[cell])[:, None]
    u = ua * C + upa * t * S
    w = (0.5 * plen)[:, None] * weights[None, :]
    return float(np.sum(w * u * u))


def norming_constants(sigma, bc, spectrum):
    """Norming constants alpha_n = 2 * integral of u_n^2, u_n(1) = 1.

    Defined for a finite h (the eigenfunction is normalized at x=1 through
    u(1)=1, u^[1](1) = -h).  Panel counts scale with sqrt(s); the order-10
    rule is checked against order 20 at 1e-9 relative.
    """
    if bc.h is None or bc.h == INF:
        raise InvalidBoundary("norming constants require a finite h at x=1")
    alphas = []
    for s in spectrum.eigenvalues:
        u1e, ue = _eigenfunction_entries(sigma, bc, s)
        ppr = 0.5
        for _ in range(5):
            i10 = _quad_square(sigma, s, u1e, ue, ppr, 10)
            i20 = _quad_square(sigma, s, u1e, ue, ppr, 20)
            if abs(i20 - i10) <= 1e-9 * max(abs(i20), 1e-30):
                break
            ppr *= 2.0
        else:
            raise QuadratureError(f"norming quadrature did not settle at s={s!r}")
        alphas.append(2.0 * i20)
    return SpectralData(spectrum, tuple(alphas), BoundaryData.template(bc.H))


# ---------------------------------------------------------------------------
# resolvent trace ratio


@dataclass(frozen=True)
class TailModel:
    """Closed-form completion of the eigenvalue sum beyond the data.

    Models the omitted terms with alpha_n = 1 and s_n = (pi(n-1/2))^2, for
    which the full sum is tan(sqrt s)/sqrt s; the tail is that value minus
    the first `n_known` model terms.  Error is O(1/n_known).
    """

    def sum_beyond(self, s, n_known):
        C, S = _cos_sinc(s)
        if abs(C) < 1e-14:
            raise NearPoleError("tail model pole at this energy")
        full = S / C
        n = np.arange(1, n_known + 1)
        partial = np.sum(2.0 / ((math.pi * (n - 0.5)) ** 2 - s))
        return float(full - partial)


def resolvent_trace_ratio(sigma, s, data, tail=None):
    """Both sides of the trace identity at an off-spectral energy.

    Returns (lhs, rhs): lhs sums 2/((s_n - s) alpha_n) over the data plus
    the model tail; rhs evaluates Psi2/(sqrt(s) Psi1) by shooting.  The
    identity holds for the operator with u(0)=0 and u^[1](1)=0, so `data`
    should be its spectral data.
    """
    if tail is None:
        tail = TailModel()
    sn = np.asarray(data.spectrum.eigenvalues)
    if np.min(np.abs(sn - s)) < 1e-6:
        raise NearPoleError(f"s={s!r} is within 1e-6 of a data eigenvalue")
    al = np.asarray(data.alphas)
    lhs = float(np.sum(2.0 / ((sn - s) * al))) + tail.sum_beyond(s, len(sn))

    lam = math.sqrt(s)
    left, _ = propagate(sigma, s, StateVector(0.0, 1.0), RIGHT_TO_LEFT)
    right, _ = propagate(sigma, s, StateVector(lam, 0.0))
    return lhs, right.u / (lam * left.u)


def wronskian_profile(sigma, s):
    """u+ u-^[1] - u- u+^[1] at every breakpoint (x-independent in theory).

    u+ is normalized at x=1 by (u, u^[1]) = (1, 0); u- at x=0 by
    (u, u^[1]) = (0, sqrt(s)).  The constant equals sqrt(s) * Psi1.
    """
    lam = math.sqrt(s)
    _, tp = propagate(sigma, s, StateVector(0.0, 1.0), RIGHT_TO_LEFT)
    _, tm = propagate(sigma, s, StateVector(lam, 0.0))
    up1, up = tp.u1[::-1], tp.u[::-1]
    um1, um = tm.u1, tm.u
    return up * um1 - um * up1
