"""Propagation of the first-order system across [0, 1].

Writing u1 = u' - sigma*u for the quasi-derivative, a solution of the
eigenvalue equation at energy s satisfies

    d/dx (u1, u) = A (u1, u),   A = [[-sigma, -sigma^2 - s], [1, sigma]].

On a cell where sigma is constant, A is constant and trace-free with
det A = s, so A^2 = -s*I and the cell propagator has the closed form

    exp(A*l) = C(s*l^2) * I + l * S(s*l^2) * A,

with C(z) = cos(sqrt z), S(z) = sin(sqrt z)/sqrt z continued through z <= 0
by cosh/sinh.  Inside a cell u itself obeys the free equation u'' = -s u,
which makes zero counting and the Pruefer angle at x=1 exactly computable:
the phase of (u', sqrt(s) u) advances linearly at rate sqrt(s), and the
angle of (u1, u) can only cross multiples of pi upward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SlspecError

LEFT_TO_RIGHT = "left_to_right"
RIGHT_TO_LEFT = "right_to_left"

# below this value of |sqrt(z)| * length the cos/sinc pair switches to a
# 4-term Taylor expansion (the double-eigenvalue limit of the propagator)
_DEGENERATE_PHASE = 1e-6

_RESCALE_LIMIT = 1e120

# hyperbolic cells are split so each piece keeps sqrt(-s)*length below this,
# well inside float range; oscillatory cells never need splitting
_MAX_HYPERBOLIC_PHASE = 350.0


def _cell_pieces(s, length):
    if s >= 0.0:
        return 1
    return max(1, math.ceil(math.sqrt(-s) * abs(length) / _MAX_HYPERBOLIC_PHASE))


class AmbiguousCount(SlspecError):
    """s_max sits within 1e-9 of an eigenvalue; widen the bracket."""


def _cos_sinc(z):
    """C(z) = cos(sqrt z) and S(z) = sin(sqrt z)/sqrt z for real z (array ok).

    Continued through negative z as cosh/sinh; the |z| < 1e-12 neighbourhood
    of the degenerate cell uses the Taylor expansion of both series.
    """
    if np.ndim(z) == 0:
        zz = float(z)
        if abs(zz) < _DEGENERATE_PHASE**2:
            return (1.0 - zz / 2.0 + zz * zz / 24.0 - zz**3 / 720.0,
                    1.0 - zz / 6.0 + zz * zz / 120.0 - zz**3 / 5040.0)
        if zz > 0.0:
            w = math.sqrt(zz)
            return math.cos(w), math.sin(w) / w
        # clamp the hyperbolic branch; callers rescale long before this bites
        w = min(math.sqrt(-zz), 700.0)
        return math.cosh(w), math.sinh(w) / w
    z = np.asarray(z, dtype=float)
    C = np.empty_like(z)
    S = np.empty_like(z)
    small = np.abs(z) < _DEGENERATE_PHASE**2
    pos = (z > 0.0) & ~small
    neg = ~pos & ~small
    if pos.any():
        w = np.sqrt(z[pos])
        C[pos] = np.cos(w)
        S[pos] = np.sin(w) / w
    if neg.any():
        w = np.minimum(np.sqrt(-z[neg]), 700.0)
        C[neg] = np.cosh(w)
        S[neg] = np.sinh(w) / w
    if small.any():
        zz = z[small]
        C[small] = 1.0 - zz / 2.0 + zz * zz / 24.0 - zz**3 / 720.0
        S[small] = 1.0 - zz / 6.0 + zz * zz / 120.0 - zz**3 / 5040.0
    return C, S


@dataclass(frozen=True)
class StateVector:
    """Pair (u1, u) = (quasi-derivative, value) of a nontrivial solution."""

    u1: float
    u: float

    def __post_init__(self):
        if not (math.isfinite(self.u1) and math.isfinite(self.u)):
            raise ValueError("state components must be finite")
        if self.u1 == 0.0 and self.u == 0.0:
            raise ValueError("state must be nontrivial")


@dataclass(frozen=True)
class TransferMatrix:
    """Unimodular map (u1, u) at cell entry -> (u1, u) at cell exit."""

    a: float
    b: float
    c: float
    d: float

    def det(self):
        return self.a * self.d - self.b * self.c

    def apply(self, state):
        return StateVector(self.a * state.u1 + self.b * state.u,
                           self.c * state.u1 + self.d * state.u)

    def as_array(self):
        return np.array([[self.a, self.b], [self.c, self.d]])


def cell_transfer(sigma_value, s, length):
    """Closed-form propagator of one constant-sigma cell at energy s."""
    if length <= 0:
        raise ValueError("length must be positive")
    return _cell_transfer_signed(sigma_value, s, length)


def _cell_transfer_signed(sigma_value, s, length):
    # length < 0 yields the inverse propagator (z is even in length)
    z = s * length * length
    C, S = _cos_sinc(z)
    lS = length * S
    sg = sigma_value
    a, b, c, d = C - sg * lS, -(sg * sg + s) * lS, lS, C + sg * lS
    # scrub the rounding drift of cosh^2 - sinh^2; the flow is unimodular
    if max(abs(a), abs(b), abs(c), abs(d)) < 1e150:
        det = a * d - b * c
        if 0.25 < det < 4.0:
            f = 1.0 / math.sqrt(det)
            a, b, c, d = a * f, b * f, c * f, d * f
    return TransferMatrix(a, b, c, d)


@dataclass(frozen=True)
class PropagationTrace:
    """States recorded at every breakpoint, plus per-point log scale.

    ``u1[i]``, ``u[i]`` hold the (rescaled) state at ``x[i]``; the true
    solution there is (u1[i], u[i]) * exp(log_scale[i] - log_scale[ref])
    relative to any reference point.  log_scale is identically zero unless
    an overflow rescue occurred.
    """

    x: np.ndarray
    u1: np.ndarray
    u: np.ndarray
    log_scale: np.ndarray

    def states(self):
        """States in the scale of the initial point; raises on overflow."""
        rel = self.log_scale - self.log_scale[0]
        if np.max(np.abs(rel)) > 600.0:
            raise OverflowError("trace spans too many orders of magnitude")
        f = np.exp(rel)
        return self.u1 * f, self.u * f


def propagate(sigma, s, init, direction=LEFT_TO_RIGHT):
    """Propagate a state across all cells; returns (final state, trace)."""
    bp = np.asarray(sigma.breakpoints)
    vals = sigma.values
    n = len(vals)
    if direction == LEFT_TO_RIGHT:
        order = range(n)
        xs = [bp[0]]
    elif direction == RIGHT_TO_LEFT:
        order = range(n - 1, -1, -1)
        xs = [bp[-1]]
    else:
        raise ValueError("direction must be LEFT_TO_RIGHT or RIGHT_TO_LEFT")

    u1, u = float(init.u1), float(init.u)
    logs = [0.0]
    us = [u]
    u1s = [u1]
    acc = 0.0
    for i in order:
        length = bp[i + 1] - bp[i]
        if direction == RIGHT_TO_LEFT:
            length = -length
        pieces = _cell_pieces(s, length)
        m = _cell_transfer_signed(vals[i], s, length / pieces)
        for _ in range(pieces):
            u1, u = m.a * u1 + m.b * u, m.c * u1 + m.d * u
            big = max(abs(u1), abs(u))
            if big > _RESCALE_LIMIT:
                u1 /= big
                u /= big
                acc += math.log(big)
        xs.append(bp[i] if direction == RIGHT_TO_LEFT else bp[i + 1])
        u1s.append(u1)
        us.append(u)
        logs.append(acc)
    trace = PropagationTrace(np.array(xs), np.array(u1s), np.array(us), np.array(logs))
    return StateVector(u1, u), trace


def sample_solution(sigma, s, init, xs, direction=LEFT_TO_RIGHT):
    """Evaluate (u1, u) of the propagated solution at arbitrary points.

    Points are taken in [0, 1]; the solution is anchored at x=0 for
    LEFT_TO_RIGHT and at x=1 for RIGHT_TO_LEFT.
    """
    _, trace = propagate(sigma, s, init, direction)
    if np.max(np.abs(trace.log_scale)) > 0:
        raise OverflowError("solution too large to sample at a common scale")
    bp = np.asarray(sigma.breakpoints)
    # entry state of each cell in left-to-right orientation
    if direction == LEFT_TO_RIGHT:
        entry_u1 = trace.u1[:-1]
        entry_u = trace.u[:-1]
    else:
        entry_u1 = trace.u1[::-1][:-1]
        entry_u = trace.u[::-1][:-1]
    out_u1, out_u = [], []
    for x in np.atleast_1d(np.asarray(xs, dtype=float)):
        i = min(max(int(np.searchsorted(bp, x, side="right")) - 1, 0), sigma.cells - 1)
        t = x - bp[i]
        sg = sigma.values[i]
        ua, u1a = entry_u[i], entry_u1[i]
        upa = u1a + sg * ua
        C, S = _cos_sinc(s * t * t)
        u = ua * C + upa * t * S
        up = -s * t * S * ua + C * upa
        out_u.append(u)
        out_u1.append(up - sg * u)
    return np.array(out_u1), np.array(out_u)


# ---------------------------------------------------------------------------
# exact Pruefer angle and eigenvalue counting


def _theta_many(sigma, s, init_theta):
    """theta(1, s) for an array of energies, by per-cell phase composition.

    Within each cell the number of zeros of u is read off the linearly
    advancing phase of (u', sqrt(s) u) (or a sign test in the non
    oscillatory regime), and the continuous branch of theta = atan2(u, u1)
    is pinned by the fact that it crosses multiples of pi only upward.
    """
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    u1 = np.full_like(s, math.cos(init_theta))
    u = np.full_like(s, math.sin(init_theta))
    crossings = np.zeros_like(s)

    bp = sigma.breakpoints
    pos = s > 0.0
    w = np.sqrt(np.abs(s))
    s_min = float(np.min(s))
    for i, sg in enumerate(sigma.values):
        length = bp[i + 1] - bp[i]
        pieces = _cell_pieces(s_min, length)
        step = length / pieces
        z = s * step * step
        C, S = _cos_sinc(z)
        lS = step * S
        for _ in range(pieces):
            up = u1 + sg * u
            # oscillatory cells: exact zero count from the linear phase
            psi_a = np.arctan2(w * u, up)
            psi_b = psi_a + w * step
            m_osc = np.floor(psi_b / math.pi) - np.floor(psi_a / math.pi)

            nu1 = (C - sg * lS) * u1 - (sg * sg + s) * lS * u
            nu = lS * u1 + (C + sg * lS) * u

            # non-oscillatory cells: u is convex away from zero, one zero max
            flip = np.sign(u) * np.sign(nu)
            m_hyp = np.where(flip < 0.0, 1.0,
                             np.where((nu == 0.0) & (u != 0.0), 1.0, 0.0))
            crossings += np.where(pos, m_osc, m_hyp)

            big = np.maximum(np.abs(nu1), np.abs(nu))
            scale = np.where(big > _RESCALE_LIMIT, big, 1.0)
            u1, u = nu1 / scale, nu / scale

    frac = np.mod(np.arctan2(u, u1), math.pi)
    theta = math.pi * crossings + frac
    return float(theta[0]) if scalar else theta


def prufer_theta(sigma, s, init_theta):
    """Continuous Pruefer angle theta(1, s) with theta(0) = init_theta.

    init_theta encodes the x=0 condition: 0 for a Dirichlet endpoint,
    arccot(H) in (0, pi) for a finite H.  theta(1, .) is strictly
    increasing in s and hits arccot(-h) mod pi exactly at eigenvalues.
    """
    if not 0.0 <= init_theta < math.pi:
        raise ValueError("init_theta must lie in [0, pi)")
    return _theta_many(sigma, s, init_theta)


def theta_init(bc):
    return 0.0 if bc.dirichlet_left else math.atan2(1.0, bc.H)


def theta_target(bc):
    """Boundary ray at x=1: theta(1, s_n) = theta_target + (n-1) pi."""
    if bc.dirichlet_right:
        return math.pi
    return math.atan2(1.0, -bc.h)


def _count_many(sigma, bc, s):
    theta1 = _theta_many(sigma, np.asarray(s, dtype=float), theta_init(bc))
    d = (np.atleast_1d(theta1) - theta_target(bc)) / math.pi
    return np.maximum(0, np.ceil(d)).astype(int)


def count_below(sigma, bc, s_max):
    """Number of eigenvalues of (sigma, H, h) strictly below s_max."""
    if not math.isfinite(s_max):
        raise ValueError("s_max must be finite")
    eps = 1e-9 * max(1.0, abs(s_max))
    lo, hi = _count_many(sigma, bc, [s_max - eps, s_max + eps])
    if lo != hi:
        raise AmbiguousCount(
            f"s_max={s_max!r} is within 1e-9 of an eigenvalue; widen the bracket")
    return int(lo)
