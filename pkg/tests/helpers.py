"""Independent oracles used by the test suite.

Everything here is deliberately computed on a different route from the
package: generic high-order ODE integration via scipy, closed-form matching
conditions for the mass-at-1/2 potential solved with brentq, and direct
adaptive quadrature of closed-form eigenfunctions.
"""

import math

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

MASS_POINT = 0.5


def ivp_propagate(sigma, s, u1_0, u_0, rtol=1e-12, atol=1e-14):
    """Integrate the first-order system left to right with RK45."""

    def rhs(x, y):
        sg = sigma.value_at(min(x, 1.0 - 1e-15))
        u1, u = y
        return [-sg * u1 - (sg * sg + s) * u, u1 + sg * u]

    bp = list(sigma.breakpoints)
    y = np.array([u1_0, u_0], dtype=float)
    for a, b in zip(bp, bp[1:]):
        sol = solve_ivp(rhs, (a + 1e-13, b - 1e-13), y, rtol=rtol, atol=atol,
                        method="RK45", dense_output=False)
        y = sol.y[:, -1]
    return y


def ivp_prufer(sigma, s, theta0, rtol=1e-11, atol=1e-13):
    """Integrate the angle equation theta' = s sin^2 + (cos + sigma sin)^2."""

    def rhs(x, y):
        sg = sigma.value_at(min(x, 1.0 - 1e-15))
        th = y[0]
        return [s * math.sin(th) ** 2 + (math.cos(th) + sg * math.sin(th)) ** 2]

    y = np.array([theta0], dtype=float)
    for a, b in zip(sigma.breakpoints, sigma.breakpoints[1:]):
        sol = solve_ivp(rhs, (a + 1e-13, b - 1e-13), y, rtol=rtol, atol=atol)
        y = sol.y[:, -1]
    return float(y[0])


def _step_left(lam):
    """Value and derivative at the mass point of u = sin(lam x)/lam."""
    a = MASS_POINT
    return math.sin(lam * a) / lam, math.cos(lam * a)


def step_char_h0(lam):
    """Matching condition for sigma = 1_{x>1/2}, u(0)=0, u^[1](1)+0*u(1)=0."""
    a = MASS_POINT
    u_a, up_am = _step_left(lam)
    up_ap = up_am + u_a  # derivative jump equals the point mass times u
    b = 1.0 - a
    u1 = u_a * math.cos(lam * b) + up_ap * math.sin(lam * b) / lam
    up1 = -lam * u_a * math.sin(lam * b) + up_ap * math.cos(lam * b)
    return up1 - u1


def step_char_dirichlet(lam):
    """Matching condition for sigma = 1_{x>1/2}, u(0)=u(1)=0."""
    a = MASS_POINT
    u_a, up_am = _step_left(lam)
    up_ap = up_am + u_a
    b = 1.0 - a
    return u_a * math.cos(lam * b) + up_ap * math.sin(lam * b) / lam


def roots_near_heads(F, heads, width=1.3):
    """Bracket one root of F around each head by sign scanning + brentq."""
    out = []
    for c in heads:
        grid = np.linspace(max(c - width, 1e-3), c + width, 400)
        vals = [F(g) for g in grid]
        found = None
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                found = grid[i]
                break
            if vals[i] * vals[i + 1] < 0:
                found = brentq(F, grid[i], grid[i + 1], xtol=1e-14, rtol=8.9e-16)
                break
        if found is None:
            raise RuntimeError(f"oracle found no root near {c}")
        out.append(found)
    return np.array(out)


def step_eigenfunction_h0(lam):
    """Closed-form eigenfunction of the mass potential, normalized u(1)=1."""
    a = MASS_POINT

    # backward from x=1: u(1)=1, u'(1) = u^[1](1) + sigma(1) u(1) = 1
    def right(x):
        return math.cos(lam * (x - 1.0)) + math.sin(lam * (x - 1.0)) / lam

    u_a = right(a)
    up_a_plus = -lam * math.sin(lam * (a - 1.0)) + math.cos(lam * (a - 1.0))
    up_a_minus = up_a_plus - u_a

    def left(x):
        return u_a * math.cos(lam * (x - a)) + up_a_minus * math.sin(lam * (x - a)) / lam

    def u(x):
        return left(x) if x < a else right(x)

    return u


def step_alpha_h0(lam):
    """2 * integral of the closed-form eigenfunction squared (adaptive)."""
    u = step_eigenfunction_h0(lam)
    val, _ = quad(lambda x: u(x) ** 2, 0.0, 1.0, points=[MASS_POINT],
                  limit=200, epsabs=1e-13, epsrel=1e-13)
    return 2.0 * val
