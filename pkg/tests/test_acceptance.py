"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; tolerances and time budgets are asserted, not just reported.
"""

import math
import time
import warnings

import numpy as np
import pytest

import slspec as sl
from slspec.reduction import RegimePair
from slspec.riesz import FrequencySystem, _HEADS

import helpers

warnings.filterwarnings("ignore", message="fewer than 50 zeros")


def _report(num, text):
    print(f"\n[criterion {num:2d}] PASS  {text}")


# -------------------------------------------------------------------- 1


def test_criterion_01_zero_potential_exactness(zero_sigma):
    t0 = time.monotonic()
    n = np.arange(1, 51)
    spec = sl.compute_spectrum(zero_sigma, sl.BoundaryData(sl.INF, 0.0), 50)
    err_h0 = np.max(np.abs(np.asarray(spec.eigenvalues) - (np.pi * (n - 0.5)) ** 2)
                    / (np.pi * (n - 0.5)) ** 2)
    spec_d = sl.compute_spectrum(zero_sigma, sl.BoundaryData(sl.INF, sl.INF), 50)
    err_hinf = np.max(np.abs(np.asarray(spec_d.eigenvalues) - (np.pi * n) ** 2)
                      / (np.pi * n) ** 2)
    elapsed = time.monotonic() - t0
    assert err_h0 < 1e-10 and err_hinf < 1e-10
    assert elapsed < 5.0
    _report(1, f"zero potential exact to {max(err_h0, err_hinf):.2e} in {elapsed:.2f}s")


# -------------------------------------------------------------------- 2


def test_criterion_02_point_mass_oracle(step_sigma):
    t0 = time.monotonic()
    n = np.arange(1, 21)
    oracle_h0 = helpers.roots_near_heads(helpers.step_char_h0, np.pi * (n - 0.5))
    lam = sl.compute_spectrum(step_sigma, sl.BoundaryData(sl.INF, 0.0), 20).lambdas
    err0 = np.max(np.abs(lam - oracle_h0) / oracle_h0)
    oracle_d = helpers.roots_near_heads(helpers.step_char_dirichlet, np.pi * n)
    mu = sl.compute_spectrum(step_sigma, sl.BoundaryData(sl.INF, sl.INF), 20).lambdas
    err1 = np.max(np.abs(mu - oracle_d) / oracle_d)
    elapsed = time.monotonic() - t0
    assert err0 < 1e-9 and err1 < 1e-9
    assert elapsed < 10.0
    _report(2, f"point-mass spectra match the scalar solver to "
               f"{max(err0, err1):.2e} in {elapsed:.2f}s")


# -------------------------------------------------------------------- 3


def test_criterion_03_interlacing_random_potentials():
    rng = np.random.default_rng(20240817)
    checked = 0
    for _ in range(5):
        cells = int(rng.integers(2, 6))
        sigma = sl.PiecewiseSigma.from_cell_values(rng.uniform(-0.8, 0.8, cells))
        h1, h2 = rng.uniform(0.0, 3.0, 2)
        if abs(h1 - h2) < 0.1:
            h2 = h1 + 0.7
        a = sl.compute_spectrum(sigma, sl.BoundaryData(sl.INF, h1), 40).eigenvalues
        b = sl.compute_spectrum(sigma, sl.BoundaryData(sl.INF, h2), 40).eigenvalues
        merged = sorted([(v, 0) for v in a] + [(v, 1) for v in b])
        tags = [t for _, t in merged]
        assert all(x != y for x, y in zip(tags, tags[1:]))
        checked += 1
    assert checked == 5
    _report(3, "merged first-40 spectra alternate strictly for 5 random triples")


# -------------------------------------------------------------------- 4


def test_criterion_04_gauge_invariance(step_sigma):
    bc = sl.BoundaryData(sl.INF, 0.0)
    base = np.asarray(sl.compute_spectrum(step_sigma, bc, 30).eigenvalues)
    worst = 0.0
    for c in (-2.0, 1.0, 3.0):
        g_sig, g_bc = sl.gauge_transform(step_sigma, bc, c)
        moved = np.asarray(sl.compute_spectrum(g_sig, g_bc, 30).eigenvalues)
        worst = max(worst, float(np.max(np.abs(moved - base) / base)))
    assert worst < 1e-8
    _report(4, f"gauge-shifted spectra agree to {worst:.2e} (30 eigenvalues)")


# -------------------------------------------------------------------- 5


def test_criterion_05_two_spectra_norming(step_spectra_200, step_alphas_200):
    t0 = time.monotonic()
    lam, mu, mu_d = step_spectra_200
    direct = np.asarray(step_alphas_200.alphas[:30])

    data = sl.norming_from_two_spectra(lam, mu, RegimePair.THIRD_THIRD)
    err_tt = float(np.max(np.abs(np.asarray(data.alphas[:30]) - direct) / direct))

    data_d = sl.norming_from_two_spectra(lam, mu_d, RegimePair.THIRD_DIRICHLET)
    err_td = float(np.max(np.abs(np.asarray(data_d.alphas[:30]) - direct) / direct))

    elapsed = time.monotonic() - t0
    assert err_tt < 1e-4 and err_td < 1e-4
    assert elapsed < 120.0
    _report(5, f"two-spectra norming constants within {max(err_tt, err_td):.2e} "
               f"of quadrature in {elapsed:.1f}s")


# -------------------------------------------------------------------- 6


def test_criterion_06_gap_law(zero_sigma, step_sigma):
    cases = [
        (zero_sigma, 0.0, 1.0),
        (step_sigma, 0.0, 2.0),
        (sl.PiecewiseSigma.from_cell_values((0.6, -0.4, 0.2, -0.1)), 0.5, 2.5),
    ]
    worst = 0.0
    for sigma, h1, h2 in cases:
        lam = sl.compute_spectrum(sigma, sl.BoundaryData(sl.INF, h1), 100)
        mu = sl.compute_spectrum(sigma, sl.BoundaryData(sl.INF, h2), 100)
        got = sl.estimate_h_gap(lam, mu)
        worst = max(worst, abs(got - (h1 - h2)))
    assert worst < 5e-2
    _report(6, f"h-gap recovered within {worst:.2e} for three potentials")


# -------------------------------------------------------------------- 7


def test_criterion_07_product_synthesis():
    ks = np.arange(1, 51)
    cos_seq = sl.ZeroSequence(tuple(np.pi * (ks - 0.5)), "HalfIntegerCos")
    sin_seq = sl.ZeroSequence(tuple(np.pi * ks), "IntegerSin")
    lams = np.arange(0.0, 10.0 + 1e-12, 0.01)
    err_c = max(abs(sl.product_eval(cos_seq, v) - math.cos(v)) for v in lams)
    err_s = max(abs(sl.product_eval(sin_seq, v) - math.sin(v)) for v in lams)
    assert err_c < 1e-8 and err_s < 1e-8
    _report(7, f"products reproduce cos/sin on [0,10] to {max(err_c, err_s):.2e}")


# -------------------------------------------------------------------- 8


def test_criterion_08_resolvent_trace_identity(zero_sigma, step_sigma):
    worst = 0.0
    for sigma in (zero_sigma, step_sigma):
        bc = sl.BoundaryData(sl.INF, 0.0)
        spec = sl.compute_spectrum(sigma, bc, 2000)
        data = sl.norming_constants(sigma, bc, spec)
        ev = spec.eigenvalues
        probes = (0.5 * ev[0], 0.5 * (ev[0] + ev[1]), 0.5 * (ev[3] + ev[4]))
        for s in probes:
            lhs, rhs = sl.resolvent_trace_ratio(sigma, s, data)
            worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-4
    _report(8, f"resolvent trace identity holds to {worst:.2e} "
               "(N=2000, two potentials, three energies each)")


# -------------------------------------------------------------------- 9


def test_criterion_09_reconstruction_roundtrip(step_sigma):
    t0 = time.monotonic()
    rep = sl.roundtrip_report(step_sigma, RegimePair.THIRD_THIRD, 0.0, 2.0,
                              40, cells=16)
    elapsed = time.monotonic() - t0
    l2 = rep["reconstruction"]["l2_error"]
    mu_err = float(np.max(rep["mu_resolve"]["rel_errors"][:20]))
    assert rep["validation"]["verdict"] == "Accept"
    assert l2 <= 5e-2
    assert mu_err < 1e-3
    assert elapsed < 600.0
    _report(9, f"round trip: L2(sigma) {l2:.2e}, second spectrum re-solved to "
               f"{mu_err:.2e} in {elapsed:.0f}s")


# -------------------------------------------------------------------- 10


def _forward_pair(sigma, h1, h2, n=100):
    lam = sl.compute_spectrum(sigma, sl.BoundaryData(sl.INF, h1), n)
    mu = sl.compute_spectrum(sigma, sl.BoundaryData(sl.INF, h2), n)
    return np.asarray(lam.eigenvalues), np.asarray(mu.eigenvalues)


def test_criterion_10_rejection_power(zero_sigma):
    n = np.arange(1, 101)
    lam0 = np.pi * (n - 0.5)
    base_lam, base_mu = _forward_pair(zero_sigma, 0.0, 1.0)

    cases = []

    # broken interlacing
    a, b = base_lam.copy(), base_mu.copy()
    a[9], b[9] = b[9], a[9]
    cases.append((a, b, RegimePair.THIRD_THIRD, "interlacing"))

    a, b = base_lam.copy(), base_mu.copy()
    b[4] = a[4]
    cases.append((a, b, RegimePair.THIRD_THIRD, "interlacing"))

    cases.append(((np.pi * n) ** 2, lam0**2, RegimePair.THIRD_DIRICHLET,
                  "interlacing"))

    a, b = base_lam.copy(), base_mu.copy()
    b[6] = 2 * a[6] - b[6]
    cases.append((a, b, RegimePair.THIRD_THIRD, "interlacing"))

    # wrong asymptotic head
    cases.append((lam0**2, (np.pi * n) ** 2, RegimePair.THIRD_THIRD,
                  "asymptotics(mu)"))
    cases.append((((np.pi * (n - 1.0) + 0.3)) ** 2, lam0**2,
                  RegimePair.THIRD_THIRD, "asymptotics(lambda)"))
    cases.append((lam0**2, (lam0 + 0.4) ** 2, RegimePair.THIRD_THIRD,
                  "asymptotics(mu)"))

    # wrong gap scaling (right heads, gap not h/(pi n) + l2/n)
    for gap in ((0.75 + 0.5 * (-1.0) ** n) / n,
                (0.6 + 0.4 * np.cos(0.5 * n)) / n,
                (0.7 + 0.5 * np.sin(0.3 * n)) / n):
        cases.append((lam0**2, (lam0 - gap) ** 2, RegimePair.THIRD_THIRD,
                      "gap-residual"))

    assert len(cases) == 10
    for i, (lam_sq, mu_sq, regime, expected) in enumerate(cases, start=1):
        report = sl.validate_pair(np.sort(lam_sq), np.sort(mu_sq), regime)
        assert report.verdict == "Reject", f"case {i} was not rejected"
        assert report.first_failure == expected, (
            f"case {i}: first failure {report.first_failure!r}, wanted {expected!r}")
    _report(10, "all 10 synthetic violations rejected at the right condition")


# -------------------------------------------------------------------- 11


def test_criterion_11_riesz_diagnostics():
    offsets = {"integer": 1, "half_integer": 1, "integer_minus_one": 1}
    # unperturbed families: Gram exactly I/2 (constant cosine mode aside)
    for kind, head in (("sine", "integer"), ("sine", "half_integer"),
                       ("cosine", "integer_minus_one"), ("cosine", "half_integer")):
        k0 = offsets[head]
        freqs = tuple(_HEADS[head](k) for k in range(k0, 30 + k0))
        sys = FrequencySystem(freqs, kind, head)
        G = sl.gram_matrix(sys, 30)
        want = np.diag([0.5] * 30)
        if kind == "cosine" and head == "integer_minus_one":
            want[0, 0] = 1.0  # constant mode
        # exact up to floating point: trig evaluated at float multiples of pi
        assert np.allclose(G, want, atol=1e-14)

        freqs_p = tuple(_HEADS[head](k) + 0.2 / (k - k0 + 1) for k in range(k0, 60 + k0))
        Gp = sl.gram_matrix(FrequencySystem(freqs_p, kind, head), 60)
        assert np.linalg.cond(Gp) < 10.0

    n = np.arange(1, 121)
    lam = np.pi * (n - 0.5)
    out = sl.fourier_diff(lambda t: t, lam, lam + 1.0 / n)
    c_half = float(np.max(np.abs(out.residuals[:60]) / (1.0 / n[:60]) ** 3))
    c_full = out.cubic_constant
    assert c_full is not None and math.isfinite(c_full)
    assert c_full <= c_half * (1.0 + 1e-12)  # stable: longer data adds nothing
    _report(11, f"Riesz diagnostics pass (cubic remainder constant {c_full:.3f})")
