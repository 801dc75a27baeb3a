"""Validation of two candidate spectra and their reduction to spectral data.

The necessary-and-sufficient admissibility conditions are checked on finite
data with an l2-flattening surrogate; accepted pairs are reduced to
{s_n, alpha_n} through the synthesized characteristic functions:

    both h finite:   alpha_n = (h1-h2)/lambda_n * Phi1'(lambda_n)/Phi2(lambda_n)
    H = inf, h2 = inf:  alpha_n = - Psi1'(lambda_n)/Psi2(lambda_n)
    H = 0,   h2 = inf:  alpha_n = + Psi1'(lambda_n)/(lambda_n Psi2(lambda_n))

with the gap h1-h2 recovered from lim (s^lam_n - s^mu_n)/2; the required
limit alpha_n -> 1 is checked on the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import (
    INF,
    REGIME_HEADS,
    BoundaryData,
    SlspecError,
    Spectrum,
    SpectralData,
)
from .products import ZeroSequence, product_derivative_at_zero, product_eval


class MalformedInput(SlspecError):
    """Input sequences are structurally unusable or failed validation."""


class NoFiniteGap(SlspecError):
    """The difference of the two spectra has no finite limit."""


class PositivityViolation(SlspecError):
    """A norming constant came out non-positive; data not realizable."""


class AsymptoticsViolation(SlspecError):
    """Norming constants do not tend to 1 the way realizable data must."""


class RegimePair(Enum):
    """The four supported boundary pairings and their asymptotic heads."""

    THIRD_THIRD = "ThirdThird"
    THIRD_DIRICHLET = "ThirdDirichlet"
    NEUMANN_THIRD = "NeumannThird"
    NEUMANN_DIRICHLET = "NeumannDirichlet"

    @property
    def lambda_regime(self):
        return "HalfIntegerCos" if self.H == INF else "IntegerCos"

    @property
    def mu_regime(self):
        return {
            RegimePair.THIRD_THIRD: "HalfIntegerCos",
            RegimePair.THIRD_DIRICHLET: "IntegerSin",
            RegimePair.NEUMANN_THIRD: "IntegerCos",
            RegimePair.NEUMANN_DIRICHLET: "HalfIntegerSin",
        }[self]

    @property
    def H(self):
        return INF if self.value.startswith("Third") else 0.0

    @property
    def has_gap_condition(self):
        """True when both boundary parameters are finite (condition on h)."""
        return self in (RegimePair.THIRD_THIRD, RegimePair.NEUMANN_THIRD)

    @property
    def lambda_first(self):
        """Dirichlet mu-spectra lie strictly above: lam_1 < mu_1 < lam_2 < ..."""
        return not self.has_gap_condition

    @classmethod
    def from_tag(cls, tag):
        tag = tag.replace("-", "").replace("_", "").lower()
        for rp in cls:
            if rp.value.lower() == tag:
                return rp
        raise ValueError(f"unknown regime {tag!r}")


@dataclass
class ValidationReport:
    """Per-condition outcome of the admissibility checks."""

    regime: str
    interlacing_ok: bool
    first_violation: int | None
    asymptotic_ok: dict
    hgap_estimate: float | None
    hgap_residual_ok: bool | None
    verdict: str = "Reject"
    reasons: list = field(default_factory=list)
    first_failure: str | None = None

    def to_dict(self):
        return {
            "regime": self.regime,
            "interlacing_ok": self.interlacing_ok,
            "first_violation": self.first_violation,
            "asymptotic_ok": self.asymptotic_ok,
            "hgap_estimate": self.hgap_estimate,
            "hgap_residual_ok": self.hgap_residual_ok,
            "verdict": self.verdict,
            "reasons": self.reasons,
            "first_failure": self.first_failure,
        }


def ell2_flattening(v, eps_abs=1e-3, ratio=0.25):
    """Finite-data surrogate for square-summability of a residual sequence.

    Partial sums S_m of v_n^2 must have flattened: the second-half increment
    S_N - S_{N/2} must stay below ratio * S_{N/2} + eps_abs.
    """
    v = np.asarray(v, dtype=float)
    sums = np.cumsum(v * v)
    half = len(v) // 2
    ok = bool(sums[-1] - sums[half - 1] < ratio * sums[half - 1] + eps_abs)
    return ok, sums


def _as_lambdas(seq):
    if isinstance(seq, Spectrum):
        return seq.lambdas
    s = np.asarray(seq, dtype=float)
    if s.ndim != 1 or len(s) == 0:
        raise MalformedInput("expected a one-dimensional sequence of energies")
    if np.any(~np.isfinite(s)) or np.any(s <= 0):
        raise MalformedInput("energies must be finite and positive")
    if np.any(np.diff(s) <= 0):
        raise MalformedInput("energies must be strictly increasing")
    return np.sqrt(s)


def _heads(regime_tag, count):
    head = REGIME_HEADS[regime_tag]
    return np.array([head(n) for n in range(1, count + 1)])


def _check_interlacing(lam, mu, lambda_first):
    """Strict alternation of the merged sequences; returns (ok, first bad n)."""
    if lam[0] == mu[0]:
        return False, 1
    start_lam = lam[0] < mu[0]
    if lambda_first and not start_lam:
        return False, 1
    a, b = (lam, mu) if start_lam else (mu, lam)
    # require a_1 < b_1 < a_2 < b_2 < ...
    for i in range(len(lam)):
        if not a[i] < b[i]:
            return False, i + 1
        if i + 1 < len(lam) and not b[i] < a[i + 1]:
            return False, i + 2
    return True, None


def validate_pair(lams, mus, regime):
    """Check a candidate pair against the admissibility conditions.

    Accepts Spectrum objects or raw positive increasing energy sequences
    (raw input is the point: unvalidated data must reach the checks).
    Conditions: (1) strict interlacing in the regime order, (2) residuals
    against the regime heads with flattening l2 partial sums, (3) in the
    finite-h regimes, n*(lam_n - mu_n) - h/pi flattening for a fitted h.
    """
    lam = _as_lambdas(lams)
    mu = _as_lambdas(mus)
    if len(lam) != len(mu):
        raise MalformedInput("the two spectra must have equal lengths")
    if len(lam) < 20:
        raise MalformedInput("need at least 20 eigenvalues per spectrum")
    n_all = np.arange(1, len(lam) + 1)

    inter_ok, first_bad = _check_interlacing(lam, mu, regime.lambda_first)

    asym = {}
    for name, vals, tag in (("lambda", lam, regime.lambda_regime),
                            ("mu", mu, regime.mu_regime)):
        res = vals - _heads(tag, len(vals))
        ok, sums = ell2_flattening(res)
        asym[name] = {
            "ok": bool(ok),
            "head": tag,
            "partial_sums": [float(s) for s in sums[:: max(1, len(sums) // 16)]],
        }

    hgap = None
    gap_ok = None
    if regime.has_gap_condition:
        try:
            hgap = estimate_h_gap(lams, mus)
        except NoFiniteGap:
            hgap = None
        # fit h (plus a 1/n correction, itself l2-admissible) over the full
        # range: a tail-only fit would absorb slow drifts of
        # n*(lam_n - mu_n) and mask scaling violations
        scaled = n_all * (lam - mu)
        A = np.stack([np.ones_like(scaled), 1.0 / n_all], axis=1)
        coef, *_ = np.linalg.lstsq(A, scaled, rcond=None)
        nu = scaled - A @ coef
        gap_ok, _ = ell2_flattening(nu)
        gap_ok = bool(gap_ok) and hgap is not None

    report = ValidationReport(
        regime=regime.value,
        interlacing_ok=bool(inter_ok),
        first_violation=first_bad,
        asymptotic_ok=asym,
        hgap_estimate=hgap,
        hgap_residual_ok=gap_ok,
    )
    failures = []
    if not inter_ok:
        failures.append("interlacing")
        report.reasons.append(f"interlacing broken at index {first_bad}")
    for name in ("lambda", "mu"):
        if not asym[name]["ok"]:
            failures.append(f"asymptotics({name})")
            report.reasons.append(
                f"{name}-residuals against head {asym[name]['head']} do not flatten")
    if regime.has_gap_condition and not gap_ok:
        failures.append("gap-residual")
        report.reasons.append("lam_n - mu_n is not h/(pi n) + l2/n for any real h")
    report.first_failure = failures[0] if failures else None
    report.verdict = "Reject" if failures else "Accept"
    return report


def estimate_h_gap(lams, mus):
    """Estimate h1 - h2 = lim (s^lam_n - s^mu_n) / 2 by tail fitting.

    Fits a + b/n to the energy differences over the last third with weights
    n^2 and returns a/2; a diverging tail raises NoFiniteGap.
    """
    lam = _as_lambdas(lams)
    mu = _as_lambdas(mus)
    if len(lam) != len(mu) or len(lam) < 20:
        raise MalformedInput("need two equal-length spectra with >= 20 entries")
    d = lam * lam - mu * mu
    N = len(d)
    w0 = math.ceil(N / 3)
    win = np.arange(N - w0, N)
    n = win + 1.0

    m1 = float(np.mean(d[win[: w0 // 2]]))
    m2 = float(np.mean(d[win[w0 // 2:]]))
    if abs(m2 - m1) > 2.0 + 0.02 * 0.5 * (abs(m1) + abs(m2)):
        raise NoFiniteGap("tail of s^lam_n - s^mu_n keeps drifting")

    # least squares for d ~ a + b/n, weights n^2 (so sqrt-weights n)
    A = np.stack([np.ones_like(n), 1.0 / n], axis=1)
    coef, *_ = np.linalg.lstsq(A * n[:, None], d[win] * n, rcond=None)
    return float(coef[0]) / 2.0


def norming_from_two_spectra(lams, mus, regime):
    """Reduce an accepted pair of spectra to spectral data {s_n, alpha_n}.

    Validation runs first and rejection raises MalformedInput with the
    report attached.  After the formula is applied, the level of the alpha
    tail is checked against its required limit 1: a fitted level off by
    more than 20 percent means the pair is not realizable and raises
    AsymptoticsViolation.
    """
    report = validate_pair(lams, mus, regime)
    if report.verdict != "Accept":
        err = MalformedInput(f"validation rejected the pair: {report.reasons}")
        err.report = report
        raise err
    lam = _as_lambdas(lams)
    mu = _as_lambdas(mus)
    N = len(lam)

    seq_lam = ZeroSequence(tuple(lam), regime.lambda_regime)
    seq_mu = ZeroSequence(tuple(mu), regime.mu_regime)

    phi1p = np.array([product_derivative_at_zero(seq_lam, n) for n in range(1, N + 1)])
    phi2 = np.array([product_eval(seq_mu, v) for v in lam])

    if regime.has_gap_condition:
        gap = estimate_h_gap(lams, mus)
        alphas = gap / lam * phi1p / phi2
    elif regime is RegimePair.THIRD_DIRICHLET:
        alphas = -phi1p / phi2
    else:
        alphas = phi1p / (lam * phi2)

    if np.any(alphas <= 0):
        k = int(np.argmax(alphas <= 0)) + 1
        raise PositivityViolation(f"alpha_{k} <= 0; pair not realizable")

    n = np.arange(N // 2 + 1, N + 1, dtype=float)
    A = np.stack([np.ones_like(n), 1.0 / n], axis=1)
    coef, *_ = np.linalg.lstsq(A, alphas[N // 2:], rcond=None)
    rho = float(coef[0])
    if not 0.8 <= rho <= 1.25:
        raise AsymptoticsViolation(
            f"alpha tail level {rho:.4f} is far from 1; pair not realizable")

    ok, _ = ell2_flattening(alphas - 1.0)
    if not ok:
        raise AsymptoticsViolation("alpha_n - 1 does not flatten in l2")

    spectrum = Spectrum(tuple(lam * lam), regime.lambda_regime)
    h_template = 0.0 if regime is RegimePair.THIRD_DIRICHLET else None
    bc = BoundaryData(regime.H, h_template)
    return SpectralData(spectrum, tuple(float(a) for a in alphas), bc)
