"""Command-line pipeline: forward solve, validate, reduce, reconstruct, roundtrip.

Every output file is written atomically (write-then-rename), numbers carry
full float precision, and report paths emit CSV series together with PNG
renderings of the same data.  Exit codes: 0 on success/Accept/Converged,
2 on Reject/NotConverged, 1 on malformed input or computational failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .core import (
    INF,
    BoundaryData,
    PiecewiseSigma,
    SlspecError,
    SpectralData,
)
from .forward import compute_spectrum, norming_constants
from .reconstruct import reconstruct_sigma, roundtrip_report
from .reduction import RegimePair, norming_from_two_spectra, validate_pair
from . import plots


def _parse_param(text):
    if text.strip().lower() == "inf":
        return INF
    return float(text)


def _atomic_write(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write(text)
    os.replace(tmp, path)


def _write_json(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows):
    fmt = lambda v: f"{v:.17g}" if isinstance(v, float) else str(v)
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def _load_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise CliError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}")
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}")


class CliError(Exception):
    pass


def _need(d, key, path):
    if key not in d:
        raise CliError(f"{path}: missing field {key!r}")
    return d[key]


def _load_sigma(path):
    d = _load_json(path)
    return PiecewiseSigma(tuple(_need(d, "breakpoints", path)),
                          tuple(_need(d, "values", path)))


def _stem(path):
    base, _ = os.path.splitext(path)
    return base


def _emit_residuals(stem, spectrum):
    res = spectrum.residuals()
    heads = spectrum.heads()
    rows = [(n + 1, float(math.sqrt(spectrum.eigenvalues[n])), float(heads[n]), float(res[n]))
            for n in range(len(spectrum))]
    _write_csv(f"{stem}_residuals.csv", ["n", "sqrt_s", "head", "residual"], rows)
    plots.render_residuals(f"{stem}_residuals.png", spectrum)


def _emit_alphas(stem, index, reduced, quadrature=None):
    if quadrature is None:
        rows = [(i, float(a)) for i, a in zip(index, reduced)]
        _write_csv(f"{stem}_alphas.csv", ["n", "alpha"], rows)
    else:
        rows = [(i, float(a), float(q)) for i, a, q in zip(index, reduced, quadrature)]
        _write_csv(f"{stem}_alphas.csv", ["n", "alpha_two_spectra", "alpha_quadrature"], rows)
    plots.render_alphas(f"{stem}_alphas.png", list(index), list(reduced), quadrature)


def _emit_sigma(stem, sigma_hat, sigma_true=None):
    bp = sigma_hat.breakpoints
    rows = [(bp[i], bp[i + 1], sigma_hat.values[i]) for i in range(sigma_hat.cells)]
    _write_csv(f"{stem}_sigma.csv", ["x_left", "x_right", "value"], rows)
    plots.render_sigma(f"{stem}_sigma.png", sigma_hat, sigma_true)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_forward(args):
    sigma = _load_sigma(args.sigma)
    bc = BoundaryData(_parse_param(args.H), _parse_param(args.h))
    spectrum = compute_spectrum(sigma, bc, args.n)
    _write_json(args.out, spectrum.to_dict())
    _emit_residuals(_stem(args.out), spectrum)
    if args.data_out:
        data = norming_constants(sigma, bc, spectrum)
        _write_json(args.data_out, data.to_dict())
        _emit_alphas(_stem(args.data_out), range(1, len(data) + 1), data.alphas)
    return 0


def _load_pair(args):
    d = _load_json(args.pair)
    tag = args.regime or _need(d, "regime", args.pair)
    regime = RegimePair.from_tag(tag)
    if args.regime and "regime" in d:
        if RegimePair.from_tag(d["regime"]) is not regime:
            raise CliError(f"--regime {args.regime} contradicts {args.pair}")
    return (np.asarray(_need(d, "lambda_sq", args.pair), dtype=float),
            np.asarray(_need(d, "mu_sq", args.pair), dtype=float),
            regime)


def _cmd_validate(args):
    lam_sq, mu_sq, regime = _load_pair(args)
    report = validate_pair(lam_sq, mu_sq, regime)
    _write_json(args.out, report.to_dict())
    print(f"{report.verdict}: {'; '.join(report.reasons) or 'all conditions hold'}")
    return 0 if report.verdict == "Accept" else 2


def _cmd_reduce(args):
    lam_sq, mu_sq, regime = _load_pair(args)
    report = validate_pair(lam_sq, mu_sq, regime)
    if args.report:
        _write_json(args.report, report.to_dict())
    if report.verdict != "Accept":
        print(f"Reject: {'; '.join(report.reasons)}", file=sys.stderr)
        return 2
    data = norming_from_two_spectra(lam_sq, mu_sq, regime)
    _write_json(args.out, data.to_dict())
    _emit_alphas(_stem(args.out), range(1, len(data) + 1), data.alphas)
    return 0


def _cmd_reconstruct(args):
    data = SpectralData.from_dict(_load_json(args.data))
    result = reconstruct_sigma(data, args.cells, args.reg, misfit_tol=args.misfit_tol)
    out = result.sigma_hat.to_dict()
    out["h1"] = result.h1_hat
    out["misfit"] = result.misfit
    out["status"] = result.status
    out["gauge_note"] = result.gauge_note
    _write_json(args.out, out)
    _emit_sigma(_stem(args.out), result.sigma_hat)
    print(f"{result.status}: misfit {result.misfit:.3e} after {result.iterations} evaluations")
    return 0 if result.status == "Converged" else 2


def _cmd_roundtrip(args):
    sigma = _load_sigma(args.sigma)
    regime = RegimePair.from_tag(args.regime)
    report = roundtrip_report(sigma, regime, _parse_param(args.h1), _parse_param(args.h2),
                              args.n, cells=args.cells, reg_weight=args.reg,
                              misfit_tol=args.misfit_tol)
    _write_json(args.report, report)
    stem = _stem(args.report)
    _emit_alphas(stem, report["alpha"]["index"], report["alpha"]["two_spectra"],
                 report["alpha"]["quadrature"])
    _emit_sigma(stem, PiecewiseSigma.from_dict(report["reconstruction"]["sigma_hat"]),
                PiecewiseSigma.from_dict(report["reconstruction"]["sigma_true_gauged"]))
    rows = [(i + 1, float(v)) for i, v in enumerate(report["mu_resolve"]["rel_errors"])]
    _write_csv(f"{stem}_mu_resolve.csv", ["n", "rel_error"], rows)
    ok = (report["validation"]["verdict"] == "Accept"
          and report["reconstruction"]["status"] == "Converged")
    print(f"validation {report['validation']['verdict']}; reconstruction "
          f"{report['reconstruction']['status']} "
          f"(L2 error {report['reconstruction']['l2_error']:.3e})")
    return 0 if ok else 2


def build_parser():
    p = argparse.ArgumentParser(prog="slspec", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("forward", help="spectrum (and optionally norming constants)")
    f.add_argument("--sigma", required=True)
    f.add_argument("--H", required=True, help="left boundary parameter or 'inf'")
    f.add_argument("--h", required=True, help="right boundary parameter or 'inf'")
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--out", default="spectrum.json")
    f.add_argument("--data-out", default=None,
                   help="also write spectral data with norming constants here")
    f.set_defaults(func=_cmd_forward)

    v = sub.add_parser("validate", help="check a two-spectra pair")
    v.add_argument("--pair", required=True)
    v.add_argument("--regime", default=None)
    v.add_argument("--out", default="validation_report.json")
    v.set_defaults(func=_cmd_validate)

    r = sub.add_parser("reduce", help="two spectra -> spectral data")
    r.add_argument("--pair", required=True)
    r.add_argument("--regime", default=None)
    r.add_argument("--out", default="spectral_data.json")
    r.add_argument("--report", default="validation_report.json")
    r.set_defaults(func=_cmd_reduce)

    c = sub.add_parser("reconstruct", help="spectral data -> sigma profile")
    c.add_argument("--data", required=True)
    c.add_argument("--cells", type=int, required=True)
    c.add_argument("--reg", type=float, default=0.0)
    c.add_argument("--misfit-tol", type=float, default=1e-6)
    c.add_argument("--out", default="sigma.json")
    c.set_defaults(func=_cmd_reconstruct)

    t = sub.add_parser("roundtrip", help="full pipeline self-test on a known sigma")
    t.add_argument("--sigma", required=True)
    t.add_argument("--regime", required=True)
    t.add_argument("--h1", required=True)
    t.add_argument("--h2", required=True)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--cells", type=int, default=None)
    t.add_argument("--reg", type=float, default=0.0)
    t.add_argument("--misfit-tol", type=float, default=1e-4)
    t.add_argument("--report", default="report.json")
    t.set_defaults(func=_cmd_roundtrip)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SlspecError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except (KeyError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
