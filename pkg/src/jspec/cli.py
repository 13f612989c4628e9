"""Command-line front end.

Subcommands: spectrum, charfn-grid, eigvec, green, detp, verify-examples.
Structured output is JSON (complex numbers always as {"re", "im"} objects);
grids are CSV.  Exit codes: 0 success, 1 configuration error, 2 math-level
error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import regularization, spectra
from .charfn import DEFAULT_TOL, charfn, green, solution_f
from .errors import ConfigError, JspecError, PoleHit
from .operators import load_spec, pole_indices
from .spectra import Box


def _c2j(z):
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def _parse_complex(text):
    """Accept '1.5', '0.5+0.5i', '0.5+0.5j', or 'a,b'."""
    t = text.strip().replace(" ", "")
    try:
        if "," in t:
            a, b = t.split(",")
            return complex(float(a), float(b))
        return complex(t.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}")


def _parse_region(text):
    try:
        a, b, c, d = (float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"region must be 'a,b,c,d', got {text!r}")
    if not (a < b and c < d):
        raise ConfigError(f"region bounds out of order: {text!r}")
    return Box(a, b, c, d)


def _parse_int_pair(text, what):
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"{what} must be 'lo,hi', got {text!r}")
    if a > b:
        raise ConfigError(f"{what} bounds out of order: {text!r}")
    return a, b


def _emit(doc, out_path):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _load(args):
    if not args.config:
        raise ConfigError("--config is required")
    return load_spec(args.config)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_spectrum(args):
    spec = _load(args)
    region = _parse_region(args.region)
    report = spectra.spectrum(spec, region, tol=args.tol,
                              exclusion_radius=args.exclusion_radius)
    _emit(report.to_json(), args.out)
    return 0


def cmd_charfn_grid(args):
    spec = _load(args)
    region = _parse_region(args.region)
    if args.nx < 2 or args.ny < 2:
        raise ConfigError("grid needs nx >= 2 and ny >= 2")
    regularized = not args.plain
    if regularized and spec.reg_class.kind == "none":
        raise ConfigError("operator has no regularization class; pass --plain")
    xs = np.linspace(region.re_lo, region.re_hi, args.nx)
    ys = np.linspace(region.im_lo, region.im_hi, args.ny)
    rows = []
    for y in ys:
        for x in xs:
            z = complex(x, y)
            try:
                if regularized:
                    cv = regularization.charfn_reg(spec, z, tol=args.tol)
                else:
                    if pole_indices(spec, z):
                        raise PoleHit(f"z = {z} lies on the diagonal range", z=z)
                    cv = charfn(spec, z, tol=args.tol)
                rows.append([x, y, cv.value.real, cv.value.imag,
                             abs(cv.value), cv.tail_err, cv.window_n, ""])
            except JspecError as exc:
                rows.append([x, y, float("nan"), float("nan"),
                             float("nan"), float("nan"), 0, exc.kind])
    writer = csv.writer(args.out and open(args.out, "w", newline="") or sys.stdout)
    writer.writerow(["re", "im", "f_re", "f_im", "abs",
                     "tail_err", "window_n", "reason"])
    writer.writerows(rows)
    return 0


def cmd_eigvec(args):
    spec = _load(args)
    z = _parse_complex(args.z)
    n_lo, n_hi = _parse_int_pair(args.range, "--range")
    if args.order == 0:
        slc = solution_f(spec, z, (n_lo, n_hi), tol=args.tol)
        values = [slc.values]
    else:
        slices = spectra.generalized_eigvecs(spec, z, args.order + 1,
                                             (n_lo, n_hi), tol=args.tol)
        values = [s.values for s in slices]
        slc = slices[0]
    doc = {
        "z": _c2j(z),
        "n_lo": n_lo,
        "n_hi": n_hi,
        "order": args.order,
        "vectors": [[_c2j(v) for v in vec] for vec in values],
        "tail_err": float(np.max(slc.tail_err)),
        "window": int(slc.window_n),
    }
    _emit(doc, args.out)
    return 0


def cmd_green(args):
    spec = _load(args)
    z = _parse_complex(args.z)
    g = green(spec, z, args.i, args.j, tol=args.tol)
    doc = {"z": _c2j(z), "i": args.i, "j": args.j, "value": _c2j(g),
           "tol": args.tol}
    _emit(doc, args.out)
    return 0


def cmd_detp(args):
    spec = _load(args)
    z = _parse_complex(args.z)
    res = regularization.detp_finite(spec, args.p, z, args.N)
    doc = {
        "z": _c2j(z),
        "p": res.p,
        "N": res.n_window,
        "value": _c2j(res.value),
        "via_recurrence": _c2j(res.via_recurrence),
        "identity_residual": res.identity_residual,
    }
    _emit(doc, args.out)
    return 0


def cmd_verify_examples(args):
    from .verify import run_checks
    ok = run_checks(sys.stdout)
    return 0 if ok else 3


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser():
    top = argparse.ArgumentParser(prog="jspec",
                                  description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="operator description (JSON)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--out", help="also write the result to this file")

    p = sub.add_parser("spectrum", help="locate eigenvalues in a rectangle")
    common(p)
    p.add_argument("--region", required=True,
                   help="Re-min,Re-max,Im-min,Im-max")
    p.add_argument("--exclusion-radius", type=float, default=0.0)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("charfn-grid",
                       help="CSV grid of the characteristic function")
    common(p)
    p.add_argument("--region", required=True)
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--ny", type=int, default=101)
    p.add_argument("--plain", action="store_true",
                   help="evaluate the bare function instead of the "
                        "renormalized one")
    p.set_defaults(fn=cmd_charfn_grid)

    p = sub.add_parser("eigvec", help="decaying-solution / eigenvector slice")
    common(p)
    p.add_argument("--z", required=True)
    p.add_argument("--range", required=True, help="lo,hi index range")
    p.add_argument("--order", type=int, default=0,
                   help="chain depth for generalized vectors")
    p.set_defaults(fn=cmd_eigvec)

    p = sub.add_parser("green", help="one resolvent matrix entry")
    common(p)
    p.add_argument("--z", required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.set_defaults(fn=cmd_green)

    p = sub.add_parser("detp", help="finite-window regularized determinant")
    common(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(fn=cmd_detp)

    p = sub.add_parser("verify-examples",
                       help="run the built-in verification checks")
    p.set_defaults(fn=cmd_verify_examples)

    return top


def _cap_threads():
    cap = os.environ.get("JSPEC_THREADS")
    if cap:
        try:
            import numba
            numba.set_num_threads(max(1, int(cap)))
        except (ImportError, ValueError):
            pass


def main(argv=None):
    _cap_threads()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(json.dumps({"error": {"kind": "ConfigError", "message": str(exc)}}),
              file=sys.stderr)
        return 1
    except JspecError as exc:
        print(json.dumps({"error": {"kind": exc.kind, "message": str(exc)}}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
