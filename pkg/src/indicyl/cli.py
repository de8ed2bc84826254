"""Command-line interface: root tables, predicates, and verification suites.

Subcommands:
  roots   -- indicial-root catalog for a chosen cross-section (JSON/CSV)
  gap     -- spectral gap and gluing weight window
  ks      -- vanishing predicate for subexponential cokernel 2-tensors
  lens    -- scalar multiplicities on cyclic spherical space forms
  verify  -- identity / linearization / oracle suites

Exit codes: 0 success, 1 verification failure, 2 bad arguments,
3 input-file errors.  Identical flags and seeds produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import curvature, fields, indicial, oracle, spectra

_SCHEMA = 1

# Case-4 rates follow the characteristic roots of the first-order mixed
# system; recorded in output metadata because printed normalizations of the
# imaginary part differ across sources.
_RATE_NOTE = (
    "case-4 rates are sqrt(mu - 2*kappa +/- 2*sqrt(kappa^2 - mu*kappa/3)); "
    "for kappa=+1 and mu=j(j+2) the imaginary part equals "
    "(2/3)*sqrt(3*(j-1)*(j+3))"
)


# ---------------------------------------------------------------------------
# Deterministic JSON
# ---------------------------------------------------------------------------


def _json(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        import json as _j

        return _j.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj) + 0.0  # normalize negative zero
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        if math.isnan(x):
            return '"nan"'
        s = f"{x:.17g}"
        if not any(c in s for c in ".eE"):
            s += ".0"  # keep doubles typed as doubles on the way back in
        return s
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(f"{_json(str(k))}:{_json(v)}" for k, v in obj.items()) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(doc, args) -> None:
    text = _json(doc) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Cross-section construction from flags
# ---------------------------------------------------------------------------


def _parse_triple(text: str, kind, flag: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"{flag} expects three comma-separated values")
    return tuple(kind(p) for p in parts)


def _cross_section(args) -> spectra.CrossSectionSpec:
    chosen = [bool(args.sphere or args.lens), args.torus is not None, args.hyperbolic is not None]
    if sum(chosen) != 1:
        raise SystemExit2("choose exactly one of --sphere/--lens, --torus, --hyperbolic")
    if args.torus is not None:
        lengths = _parse_triple(args.torus, float, "--torus")
        return spectra.CrossSectionSpec.torus(lengths)
    if args.hyperbolic is not None:
        hs = spectra.load_hyperbolic_spectrum(args.hyperbolic)
        return spectra.CrossSectionSpec.hyperbolic(hs, source=args.hyperbolic)
    group = spectra.GroupAction(1, 1, 1)
    if args.lens:
        p, q1, q2 = _parse_triple(args.lens, int, "--lens")
        group = spectra.GroupAction(p, q1, q2)
    kwargs = {}
    if args.killing_dim is not None:
        kwargs["killing_dim"] = args.killing_dim
    return spectra.CrossSectionSpec.sphere(group, **kwargs)


class SystemExit2(Exception):
    """Bad arguments (exit code 2)."""


def _geometry_doc(cs: spectra.CrossSectionSpec) -> dict:
    geo = cs.geometry
    if isinstance(geo, spectra.Sphere):
        return {
            "kind": "sphere",
            "kappa": 1,
            "group": {"p": geo.group.p, "q1": geo.group.q1, "q2": geo.group.q2},
        }
    if isinstance(geo, spectra.Torus):
        return {"kind": "torus", "kappa": 0, "lengths": list(geo.lengths)}
    return {
        "kind": "hyperbolic",
        "kappa": -1,
        "source": geo.source,
        "b1": geo.spectrum.b1,
        "dim_codazzi": geo.spectrum.dim_codazzi,
    }


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------


def _root_record(r: indicial.IndicialRoot) -> dict:
    return {
        "re": r.value.real,
        "im": r.value.imag,
        "case": int(r.case_tag),
        "origin_kind": r.origin_kind.value,
        "j": r.origin_j,
        "eigenvalue": r.origin_eigenvalue,
        "side": r.side.value,
        "solution_form": r.solution_form.value,
        "jordan": r.jordan,
        "conformal_killing": r.conformal_killing,
        "multiplicity": r.multiplicity,
    }


_CSV_FIELDS = (
    "re",
    "im",
    "case",
    "origin_kind",
    "j",
    "eigenvalue",
    "side",
    "solution_form",
    "jordan",
    "conformal_killing",
    "multiplicity",
)


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def cmd_roots(args) -> int:
    cs = _cross_section(args)
    catalog = indicial.assemble_catalog(cs, args.jmax)
    roots = list(catalog.roots)
    if args.window:
        lo, hi = _parse_pair(args.window, "--window")
        roots = [r for r in roots if lo < r.value.real < hi]
    records = [_root_record(r) for r in roots]
    if args.format == "csv":
        lines = [",".join(_CSV_FIELDS)]
        lines += [",".join(_csv_cell(rec[f]) for f in _CSV_FIELDS) for rec in records]
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    doc = {
        "schema": _SCHEMA,
        "command": "roots",
        "cross_section": _geometry_doc(cs),
        "j_max": catalog.j_max,
        "kernel_dim_at_zero": catalog.kernel_dim_at_zero,
        "cokernel_dim_at_zero": catalog.cokernel_dim_at_zero,
        "complete_below_re": catalog.complete_below_re,
        "caveats": list(catalog.caveats),
        "notes": [_RATE_NOTE],
        "roots": records,
    }
    _emit(doc, args)
    return 0


def _parse_pair(text, flag):
    parts = text.split(",")
    if len(parts) != 2:
        raise SystemExit2(f"{flag} expects two comma-separated numbers")
    return float(parts[0]), float(parts[1])


# ---------------------------------------------------------------------------
# gap / ks / lens
# ---------------------------------------------------------------------------


def cmd_gap(args) -> int:
    cs = _cross_section(args)
    catalog = indicial.assemble_catalog(cs, args.jmax)
    g = indicial.spectral_gap(catalog)
    doc = {
        "schema": _SCHEMA,
        "command": "gap",
        "cross_section": _geometry_doc(cs),
        "j_max": catalog.j_max,
        "gap": g.gap,
        "gap_above_conformal_killing": g.gap_above_exceptional,
    }
    if isinstance(cs.geometry, spectra.Sphere):
        doc["window"] = list(indicial.gluing_window(catalog))
        doc["caveats"] = list(catalog.caveats)
    _emit(doc, args)
    return 0


def cmd_ks(args) -> int:
    cs = _cross_section(args)
    if not isinstance(cs.geometry, spectra.Hyperbolic):
        raise SystemExit2("ks requires --hyperbolic FILE")
    vanishes, notes = indicial.h2plus_predicate(cs)
    hs = cs.geometry.spectrum
    doc = {
        "schema": _SCHEMA,
        "command": "ks",
        "cross_section": _geometry_doc(cs),
        "h2plus_vanishes": vanishes,
        "summary": "H2+ = 0" if vanishes else "H2+ nonzero",
        "b1": hs.b1,
        "dim_codazzi": hs.dim_codazzi,
        "cokernel_dim_at_zero": 1 + hs.b1 + 2 * hs.dim_codazzi,
        "notes": notes,
    }
    _emit(doc, args)
    return 0


def cmd_lens(args) -> int:
    if not args.lens:
        raise SystemExit2("lens requires --lens p,q1,q2")
    p, q1, q2 = _parse_triple(args.lens, int, "--lens")
    group = spectra.GroupAction(p, q1, q2)
    mults = [[j, spectra.lens_scalar_multiplicity(group, j)] for j in range(args.jmax + 1)]
    doc = {
        "schema": _SCHEMA,
        "command": "lens",
        "group": {"p": p, "q1": q1, "q2": q2},
        "j_max": args.jmax,
        "multiplicities": mults,
    }
    _emit(doc, args)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def run_identities(n: int = 8, seed: int = 7, tol: float = 1e-10):
    """Operator-identity suite on fixed-seed random fields; band limit is
    n/2 - 1 so all fields are resolvable on an n-point grid."""
    band = max(1, n // 2 - 1)
    results = fields.identity_suite(band=band, seed=seed, tol=tol)
    report = [
        {
            "identity_name": r.name,
            "ref": r.formula,
            "residual": r.residual,
            "tolerance": r.tolerance,
            "pass": r.ok,
        }
        for r in results
    ]
    return report, all(r.ok for r in results)


def run_linearization(n: int = 16, seed: int = 11, eps: float = 1e-4, tol: float = 1e-6):
    """Finite-difference battery with a step-halving convergence check on the
    first case.  The variation band limit shrinks on coarse grids so that the
    quadratic metric products stay below the Nyquist frequency."""
    shape = (n,) * 4
    battery = curvature.linearization_battery(seed=seed, band=2 if n >= 16 else 1)
    report = []
    ok = True
    for i, ht in enumerate(battery):
        if i == 0:
            errs = curvature.fd_linearization_errors(ht, [eps, eps / 2], shape=shape)
            ratio = errs[0]["relative_error"] / errs[1]["relative_error"]
            case_ok = errs[0]["relative_error"] <= tol and ratio >= 3.5
            report.append(
                {
                    "case": i,
                    "relative_error": errs[0]["relative_error"],
                    "halved_step_error": errs[1]["relative_error"],
                    "convergence_ratio": ratio,
                    "tolerance": tol,
                    "pass": case_ok,
                }
            )
        else:
            err = curvature.fd_linearization_errors(ht, [eps], shape=shape)[0]
            case_ok = err["relative_error"] <= tol
            report.append(
                {
                    "case": i,
                    "relative_error": err["relative_error"],
                    "tolerance": tol,
                    "pass": case_ok,
                }
            )
        ok = ok and case_ok
    return report, ok


def run_oracle(j_max: int = 10, tol: float = 1e-9):
    """Closed-form roots against companion/pencil eigenvalues."""
    report = []
    ok = True

    def add(name, matched, mismatch):
        nonlocal ok
        report.append(
            {"check": name, "pass": bool(matched), "max_mismatch": float(mismatch)}
        )
        ok = ok and matched

    worst = 0.0
    good = True
    for kappa in (-1, 0, 1):
        for mu in range(49):
            ap, am = indicial.alpha_pm(float(mu), kappa)
            expected = oracle.clustered_multiset([ap, -ap, am, -am])
            actual = oracle.clustered_multiset(
                oracle.companion_roots(oracle.matrixA_system(float(mu), kappa))
            )
            cmp = oracle.compare_root_sets(expected, actual, tol)
            good = good and cmp.matched
            worst = max(worst, cmp.max_mismatch)
    add("mixed_system_matrix_vs_closed_form", good, worst)

    worst, good = 0.0, True
    bounds = {1: 6, 0: 0, -1: 3}
    for kappa in (-1, 0, 1):
        for lam in range(bounds[kappa], 49):
            expected_pairs = indicial.type3_roots(float(lam), kappa)
            expected = []
            for v, jordan in expected_pairs:
                expected.append(v)
                if jordan:
                    expected.append(v)
            # At beta = 0 the two branch ODEs coincide; run one of them.
            signs = (+1,) if lam + 3 * kappa <= 1e-12 else (+1, -1)
            actual = []
            for sign in signs:
                actual.extend(oracle.companion_roots(oracle.ode_tt_branch(float(lam), kappa, sign)))
            cmp = oracle.compare_root_sets(
                oracle.clustered_multiset(expected), oracle.clustered_multiset(actual), tol
            )
            good = good and cmp.matched
            worst = max(worst, cmp.max_mismatch)
    add("tt_branch_ode_vs_closed_form", good, worst)

    worst, good = 0.0, True
    for kappa in (-1, 0, 1):
        for nu in range(49):
            expected = indicial.mixed_b_roots(float(nu), kappa)
            if len(expected) == 1:
                expected = expected * 2  # double root of m'' = (nu - 4 kappa) m
            actual = oracle.clustered_multiset(
                oracle.companion_roots(oracle.ode_mixed_b(float(nu), kappa))
            )
            cmp = oracle.compare_root_sets(oracle.clustered_multiset(expected), actual, tol)
            good = good and cmp.matched
            worst = max(worst, cmp.max_mismatch)
    add("coclosed_mixed_ode_vs_closed_form", good, worst)

    # Flat-torus pencil against the closed-form catalog values, mode by mode.
    worst, good = 0.0, True
    jordan_ok = True
    for k1 in range(0, 4):
        for k2 in range(0, k1 + 1):
            for k3 in range(0, k2 + 1):
                ksq = k1 * k1 + k2 * k2 + k3 * k3
                if ksq == 0 or ksq > 9:
                    continue
                clusters = oracle.pencil_roots(oracle.flat_mode_pencil((k1, k2, k3)))
                actual = [c.value for c in clusters]
                r = math.sqrt(float(ksq))
                cmp = oracle.compare_root_sets([r, -r], actual, 1e-8)
                good = good and cmp.matched
                worst = max(worst, cmp.max_mismatch)
                jordan_ok = jordan_ok and all(c.jordan for c in clusters)
    add("flat_pencil_vs_closed_form", good and jordan_ok, worst)

    clusters = oracle.pencil_roots(oracle.flat_mode_pencil((0, 0, 0)))
    zero_dim = sum(c.algebraic for c in clusters if abs(c.value) < 1e-6)
    add("flat_pencil_zero_mode_dimension_14", zero_dim == 14, float(abs(zero_dim - 14)))

    return report, ok


def cmd_verify(args) -> int:
    if args.suite in ("identities", "linearization") and (
        args.N & (args.N - 1) or not 2 <= args.N <= 32
    ):
        raise SystemExit2("--N must be a power of two <= 32")
    if args.suite == "identities":
        report, ok = run_identities(n=args.N, seed=args.seed)
    elif args.suite == "linearization":
        report, ok = run_linearization(n=args.N, seed=args.seed, eps=args.eps)
    else:
        report, ok = run_oracle(j_max=args.jmax)
    doc = {
        "schema": _SCHEMA,
        "command": "verify",
        "suite": args.suite,
        "seed": args.seed,
        "pass": ok,
        "results": report,
    }
    _emit(doc, args)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _add_geometry_flags(p):
    p.add_argument("--sphere", action="store_true", help="round 3-sphere cross-section")
    p.add_argument("--lens", metavar="p,q1,q2", help="cyclic quotient of the 3-sphere")
    p.add_argument("--torus", metavar="L1,L2,L3", help="flat torus side lengths")
    p.add_argument("--hyperbolic", metavar="FILE", help="hyperbolic spectrum file")
    p.add_argument("--killing-dim", type=int, default=None, help="Killing field dimension override")
    p.add_argument("--jmax", type=int, default=6, help="spectrum truncation index")
    p.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="indicyl",
        description="Indicial roots of the self-dual deformation complex on cylinders",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("roots", help="root catalog table")
    _add_geometry_flags(p)
    p.add_argument("--window", metavar="a,b", help="keep roots with a < Re < b")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("gap", help="spectral gap and gluing window")
    _add_geometry_flags(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("ks", help="vanishing of subexponential cokernel 2-tensors")
    _add_geometry_flags(p)
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("lens", help="scalar multiplicities on a cyclic quotient")
    p.add_argument("--lens", metavar="p,q1,q2", required=True)
    p.add_argument("--jmax", type=int, default=10)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_lens)

    p = sub.add_parser("verify", help="verification suites")
    p.add_argument("suite", choices=("identities", "linearization", "oracle"))
    p.add_argument("--N", type=int, default=8, help="grid size / band control")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--jmax", type=int, default=10)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit2 as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (FileNotFoundError, spectra.SpectrumError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
