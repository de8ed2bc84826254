"""Closed-form indicial roots and root catalogs for the cylinder operators.

The mixed-order operator pair (linearized anti-self-dual Weyl curvature,
twice the divergence) on R x Y^3 separates variables over the cross-section
spectra, and every indicial root comes from one of four scalar/small-matrix
ODE families:

* type 3 (divergence-free TT eigentensors, eigenvalue lam):
  roots +-beta +- sqrt(kappa) with beta = sqrt(lam + 3 kappa);
* type 2 (co-closed eigenform solutions with vanishing 1-form part,
  eigenvalue nu): roots +-sqrt(nu), constants only at nu = 0;
* mixed type (a) (scalar eigenvalue mu): roots +-alpha^{+-}(mu) with
  alpha^{+-}(mu) = sqrt(mu - 2 kappa +- 2 sqrt(kappa^2 - mu kappa / 3));
* mixed type (b) (co-closed eigenvalue nu): roots +-sqrt(nu - 4 kappa).

For kappa = +1 the scalar eigenvalues 0 and 3 and the co-closed eigenvalue 4
produce 1-forms dual to conformal Killing fields of the cylinder; their
surviving roots (0 and +-1) are tagged cases 0 and 1.  The constant scalar
mode behaves the same way for every kappa: only the root 0 with the
1-form dt survives.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum, IntEnum

from . import spectra
from .spectra import (
    CrossSectionSpec,
    Hyperbolic,
    OperatorKind,
    Sphere,
    SpectrumEntry,
    Torus,
    TT_LOWER_BOUND,
)

__all__ = [
    "CaseTag",
    "Side",
    "SolutionForm",
    "IndicialRoot",
    "RootCatalog",
    "SpectralGap",
    "type3_roots",
    "type2_roots",
    "mixed_a_roots",
    "mixed_b_roots",
    "alpha_pm",
    "apply_exclusions",
    "assemble_catalog",
    "spectral_gap",
    "h2plus_predicate",
    "gluing_window",
]

_ZERO_TOL = 1e-12


class CaseTag(IntEnum):
    CASE0 = 0  # root 0, 1-form dual to a conformal Killing field
    CASE1 = 1  # roots +-1 on the full sphere, conformal Killing growth
    CASE2 = 2  # TT eigentensor solutions, vanishing 1-form part
    CASE3 = 3  # co-closed eigenform solutions, vanishing 1-form part
    CASE4 = 4  # mixed solutions driven by a scalar eigenfunction
    CASE5 = 5  # mixed solutions driven by a co-closed eigenform


class Side(str, Enum):
    KERNEL = "kernel"
    COKERNEL = "cokernel"
    BOTH = "both"


class SolutionForm(str, Enum):
    Z_ONLY = "z_only"
    OMEGA_ONLY = "omega_only"
    MIXED = "mixed"


_FORM_FOR_CASE = {
    CaseTag.CASE0: SolutionForm.OMEGA_ONLY,
    CaseTag.CASE1: SolutionForm.OMEGA_ONLY,
    CaseTag.CASE2: SolutionForm.Z_ONLY,
    CaseTag.CASE3: SolutionForm.Z_ONLY,
    CaseTag.CASE4: SolutionForm.MIXED,
    CaseTag.CASE5: SolutionForm.MIXED,
}


@dataclass(frozen=True)
class IndicialRoot:
    value: complex
    case_tag: CaseTag
    origin_kind: OperatorKind
    origin_j: int
    origin_eigenvalue: float
    side: Side = Side.BOTH
    solution_form: SolutionForm = SolutionForm.MIXED
    jordan: bool = False
    conformal_killing: bool = False
    multiplicity: int = 1

    def __post_init__(self):
        if self.case_tag in (CaseTag.CASE0, CaseTag.CASE1) and not self.conformal_killing:
            raise ValueError("case 0/1 roots must be conformal Killing")
        if self.solution_form is not _FORM_FOR_CASE[self.case_tag]:
            raise ValueError(
                f"case {int(self.case_tag)} root cannot have solution form "
                f"{self.solution_form.value}"
            )


@dataclass(frozen=True)
class RootCatalog:
    cross_section: CrossSectionSpec
    roots: tuple[IndicialRoot, ...]
    j_max: int
    kernel_dim_at_zero: int
    cokernel_dim_at_zero: int
    complete_below_re: float
    caveats: tuple[str, ...] = ()

    def values(self) -> list[complex]:
        return sorted({r.value for r in self.roots}, key=lambda z: (z.real, z.imag))


@dataclass(frozen=True)
class SpectralGap:
    gap: float
    gap_above_exceptional: float


# ---------------------------------------------------------------------------
# Closed-form root families
# ---------------------------------------------------------------------------


def _csqrt(z: complex) -> complex:
    """Principal complex square root (nonnegative real part), with tiny
    parasitic components snapped to the axes."""
    r = cmath.sqrt(z)
    if r.real < 0 or (r.real == 0 and r.imag < 0):
        r = -r
    if abs(r.real) < _ZERO_TOL * max(1.0, abs(r)):
        r = complex(0.0, r.imag)
    if abs(r.imag) < _ZERO_TOL * max(1.0, abs(r)):
        r = complex(r.real, 0.0)
    return r


def type3_roots(lam: float, kappa: int) -> list[tuple[complex, bool]]:
    """Characteristic roots (value, jordan) for a TT eigentensor of eigenvalue
    lam: the two sign-branch ODEs have roots +-beta +- sqrt(kappa) with
    beta = sqrt(lam + 3 kappa).

    kappa=+1 gives {+-(beta+1), +-(beta-1)}; kappa=-1 gives {+-beta +- i}
    (the purely imaginary pair {+-i} at lam=3); kappa=0 gives double roots
    +-sqrt(lam) carrying genuine t-terms.
    """
    bound = TT_LOWER_BOUND[kappa]
    if lam < bound - _ZERO_TOL:
        raise ValueError(
            f"TT eigenvalue {lam} below the lower bound {bound} for kappa={kappa}"
        )
    beta = math.sqrt(max(lam + 3 * kappa, 0.0))
    if kappa == 1:
        vals = {beta + 1, beta - 1, -beta + 1, -beta - 1}
        return [(complex(v), False) for v in sorted(vals)]
    if kappa == -1:
        vals = {
            complex(beta, 1),
            complex(beta, -1),
            complex(-beta, 1),
            complex(-beta, -1),
        }
        return [(v, False) for v in sorted(vals, key=lambda z: (z.real, z.imag))]
    # kappa == 0: each branch ODE is (d/dt -+ beta)^2, a genuine double root.
    if beta <= _ZERO_TOL:
        return [(complex(0.0), True)]
    return [(complex(-beta), True), (complex(beta), True)]


def type2_roots(nu: float, kappa: int) -> list[complex]:
    """Roots +-sqrt(nu) of f'' = nu f for co-closed eigenform solutions with
    vanishing 1-form part; nu = 0 admits constants only (harmonic 1-forms)."""
    if nu < -_ZERO_TOL:
        raise ValueError(f"co-closed Hodge eigenvalue must be >= 0, got {nu}")
    if nu <= _ZERO_TOL:
        return [complex(0.0)]
    r = math.sqrt(nu)
    return [complex(-r), complex(r)]


def alpha_pm(mu: float, kappa: int) -> tuple[complex, complex]:
    """The two branch rates alpha^{+-}(mu) of the scalar-driven mixed system."""
    disc = _csqrt(complex(kappa * kappa - mu * kappa / 3.0))
    ap = _csqrt(complex(mu - 2 * kappa) + 2 * disc)
    am = _csqrt(complex(mu - 2 * kappa) - 2 * disc)
    return ap, am


def mixed_a_roots(mu: float, kappa: int) -> list[tuple[complex, bool]]:
    """Roots +-alpha^{+-}(mu) of the scalar-driven mixed 4x4 system.

    At kappa=0 both branches coincide at sqrt(mu); the coincidence is a
    genuine repeated characteristic root (t-terms occur), so those roots
    carry the Jordan flag.  Coincidences at kappa=+-1 (only mu=3, kappa=1)
    do not produce t-term solutions and are reported plain.
    """
    if mu < -_ZERO_TOL:
        raise ValueError(f"scalar Hodge eigenvalue must be >= 0, got {mu}")
    ap, am = alpha_pm(mu, kappa)
    if kappa == 0:
        if abs(ap) <= _ZERO_TOL:
            return [(complex(0.0), True)]
        return [(-ap, True), (ap, True)]
    vals: list[complex] = []
    for a in (ap, am):
        for v in (a, -a):
            if not any(abs(v - w) <= _ZERO_TOL * max(1.0, abs(v)) for w in vals):
                vals.append(v)
    return [(v, False) for v in sorted(vals, key=lambda z: (z.real, z.imag))]


def mixed_b_roots(nu: float, kappa: int) -> list[complex]:
    """Roots +-sqrt(nu - 4 kappa) of the co-closed-driven mixed equation
    (principal branch; purely imaginary when nu < 4 kappa)."""
    if nu < -_ZERO_TOL:
        raise ValueError(f"co-closed Hodge eigenvalue must be >= 0, got {nu}")
    r = _csqrt(complex(nu - 4 * kappa))
    if abs(r) <= _ZERO_TOL:
        return [complex(0.0)]
    return sorted([-r, r], key=lambda z: (z.real, z.imag))


# ---------------------------------------------------------------------------
# Conformal Killing exclusions
# ---------------------------------------------------------------------------


def apply_exclusions(
    kappa: int,
    kind: OperatorKind,
    eigenvalue: float,
    j: int,
    roots: list[tuple[complex, bool]],
    multiplicity: int,
) -> list[IndicialRoot]:
    """Convert raw mixed-family roots into tagged catalog entries.

    Degenerate eigenvalues whose 1-forms are dual to conformal Killing fields
    of the cylinder are collapsed to their surviving roots:

    * scalar eigenvalue 0 (constants, every kappa): only the root 0 with the
      1-form dt remains; the other formal characteristic roots of the
      degenerate system carry no eigenfunction;
    * scalar eigenvalue 3 at kappa=+1: roots +-1, case 1;
    * co-closed eigenvalue 4 at kappa=+1 and eigenvalue 0 at kappa=0
      (Killing/parallel forms): root 0, case 0.
    """
    if kind is OperatorKind.SCALAR_HODGE:
        if abs(eigenvalue) <= _ZERO_TOL:
            return [
                _root(0.0, CaseTag.CASE0, kind, j, eigenvalue, ck=True, mult=multiplicity)
            ]
        if kappa == 1 and abs(eigenvalue - 3.0) <= _ZERO_TOL:
            return [
                _root(s, CaseTag.CASE1, kind, j, eigenvalue, ck=True, mult=multiplicity)
                for s in (-1.0, 1.0)
            ]
        return [
            _root(v, CaseTag.CASE4, kind, j, eigenvalue, jordan=jd, mult=multiplicity)
            for v, jd in roots
        ]
    if kind is OperatorKind.COCLOSED_ONEFORM_HODGE:
        if (kappa == 1 and abs(eigenvalue - 4.0) <= _ZERO_TOL) or (
            kappa == 0 and abs(eigenvalue) <= _ZERO_TOL
        ):
            return [
                _root(0.0, CaseTag.CASE0, kind, j, eigenvalue, ck=True, mult=multiplicity)
            ]
        return [
            _root(v, CaseTag.CASE5, kind, j, eigenvalue, jordan=jd, mult=multiplicity)
            for v, jd in roots
        ]
    raise ValueError(f"mixed-family exclusions apply to scalar/oneform origins, not {kind}")


def _root(value, case, kind, j, eigenvalue, *, jordan=False, ck=False, mult=1) -> IndicialRoot:
    value = complex(value)
    return IndicialRoot(
        value=complex(value.real + 0.0, value.imag + 0.0),  # drop negative zeros
        case_tag=case,
        origin_kind=kind,
        origin_j=j,
        origin_eigenvalue=float(eigenvalue),
        side=Side.BOTH,
        solution_form=_FORM_FOR_CASE[case],
        jordan=jordan,
        conformal_killing=ck,
        multiplicity=mult,
    )


# ---------------------------------------------------------------------------
# Catalog assembly
# ---------------------------------------------------------------------------


def _sphere_entries(geo: Sphere, j_max: int) -> tuple[list[SpectrumEntry], list[str]]:
    caveats: list[str] = []
    entries: list[SpectrumEntry] = []
    g = geo.group
    for j in range(0, j_max + 1):
        mult = spectra.lens_scalar_multiplicity(g, j)
        if mult > 0:
            entries.append(SpectrumEntry(OperatorKind.SCALAR_HODGE, j, float(j * (j + 2)), mult))
    for j in range(1, j_max + 1):
        if j == 1:
            # Killing fields of the quotient.
            if geo.killing_dim is not None:
                mult = geo.killing_dim
            else:
                mult = 6
                if not g.trivial:
                    caveats.append(
                        "killing_dim not supplied for nontrivial group; defaulting to 6"
                    )
        elif g.trivial:
            mult = spectra.sphere_coclosed_oneform_multiplicity(j)
        elif geo.oneform_descent is not None:
            mult = geo.oneform_descent.get(j, 0)
        else:
            mult = spectra.sphere_coclosed_oneform_multiplicity(j)
            caveats.append("oneform descent multiplicities unknown; using full-sphere values")
        if mult > 0:
            entries.append(
                SpectrumEntry(OperatorKind.COCLOSED_ONEFORM_HODGE, j, float((j + 1) ** 2), mult)
            )
    for j in range(2, j_max + 1):
        if g.trivial:
            mult = spectra.sphere_tt_multiplicity(j)
        elif geo.tt_descent is not None:
            mult = geo.tt_descent.get(j, 0)
        else:
            mult = spectra.sphere_tt_multiplicity(j)
            caveats.append("tt descent multiplicities unknown; using full-sphere values")
        if mult > 0:
            entries.append(
                SpectrumEntry(OperatorKind.DIVFREE_TT_ROUGH, j, float(j * j + 2 * j - 2), mult)
            )
    return entries, sorted(set(caveats))


def _torus_entries(geo: Torus, max_index: int) -> list[SpectrumEntry]:
    """Spectrum entries with index j <= max_index for every operator kind."""
    entries: list[SpectrumEntry] = []
    for kind in OperatorKind:
        cutoff = 1.0
        while True:
            got = spectra.torus_spectrum(geo.lengths, kind, cutoff)
            if len(got) > max_index:
                entries.extend(e for e in got if e.j <= max_index)
                break
            cutoff *= 2
    return entries


def _family_roots(entry: SpectrumEntry, kappa: int) -> list[IndicialRoot]:
    """All catalog entries produced by one spectrum entry."""
    kind, j, ev, mult = entry.kind, entry.j, entry.eigenvalue, entry.multiplicity
    if kind is OperatorKind.DIVFREE_TT_ROUGH:
        if kappa == 0 and abs(ev) <= _ZERO_TOL:
            # Parallel TT tensors: constant and t-linear solutions at 0.
            return [_root(0.0, CaseTag.CASE2, kind, j, ev, jordan=True, mult=mult)]
        return [
            _root(v, CaseTag.CASE2, kind, j, ev, jordan=jd, mult=mult)
            for v, jd in type3_roots(ev, kappa)
        ]
    if kind is OperatorKind.SCALAR_HODGE:
        return apply_exclusions(kappa, kind, ev, j, mixed_a_roots(ev, kappa), mult)
    # Co-closed 1-forms: conformal Killing degenerations first, otherwise the
    # vanishing-1-form family (type 2) plus the mixed family (type b).
    if (kappa == 1 and abs(ev - 4.0) <= _ZERO_TOL) or (kappa == 0 and abs(ev) <= _ZERO_TOL):
        return apply_exclusions(kappa, kind, ev, j, [], mult)
    out = [_root(v, CaseTag.CASE3, kind, j, ev, mult=mult) for v in type2_roots(ev, kappa)]
    out.extend(_root(v, CaseTag.CASE5, kind, j, ev, mult=mult) for v in mixed_b_roots(ev, kappa))
    return out


def _dedupe(roots: list[IndicialRoot]) -> list[IndicialRoot]:
    """Merge duplicate (value, case, origin) entries, summing multiplicities."""
    merged: list[IndicialRoot] = []
    for r in roots:
        for i, existing in enumerate(merged):
            if (
                abs(r.value - existing.value) < 1e-9 * max(1.0, abs(r.value))
                and r.case_tag == existing.case_tag
                and r.origin_kind == existing.origin_kind
                and r.origin_j == existing.origin_j
            ):
                merged[i] = replace(existing, multiplicity=existing.multiplicity + r.multiplicity)
                break
        else:
            merged.append(r)
    return sorted(
        merged,
        key=lambda r: (
            r.value.real,
            r.value.imag,
            int(r.case_tag),
            r.origin_kind.value,
            r.origin_j,
        ),
    )


def _dim_at_zero(roots: list[IndicialRoot]) -> int:
    dim = 0
    for r in roots:
        if abs(r.value.real) <= _ZERO_TOL:
            dim += r.multiplicity * (2 if r.jordan else 1)
    return dim


def assemble_catalog(cs: CrossSectionSpec, j_max: int) -> RootCatalog:
    """Full indicial-root catalog for one cross-section, truncated at j_max.

    The kernel and cokernel sides carry the same complex root set, so roots
    are tagged `both`; the kernel/cokernel dimensions at real part 0 are
    computed from the multiplicities, with Jordan roots counting twice for
    their t-linear solutions.
    """
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")
    caveats: list[str] = []
    geo = cs.geometry
    kappa = cs.kappa
    roots: list[IndicialRoot] = []

    if isinstance(geo, Sphere):
        entries, caveats = _sphere_entries(geo, j_max)
        omitted = [
            SpectrumEntry(OperatorKind.SCALAR_HODGE, j_max + 1, float((j_max + 1) * (j_max + 3)), 1),
            SpectrumEntry(
                OperatorKind.COCLOSED_ONEFORM_HODGE, j_max + 1, float((j_max + 2) ** 2), 1
            ),
        ]
        jtt = max(j_max + 1, 2)
        omitted.append(
            SpectrumEntry(OperatorKind.DIVFREE_TT_ROUGH, jtt, float(jtt * jtt + 2 * jtt - 2), 1)
        )
    elif isinstance(geo, Torus):
        all_entries = _torus_entries(geo, j_max + 1)
        entries = [e for e in all_entries if e.j <= j_max]
        omitted = [e for e in all_entries if e.j == j_max + 1]
    else:
        hspec = geo.spectrum
        entries = [e for e in hspec.entries if e.j <= j_max]
        # The constant scalar mode and the harmonic 1-forms are always
        # present even when the file lists only positive eigenvalues.
        if not any(
            e.kind is OperatorKind.SCALAR_HODGE and abs(e.eigenvalue) <= _ZERO_TOL
            for e in entries
        ):
            roots.append(
                _root(0.0, CaseTag.CASE0, OperatorKind.SCALAR_HODGE, 0, 0.0, ck=True, mult=1)
            )
        if hspec.b1 > 0 and not any(
            e.kind is OperatorKind.COCLOSED_ONEFORM_HODGE and abs(e.eigenvalue) <= _ZERO_TOL
            for e in entries
        ):
            roots.extend(
                _family_roots(
                    SpectrumEntry(OperatorKind.COCLOSED_ONEFORM_HODGE, 0, 0.0, hspec.b1), kappa
                )
            )
        last = {
            kind: max((e.eigenvalue for e in hspec.entries if e.kind is kind), default=0.0)
            for kind in OperatorKind
        }
        omitted = [SpectrumEntry(kind, 0, ev, 1) for kind, ev in last.items() if ev > _ZERO_TOL]
        caveats = ["spectrum truncation taken from the supplied file"]

    for entry in entries:
        roots.extend(_family_roots(entry, kappa))
    roots = _dedupe(roots)

    dim0 = _dim_at_zero(roots)
    omitted_res = [
        abs(v.real)
        for e in omitted
        for v in _omitted_root_values(e, kappa)
        if abs(v.real) > _ZERO_TOL
    ]
    complete_below = min(omitted_res) if omitted_res else math.inf

    return RootCatalog(
        cross_section=cs,
        roots=tuple(roots),
        j_max=j_max,
        kernel_dim_at_zero=dim0,
        cokernel_dim_at_zero=dim0,
        complete_below_re=complete_below,
        caveats=tuple(caveats),
    )


def _omitted_root_values(entry: SpectrumEntry, kappa: int) -> list[complex]:
    ev = entry.eigenvalue
    if entry.kind is OperatorKind.DIVFREE_TT_ROUGH:
        if ev < TT_LOWER_BOUND[kappa]:
            return []
        return [v for v, _ in type3_roots(ev, kappa)]
    if entry.kind is OperatorKind.SCALAR_HODGE:
        return list(alpha_pm(ev, kappa))
    return type2_roots(ev, kappa) + mixed_b_roots(ev, kappa)


# ---------------------------------------------------------------------------
# Derived predicates
# ---------------------------------------------------------------------------


def spectral_gap(catalog: RootCatalog) -> SpectralGap:
    """Smallest nonzero |Re| over all roots, and over the roots that are not
    conformal Killing (the gap above the exceptional set {0, +-1})."""
    if not catalog.roots:
        raise ValueError("catalog has no roots")
    nonzero = [abs(r.value.real) for r in catalog.roots if abs(r.value.real) > _ZERO_TOL]
    plain = [
        abs(r.value.real)
        for r in catalog.roots
        if abs(r.value.real) > _ZERO_TOL and not r.conformal_killing
    ]
    if not nonzero:
        raise ValueError("catalog contains no roots with nonzero real part")
    return SpectralGap(gap=min(nonzero), gap_above_exceptional=min(plain) if plain else math.inf)


def h2plus_predicate(cs: CrossSectionSpec) -> tuple[bool, list[str]]:
    """Whether the space of subexponential trace-free cokernel 2-tensors on
    the cylinder vanishes: true exactly when the cross-section admits no
    nontrivial traceless Codazzi tensor field."""
    if not isinstance(cs.geometry, Hyperbolic):
        raise ValueError("the vanishing predicate applies to hyperbolic cross-sections")
    hspec = cs.geometry.spectrum
    notes = []
    if hspec.b1 > 0:
        notes.append("b1 > 0: not a rational homology sphere")
    return hspec.dim_codazzi == 0, notes


def gluing_window(catalog: RootCatalog) -> tuple[float, float]:
    """Exponential weight window (0, g) on which the middle cylinder operator
    is an isomorphism: g is the infimum of |Re| over roots that are not dual
    to conformal Killing fields, and equals 2 for spherical cross-sections."""
    if not catalog.roots:
        raise ValueError("catalog has no roots")
    if not isinstance(catalog.cross_section.geometry, Sphere):
        raise ValueError("the gluing window is stated for spherical cross-sections")
    candidates = [
        abs(r.value.real)
        for r in catalog.roots
        if not r.conformal_killing and abs(r.value.real) > _ZERO_TOL
    ]
    if not candidates:
        raise ValueError("no non-degenerate roots present; increase j_max")
    g = min(candidates)
    if abs(g - 2.0) > 1e-9:
        raise AssertionError(f"spherical gluing window should be (0, 2), computed bound {g}")
    return (0.0, g)
