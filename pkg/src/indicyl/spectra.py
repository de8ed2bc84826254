"""Eigenvalue catalogs for the three constant-curvature cross-section geometries.

Provides closed-form spectra for the round 3-sphere, dual-lattice enumeration
for flat tori, invariant-subspace counting for cyclic spherical space forms,
and a validating loader for externally supplied hyperbolic spectra.

Eigenvalue conventions: scalar and co-closed 1-form eigenvalues are those of
the Hodge Laplacian (nonnegative); transverse-traceless 2-tensor eigenvalues
are those of -1 times the rough Laplacian on divergence-free trace-free
symmetric 2-tensors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np

__all__ = [
    "OperatorKind",
    "SpectrumEntry",
    "GroupAction",
    "Sphere",
    "Torus",
    "Hyperbolic",
    "HyperbolicSpectrum",
    "CrossSectionSpec",
    "SpectrumError",
    "sphere_scalar_eigenvalue",
    "sphere_coclosed_oneform_eigenvalue",
    "sphere_tt_eigenvalue",
    "sphere_scalar_multiplicity",
    "sphere_coclosed_oneform_multiplicity",
    "sphere_tt_multiplicity",
    "torus_spectrum",
    "lens_scalar_multiplicity",
    "load_hyperbolic_spectrum",
]

# Lower bounds for TT eigenvalues on divergence-free trace-free tensors,
# by curvature sign.
TT_LOWER_BOUND = {1: 6.0, 0: 0.0, -1: 3.0}

# Codazzi / parallel borderline eigenvalue tolerance.
_EIG_TOL = 1e-12


class SpectrumError(ValueError):
    """Raised for invalid spectral data (bad bounds, inconsistent files)."""


class OperatorKind(str, Enum):
    SCALAR_HODGE = "scalar"
    COCLOSED_ONEFORM_HODGE = "oneform"
    DIVFREE_TT_ROUGH = "tt"


@dataclass(frozen=True)
class SpectrumEntry:
    kind: OperatorKind
    j: int
    eigenvalue: float
    multiplicity: int


# ---------------------------------------------------------------------------
# Cross-section descriptions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupAction:
    """Cyclic subgroup of SO(4) of order p generated by simultaneous rotation
    by angles 2*pi*q1/p and 2*pi*q2/p in two orthogonal planes of R^4.

    The coprimality conditions make the action on the unit 3-sphere free.
    """

    p: int
    q1: int
    q2: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"group order must be >= 1, got {self.p}")
        if self.p > 1:
            for q in (self.q1, self.q2):
                if math.gcd(q, self.p) != 1:
                    raise ValueError(
                        f"rotation parameter {q} not coprime to order {self.p}; "
                        "action would not be free"
                    )

    @property
    def trivial(self) -> bool:
        return self.p == 1


@dataclass(frozen=True)
class Sphere:
    """Round S^3 or a cyclic quotient S^3/Gamma of curvature +1.

    killing_dim is the dimension of the Killing fields of the quotient; it is
    6 for the full sphere and must be supplied by the user for quotients
    (defaults to 6 with a caveat recorded in assembled catalogs).
    oneform_descent / tt_descent optionally give the multiplicities of the
    eigenforms/eigentensors that descend to the quotient, keyed by j.
    """

    group: GroupAction = GroupAction(1, 1, 1)
    killing_dim: int | None = None
    oneform_descent: dict[int, int] | None = None
    tt_descent: dict[int, int] | None = None


@dataclass(frozen=True)
class Torus:
    """Flat torus R^3 / (L1 Z x L2 Z x L3 Z)."""

    lengths: tuple[float, float, float] = (2 * math.pi, 2 * math.pi, 2 * math.pi)

    def __post_init__(self):
        if len(self.lengths) != 3 or any(L <= 0 for L in self.lengths):
            raise ValueError(f"lattice side lengths must be positive, got {self.lengths}")


@dataclass(frozen=True)
class HyperbolicSpectrum:
    entries: tuple[SpectrumEntry, ...]
    b1: int
    dim_codazzi: int


@dataclass(frozen=True)
class Hyperbolic:
    """Compact hyperbolic cross-section with externally supplied spectrum."""

    spectrum: HyperbolicSpectrum
    source: str = "<memory>"


@dataclass(frozen=True)
class CrossSectionSpec:
    """Curvature sign plus the spectral data source for one cross-section."""

    kappa: int
    geometry: Sphere | Torus | Hyperbolic

    _EXPECTED = {Sphere: 1, Torus: 0, Hyperbolic: -1}

    def __post_init__(self):
        expected = self._EXPECTED[type(self.geometry)]
        if self.kappa != expected:
            raise ValueError(
                f"kappa={self.kappa} inconsistent with {type(self.geometry).__name__} "
                f"(expected {expected})"
            )

    @classmethod
    def sphere(cls, group: GroupAction | None = None, **kwargs) -> "CrossSectionSpec":
        return cls(1, Sphere(group=group or GroupAction(1, 1, 1), **kwargs))

    @classmethod
    def torus(cls, lengths=(2 * math.pi,) * 3) -> "CrossSectionSpec":
        return cls(0, Torus(tuple(float(L) for L in lengths)))

    @classmethod
    def hyperbolic(cls, spectrum: HyperbolicSpectrum, source="<memory>") -> "CrossSectionSpec":
        return cls(-1, Hyperbolic(spectrum, source))


# ---------------------------------------------------------------------------
# Round sphere closed forms
# ---------------------------------------------------------------------------


def sphere_scalar_eigenvalue(j: int) -> float:
    """Hodge eigenvalue j(j+2) of the degree-j scalar harmonics on round S^3."""
    if j < 0:
        raise ValueError(f"scalar harmonic index must be >= 0, got {j}")
    return float(j * (j + 2))


def sphere_scalar_multiplicity(j: int) -> int:
    if j < 0:
        raise ValueError(f"scalar harmonic index must be >= 0, got {j}")
    return (j + 1) ** 2


def sphere_coclosed_oneform_eigenvalue(j: int) -> float:
    """Hodge eigenvalue (j+1)^2 on co-closed 1-forms on round S^3, j >= 1."""
    if j < 1:
        raise ValueError(
            f"co-closed 1-form index must be >= 1 (S^3 has no harmonic 1-forms), got {j}"
        )
    return float((j + 1) ** 2)


def sphere_coclosed_oneform_multiplicity(j: int) -> int:
    if j < 1:
        raise ValueError(f"co-closed 1-form index must be >= 1, got {j}")
    return 2 * j * (j + 2)


def sphere_tt_eigenvalue(j: int) -> float:
    """Rough-Laplacian eigenvalue j^2 + 2j - 2 on TT tensors on round S^3, j >= 2."""
    if j < 2:
        raise ValueError(
            f"TT tensor index must be >= 2 (eigenvalues below 6 cannot occur), got {j}"
        )
    return float(j * j + 2 * j - 2)


def sphere_tt_multiplicity(j: int) -> int:
    if j < 2:
        raise ValueError(f"TT tensor index must be >= 2, got {j}")
    return 2 * (j - 1) * (j + 3)


# ---------------------------------------------------------------------------
# Flat torus spectrum
# ---------------------------------------------------------------------------

# Dimension of the parallel (eigenvalue 0) space by operator kind: constants,
# parallel 1-forms, parallel trace-free symmetric 2-tensors.
_PARALLEL_DIM = {
    OperatorKind.SCALAR_HODGE: 1,
    OperatorKind.COCLOSED_ONEFORM_HODGE: 3,
    OperatorKind.DIVFREE_TT_ROUGH: 5,
}

# Per nonzero dual-lattice vector: 1 scalar mode, 2 co-closed 1-form
# polarizations, 2 TT polarizations.
_MODES_PER_VECTOR = {
    OperatorKind.SCALAR_HODGE: 1,
    OperatorKind.COCLOSED_ONEFORM_HODGE: 2,
    OperatorKind.DIVFREE_TT_ROUGH: 2,
}


def torus_spectrum(
    lengths: tuple[float, float, float],
    kind: OperatorKind,
    cutoff: float,
) -> list[SpectrumEntry]:
    """Spectrum up to `cutoff` on the flat torus with the given side lengths.

    Eigenvalues are sum_i (2 pi k_i / L_i)^2 over integer vectors k.  The
    eigenvalue 0 carries the parallel modes (1 scalar, 3 one-forms, 5 TT
    tensors); every nonzero lattice vector contributes 1 scalar mode and 2
    transverse polarizations for 1-forms and TT tensors.
    """
    if cutoff <= 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    kind = OperatorKind(kind)
    L = [float(x) for x in lengths]
    kmax = [int(math.floor(Li * math.sqrt(cutoff) / (2 * math.pi))) for Li in L]
    counts: dict[float, int] = {}
    for k1 in range(-kmax[0], kmax[0] + 1):
        for k2 in range(-kmax[1], kmax[1] + 1):
            for k3 in range(-kmax[2], kmax[2] + 1):
                ev = sum((2 * math.pi * k / Li) ** 2 for k, Li in zip((k1, k2, k3), L))
                if ev > cutoff + _EIG_TOL:
                    continue
                for known in counts:
                    if abs(known - ev) <= 1e-9 * max(1.0, known):
                        counts[known] += 1
                        break
                else:
                    counts[ev] = 1
    entries = []
    for j, ev in enumerate(sorted(counts)):
        nvec = counts[ev]
        if ev <= _EIG_TOL:
            mult = _PARALLEL_DIM[kind]
        else:
            mult = _MODES_PER_VECTOR[kind] * nvec
        entries.append(SpectrumEntry(kind, j, ev, mult))
    return entries


# ---------------------------------------------------------------------------
# Lens space scalar multiplicities via explicit harmonic polynomials
# ---------------------------------------------------------------------------

Mono = tuple[int, int, int, int]


def _monomials(j: int) -> list[Mono]:
    out = []
    for a in range(j + 1):
        for b in range(j + 1 - a):
            for c in range(j + 1 - a - b):
                out.append((a, b, c, j - a - b - c))
    return out


def _laplace4(p: dict[Mono, Fraction]) -> dict[Mono, Fraction]:
    out: dict[Mono, Fraction] = {}
    for mono, coef in p.items():
        for i in range(4):
            e = mono[i]
            if e >= 2:
                m2 = list(mono)
                m2[i] = e - 2
                key = tuple(m2)
                out[key] = out.get(key, Fraction(0)) + coef * e * (e - 1)
    return {m: c for m, c in out.items() if c != 0}


def _r2_mul(p: dict[Mono, Fraction]) -> dict[Mono, Fraction]:
    out: dict[Mono, Fraction] = {}
    for mono, coef in p.items():
        for i in range(4):
            m2 = list(mono)
            m2[i] += 2
            key = tuple(m2)
            out[key] = out.get(key, Fraction(0)) + coef
    return out


def _harmonic_projection(p: dict[Mono, Fraction], j: int) -> dict[Mono, Fraction]:
    """Harmonic component of a degree-j polynomial on R^4.

    Uses h = sum_k a_k r^{2k} Lap^k p with a_0 = 1 and
    a_{k+1} = -a_k / (4 (k+1) (j-k)); this makes Lap h = 0 identically and
    fixes harmonic polynomials.
    """
    out: dict[Mono, Fraction] = {}
    a = Fraction(1)
    q = dict(p)
    k = 0
    while q:
        term = q
        for _ in range(k):
            term = _r2_mul(term)
        for mono, coef in term.items():
            out[mono] = out.get(mono, Fraction(0)) + a * coef
        q = _laplace4(q)
        if not q:
            break
        a = -a / (4 * (k + 1) * (j - k))
        k += 1
    return {m: c for m, c in out.items() if c != 0}


def _harmonic_basis(j: int) -> np.ndarray:
    """Exact basis of the degree-j harmonic polynomials on R^4.

    Returns a ((j+1)^2, n_monomials) float array whose rows are the harmonic
    projections of the monomials with exponent of x1 at most 1; these span
    the full harmonic space.
    """
    monos = _monomials(j)
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for m in monos:
        if m[0] <= 1:
            h = _harmonic_projection({m: Fraction(1)}, j)
            row = np.zeros(len(monos))
            for mono, coef in h.items():
                row[index[mono]] = float(coef)
            rows.append(row)
    basis = np.array(rows)
    expected = (j + 1) ** 2
    if np.linalg.matrix_rank(basis, tol=1e-9) != expected:
        # Degenerate fallback: project every monomial and keep a maximal
        # independent subset.
        rows = []
        for m in monos:
            h = _harmonic_projection({m: Fraction(1)}, j)
            row = np.zeros(len(monos))
            for mono, coef in h.items():
                row[index[mono]] = float(coef)
            rows.append(row)
        basis = np.array(rows)
        q, r, piv = _qr_pivot(basis.T)
        basis = basis[piv[:expected]]
    return basis


def _qr_pivot(a):
    from scipy.linalg import qr

    q, r, piv = qr(a, pivoting=True)
    return q, r, piv


def _rotation_substitution(j: int, theta1: float, theta2: float) -> np.ndarray:
    """Matrix of p(x) -> p(R x) on degree-j monomial coefficients, where R
    rotates the (x1,x2) plane by theta1 and the (x3,x4) plane by theta2."""
    monos = _monomials(j)
    index = {m: i for i, m in enumerate(monos)}
    c1, s1 = math.cos(theta1), math.sin(theta1)
    c2, s2 = math.cos(theta2), math.sin(theta2)

    # (c x1 + s x2)^a expanded as {(e1,e2): coef}
    def pair_powers(c, s, n):
        table = []
        for a in range(n + 1):
            terms = {}
            for i in range(a + 1):
                coef = math.comb(a, i) * c**i * s ** (a - i)
                if coef != 0.0:
                    terms[(i, a - i)] = coef
            table.append(terms)
        return table

    plus1 = pair_powers(c1, s1, j)    # image of x1: c1 x1 + s1 x2
    minus1 = pair_powers(c1, -s1, j)  # image of x2: -s1 x1 + c1 x2 (swapped roles)
    plus2 = pair_powers(c2, s2, j)
    minus2 = pair_powers(c2, -s2, j)

    A = np.zeros((len(monos), len(monos)))
    for col, (a, b, c, d) in enumerate(monos):
        # x1^a x2^b -> (c1 x1 + s1 x2)^a (c1 x2 - s1 x1)^b, similarly x3,x4
        part12: dict[tuple[int, int], float] = {}
        for (e1, e2), ca in plus1[a].items():
            for (f2, f1), cb in minus1[b].items():
                key = (e1 + f1, e2 + f2)
                part12[key] = part12.get(key, 0.0) + ca * cb
        part34: dict[tuple[int, int], float] = {}
        for (e3, e4), cc in plus2[c].items():
            for (f4, f3), cd in minus2[d].items():
                key = (e3 + f3, e4 + f4)
                part34[key] = part34.get(key, 0.0) + cc * cd
        for (e1, e2), c12 in part12.items():
            for (e3, e4), c34 in part34.items():
                A[index[(e1, e2, e3, e4)], col] += c12 * c34
    return A


def lens_averaging_projector(g: GroupAction, j: int) -> np.ndarray:
    """Group-averaging operator restricted to H_j, in the explicit harmonic basis.

    The operator is obtained by averaging the monomial substitution action of
    the p group elements and solving B^T M = avg B^T in the least-squares
    sense; rotations preserve H_j, so the residual must be negligible.
    """
    basis = _harmonic_basis(j)
    n = len(_monomials(j))
    avg = np.zeros((n, n))
    for m in range(g.p):
        th1 = 2 * math.pi * g.q1 * m / g.p
        th2 = 2 * math.pi * g.q2 * m / g.p
        avg += _rotation_substitution(j, th1, th2)
    avg /= g.p
    bt = basis.T
    target = avg @ bt
    M, *_ = np.linalg.lstsq(bt, target, rcond=None)
    resid = np.linalg.norm(bt @ M - target)
    if resid > 1e-8 * max(1.0, np.linalg.norm(target)):
        raise SpectrumError(
            f"group averaging did not preserve the harmonic space (residual {resid:.2e})"
        )
    return M


def lens_scalar_multiplicity(g: GroupAction, j: int) -> int:
    """Multiplicity of the scalar eigenvalue j(j+2) on the quotient S^3/Gamma.

    Computed as the trace of the group-averaging projector on the explicit
    (j+1)^2-dimensional space of degree-j harmonic polynomials on R^4, with
    the cyclic generator acting by linear substitution.
    """
    if j < 0:
        raise ValueError(f"scalar harmonic index must be >= 0, got {j}")
    if g.trivial:
        return (j + 1) ** 2
    if j == 0:
        return 1
    M = lens_averaging_projector(g, j)
    tr = float(np.trace(M))
    mult = round(tr)
    if abs(tr - mult) > 1e-6:
        raise SpectrumError(f"non-integral invariant dimension {tr} at j={j}")
    return mult


# ---------------------------------------------------------------------------
# Hyperbolic spectra from files
# ---------------------------------------------------------------------------


def load_hyperbolic_spectrum(path: str | Path) -> HyperbolicSpectrum:
    """Parse and validate a hyperbolic spectrum file.

    Line-oriented format: `b1 <n>`, `codazzi <n>` headers plus data lines
    `kind j eigenvalue multiplicity` with kind in {scalar, oneform, tt};
    `#` starts a comment.  TT eigenvalues must be >= 3, with the recorded
    Codazzi dimension equal to the multiplicity at eigenvalue exactly 3.
    """
    path = Path(path)
    b1: int | None = None
    codazzi: int | None = None
    raw: list[tuple[OperatorKind, int, float, int]] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "b1":
            b1 = int(parts[1])
            continue
        if parts[0] == "codazzi":
            codazzi = int(parts[1])
            continue
        if len(parts) != 4:
            raise SpectrumError(f"{path}:{lineno}: expected 'kind j eigenvalue mult', got {line!r}")
        try:
            kind = OperatorKind(parts[0])
        except ValueError:
            raise SpectrumError(f"{path}:{lineno}: unknown operator kind {parts[0]!r}") from None
        raw.append((kind, int(parts[1]), float(parts[2]), int(parts[3])))
    if b1 is None or codazzi is None:
        raise SpectrumError(f"{path}: missing 'b1' or 'codazzi' header")
    if b1 < 0 or codazzi < 0:
        raise SpectrumError(f"{path}: b1 and codazzi must be nonnegative")

    entries = []
    last_by_kind: dict[OperatorKind, float] = {}
    tt_mult_at_3 = 0
    for kind, j, ev, mult in raw:
        if mult < 0:
            raise SpectrumError(f"{path}: negative multiplicity in entry {kind.value} j={j}")
        if ev < -_EIG_TOL:
            raise SpectrumError(f"{path}: negative eigenvalue {ev} in {kind.value} entry j={j}")
        if kind is OperatorKind.DIVFREE_TT_ROUGH and ev < TT_LOWER_BOUND[-1] - _EIG_TOL:
            raise SpectrumError(
                f"{path}: TT eigenvalue {ev} at j={j} violates the lower bound 3 "
                "for hyperbolic cross-sections"
            )
        if kind in last_by_kind and ev <= last_by_kind[kind]:
            raise SpectrumError(
                f"{path}: eigenvalues must be strictly increasing within {kind.value}"
            )
        last_by_kind[kind] = ev
        if kind is OperatorKind.DIVFREE_TT_ROUGH and abs(ev - 3.0) <= _EIG_TOL:
            tt_mult_at_3 = mult
        if kind is OperatorKind.COCLOSED_ONEFORM_HODGE and abs(ev) <= _EIG_TOL and mult != b1:
            raise SpectrumError(
                f"{path}: harmonic 1-form multiplicity {mult} inconsistent with b1={b1}"
            )
        entries.append(SpectrumEntry(kind, j, ev, mult))
    if tt_mult_at_3 != codazzi:
        raise SpectrumError(
            f"{path}: codazzi={codazzi} inconsistent with TT multiplicity "
            f"{tt_mult_at_3} at eigenvalue 3"
        )
    return HyperbolicSpectrum(tuple(entries), b1, codazzi)
