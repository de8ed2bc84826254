"""Exact spectral tensor calculus on the flat 3-torus and on cylinders over it.

Fields are band-limited Fourier series: every spatial derivative is the exact
multiplication by i*xi on each mode, so all first-order identities between
the operators hold to rounding error.  Time dependence on the cylinder is
carried symbolically as sums of t^d * exp(lambda t) envelopes, with exact
t-differentiation.

The curvature sign is 0 throughout this module; curved cross-sections are
handled at the ODE level elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModeGrid",
    "FourierScalar",
    "FourierOneForm",
    "FourierSymTensor",
    "CylTensor",
    "CylOneForm",
    "grad",
    "div",
    "laplacian",
    "hodge_laplacian",
    "star_d",
    "lie",
    "conf_killing",
    "slash_d",
    "hessian",
    "traceless_hessian",
    "tf",
    "trace",
    "e_prime",
    "inner",
    "cyl_inner",
    "box_k_3d",
    "linearized_weyl",
    "adjoint_D",
    "cyl_killing",
    "cyl_div",
    "cyl_box_k",
    "f_forward",
    "f_star",
    "random_scalar",
    "random_oneform",
    "random_symtensor",
    "coclosed_projection",
    "identity_suite",
    "IdentityResult",
]

_EPSILON = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPSILON[_i, _j, _k] = 1.0
    _EPSILON[_i, _k, _j] = -1.0

_SYM_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


class ModeGrid:
    """Fourier mode box |k_i| <= band on a rectangular lattice."""

    def __init__(self, lengths=(2 * math.pi,) * 3, band: int = 3):
        if band < 1:
            raise ValueError("band limit must be >= 1")
        self.lengths = tuple(float(L) for L in lengths)
        if any(L <= 0 for L in self.lengths):
            raise ValueError(f"lattice side lengths must be positive, got {lengths}")
        self.band = band
        self.size = 2 * band + 1
        k = np.arange(-band, band + 1)
        axes = [2 * math.pi * k / L for L in self.lengths]
        self.xi = np.array(np.meshgrid(*axes, indexing="ij"))  # (3, M, M, M)
        self.xi_sq = np.einsum("i...,i...->...", self.xi, self.xi)

    def __eq__(self, other):
        return (
            isinstance(other, ModeGrid)
            and self.lengths == other.lengths
            and self.band == other.band
        )

    def __hash__(self):
        return hash((self.lengths, self.band))


class _Field:
    _comp_shape: tuple[int, ...] = ()

    def __init__(self, grid: ModeGrid, data):
        data = np.asarray(data, dtype=complex)
        want = self._comp_shape + (grid.size,) * 3
        if data.shape != want:
            raise ValueError(f"{type(self).__name__} data must have shape {want}, got {data.shape}")
        self.grid = grid
        self.data = data

    @classmethod
    def zero(cls, grid: ModeGrid):
        return cls(grid, np.zeros(cls._comp_shape + (grid.size,) * 3, dtype=complex))

    def copy(self):
        return type(self)(self.grid, self.data.copy())

    def __add__(self, other):
        self._check(other)
        return type(self)(self.grid, self.data + other.data)

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.grid, self.data - other.data)

    def __mul__(self, c):
        return type(self)(self.grid, self.data * c)

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(self.grid, -self.data)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def conjugate_flip(self):
        """c(k) -> conj(c(-k)); fixed points of this map are real fields."""
        return type(self)(self.grid, np.conj(self.data[..., ::-1, ::-1, ::-1]))

    def reality_symmetrize(self):
        return type(self)(self.grid, 0.5 * (self.data + self.conjugate_flip().data))

    def _check(self, other):
        if type(other) is not type(self) or other.grid != self.grid:
            raise ValueError("field mismatch")


class FourierScalar(_Field):
    _comp_shape = ()


class FourierOneForm(_Field):
    _comp_shape = (3,)


class FourierSymTensor(_Field):
    _comp_shape = (3, 3)

    def __init__(self, grid, data):
        super().__init__(grid, data)
        if np.max(np.abs(self.data - self.data.swapaxes(0, 1))) > 1e-12 * max(
            1.0, float(np.max(np.abs(self.data)))
        ):
            raise ValueError("symmetric tensor data is not symmetric")

    def six(self) -> np.ndarray:
        """The 6 independent components, order xx, yy, zz, xy, xz, yz."""
        return np.stack([self.data[i, j] for i, j in _SYM_PAIRS])

    @classmethod
    def from_six(cls, grid, six):
        data = np.zeros((3, 3) + (grid.size,) * 3, dtype=complex)
        for comp, (i, j) in zip(six, _SYM_PAIRS):
            data[i, j] = comp
            data[j, i] = comp
        return cls(grid, data)


# ---------------------------------------------------------------------------
# Cross-section operators (exact on modes)
# ---------------------------------------------------------------------------


def grad(u: FourierScalar) -> FourierOneForm:
    return FourierOneForm(u.grid, 1j * u.grid.xi * u.data[None])


def div(x):
    """Divergence: 1-forms to scalars, symmetric 2-tensors to 1-forms."""
    if isinstance(x, FourierOneForm):
        return FourierScalar(x.grid, 1j * np.einsum("i...,i...->...", x.grid.xi, x.data))
    if isinstance(x, FourierSymTensor):
        return FourierOneForm(x.grid, 1j * np.einsum("i...,ij...->j...", x.grid.xi, x.data))
    raise TypeError(f"no divergence for {type(x).__name__}")


def laplacian(x):
    """Rough Laplacian (sum of second derivatives, nonpositive spectrum)."""
    return type(x)(x.grid, -x.grid.xi_sq * x.data)


def hodge_laplacian(x):
    """Hodge Laplacian; on the flat torus it is minus the rough Laplacian."""
    return type(x)(x.grid, x.grid.xi_sq * x.data)


def star_d(omega: FourierOneForm) -> FourierOneForm:
    """(star d omega)_i = eps_{ijk} d_j omega_k, with eps_123 = +1."""
    return FourierOneForm(
        omega.grid,
        1j * np.einsum("ijk,j...,k...->i...", _EPSILON, omega.grid.xi, omega.data),
    )


def lie(omega: FourierOneForm) -> FourierSymTensor:
    """Symmetrized derivative d_i omega_j + d_j omega_i."""
    a = 1j * np.einsum("i...,j...->ij...", omega.grid.xi, omega.data)
    return FourierSymTensor(omega.grid, a + a.swapaxes(0, 1))


def conf_killing(omega: FourierOneForm) -> FourierSymTensor:
    """Trace-free part of the symmetrized derivative (3-dimensional weight 2/3)."""
    l = lie(omega)
    d = div(omega)
    out = l.data.copy()
    for i in range(3):
        out[i, i] -= (2.0 / 3.0) * d.data
    return FourierSymTensor(omega.grid, out)


def slash_d(h: FourierSymTensor) -> FourierSymTensor:
    """First-order operator Sym_ij(eps_{ikl} (d_k h_{lj} - d_l h_{kj}))."""
    a = 1j * np.einsum("ikl,k...,lj...->ij...", _EPSILON, h.grid.xi, h.data)
    return FourierSymTensor(h.grid, a + a.swapaxes(0, 1))


def hessian(u: FourierScalar) -> FourierSymTensor:
    return FourierSymTensor(u.grid, -np.einsum("i...,j...->ij...", u.grid.xi, u.grid.xi) * u.data)


def trace(h: FourierSymTensor) -> FourierScalar:
    return FourierScalar(h.grid, np.einsum("ii...->...", h.data))


def tf(h: FourierSymTensor) -> FourierSymTensor:
    out = h.data.copy()
    tr = np.einsum("ii...->...", h.data)
    for i in range(3):
        out[i, i] -= tr / 3.0
    return FourierSymTensor(h.grid, out)


def traceless_hessian(u: FourierScalar) -> FourierSymTensor:
    return tf(hessian(u))


def e_prime(h: FourierSymTensor) -> FourierSymTensor:
    """Linearized traceless Ricci tensor at the flat metric:
    -1/2 (Lap tf(h) + tf Hess tr(h)) + 1/2 K(div h)."""
    return (
        -0.5 * (laplacian(tf(h)) + traceless_hessian(trace(h)))
        + 0.5 * conf_killing(div(h))
    )


def inner(a, b) -> complex:
    """L^2 pairing via mode sums, full index contraction on tensors."""
    if type(a) is not type(b) or a.grid != b.grid:
        raise ValueError("field mismatch")
    return complex(np.sum(np.conj(a.data) * b.data))


def box_k_3d(eta: FourierOneForm) -> FourierOneForm:
    """Divergence of the conformal Killing operator on a cross-section
    1-form: (delta d + 4/3 d delta) eta at curvature 0."""
    xi = eta.grid.xi
    xs = np.einsum("i...,i...->...", xi, eta.data)
    data = -eta.grid.xi_sq * eta.data + xi * xs[None] - (4.0 / 3.0) * xi * xs[None]
    return FourierOneForm(eta.grid, data)


# ---------------------------------------------------------------------------
# Cylinder fields: sums of t^d exp(lambda t) envelopes
# ---------------------------------------------------------------------------


def _rate_key(rate: complex) -> tuple[float, float]:
    return (round(rate.real, 12), round(rate.imag, 12))


class _CylField:
    """Shared machinery for t-dependent field collections.

    Terms are keyed by (rate, degree) and hold a tuple of component fields;
    d/dt maps the (rate, d) term into (rate, d) and (rate, d-1) exactly.
    """

    _parts: tuple[str, ...] = ()

    def __init__(self, grid: ModeGrid):
        self.grid = grid
        self.terms: dict[tuple[tuple[float, float], int], dict] = {}

    @classmethod
    def from_parts(cls, grid, rate, degree, **fields):
        out = cls(grid)
        out.add_term(rate, degree, **fields)
        return out

    def add_term(self, rate, degree, **fields):
        rate = complex(rate)
        key = (_rate_key(rate), int(degree))
        slot = self.terms.get(key)
        if slot is None:
            slot = {"rate": rate}
            for name in self._parts:
                slot[name] = fields.get(name) or _PART_TYPES[name].zero(self.grid)
            self.terms[key] = slot
        else:
            for name in self._parts:
                f = fields.get(name)
                if f is not None:
                    slot[name] = slot[name] + f
        return self

    def t_derivative(self):
        out = type(self)(self.grid)
        for (rk, d), slot in self.terms.items():
            fields = {name: slot[name] * slot["rate"] for name in self._parts}
            out.add_term(slot["rate"], d, **fields)
            if d > 0:
                fields = {name: slot[name] * d for name in self._parts}
                out.add_term(slot["rate"], d - 1, **fields)
        return out

    def __add__(self, other):
        out = type(self)(self.grid)
        for obj in (self, other):
            for (rk, d), slot in obj.terms.items():
                out.add_term(slot["rate"], d, **{n: slot[n] for n in self._parts})
        return out

    def __sub__(self, other):
        return self + (other * (-1.0))

    def __mul__(self, c):
        out = type(self)(self.grid)
        for (rk, d), slot in self.terms.items():
            out.add_term(slot["rate"], d, **{n: slot[n] * c for n in self._parts})
        return out

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.sqrt(
            sum(
                sum(slot[n].norm() ** 2 for n in self._parts)
                for slot in self.terms.values()
            )
        )

    def part_norm(self, name: str) -> float:
        return math.sqrt(sum(slot[name].norm() ** 2 for slot in self.terms.values()))


_PART_TYPES = {
    "h00": FourierScalar,
    "alpha": FourierOneForm,
    "h": FourierSymTensor,
    "f": FourierScalar,
    "omega": FourierOneForm,
}


class CylTensor(_CylField):
    """Symmetric 2-tensor on the cylinder, split {h00, alpha, h}.

    Cross-section-valued tensors (values in the trace-free symmetric
    2-tensors of Y) are represented with vanishing h00 and alpha.
    """

    _parts = ("h00", "alpha", "h")

    def is_cross_section(self, tol=1e-10) -> bool:
        scale = max(self.norm(), 1.0)
        return (
            self.part_norm("h00") <= tol * scale
            and self.part_norm("alpha") <= tol * scale
        )

    def trace_defect(self) -> float:
        """Norm of h00 + tr_Y h (vanishes for 4-dimensionally trace-free fields)."""
        total = 0.0
        for slot in self.terms.values():
            total += (slot["h00"] + trace(slot["h"])).norm() ** 2
        return math.sqrt(total)


class CylOneForm(_CylField):
    """1-form f dt + omega on the cylinder."""

    _parts = ("f", "omega")


# ---------------------------------------------------------------------------
# Cylinder operators
# ---------------------------------------------------------------------------


def linearized_weyl(ht: CylTensor) -> CylTensor:
    """Linearized anti-self-dual Weyl curvature at the product metric,
    valued in the trace-free symmetric 2-tensors of the cross-section.

    Inputs with nonzero 4-trace are reduced by subtracting a multiple of the
    metric (pure-trace directions are annihilated by conformal invariance).
    """
    grid = ht.grid
    work = CylTensor(grid)
    for (rk, d), slot in ht.terms.items():
        v = (slot["h00"] + trace(slot["h"])) * 0.25
        h = slot["h"].copy()
        for i in range(3):
            h.data[i, i] -= v.data
        work.add_term(slot["rate"], d, h00=slot["h00"] - v, alpha=slot["alpha"], h=h)

    work_dot = work.t_derivative()
    theta = CylOneForm(grid)
    for (rk, d), slot in work.terms.items():
        theta.add_term(
            slot["rate"],
            d,
            omega=(
                -0.5 * grad(slot["h00"])
                - div(slot["h"])
                + 0.5 * grad(trace(slot["h"]))
                - star_d(slot["alpha"])
            ),
        )
    for (rk, d), slot in work_dot.terms.items():
        theta.add_term(slot["rate"], d, omega=slot["alpha"])

    h_ddot = work_dot.t_derivative()

    out = CylTensor(grid)
    for (rk, d), slot in theta.terms.items():
        out.add_term(slot["rate"], d, h=0.5 * conf_killing(slot["omega"]))
    for (rk, d), slot in h_ddot.terms.items():
        out.add_term(slot["rate"], d, h=-0.5 * tf(slot["h"]))
    for (rk, d), slot in work_dot.terms.items():
        out.add_term(slot["rate"], d, h=0.5 * slash_d(slot["h"]))
    for (rk, d), slot in work.terms.items():
        out.add_term(slot["rate"], d, h=0.5 * laplacian(tf(slot["h"])))
    return out


def adjoint_D(Z: CylTensor) -> CylTensor:
    """Formal adjoint of the linearized anti-self-dual Weyl curvature applied
    to a cross-section-valued trace-free tensor."""
    if not Z.is_cross_section():
        raise ValueError("adjoint input must have vanishing dt components")
    for slot in Z.terms.values():
        tr = trace(slot["h"])
        if tr.norm() > 1e-10 * max(1.0, slot["h"].norm()):
            raise ValueError("adjoint input must be trace-free on the cross-section")
    grid = Z.grid
    z_dot = Z.t_derivative()
    z_ddot = z_dot.t_derivative()
    out = CylTensor(grid)
    for key, slot in Z.terms.items():
        d = key[1]
        dz = div(slot["h"])
        ddz = div(dz)
        hpart = 0.5 * laplacian(slot["h"]) - 0.5 * lie(dz)
        for i in range(3):
            hpart.data[i, i] += 0.5 * ddz.data
        out.add_term(slot["rate"], d, h00=-0.5 * ddz, alpha=0.5 * star_d(dz), h=hpart)
    for key, slot in z_dot.terms.items():
        out.add_term(slot["rate"], key[1], alpha=0.5 * div(slot["h"]), h=-0.5 * slash_d(slot["h"]))
    for key, slot in z_ddot.terms.items():
        out.add_term(slot["rate"], key[1], h=-0.5 * slot["h"])
    return out


def cyl_killing(omt: CylOneForm) -> CylTensor:
    """Conformal Killing operator of the cylinder on f dt + omega."""
    grid = omt.grid
    om_dot = omt.t_derivative()
    out = CylTensor(grid)
    for key, slot in omt.terms.items():
        d = key[1]
        dw = div(slot["omega"])
        h = lie(slot["omega"])
        for i in range(3):
            h.data[i, i] -= 0.5 * dw.data
        out.add_term(
            slot["rate"], d, h00=-0.5 * dw, alpha=grad(slot["f"]), h=h
        )
    for key, slot in om_dot.terms.items():
        h = FourierSymTensor.zero(grid)
        for i in range(3):
            h.data[i, i] = -0.5 * slot["f"].data
        out.add_term(slot["rate"], key[1], h00=1.5 * slot["f"], alpha=slot["omega"], h=h)
    return out


def cyl_div(ht: CylTensor) -> CylOneForm:
    """Divergence of a cylinder 2-tensor: (h00' + div alpha) dt + alpha' + div h."""
    grid = ht.grid
    ht_dot = ht.t_derivative()
    out = CylOneForm(grid)
    for key, slot in ht.terms.items():
        out.add_term(slot["rate"], key[1], f=div(slot["alpha"]), omega=div(slot["h"]))
    for key, slot in ht_dot.terms.items():
        out.add_term(slot["rate"], key[1], f=slot["h00"], omega=slot["alpha"])
    return out


def cyl_box_k(omt: CylOneForm) -> CylOneForm:
    """Divergence of the cylinder conformal Killing operator, written out:
    (3/2 f'' + 1/2 div omega' + Lap f) dt
      + omega'' + Lap omega + 1/2 d(div omega) + 1/2 d f'."""
    grid = omt.grid
    d1 = omt.t_derivative()
    d2 = d1.t_derivative()
    out = CylOneForm(grid)
    for key, slot in omt.terms.items():
        out.add_term(
            slot["rate"],
            key[1],
            f=laplacian(slot["f"]),
            omega=laplacian(slot["omega"]) + 0.5 * grad(div(slot["omega"])),
        )
    for key, slot in d1.terms.items():
        out.add_term(slot["rate"], key[1], f=0.5 * div(slot["omega"]), omega=0.5 * grad(slot["f"]))
    for key, slot in d2.terms.items():
        out.add_term(slot["rate"], key[1], f=1.5 * slot["f"], omega=slot["omega"])
    return out


def f_forward(ht: CylTensor) -> tuple[CylTensor, CylOneForm]:
    """The wrapped deformation operator: (linearized curvature, 2 divergence)."""
    return linearized_weyl(ht), cyl_div(ht) * 2.0


def f_star(Z: CylTensor, omt: CylOneForm) -> CylTensor:
    """Adjoint pair: adjoint curvature of Z minus the conformal Killing
    operator of the 1-form."""
    return adjoint_D(Z) - cyl_killing(omt)


# ---------------------------------------------------------------------------
# Random fields and the operator-identity suite
# ---------------------------------------------------------------------------


def _random_coeffs(rng, grid, comp_shape):
    shape = comp_shape + (grid.size,) * 3
    data = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return data


def random_scalar(rng, grid) -> FourierScalar:
    return FourierScalar(grid, _random_coeffs(rng, grid, ())).reality_symmetrize()


def random_oneform(rng, grid) -> FourierOneForm:
    return FourierOneForm(grid, _random_coeffs(rng, grid, (3,))).reality_symmetrize()


def random_symtensor(rng, grid, traceless=False) -> FourierSymTensor:
    raw = _random_coeffs(rng, grid, (3, 3))
    raw = 0.5 * (raw + raw.swapaxes(0, 1))
    h = FourierSymTensor(grid, raw).reality_symmetrize()
    return tf(h) if traceless else h


def cyl_inner(a: _CylField, b: _CylField) -> complex:
    """Pairing of two t-periodic cylinder fields over one period.

    Buckets with equal (rate, degree) pair as conj(a) . b; for real fields
    built from conjugate rate pairs this equals the t- and Y-integral of the
    pointwise contraction up to one overall positive constant.  Cylinder
    2-tensors contract with the full 4-dimensional index sum, so the mixed
    dt block enters with weight 2.
    """
    if type(a) is not type(b) or a.grid != b.grid:
        raise ValueError("field mismatch")
    # Symmetric 2-tensors carry the dt-mixed block twice; 1-forms do not.
    weights = {"h00": 1.0, "alpha": 2.0, "h": 1.0, "f": 1.0, "omega": 1.0}
    total = 0.0 + 0.0j
    for key, slot in a.terms.items():
        other = b.terms.get(key)
        if other is None:
            continue
        for name in a._parts:
            total += weights[name] * np.sum(np.conj(slot[name].data) * other[name].data)
    return complex(total)


def add_real_mode(ht: CylTensor, kt: int, t_period: float = 2 * math.pi, **parts) -> CylTensor:
    """Add a real t-periodic envelope cos/sin combination: the term
    e^{i w t} X plus its conjugate reflection e^{-i w t} conj(X(-k)), with
    w = 2 pi kt / t_period.  For kt = 0 the fields are reality-symmetrized
    in place."""
    w = 2 * math.pi * kt / t_period
    if kt == 0:
        ht.add_term(0.0, 0, **{n: f.reality_symmetrize() for n, f in parts.items()})
        return ht
    ht.add_term(1j * w, 0, **parts)
    ht.add_term(-1j * w, 0, **{n: f.conjugate_flip() for n, f in parts.items()})
    return ht


def random_real_variation(
    rng, grid: ModeGrid, kt_modes=(0, 1), parts=("h00", "alpha", "h"), t_period: float = 2 * math.pi
) -> CylTensor:
    """Random real t-periodic cylinder 2-tensor supported on the given
    integer time frequencies, with the requested component blocks."""
    ht = CylTensor(grid)
    makers = {
        "h00": lambda: random_scalar(rng, grid),
        "alpha": lambda: random_oneform(rng, grid),
        "h": lambda: random_symtensor(rng, grid),
    }
    for kt in kt_modes:
        fresh = {name: makers[name]() for name in parts}
        add_real_mode(ht, kt, t_period=t_period, **fresh)
    return ht


def coclosed_projection(omega: FourierOneForm) -> FourierOneForm:
    """Remove the exact part: on each nonzero mode project out xi (xi . c)/|xi|^2."""
    xi = omega.grid.xi
    xs = np.einsum("i...,i...->...", xi, omega.data)
    denom = omega.grid.xi_sq.copy()
    center = (omega.grid.band,) * 3
    denom[center] = 1.0
    corr = xi * (xs / denom)[None]
    corr[(slice(None),) + center] = 0.0
    return FourierOneForm(omega.grid, omega.data - corr)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    formula: str
    residual: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.residual < self.tolerance


def _rel_residual(parts) -> float:
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    scale = max(p.norm() for p in parts)
    if scale == 0.0:
        return 0.0
    return total.norm() / scale


def _rel_residual_scaled(value: float, scale: float) -> float:
    return value / max(scale, 1e-300)


def identity_suite(band: int = 3, seed: int = 7, lengths=(2 * math.pi,) * 3, tol: float = 1e-10):
    """Run the 11 operator identities on fixed-seed random band-limited fields.

    Returns a list of IdentityResult; every identity is checked with the
    relative residual (norm of the defect over the largest term norm).
    """
    rng = np.random.default_rng(seed)
    grid = ModeGrid(lengths, band)
    h = random_symtensor(rng, grid)
    hp = random_symtensor(rng, grid)
    om = random_oneform(rng, grid)
    u = random_scalar(rng, grid)
    results: list[IdentityResult] = []

    def record(name, formula, residual):
        results.append(IdentityResult(name, formula, float(residual), tol))

    # 1. Square of the Dirac-type operator against the second-order formula.
    record(
        "slashd_squared",
        "slashd^2 h = -4 Lap tf(h) - 2 tfHess tr(h) + 3 K(div h)",
        _rel_residual(
            [
                slash_d(slash_d(h)),
                4.0 * laplacian(tf(h)),
                2.0 * traceless_hessian(trace(h)),
                -3.0 * conf_killing(div(h)),
            ]
        ),
    )
    # 2. Divergence intertwines slashd with star d.
    record(
        "div_slashd",
        "div(slashd h) = star_d(div h)",
        _rel_residual([div(slash_d(h)), -1.0 * star_d(div(h))]),
    )
    # 3. slashd commutes with the rough Laplacian.
    record(
        "slashd_laplacian_commute",
        "slashd(Lap h) = Lap(slashd h)",
        _rel_residual([slash_d(laplacian(h)), -1.0 * laplacian(slash_d(h))]),
    )
    # 4. Commutators of the conformal Killing operator.
    r1 = _rel_residual(
        [div(conf_killing(om)), -1.0 * laplacian(om), (-1.0 / 3.0) * grad(div(om))]
    )
    r2 = _rel_residual([laplacian(conf_killing(om)), -1.0 * conf_killing(laplacian(om))])
    record(
        "conf_killing_commutators",
        "div K(w) = Lap w + (1/3) d div w;  Lap K(w) = K(Lap w)",
        max(r1, r2),
    )
    # 5. slashd is formally self-adjoint on the mode-sum pairing.
    lhs = inner(slash_d(h), hp)
    rhs = inner(h, slash_d(hp))
    record(
        "slashd_self_adjoint",
        "<slashd h, h'> = <h, slashd h'>",
        _rel_residual_scaled(abs(lhs - rhs), max(abs(lhs), abs(rhs))),
    )
    # 6. slashd is trace-free valued and kills pure-trace tensors.
    ug = FourierSymTensor.zero(grid)
    for i in range(3):
        ug.data[i, i] = u.data
    r1 = _rel_residual_scaled(trace(slash_d(h)).norm(), slash_d(h).norm())
    r2 = _rel_residual_scaled(slash_d(ug).norm(), ug.norm() * max(1.0, grid.xi_sq.max()))
    record("slashd_trace_and_conformal", "tr(slashd h) = 0;  slashd(u g) = 0", max(r1, r2))
    # 7. slashd of a Lie derivative is the conformal Killing operator of star d.
    record(
        "slashd_lie",
        "slashd(L w) = K(star_d w)",
        _rel_residual([slash_d(lie(om)), -1.0 * conf_killing(star_d(om))]),
    )
    # 8. Linearized traceless Ricci from the slashd square.
    record(
        "eprime_from_slashd_squared",
        "E'(h) = (1/8) slashd^2 h - (1/4) tfHess tr(h) + (1/8) K(div h)",
        _rel_residual(
            [
                e_prime(h),
                -0.125 * slash_d(slash_d(h)),
                0.25 * traceless_hessian(trace(h)),
                -0.125 * conf_killing(div(h)),
            ]
        ),
    )
    # 9. The linearized curvature annihilates the image of the cylinder
    #    conformal Killing operator, whose divergence matches the box form.
    omt = CylOneForm(grid)
    omt.add_term(0.7, 0, f=random_scalar(rng, grid), omega=random_oneform(rng, grid))
    omt.add_term(-0.3 + 1.1j, 1, f=random_scalar(rng, grid), omega=random_oneform(rng, grid))
    kg = cyl_killing(omt)
    r1 = _rel_residual_scaled(linearized_weyl(kg).norm(), kg.norm() * max(1.0, grid.xi_sq.max()))
    r2 = _rel_residual([cyl_box_k(omt), -1.0 * cyl_div(kg)])
    record(
        "killing_annihilation_and_box",
        "D(K_cyl w) = 0;  box_K w = div(K_cyl w)",
        max(r1, r2),
    )
    # 10. Square of star d is the Hodge Laplacian on co-closed forms.
    occ = coclosed_projection(om)
    record(
        "star_d_squared",
        "(star_d)^2 w = HodgeLap w on co-closed w",
        _rel_residual([star_d(star_d(occ)), -1.0 * hodge_laplacian(occ)]),
    )
    # 11. Parallel kernel and cokernel elements are annihilated exactly.
    record(
        "flat_kernel_cokernel",
        "F(kernel elements) = 0;  F*(cokernel elements) = 0",
        _flat_element_residual(grid),
    )
    return results


def _flat_element_residual(grid: ModeGrid) -> float:
    """Residual of the forward/adjoint operators on the 14 + 14 parallel
    solutions at the flat cross-section."""
    worst = 0.0

    def parallel_scalar(value):
        s = FourierScalar.zero(grid)
        s.data[(grid.band,) * 3] = value
        return s

    def parallel_oneform(i):
        w = FourierOneForm.zero(grid)
        w.data[(i,) + (grid.band,) * 3] = 1.0
        return w

    def parallel_tt(m):
        h = FourierSymTensor.zero(grid)
        h.data[(slice(None), slice(None)) + (grid.band,) * 3] = m
        return h

    tt_basis = [
        np.diag([1.0, -1.0, 0.0]),
        np.diag([1.0, 1.0, -2.0]) / math.sqrt(3),
        np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float),
        np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=float),
        np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float),
    ]

    kernel: list[CylTensor] = []
    minus_g = parallel_tt(-np.eye(3))
    kernel.append(CylTensor.from_parts(grid, 0.0, 0, h00=parallel_scalar(3.0), h=minus_g))
    for i in range(3):
        kernel.append(CylTensor.from_parts(grid, 0.0, 0, alpha=parallel_oneform(i)))
    for m in tt_basis:
        kernel.append(CylTensor.from_parts(grid, 0.0, 0, h=parallel_tt(m)))
        kernel.append(CylTensor.from_parts(grid, 0.0, 1, h=parallel_tt(m)))
    for ht in kernel:
        dpart, divpart = f_forward(ht)
        worst = max(worst, (dpart.norm() + divpart.norm()) / max(ht.norm(), 1e-300))

    cokernel: list[tuple[CylTensor, CylOneForm]] = []
    dt_form = CylOneForm(grid)
    dt_form.add_term(0.0, 0, f=parallel_scalar(1.0))
    cokernel.append((CylTensor(grid), dt_form))
    for i in range(3):
        w = CylOneForm(grid)
        w.add_term(0.0, 0, omega=parallel_oneform(i))
        cokernel.append((CylTensor(grid), w))
    for m in tt_basis:
        for degree in (0, 1):
            cokernel.append(
                (CylTensor.from_parts(grid, 0.0, degree, h=parallel_tt(m)), CylOneForm(grid))
            )
    for Z, w in cokernel:
        res = f_star(Z, w)
        scale = max(Z.norm() + w.norm(), 1e-300)
        worst = max(worst, res.norm() / scale)
    return worst
