"""Translation between affine points (alpha, Delta(alpha)) and homogeneous
points of the Fermat curve x^N + y^N = z^N.

A point carries two sector labels l, m with

    0 < arg(x/z) < 2 pi/N,    |arg(y/z) - 2 pi l/N| < pi/N,

and maps to alpha = omega^(m+1) x/z, Delta(alpha) = omega^(-l) y/z.  The
second condition makes omega^(-l) y/z the principal root, so every Fermat
point lands on the principal Delta branch; affine points on other branches
have no labelled Fermat representative and are rejected.

The other convention for Pochhammer-type products used on the curve,

    w(x, y, z | l) = prod_{s=1}^{l} y / (z - x omega^s),

and the normalised factors 1/p0(omega^s alpha) are confined to this module.
The direct r-Psi-r sum is defined as

    Psi(n) = N^(-1/2) sum_s omega^(n s) prod_j w(b_j | s) / w(a_j | s)

with w(. | s) = 1/p0(omega^s .), numerator points b_j and denominator points
a_j.  Since p0(omega^s a)/p0(a) = (a; omega)_s / Delta(a)^s on the principal
branches, this equals C * (r+1)phi(r)[omega, a; b; z] with
C = N^(-1/2) prod p0(a_j) / prod p0(b_j) and z = omega^n prod Delta(b)/prod Delta(a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .branched import BranchedValue, delta, p0, pochhammer, sector_index
from .context import UnityContext, phase
from .errors import OffCurve, PoleInDenominator, SectorBoundary, SectorViolation
from .series import HypSpec, phi_eval

__all__ = [
    "FermatPoint",
    "fermat_to_affine",
    "affine_to_fermat",
    "w_kms",
    "w_kms_forms",
    "w_sms",
    "w_sms_period_product",
    "translate_psi",
    "psi_direct",
    "psi_via_phi",
]


def _arg_signed(z: complex) -> float:
    """arg in (-pi, pi]."""
    return math.atan2(z.imag, z.real)


@dataclass(frozen=True)
class FermatPoint:
    x: complex
    y: complex
    z: complex
    l: int
    m: int
    ctx: UnityContext = field(repr=False, compare=False)

    def __post_init__(self):
        N = self.ctx.N
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "l", self.l % N)
        object.__setattr__(self, "m", self.m % N)
        if self.z == 0:
            raise OffCurve("z = 0 is at infinity")
        scale = max(abs(self.x) ** N, abs(self.y) ** N, abs(self.z) ** N)
        res = abs(self.x**N + self.y**N - self.z**N) / scale
        if res > self.ctx.config.cyclic_tol:
            raise OffCurve(f"x^N + y^N - z^N has relative residual {res:.2e}")
        if self.x == 0 or self.y == 0:
            raise SectorViolation("x/z and y/z must be nonzero to carry sector labels")
        tol = self.ctx.config.boundary_tol
        ax = phase(self.x / self.z)
        if not tol < ax < 2 * math.pi / N - tol:
            raise SectorViolation(f"arg(x/z) = {ax:.6g} outside (0, 2 pi/N)")
        ay = _arg_signed(self.y / self.z * complex(self.ctx.root(-self.l)))
        if abs(ay) >= math.pi / N - tol:
            raise SectorViolation(f"arg(y/z) outside sector l = {self.l}")

    def residual(self) -> float:
        N = self.ctx.N
        scale = max(abs(self.x) ** N, abs(self.y) ** N, abs(self.z) ** N)
        return abs(self.x**N + self.y**N - self.z**N) / scale


def fermat_to_affine(p: FermatPoint) -> BranchedValue:
    """alpha = omega^(m+1) x/z and Delta(alpha) = omega^(-l) y/z."""
    ctx = p.ctx
    value = complex(ctx.root(p.m + 1)) * p.x / p.z
    d = complex(ctx.root(-p.l)) * p.y / p.z
    return BranchedValue(value, d, sector_index(value, ctx))


def affine_to_fermat(b: BranchedValue, ctx: UnityContext) -> FermatPoint:
    """Canonical representative with z = 1.

    m = sector(alpha) - 1 and l is the sector of Delta; both follow from the
    affine data, so only principal Delta branches are representable.
    """
    N = ctx.N
    tol = ctx.config.boundary_tol
    value = complex(b.value)
    d = complex(b.delta)
    if value == 0:
        raise SectorBoundary("alpha = 0 has no sector")
    frac = N * phase(value) / (2 * math.pi)
    if abs(frac - round(frac)) < tol:
        raise SectorBoundary(f"arg(alpha) = {phase(value):.6g} lies on a sector boundary")
    if b.branch(ctx) != 0:
        raise SectorViolation("Fermat sector labels force the principal Delta branch")
    m = (int(math.floor(frac)) - 1) % N
    x = value * complex(ctx.root(-(m + 1)))
    l = round(N * phase(d) / (2 * math.pi)) % N
    half = N * _arg_signed(d * complex(ctx.root(-l))) / math.pi
    if abs(abs(half) - 1) < tol:
        raise SectorBoundary("arg(Delta) lies on a sector boundary")
    return FermatPoint(x, d, 1, l, m, ctx)


def w_kms_forms(p: FermatPoint, l: int) -> tuple[complex, complex]:
    """(defining product, Pochhammer form) of w(x, y, z | l)."""
    if l < 0:
        raise ValueError("l must be non-negative")
    ctx = p.ctx
    prod = 1 + 0j
    for s in range(1, l + 1):
        den = p.z - p.x * complex(ctx.root(s))
        if abs(den) <= ctx.config.pole_tol * abs(p.z):
            raise PoleInDenominator(f"z = x omega^{s}", order=s)
        prod *= p.y / den
    u = complex(ctx.omega) * p.x / p.z
    poch = complex(pochhammer(u, l, ctx))
    if poch == 0:
        raise PoleInDenominator("(omega x/z; omega)_l vanishes", order=l)
    return prod, (p.y / p.z) ** l / poch


def w_kms(p: FermatPoint, l: int) -> complex:
    """w(x, y, z | l) = prod_{s=1}^l y/(z - x omega^s) = (y/z)^l / (omega x/z; omega)_l."""
    return w_kms_forms(p, l)[0]


def _affine(p: FermatPoint, ctx: UnityContext):
    """alpha in ``ctx`` and its principal Delta, checked against the point's y."""
    value = ctx.root(p.m + 1) * ctx.num(p.x) / ctx.num(p.z)
    d = delta(value, ctx)
    given = complex(ctx.root(-p.l)) * p.y / p.z
    if abs(complex(d) - given) > 1e3 * ctx.config.cyclic_tol * max(1.0, abs(given)):
        raise SectorViolation("omega^-l y/z is not the principal Delta of alpha")
    return value, d


def w_sms(p: FermatPoint, shift: int, ctx: UnityContext | None = None):
    """1/p0(omega^shift alpha), alpha the affine image of p."""
    ctx = ctx or p.ctx
    value, _ = _affine(p, ctx)
    return 1 / p0(ctx.root(shift) * value, ctx)


def w_sms_period_product(p: FermatPoint) -> complex:
    """prod_{s=0}^{N-1} w_sms(p, s), which equals 1."""
    out = 1 + 0j
    for s in range(p.ctx.N):
        out *= complex(w_sms(p, s))
    return out


def _check_lists(numer, denom):
    if len(numer) != len(denom) or not numer:
        raise ValueError("numerator and denominator point lists must be non-empty and of equal length")


def translate_psi(numer: list, denom: list, n: int, ctx: UnityContext | None = None):
    """(HypSpec, C) with Psi(numer; denom | n) = C * phi_eval(spec).

    Denominator points give the alphas, numerator points the betas.
    """
    _check_lists(numer, denom)
    ctx = ctx or numer[0].ctx
    alphas, betas = [], []
    C = ctx.num(1) / ctx.num(ctx.N) ** ctx.frac(1, 2)
    zq = ctx.root(n)
    for b_pt, a_pt in zip(numer, denom):
        a, da = _affine(a_pt, ctx)
        b, db = _affine(b_pt, ctx)
        alphas.append(a)
        betas.append(b)
        C *= p0(a, ctx) / p0(b, ctx)
        zq *= db / da
    return HypSpec(alphas, betas, zq, ctx), C


def psi_direct(numer: list, denom: list, n: int, ctx: UnityContext | None = None):
    """N^(-1/2) sum_s omega^(n s) prod_j w_sms(b_j, s) / w_sms(a_j, s)."""
    _check_lists(numer, denom)
    ctx = ctx or numer[0].ctx
    terms = []
    for s in range(ctx.N):
        t = ctx.root(n * s)
        for b_pt, a_pt in zip(numer, denom):
            t *= w_sms(b_pt, s, ctx) / w_sms(a_pt, s, ctx)
        terms.append(t)
    return ctx.fsum(terms) / ctx.num(ctx.N) ** ctx.frac(1, 2)


def psi_via_phi(numer: list, denom: list, n: int, ctx: UnityContext | None = None):
    spec, C = translate_psi(numer, denom, n, ctx)
    return C * phi_eval(spec)
