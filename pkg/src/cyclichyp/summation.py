"""Closed-form product evaluation of the cyclic 2phi1.

For gamma = omega^k Delta(beta)/Delta(alpha), delta = beta/alpha and
epsilon = beta/(alpha gamma),

    2phi1[omega, alpha; beta; gamma]
        = F * omega^(-k(k+1)/2 - m k) * N / gamma^((N-1)/2)
          * p(beta) p(gamma) p(epsilon) / (p(alpha) p(1) p(delta))

with m, n the sector indices of alpha and beta.  The phase F is piecewise
constant in beta.  Seen in the plane of w = beta^N, with a = alpha^N and
Im a > 0, the jumps sit on four curves, each the image of a
p-argument crossing u^N in [1, inf):

    beta^N  in [1, inf)  ->  the ray [1, inf)
    delta^N in [1, inf)  ->  the ray from a in direction a
    gamma^N in [1, inf)  ->  the ray from a in direction a - 1
    eps^N   in [1, inf)  ->  the arc from a to 1 of the circle through 0, a, 1

They form a tree cutting the plane into three regions: the wedge between
the two rays at a (phase omega^k), the region outside the circle bounded by
the arc, [1, inf) and the delta-ray (phase omega^(m-n+k)), and the rest,
containing 0 and the lower half plane (phase 1).  For Im a < 0 everything
is mirrored in the real axis and the exponents change sign.

gamma^((N-1)/2) is taken as omega^(k(N-1)/2) * gamma0^((N-1)/2) with
gamma0 = Delta(beta)/Delta(alpha) on its principal power; for even N the
plain principal power of gamma lands on the wrong sheet whenever
omega^k gamma0 wraps past the negative axis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .branched import (
    BranchedValue,
    _p_factors,
    _p_from_factors,
    delta,
    p_func,
    sector_index,
)
from .context import UnityContext, phase
from .errors import NoConsistentPhase, OnBoundary, ZeroArgument
from .series import HypSpec, phi_condition, phi_eval, precision_for

__all__ = [
    "Region",
    "RegionTag",
    "SummationInput",
    "Derived",
    "derived_quantities",
    "classify_region",
    "phase_exponent",
    "phase_factor",
    "closed_form",
    "closed_form_unphased",
    "direct_sum",
    "oracle_phase",
    "infer_k",
    "summation_spec",
]


class Region(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    II_PRIME = "II'"
    III_PRIME = "III'"


@dataclass(frozen=True)
class RegionTag:
    region: Region
    im_alpha_positive: bool

    def __post_init__(self):
        primed = self.region in (Region.II_PRIME, Region.III_PRIME)
        unprimed = self.region in (Region.II, Region.III)
        if (primed and self.im_alpha_positive) or (unprimed and not self.im_alpha_positive):
            raise ValueError(f"region {self.region.value} incompatible with sign of Im alpha^N")

    @property
    def label(self) -> str:
        return self.region.value


@dataclass(frozen=True)
class SummationInput:
    alpha: BranchedValue
    beta: BranchedValue
    k: int
    ctx: UnityContext

    def __post_init__(self):
        if not 0 <= self.k < self.ctx.N:
            raise ValueError(f"k must lie in 0..{self.ctx.N - 1}")
        if self.alpha.value == 0 or self.beta.value == 0:
            raise ZeroArgument("alpha and beta must be nonzero")

    @classmethod
    def from_values(cls, alpha, beta, k: int, ctx: UnityContext) -> "SummationInput":
        return cls(BranchedValue.principal(alpha, ctx), BranchedValue.principal(beta, ctx), k % ctx.N, ctx)

    @property
    def effective_k(self) -> int:
        """k relative to the principal Delta branches of alpha and beta."""
        return (self.k + self.beta.branch(self.ctx) - self.alpha.branch(self.ctx)) % self.ctx.N


@dataclass(frozen=True)
class Derived:
    m: int
    n: int
    k: int
    gamma: complex
    delta_q: complex
    epsilon: complex


def derived_quantities(inp: SummationInput) -> Derived:
    ctx = inp.ctx
    a, b = inp.alpha.value, inp.beta.value
    gamma = complex(ctx.root(inp.k)) * inp.beta.delta / inp.alpha.delta
    return Derived(
        m=sector_index(a, ctx),
        n=sector_index(b, ctx),
        k=inp.effective_k,
        gamma=gamma,
        delta_q=b / a,
        epsilon=b / (a * gamma),
    )


def _cross(u: complex, v: complex) -> float:
    return (u.conjugate() * v).imag


def _on_cut_curve(f: complex, tol: float) -> bool:
    """f = 1 - u^N lies on (-inf, 0], i.e. u^N in [1, inf)."""
    scale = max(1.0, abs(f))
    return abs(f.imag) <= tol * scale and f.real <= tol * scale


def _geometric_region(a: complex, w: complex) -> int:
    """Region index for Im a > 0: 1 = wedge, 2 = outside the arc, 0 = the rest."""
    if _cross(a, w - a) > 0 and _cross(a - 1, w - a) < 0:
        return 1
    # circle through 0, a, 1 has its centre on Re = 1/2
    yc = ((0.5 - a.real) ** 2 + a.imag**2 - 0.25) / (2 * a.imag)
    centre = complex(0.5, yc)
    if w.imag > 0 and _cross(a, w) < 0 and abs(w - centre) > abs(centre):
        return 2
    return 0


def classify_region(inp: SummationInput) -> RegionTag:
    ctx = inp.ctx
    N = ctx.N
    tol = ctx.config.boundary_tol
    a = inp.alpha.value**N
    w = inp.beta.value**N
    if abs(a.imag) <= tol * abs(a):
        raise OnBoundary("Im alpha^N = 0: the phase regions are undefined")
    if abs(1 - a) <= tol or abs(1 - w) <= tol or abs(w - a) <= tol * max(1.0, abs(a)):
        raise OnBoundary("beta^N coincides with a branch point")
    curves = {
        "beta^N": 1 - w,
        "delta^N": 1 - w / a,
        "gamma^N": (w - a) / (1 - a),
        "epsilon^N": 1 - w * (1 - a) / (a * (1 - w)),
    }
    for name, f in curves.items():
        if _on_cut_curve(f, tol):
            raise OnBoundary(f"{name} lies on [1, inf) within tolerance")
    positive = a.imag > 0
    if not positive:
        a, w = a.conjugate(), w.conjugate()
    idx = _geometric_region(a, w)
    if idx == 0:
        region = Region.I
    elif idx == 1:
        region = Region.II if positive else Region.II_PRIME
    else:
        region = Region.III if positive else Region.III_PRIME
    return RegionTag(region, positive)


def phase_exponent(tag: RegionTag, m: int, n: int, k: int, N: int) -> int:
    """Exponent s (mod N) with F = omega^s."""
    r = tag.region
    if r is Region.I:
        s = 0
    elif r is Region.II:
        s = k
    elif r is Region.III:
        s = m - n + k
    elif r is Region.II_PRIME:
        s = -k
    else:
        s = n - m - k
    return s % N


def phase_factor(tag: RegionTag, m: int, n: int, k: int, ctx: UnityContext) -> complex:
    return complex(ctx.root(phase_exponent(tag, m, n, k, ctx.N)))


def _p_gamma(inp: SummationInput, gamma: complex, k: int) -> complex:
    """p(gamma), with the factor 1 - omega^(N-k) gamma formed without cancellation.

    That factor equals 1 - Delta(beta)/Delta(alpha), which is tiny when both
    alpha^N and beta^N are; subtracting the rounded quotient would lose all of
    its digits.  Delta_a - Delta_b = (beta^N - alpha^N) / sum_i Da^(N-1-i) Db^i.
    """
    ctx = inp.ctx
    N = ctx.N
    factors = _p_factors(gamma, ctx)
    if k != 0:
        a, b = inp.alpha.value, inp.beta.value
        da, db = complex(delta(a, ctx)), complex(delta(b, ctx))
        den = sum(da ** (N - 1 - i) * db**i for i in range(N))
        factors[N - k - 1] = (b**N - a**N) / den / da
    return complex(_p_from_factors(factors, ctx, "p(gamma)"))


def _p_epsilon(inp: SummationInput, eps: complex) -> complex:
    """p(eps), with its factor nearest zero formed without cancellation.

    eps^N = beta^N (1 - alpha^N) / (alpha^N (1 - beta^N)) lies near 1 whenever
    alpha^N and beta^N are large, so one factor u = 1 - omega^j eps is small
    and rounding in eps is amplified by |alpha^N beta^N / (alpha^N - beta^N)|.
    Instead u = (1 - eps^N) / sum_i (omega^j eps)^i with
    1 - eps^N = (alpha^N - beta^N) / (alpha^N (1 - beta^N)).
    """
    ctx = inp.ctx
    N = ctx.N
    factors = _p_factors(eps, ctx)
    j = min(range(1, N), key=lambda i: abs(factors[i - 1]))
    if abs(factors[j - 1]) < 0.5:
        aN, bN = inp.alpha.value**N, inp.beta.value**N
        u = complex(ctx.root(j)) * eps
        factors[j - 1] = (aN - bN) / (aN * (1 - bN)) / sum(u**i for i in range(N))
    return complex(_p_from_factors(factors, ctx, "p(eps)"))


def closed_form_unphased(inp: SummationInput) -> complex:
    """The product formula with F = 1."""
    ctx = inp.ctx
    N = ctx.N
    d = derived_quantities(inp)
    k = d.k
    a, b = inp.alpha.value, inp.beta.value
    da, db = complex(delta(a, ctx)), complex(delta(b, ctx))
    gamma0 = db / da
    gamma = complex(ctx.root(k)) * gamma0
    eps = b / (a * gamma)
    half = (N - 1) / 2
    gamma_pow = complex(ctx.exp(1j * math.pi * k * (N - 1) / N + half * ctx.log(gamma0)))
    pref = complex(ctx.root(-(k * (k + 1) // 2) - d.m * k)) * N / gamma_pow
    num = complex(p_func(b, ctx)) * _p_gamma(inp, gamma, k) * _p_epsilon(inp, eps)
    den = complex(p_func(a, ctx)) * complex(p_func(1, ctx)) * complex(p_func(b / a, ctx))
    return pref * num / den


def closed_form(inp: SummationInput) -> complex:
    d = derived_quantities(inp)
    tag = classify_region(inp)
    return phase_factor(tag, d.m, d.n, d.k, inp.ctx) * closed_form_unphased(inp)


def summation_spec(inp: SummationInput, ctx: UnityContext | None = None) -> HypSpec:
    """The 2phi1 that the closed form evaluates, optionally in another precision."""
    ctx = ctx or inp.ctx
    a, b = ctx.num(inp.alpha.value), ctx.num(inp.beta.value)
    gamma = ctx.root(inp.effective_k) * delta(b, ctx) / delta(a, ctx)
    return HypSpec([a], [b], gamma, ctx)


def direct_sum(inp: SummationInput, dps: int | None | str = "auto", target: float | None = None):
    """Direct N-term sum of the same 2phi1.

    With ``dps="auto"`` the cancellation ratio of the double-precision sum
    decides beforehand whether to redo it (gamma included) at higher
    precision.  Returns (value, digits used or None for double).
    """
    if dps == "auto":
        spec = summation_spec(inp)
        cond = phi_condition(spec)
        dps = precision_for(cond, target or inp.ctx.config.identity_rtol, inp.ctx.N)
        if dps is None:
            return complex(phi_eval(spec)), None
    if dps is None:
        return complex(phi_eval(summation_spec(inp))), None
    spec = summation_spec(inp, inp.ctx.with_dps(dps))
    return complex(phi_eval(spec)), dps


def oracle_phase(inp: SummationInput) -> int:
    """Exponent s minimizing |direct - omega^s closed(F=1)|.

    Ground truth for the region classifier; raises NoConsistentPhase when no
    power of omega reconciles the two (which would mean the product formula
    itself failed).
    """
    ctx = inp.ctx
    value, _ = direct_sum(inp)
    c = closed_form_unphased(inp)
    if value == 0 or c == 0:
        raise NoConsistentPhase("vanishing 2phi1: phase undetermined")
    s = round(ctx.N * phase(value / c) / (2 * math.pi)) % ctx.N
    res = abs(value - complex(ctx.root(s)) * c) / abs(value)
    if res > ctx.config.phase_tol:
        raise NoConsistentPhase(f"best phase omega^{s} leaves relative residual {res:.3e}")
    return s


def infer_k(alpha, beta, gamma, ctx: UnityContext) -> int:
    """Recover k from gamma = omega^k Delta(beta)/Delta(alpha) (principal Deltas)."""
    g0 = complex(delta(beta, ctx)) / complex(delta(alpha, ctx))
    ratio = complex(gamma) / g0
    k = round(ctx.N * phase(ratio) / (2 * math.pi)) % ctx.N
    res = abs(ratio - complex(ctx.root(k))) / abs(ratio)
    if res > ctx.config.k_infer_tol:
        raise ValueError(f"gamma is not a cyclic variant of Delta(beta)/Delta(alpha) (residual {res:.2e})")
    return k
