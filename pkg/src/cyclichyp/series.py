"""Finite-sum evaluation of the cyclic basic hypergeometric series

    (p+1)Phi(p)[omega, a_1..a_p; b_1..b_p; z]
        = sum_{l=0}^{N-1} prod_j (a_j; omega)_l / (b_j; omega)_l * z^l

The leading numerator parameter omega is implicit; only the p free
parameters are stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .context import EPS, UnityContext
from .errors import DegenerateAlpha, PoleInDenominator

__all__ = ["HypSpec", "Check", "phi_terms", "phi_eval", "phi_condition", "factor_sensitivity", "sum_with_condition", "precision_for", "is_cyclic", "is_saalschutz"]


@dataclass(frozen=True)
class HypSpec:
    alphas: tuple
    betas: tuple
    z: complex
    ctx: UnityContext

    def __init__(self, alphas: Sequence, betas: Sequence, z, ctx: UnityContext):
        if len(alphas) != len(betas) or len(alphas) < 1:
            raise ValueError("alphas and betas must be non-empty and of equal length")
        object.__setattr__(self, "alphas", tuple(ctx.num(a) for a in alphas))
        object.__setattr__(self, "betas", tuple(ctx.num(b) for b in betas))
        object.__setattr__(self, "z", ctx.num(z))
        object.__setattr__(self, "ctx", ctx)

    @property
    def p(self) -> int:
        return len(self.alphas)

    def at(self, ctx: UnityContext) -> "HypSpec":
        """The same parameters re-expressed in another precision context."""
        return HypSpec(self.alphas, self.betas, self.z, ctx)


@dataclass(frozen=True)
class Check:
    """Outcome of a predicate together with the residual it was decided on."""

    ok: bool
    residual: float
    detail: str = ""

    def __bool__(self):
        return self.ok


def _check_poles(spec: HypSpec):
    ctx = spec.ctx
    for i, b in enumerate(spec.betas):
        for s in range(ctx.N - 1):
            if abs(complex(1 - b * ctx.root(s))) <= ctx.config.pole_tol:
                raise PoleInDenominator(
                    f"(beta_{i + 1}; omega)_l vanishes for l >= {s + 1}: beta_{i + 1} = omega^-{s}",
                    index=i,
                    order=s + 1,
                )


def phi_terms(spec: HypSpec) -> list:
    """The N summands, built incrementally (one update per l)."""
    _check_poles(spec)
    ctx = spec.ctx
    terms = [ctx.num(1)]
    t = ctx.num(1)
    for l in range(ctx.N - 1):
        w = ctx.root(l)
        for a, b in zip(spec.alphas, spec.betas):
            t *= (1 - a * w) / (1 - b * w)
        t *= spec.z
        terms.append(t)
    return terms


def phi_eval(spec: HypSpec):
    """Exact N-term sum; no branch choices enter."""
    return spec.ctx.fsum(phi_terms(spec))


def factor_sensitivity(spec: HypSpec) -> float:
    """Worst amplification |a w^l| / |1 - a w^l| of a relative error in a
    parameter through one Pochhammer factor (at least 1)."""
    ctx = spec.ctx
    worst = 1.0
    for l in range(ctx.N - 1):
        w = complex(ctx.root(l))
        for a in spec.alphas + spec.betas:
            u = complex(a) * w
            f = abs(1 - u)
            worst = max(worst, abs(u) / f if f > 0 else float("inf"))
    return worst


def sum_with_condition(spec: HypSpec):
    """(value, condition) with condition = cancellation ratio times factor sensitivity.

    The cancellation ratio sum|t_l| / |sum t_l| bounds how rounding in the terms
    is amplified by the sum; parameters that are themselves rounded results
    (gamma, mu-images) are further amplified by nearly vanishing factors.
    """
    terms = phi_terms(spec)
    value = spec.ctx.fsum(terms)
    total = abs(complex(value))
    mass = sum(abs(complex(t)) for t in terms)
    kappa = mass / total if total > 0 else float("inf")
    return value, kappa * factor_sensitivity(spec)


def phi_condition(spec: HypSpec) -> float:
    """Condition estimate of phi_eval (inf when the sum vanishes)."""
    return sum_with_condition(spec)[1]


def precision_for(condition: float, target: float, N: int) -> int | None:
    """Decimal digits needed so that rounding, amplified by ``condition``,
    stays well below ``target``; None when double precision suffices.

    Each summand carries at most ~(2p+1) N rounding errors and the summation
    itself is exact, so 4 N eps times the cancellation ratio bounds the
    relative error of a double-precision sum for p <= 1.
    """
    est = 4 * N * condition * EPS
    if est < target / 100:
        return None
    extra = max(0, int(math.ceil(-math.log10(target))) - 10)
    if not math.isfinite(condition):
        return 60 + extra
    return 20 + extra + int(math.ceil(math.log10(max(condition, 1.0))))


def is_cyclic(spec: HypSpec) -> Check:
    """z^N * prod(1 - a_j^N) / prod(1 - b_j^N) == 1 within tolerance."""
    ctx = spec.ctx
    N = ctx.N
    num = ctx.num(1)
    den = ctx.num(1)
    for i, (a, b) in enumerate(zip(spec.alphas, spec.betas)):
        fa = 1 - a**N
        if abs(complex(fa)) <= ctx.config.cut_tol:
            raise DegenerateAlpha(f"alpha_{i + 1}^N = 1; cyclicity constraint undefined")
        num *= fa
        den *= 1 - b**N
    if abs(complex(den)) == 0:
        res = float("inf")
    else:
        res = abs(complex(spec.z**N * num / den - 1))
    return Check(res < ctx.config.cyclic_tol, res)


def is_saalschutz(spec: HypSpec) -> Check:
    """omega^2 prod a_j == prod b_j and z == omega."""
    ctx = spec.ctx
    pa = ctx.num(1)
    pb = ctx.num(1)
    for a, b in zip(spec.alphas, spec.betas):
        pa *= a
        pb *= b
    balance = abs(complex(ctx.root(2) * pa - pb)) / max(1.0, abs(complex(pb)))
    zres = abs(complex(spec.z - ctx.omega))
    res = max(balance, zres)
    tol = ctx.config.cyclic_tol
    detail = "" if zres < tol else "z != omega"
    return Check(balance < tol and zres < tol, res, detail)
