"""Scalar kernels at a root of unity: omega-Pochhammer symbols and the
multivalued root functions Delta, p and p0 on their principal branches.

Cut conventions (all principal logarithms):

* ``delta(z)`` is cut where z**N is real and >= 1;
* ``p_func(z)`` is cut on the rays arg z = 2 pi m / N, |z| >= 1, m = 1..N-1,
  and is regular on the positive real axis;
* ``p0(z)`` carries the cuts of both.

Inputs within ``config.cut_tol`` of a cut raise :class:`OnCut` instead of
silently picking a side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .context import UnityContext, phase
from .errors import OnCut, ZeroArgument

__all__ = [
    "BranchedValue",
    "pochhammer",
    "delta",
    "p_func",
    "p0",
    "cyclic_pochhammer",
    "sector_index",
    "delta_branch",
]


def _check_off_cut(f, ctx: UnityContext, what: str):
    """Reject f on the principal-log cut (-inf, 0] of the complex plane."""
    fc = complex(f)
    tol = ctx.config.cut_tol * max(1.0, abs(fc))
    if abs(fc.imag) <= tol and fc.real <= tol:
        raise OnCut(f"{what}: argument of the principal log is on the cut ({fc!r})")


def pochhammer(x, l: int, ctx: UnityContext):
    """(x; omega)_l = prod_{j=1}^{l} (1 - x omega^{j-1}); 1 for l = 0."""
    if l < 0:
        raise ValueError("pochhammer order must be non-negative")
    x = ctx.num(x)
    result = ctx.num(1)
    for j in range(l):
        result *= 1 - x * ctx.root(j)
    return result


def _delta_log(z, ctx: UnityContext, what="delta"):
    f = 1 - ctx.num(z) ** ctx.N
    _check_off_cut(f, ctx, what)
    return ctx.log(f) / ctx.N


def delta(z, ctx: UnityContext):
    """Principal branch of (1 - z**N)**(1/N)."""
    return ctx.exp(_delta_log(z, ctx))


def _p_factors(z, ctx: UnityContext):
    z = ctx.num(z)
    return [1 - ctx.root(j) * z for j in range(1, ctx.N)]


def _p_from_factors(factors, ctx: UnityContext, what="p"):
    """exp(sum_j (j/N) Log f_j) for the factors f_j = 1 - omega^j z, j = 1..N-1."""
    total = ctx.num(0)
    for j, f in enumerate(factors, start=1):
        _check_off_cut(f, ctx, what)
        total += ctx.frac(j, ctx.N) * ctx.log(f)
    return ctx.exp(total)


def p_func(z, ctx: UnityContext):
    """p(z) = prod_{j=1}^{N-1} (1 - omega^j z)^{j/N}, per-factor principal powers."""
    return _p_from_factors(_p_factors(z, ctx), ctx)


def p0(z, ctx: UnityContext):
    """p0(z) = p(z) / Delta(z)^{(N-1)/2}.

    The half-integer power uses Log Delta = Log(1 - z^N)/N, which is exact on
    the principal branch of Delta since |arg Delta| < pi/N.
    """
    log_delta = _delta_log(z, ctx, "p0")
    return p_func(z, ctx) * ctx.exp(-ctx.frac(ctx.N - 1, 2) * log_delta)


def cyclic_pochhammer(z, n: int, ctx: UnityContext):
    """((z; omega))_n = (z; omega)_{n mod N} / Delta(z)^{n mod N}, period N in n."""
    r = n % ctx.N
    return pochhammer(z, r, ctx) / delta(z, ctx) ** r


def sector_index(z, ctx: UnityContext) -> int:
    """floor(N arg z / 2 pi) with arg z in [0, 2 pi)."""
    if complex(z) == 0:
        raise ZeroArgument("sector index of zero is undefined")
    return int(math.floor(ctx.N * phase(z) / (2 * math.pi))) % ctx.N


def delta_branch(value, d, ctx: UnityContext) -> int:
    """The s with d = omega^s * Delta(value), Delta principal.

    Assumes ``d`` is some N-th root of 1 - value^N; the caller validates that.
    """
    ratio = complex(d) / complex(delta(value, ctx))
    return round(ctx.N * phase(ratio) / (2 * math.pi)) % ctx.N


@dataclass(frozen=True)
class BranchedValue:
    """An affine point (value, Delta(value)) on the Fermat curve.

    ``delta`` may be any of the N roots of 1 - value^N; ``principal`` builds the
    one with |arg delta| < pi/N.
    """

    value: complex
    delta: complex
    sector: int

    @classmethod
    def principal(cls, value, ctx: UnityContext) -> "BranchedValue":
        return cls(complex(value), complex(delta(value, ctx)), sector_index(value, ctx))

    @classmethod
    def on_branch(cls, value, s: int, ctx: UnityContext) -> "BranchedValue":
        """The point whose delta is omega^s times the principal root."""
        d = complex(delta(value, ctx)) * complex(ctx.root(s))
        return cls(complex(value), d, sector_index(value, ctx))

    def branch(self, ctx: UnityContext) -> int:
        return delta_branch(self.value, self.delta, ctx)

    def residual(self, ctx: UnityContext) -> float:
        """Relative residual of delta^N + value^N = 1."""
        N = ctx.N
        lhs = self.delta**N + self.value**N
        return abs(lhs - 1) / max(1.0, abs(self.delta) ** N, abs(self.value) ** N)
