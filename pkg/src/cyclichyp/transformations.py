"""Symmetries of the cyclic 2phi1 and 3phi2.

The Fourier transform of a product-form weight is again of product form;
on the parameters it acts as

    mu: (alpha, beta, gamma) -> (gamma, omega alpha gamma / beta, omega / beta)

which has order four.  Convolution turns products of 2phi1's into a 3phi2,
and mu^-1 on one factor with mu on the other gives the 3phi2 transformation.
Everything here uses direct sums only, so no branch choice enters: the
identities hold for any gamma that satisfies the cyclicity condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .branched import delta, pochhammer
from .context import UnityContext
from .errors import NotCyclic, ZeroParameter
from .series import HypSpec, factor_sensitivity, phi_eval, sum_with_condition

__all__ = [
    "Phi1Params",
    "Phi2Params",
    "WeightTable",
    "IdentityCheck",
    "phi1",
    "phi2",
    "mu_transform",
    "mu_inverse",
    "verify_z4",
    "product_form_table",
    "fourier_dual",
    "recurrence_check",
    "convolution_3phi2",
    "transform_3phi2",
    "m_transform",
    "iota_swap",
    "orbit",
]


def _rel(a, b) -> float:
    a, b = complex(a), complex(b)
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class Phi1Params:
    alpha: complex
    beta: complex
    gamma: complex
    ctx: UnityContext = field(repr=False)

    def __post_init__(self):
        res = self.cyclicity_residual()
        if res > self.ctx.config.cyclic_tol:
            raise NotCyclic(f"gamma^N (1 - alpha^N) / (1 - beta^N) deviates from 1 by {res:.2e}")

    @classmethod
    def from_branch(cls, alpha, beta, k: int, ctx: UnityContext) -> "Phi1Params":
        """gamma = omega^k Delta(beta)/Delta(alpha) on principal Deltas."""
        a, b = ctx.num(alpha), ctx.num(beta)
        return cls(a, b, ctx.root(k) * delta(b, ctx) / delta(a, ctx), ctx)

    def cyclicity_residual(self) -> float:
        """|gamma^N (1 - alpha^N) - (1 - beta^N)|, relative to the size of the
        terms entering the two differences."""
        N = self.ctx.N
        gN, aN, bN = self.gamma**N, self.alpha**N, self.beta**N
        diff = abs(complex(gN * (1 - aN) - (1 - bN)))
        scale = max(abs(complex(gN)) * max(1.0, abs(complex(aN))), max(1.0, abs(complex(bN))))
        return diff / scale

    def spec(self) -> HypSpec:
        return HypSpec([self.alpha], [self.beta], self.gamma, self.ctx)

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class Phi2Params:
    first: Phi1Params
    second: Phi1Params

    @property
    def ctx(self) -> UnityContext:
        return self.first.ctx

    @property
    def z(self):
        return self.first.gamma * self.second.gamma

    def spec(self) -> HypSpec:
        return HypSpec(
            [self.first.alpha, self.second.alpha], [self.first.beta, self.second.beta], self.z, self.ctx
        )

    def as_tuple(self):
        return self.first.as_tuple() + self.second.as_tuple()


@dataclass(frozen=True)
class WeightTable:
    """N weights W(0..N-1); the index is understood mod N."""

    values: tuple
    kind: str = "W"

    def __getitem__(self, n):
        return self.values[n % len(self.values)]

    def __len__(self):
        return len(self.values)

    def normalized(self) -> "WeightTable":
        w0 = self.values[0]
        return WeightTable(tuple(v / w0 for v in self.values), self.kind)


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of a numerical identity and their relative residual.

    ``condition`` is the worst cancellation ratio among the series summed on
    the way; it bounds how much of the residual rounding can explain.
    """

    name: str
    lhs: complex
    rhs: complex
    residual: float
    extra: dict = field(default_factory=dict)
    condition: float = 1.0

    def passed(self, tol: float) -> bool:
        return self.residual < tol


def phi1(p: Phi1Params):
    return phi_eval(p.spec())


def phi2(p: Phi2Params):
    return phi_eval(p.spec())


class _Tracker:
    """Sums series while remembering the worst cancellation ratio seen."""

    def __init__(self):
        self.condition = 1.0

    def __call__(self, spec: HypSpec):
        value, cond = sum_with_condition(spec)
        self.condition = max(self.condition, cond)
        return value


def mu_transform(p: Phi1Params) -> Phi1Params:
    if p.alpha == 0 or p.beta == 0 or p.gamma == 0:
        raise ZeroParameter("mu needs alpha, beta, gamma nonzero")
    w = p.ctx.omega
    return Phi1Params(p.gamma, w * p.alpha * p.gamma / p.beta, w / p.beta, p.ctx)


def mu_inverse(p: Phi1Params) -> Phi1Params:
    """(alpha, beta, gamma) -> (beta / (alpha gamma), omega / gamma, alpha)."""
    if p.alpha == 0 or p.beta == 0 or p.gamma == 0:
        raise ZeroParameter("mu^-1 needs alpha, beta, gamma nonzero")
    w = p.ctx.omega
    return Phi1Params(p.beta / (p.alpha * p.gamma), w / p.gamma, p.alpha, p.ctx)


def verify_z4(p: Phi1Params) -> IdentityCheck:
    """Evaluate 2phi1 along the mu-orbit X, muX, mu^2X, mu^3X.

    Residuals reported: Phi0 Phi1 = N, Phi0 = Phi2, Phi1 = Phi3, Phi2 Phi3 = N,
    and mu^4 X = X on the parameters.
    """
    N = p.ctx.N
    orbit_params = [p]
    for _ in range(4):
        orbit_params.append(mu_transform(orbit_params[-1]))
    ev = _Tracker()
    vals = [ev(q.spec()) for q in orbit_params[:4]]
    residuals = {
        "phi0*phi1=N": _rel(vals[0] * vals[1], N),
        "phi0=phi2": _rel(vals[0], vals[2]),
        "phi1=phi3": _rel(vals[1], vals[3]),
        "phi2*phi3=N": _rel(vals[2] * vals[3], N),
    }
    back = orbit_params[4]
    param_res = max(_rel(x, y) for x, y in zip(back.as_tuple(), p.as_tuple()))
    return IdentityCheck(
        "z4",
        vals[0] * vals[1],
        N,
        max(residuals.values()),
        {"values": vals, "residuals": residuals, "mu4_residual": param_res},
        ev.condition,
    )


def product_form_table(p: Phi1Params, kind: str = "W") -> WeightTable:
    """W(n)/W(0) = gamma^n (alpha; omega)_n / (beta; omega)_n for n = 0..N-1."""
    ctx = p.ctx
    vals = []
    for n in range(ctx.N):
        vals.append(p.gamma**n * pochhammer(p.alpha, n, ctx) / pochhammer(p.beta, n, ctx))
    return WeightTable(tuple(vals), kind)


def fourier_dual(w: WeightTable, ctx: UnityContext) -> WeightTable:
    """W^(k) = sum_n omega^(n k) W(n)."""
    N = ctx.N
    if len(w) != N:
        raise ValueError(f"weight table has length {len(w)}, expected {N}")
    out = []
    for k in range(N):
        out.append(ctx.fsum([ctx.root(n * k) * w.values[n] for n in range(N)]))
    return WeightTable(tuple(out), "dual")


def recurrence_check(p: Phi1Params, n: int) -> IdentityCheck:
    """Phi(gamma omega^n) / Phi(gamma) against gamma^^n (alpha^; omega)_n / (beta^; omega)_n."""
    ctx = p.ctx
    hat = mu_transform(p)
    shifted = HypSpec([p.alpha], [p.beta], p.gamma * ctx.root(n), ctx)
    ev = _Tracker()
    lhs = ev(shifted) / ev(p.spec())
    m = n % ctx.N
    rhs = hat.gamma**m * pochhammer(hat.alpha, m, ctx) / pochhammer(hat.beta, m, ctx)
    cond = ev.condition * factor_sensitivity(hat.spec())
    return IdentityCheck("recurrence", lhs, rhs, _rel(lhs, rhs), {"n": n}, cond)


def convolution_3phi2(p: Phi2Params) -> IdentityCheck:
    """3phi2(gamma1 gamma2) = N^-1 sum_k 2phi1(omega^-k gamma1) 2phi1(omega^k gamma2)."""
    ctx = p.ctx
    a1, b1, g1 = p.first.as_tuple()
    a2, b2, g2 = p.second.as_tuple()
    ev = _Tracker()
    lhs = ev(p.spec())
    parts = []
    for k in range(ctx.N):
        f1 = ev(HypSpec([a1], [b1], ctx.root(-k) * g1, ctx))
        f2 = ev(HypSpec([a2], [b2], ctx.root(k) * g2, ctx))
        parts.append(f1 * f2)
    rhs = ctx.fsum(parts) / ctx.N
    mass = sum(abs(complex(t)) for t in parts) / ctx.N
    cond = max(ev.condition, mass / abs(complex(rhs)) if rhs != 0 else float("inf"))
    return IdentityCheck("convolution", lhs, rhs, _rel(lhs, rhs), {}, cond)


def _transformed(p: Phi2Params) -> Phi2Params:
    return Phi2Params(mu_inverse(p.first), mu_transform(p.second))


def _inverse_transformed(p: Phi2Params) -> Phi2Params:
    return Phi2Params(mu_transform(p.first), mu_inverse(p.second))


def transform_3phi2(p: Phi2Params) -> tuple[Phi2Params, object, IdentityCheck]:
    """3phi2(X) = A * 3phi2(X~) with A = N^-1 2phi1(X_1) 2phi1(X_2).

    X~ = (mu^-1 X_1, mu X_2):
        alpha~1 = beta1/(alpha1 gamma1), beta~1 = omega/gamma1, gamma~1 = alpha1,
        alpha~2 = gamma2, beta~2 = omega alpha2 gamma2/beta2, gamma~2 = omega/beta2,
    so the new argument is gamma~1 gamma~2 = omega alpha1 / beta2.
    """
    ctx = p.ctx
    new = _transformed(p)
    ev = _Tracker()
    scale = ev(p.first.spec()) * ev(p.second.spec()) / ctx.N
    lhs = ev(p.spec())
    rhs = scale * ev(new.spec())
    return new, scale, IdentityCheck("transform-3phi2", lhs, rhs, _rel(lhs, rhs), {}, ev.condition)


def m_transform(p: Phi2Params) -> tuple[Phi2Params, object, IdentityCheck]:
    """Inverse of ``transform_3phi2``: X -> (mu X_1, mu^-1 X_2).

    The scale is written on the image side, 3phi2(X) = N 3phi2(X') /
    (2phi1(X'_1) 2phi1(X'_2)), so that X is the tilde-image of X'.
    """
    ctx = p.ctx
    new = _inverse_transformed(p)
    ev = _Tracker()
    scale = ctx.N / (ev(new.first.spec()) * ev(new.second.spec()))
    lhs = ev(p.spec())
    rhs = scale * ev(new.spec())
    return new, scale, IdentityCheck("m-transform", lhs, rhs, _rel(lhs, rhs), {}, ev.condition)


def iota_swap(p: Phi2Params) -> Phi2Params:
    """Exchange alpha1 <-> alpha2, re-pairing the gammas.

    gamma3 = Delta(beta1)/Delta(alpha2), gamma4 = Delta(beta2)/Delta(alpha1),
    on whatever Delta branches the input gammas used: gamma3 = gamma1
    Delta(alpha1)/Delta(alpha2) leaves gamma3 gamma4 = gamma1 gamma2 exactly.
    """
    ctx = p.ctx
    a1, b1, g1 = p.first.as_tuple()
    a2, b2, g2 = p.second.as_tuple()
    d1, d2 = delta(a1, ctx), delta(a2, ctx)
    return Phi2Params(Phi1Params(a2, b1, g1 * d1 / d2, ctx), Phi1Params(a1, b2, g2 * d2 / d1, ctx))


def _key(p: Phi2Params, digits: int) -> tuple:
    out = []
    for v in p.as_tuple():
        c = complex(v)
        out.append((round(c.real, digits), round(c.imag, digits)))
    return tuple(out)


def orbit(p: Phi2Params, limit: int = 500, digits: int = 8) -> list[Phi2Params]:
    """Breadth-first closure of p under iota, M and M^-1.

    Parameter sets are identified after rounding to ``digits`` decimals;
    exploration stops after ``limit`` distinct sets.
    """
    seen = {_key(p, digits): p}
    queue = [p]
    moves = (iota_swap, _transformed, _inverse_transformed)
    while queue and len(seen) < limit:
        q = queue.pop(0)
        for move in moves:
            r = move(q)
            key = _key(r, digits)
            if key not in seen and len(seen) < limit:
                seen[key] = r
                queue.append(r)
    return list(seen.values())


def iter_k_shifts(p: Phi2Params) -> Iterator[Phi2Params]:
    """All N^2 re-choices omega^s gamma1, omega^t gamma2 of the gamma branches."""
    ctx = p.ctx
    a1, b1, g1 = p.first.as_tuple()
    a2, b2, g2 = p.second.as_tuple()
    for s in range(ctx.N):
        for t in range(ctx.N):
            yield Phi2Params(
                Phi1Params(a1, b1, g1 * ctx.root(s), ctx), Phi1Params(a2, b2, g2 * ctx.root(t), ctx)
            )
