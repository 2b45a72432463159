"""Integrable chiral Potts model: rapidity curve, Boltzmann weights,
star-triangle check and order parameters.

A rapidity is a point (x, y, mu) with

    y^N = (1 - k' lam) / k,   x^N = (1 - k'/lam) / k,   mu^N = lam,
    lam + 1/lam = (1 + k'^2 - k^2 t^N) / k',   t = x y.

Given t the quadratic fixes lam up to lam <-> 1/lam; x, y, mu are then
fixed up to powers of omega, tied together only by x y = t.
"""

from __future__ import annotations

import cmath
import enum
import itertools
from dataclasses import dataclass, field

from .branched import pochhammer
from .context import UnityContext
from .errors import (
    BranchPoint,
    DerivationMismatch,
    DomainError,
    InconsistentRoots,
    PoleInDenominator,
    ZeroDenominator,
    ZeroParameter,
)
from .transformations import Phi1Params, WeightTable

__all__ = [
    "Moduli",
    "LambdaChoice",
    "RapidityPoint",
    "solve_rapidity",
    "weight_W",
    "weight_Wbar",
    "weight_table",
    "weight_sensitivity",
    "weights_to_hyp",
    "product_form_residual",
    "StarTriangleReport",
    "star_triangle_check",
    "order_parameter",
]


@dataclass(frozen=True)
class Moduli:
    k: complex
    kprime: complex

    def __post_init__(self):
        if abs(self.k**2 + self.kprime**2 - 1) > 1e-10:
            raise DomainError("moduli must satisfy k^2 + k'^2 = 1")
        if self.k == 0 or self.kprime == 0:
            raise DomainError("k and k' must be nonzero")

    @classmethod
    def from_kprime(cls, kprime: float) -> "Moduli":
        """Real moduli with 0 < k' < 1 and k = sqrt(1 - k'^2)."""
        return cls(complex(cmath.sqrt(1 - kprime**2)), complex(kprime))


class LambdaChoice(enum.Enum):
    INSIDE = "inside"  # |lam| < 1
    OUTSIDE = "outside"  # |lam| > 1


@dataclass(frozen=True)
class RapidityPoint:
    x: complex
    y: complex
    mu: complex
    lam: complex
    t: complex
    moduli: Moduli
    choice: LambdaChoice
    indices: tuple = (0, 0, 0)  # omega powers applied to principal x, y, mu
    ctx: UnityContext = field(default=None, repr=False, compare=False)

    def at(self, ctx: UnityContext) -> "RapidityPoint":
        return _resolve(self, ctx)

    def residuals(self) -> dict:
        N = self.ctx.N
        k, kp = self.ctx.num(self.moduli.k), self.ctx.num(self.moduli.kprime)
        lam = self.lam

        def rel(a, b):
            return float(abs(a - b) / max(1.0, abs(b)))

        return {
            "y^N": rel(self.y**N, (1 - kp * lam) / k),
            "x^N": rel(self.x**N, (1 - kp / lam) / k),
            "mu^N": rel(self.mu**N, lam),
            "lambda": rel(lam + 1 / lam, (1 + kp**2 - k**2 * self.t**N) / kp),
            "t=xy": rel(self.x * self.y, self.t),
        }


def _resolve(p: RapidityPoint, ctx: UnityContext) -> RapidityPoint:
    """The same labelled point recomputed in the precision of ``ctx``."""
    x_index, y_index, mu_index = p.indices
    return solve_rapidity(p.moduli, p.t, ctx, p.choice, x_index, mu_index, y_index)


def _root(v, N: int, ctx: UnityContext):
    """Principal N-th root in the precision of ``ctx``."""
    if v == 0:
        return ctx.num(0)
    return ctx.exp(ctx.log(v) / N)


def solve_rapidity(
    moduli: Moduli,
    t: complex,
    ctx: UnityContext,
    choice: LambdaChoice = LambdaChoice.INSIDE,
    x_index: int = 0,
    mu_index: int = 0,
    y_index: int | None = None,
) -> RapidityPoint:
    """Point on the curve with x y = t.

    x and mu are the principal N-th roots times omega^x_index, omega^mu_index;
    the power of omega on y is solved from x y = t unless given (then it must
    be consistent).  When t = 0 (x = 0 inside, y = 0 outside) any y_index
    works and 0 is used.
    """
    N = ctx.N
    k, kp = ctx.num(moduli.k), ctx.num(moduli.kprime)
    t = ctx.num(t)
    c = (1 + kp**2 - k**2 * t**N) / kp
    disc = _root(c * c - 4, 2, ctx)
    # roots multiply to 1: take the larger one without cancellation
    big = c + disc if abs(c + disc) >= abs(c - disc) else c - disc
    inside = 2 / big
    if abs(abs(inside) - 1) < 1e-9:
        raise BranchPoint(f"|lambda| = 1 at t = {t!r}: the two lambda choices coincide")
    lam = inside if choice is LambdaChoice.INSIDE else 1 / inside
    w = ctx.omega
    xN = (1 - kp / lam) / k
    yN = (1 - kp * lam) / k
    # x^N y^N = t^N; the smaller of the two suffers cancellation near t = 0
    if abs(xN) < abs(yN) and yN != 0:
        xN = t**N / yN
    elif xN != 0:
        yN = t**N / xN
    x = _root(xN, N, ctx) * w**x_index
    y0 = _root(yN, N, ctx)
    if x == 0 or y0 == 0:
        # t = 0: x y = t holds for every power of omega on y
        s = 0 if y_index is None else y_index
    else:
        s = min(range(N), key=lambda s: abs(x * y0 * w**s - t))
        if abs(x * y0 * w**s - t) > 1e-9 * max(1.0, abs(t)):
            raise InconsistentRoots("no omega power of y gives x y = t")
        if y_index is not None and y_index % N != s:
            raise InconsistentRoots(f"y_index {y_index} incompatible with x y = t (needs {s})")
    y = y0 * w**s
    mu = _root(lam, N, ctx) * w**mu_index
    return RapidityPoint(x, y, mu, lam, t, moduli, choice, (x_index % N, s % N, mu_index % N), ctx)


def weight_W(p: RapidityPoint, q: RapidityPoint, n: int) -> complex:
    """W_pq(n)/W_pq(0) = (mu_p/mu_q)^n prod_{j=1}^n (y_q - x_p w^j)/(y_p - x_q w^j).

    n >= 0 uses the product as written (so n = N tests periodicity);
    negative n is reduced mod N.
    """
    ctx = p.ctx
    if n < 0:
        n %= ctx.N
    w = ctx.omega
    r = (p.mu / q.mu) ** n
    for j in range(1, n + 1):
        den = p.y - q.x * w**j
        if abs(den) < ctx.config.pole_tol:
            raise PoleInDenominator(f"y_p - x_q omega^{j} = 0", order=j)
        r *= (q.y - p.x * w**j) / den
    return r


def weight_Wbar(p: RapidityPoint, q: RapidityPoint, n: int) -> complex:
    """Wbar_pq(n)/Wbar_pq(0) = (mu_p mu_q)^n prod_{j=1}^n (w x_p - x_q w^j)/(y_q - y_p w^j)."""
    ctx = p.ctx
    if n < 0:
        n %= ctx.N
    w = ctx.omega
    r = (p.mu * q.mu) ** n
    for j in range(1, n + 1):
        den = q.y - p.y * w**j
        if abs(den) < ctx.config.pole_tol:
            raise PoleInDenominator(f"y_q - y_p omega^{j} = 0", order=j)
        r *= (w * p.x - q.x * w**j) / den
    return r


def weight_sensitivity(points) -> float:
    """Worst amplification (|a| + |b|) / |a - b| of rounding in the curve
    coordinates through one factor a - b of the W and Wbar products, over all
    ordered pairs of ``points``.  Equal labels give exactly cancelling factors
    only at true poles and zeros, which the weights themselves reject.
    """
    worst = 1.0
    for p in points:
        w = complex(p.ctx.omega)
        for q in points:
            if q is p:
                continue
            px, py, qx, qy = (complex(v) for v in (p.x, p.y, q.x, q.y))
            for j in range(1, p.ctx.N + 1):
                wj = w**j
                for a, b in ((qy, px * wj), (py, qx * wj), (w * px, qx * wj), (qy, py * wj)):
                    d = abs(a - b)
                    worst = max(worst, (abs(a) + abs(b)) / d if d > 0 else float("inf"))
    return worst


def weight_table(p: RapidityPoint, q: RapidityPoint, kind: str = "W") -> WeightTable:
    f = weight_W if kind == "W" else weight_Wbar
    return WeightTable(tuple(f(p, q, n) for n in range(p.ctx.N)), kind)


def product_form_residual(p: RapidityPoint, q: RapidityPoint, kind: str = "W") -> tuple[Phi1Params, float]:
    """Product-form parameters with W(n)/W(0) = gamma^n (alpha;w)_n / (beta;w)_n,
    and the worst relative mismatch against the direct weight over n = 0..N.

    Matching the factors term by term:
      W:    alpha = w x_p / y_q,  beta = w x_q / y_p,  gamma = mu_p y_q / (mu_q y_p)
      Wbar: alpha = x_q / x_p,    beta = w y_p / y_q,  gamma = w mu_p mu_q x_p / y_q
    """
    ctx = p.ctx
    w = ctx.omega
    if kind == "W":
        if q.y == 0 or p.y == 0:
            raise ZeroParameter("y_p, y_q must be nonzero")
        alpha, beta, gamma = w * p.x / q.y, w * q.x / p.y, p.mu * q.y / (q.mu * p.y)
        f = weight_W
    elif kind == "Wbar":
        if p.x == 0 or q.y == 0:
            raise ZeroParameter("x_p, y_q must be nonzero for the Wbar product form")
        alpha, beta, gamma = q.x / p.x, w * p.y / q.y, w * p.mu * q.mu * p.x / q.y
        f = weight_Wbar
    else:
        raise ValueError(f"unknown weight kind {kind!r}")
    params = Phi1Params(alpha, beta, gamma, ctx)
    worst = 0.0
    for n in range(ctx.N + 1):
        prod = gamma**n * pochhammer(alpha, n, ctx) / pochhammer(beta, n, ctx)
        direct = f(p, q, n)
        worst = max(worst, float(abs(prod - direct) / max(1.0, abs(direct))))
    return params, worst


def weights_to_hyp(p: RapidityPoint, q: RapidityPoint, kind: str = "W", tol: float = 1e-10) -> Phi1Params:
    """Phi1Params whose product form reproduces the ``kind`` weight at every n."""
    params, worst = product_form_residual(p, q, kind)
    if worst > tol:
        raise DerivationMismatch(f"product form differs from the {kind} weight by {worst:.2e}")
    return params


@dataclass(frozen=True)
class StarTriangleReport:
    ratios: dict  # (a, b, c) -> L/R
    spread: float  # max |ratio_i - ratio_j| / |ratio at (0, 0, 0)|
    condition: float = 1.0  # worst cancellation ratio of a star sum

    @property
    def constant(self) -> complex:
        return self.ratios[(0, 0, 0)]


def star_triangle_check(p: RapidityPoint, q: RapidityPoint, r: RapidityPoint, spins=None):
    """Ratio of star to triangle side of the star-triangle relation.

    L(a,b,c) = sum_d Wbar_qr(b-d) W_pr(a-d) Wbar_pq(d-c)
    R(a,b,c) = W_pq(a-b) Wbar_pr(b-c) W_qr(a-c)

    With ``spins`` given returns (L/R, None) for that triple; otherwise all
    N^3 triples are enumerated and (constant, report) returned.
    """
    ctx = p.ctx
    N = ctx.N
    worst = [1.0]
    # weights depend on spin differences mod N only: tabulate once
    w_pq, w_pr, w_qr = (weight_table(u, v, "W") for u, v in ((p, q), (p, r), (q, r)))
    wb_pq, wb_pr, wb_qr = (weight_table(u, v, "Wbar") for u, v in ((p, q), (p, r), (q, r)))

    def ratio(a, b, c):
        terms = [wb_qr[b - d] * w_pr[a - d] * wb_pq[d - c] for d in range(N)]
        star = ctx.fsum(terms)
        mass = sum(abs(complex(t)) for t in terms)
        worst[0] = max(worst[0], mass / abs(complex(star)) if star != 0 else float("inf"))
        tri = w_pq[a - b] * wb_pr[b - c] * w_qr[a - c]
        if tri == 0:
            raise ZeroDenominator("triangle side vanishes")
        return star / tri

    if spins is not None:
        return ratio(*spins), None
    ratios = {s: ratio(*s) for s in itertools.product(range(N), repeat=3)}
    ref = ratios[(0, 0, 0)]
    # the diameter only needs ~1e-16 relative accuracy: take it in doubles
    vals = [complex(v) for v in ratios.values()]
    diameter = max(abs(u - v) for u in vals for v in vals)
    report = StarTriangleReport(ratios, float(diameter / abs(ref)), worst[0])
    return ref, report


def order_parameter(n: int, N: int, kprime: float) -> float:
    """<sigma_0^n> = (1 - k'^2)^(n (N - n) / (2 N^2))."""
    if not 0 < kprime < 1:
        raise DomainError("k' must lie in (0, 1)")
    if not 1 <= n <= N:
        raise DomainError(f"n must lie in 1..{N}")
    return (1 - kprime**2) ** (n * (N - n) / (2 * N * N))
