"""Randomised identity sweeps shared by the command line and the test suite.

Every sample draws from its own generator seeded by (seed, identity, N,
index), so results do not depend on evaluation order and a sweep can be
split over processes without changing its output.
"""

from __future__ import annotations

import cmath
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import chiral_potts as cp
from .branched import BranchedValue
from .context import DEFAULT_CONFIG, NumericConfig, UnityContext, phase
from .errors import (
    BranchPoint,
    OnBoundary,
    OnCut,
    PoleInDenominator,
    SectorBoundary,
    SectorViolation,
    ZeroArgument,
    ZeroParameter,
)
from .fermat import affine_to_fermat, psi_direct, psi_via_phi, translate_psi
from .series import is_cyclic, phi_condition, precision_for
from .summation import (
    Region,
    SummationInput,
    classify_region,
    closed_form_unphased,
    derived_quantities,
    direct_sum,
    phase_exponent,
)
from .transformations import (
    Phi1Params,
    Phi2Params,
    convolution_3phi2,
    fourier_dual,
    m_transform,
    mu_transform,
    product_form_table,
    recurrence_check,
    transform_3phi2,
    verify_z4,
)

SCHEMA_VERSION = "1.0"

# rejections that mean "this random point sits on a cut or a pole", not a failure
SKIPPABLE = (
    OnCut,
    OnBoundary,
    BranchPoint,
    PoleInDenominator,
    SectorBoundary,
    SectorViolation,
    ZeroArgument,
    ZeroParameter,
)

MAX_ATTEMPTS = 200


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple
    samples: int
    seed: int = 0
    tolerance: float = 1e-10
    magnitude: tuple = (0.1, 3.0)
    numeric: NumericConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        lo, hi = self.magnitude
        if not 0 < lo <= hi:
            raise ValueError("magnitude range must satisfy 0 < lo <= hi")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if any(n < 2 for n in self.n_values):
            raise ValueError("N must be >= 2")


@dataclass
class IdentityReport:
    identity: str
    N: int
    index: int
    params: dict
    lhs: complex
    rhs: complex
    residual: float
    tolerance: float
    dps: int | None = None
    rejected: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "N": self.N,
            "index": self.index,
            "params": encode(self.params),
            "lhs": encode(self.lhs),
            "rhs": encode(self.rhs),
            "residual": self.residual,
            "pass": self.passed,
            "dps": self.dps,
            "rejected": self.rejected,
            "meta": encode(self.meta),
        }


def encode(obj):
    """JSON-ready copy: complex -> [re, im], tuples -> lists, enums -> value."""
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if hasattr(obj, "value") and hasattr(obj, "name"):
        return obj.value
    try:
        c = complex(obj)
    except TypeError:
        return str(obj)
    return [c.real, c.imag]


def sample_rng(seed: int, identity: str, N: int, index: int) -> random.Random:
    return random.Random(f"{seed}/{identity}/{N}/{index}")


def random_complex(rng: random.Random, lo: float, hi: float) -> complex:
    """Log-uniform modulus in [lo, hi], uniform angle."""
    r = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    return r * cmath.exp(1j * rng.uniform(0.0, 2 * math.pi))


def _adaptive(run, ctx: UnityContext, target: float):
    """run(ctx) -> list of IdentityCheck; redone in higher precision when the
    worst cancellation ratio says double precision cannot reach ``target``."""
    checks = run(ctx)
    dps = precision_for(max(c.condition for c in checks), target, ctx.N)
    if dps is not None:
        checks = run(ctx.with_dps(dps))
    return checks, dps


# ---- samplers: (rng, ctx, cfg) -> IdentityReport fields --------------------


def allowed_phases(im_positive: bool, m: int, n: int, k: int, N: int) -> set:
    if im_positive:
        return {0, k % N, (m - n + k) % N}
    return {0, (-k) % N, (n - m - k) % N}


def summation_point(alpha: complex, beta: complex, k: int, ctx: UnityContext, tolerance: float) -> dict:
    """Closed form against the direct sum at one point, with phase bookkeeping."""
    N = ctx.N
    inp = SummationInput.from_values(alpha, beta, k, ctx)
    tag = classify_region(inp)
    d = derived_quantities(inp)
    s_cls = phase_exponent(tag, d.m, d.n, d.k, N)
    unphased = closed_form_unphased(inp)
    closed = complex(ctx.root(s_cls)) * unphased
    direct, dps = direct_sum(inp, target=tolerance)
    s_oracle = round(N * phase(direct / unphased) / (2 * math.pi)) % N
    oracle_res = abs(direct - complex(ctx.root(s_oracle)) * unphased) / abs(direct)
    return {
        "closed": closed,
        "direct": direct,
        "residual": abs(closed - direct) / abs(direct),
        "dps": dps,
        "region": tag.label,
        "im_alpha_positive": tag.im_alpha_positive,
        "m": d.m,
        "n": d.n,
        "k": d.k,
        "phase_classifier": s_cls,
        "phase_oracle": s_oracle,
        "oracle_residual": oracle_res,
        "phase_allowed": s_oracle in allowed_phases(tag.im_alpha_positive, d.m, d.n, d.k, N),
        "agree": s_cls == s_oracle,
    }


def _summation(rng, ctx, cfg):
    lo, hi = cfg.magnitude
    alpha, beta = random_complex(rng, lo, hi), random_complex(rng, lo, hi)
    k = rng.randrange(ctx.N)
    r = summation_point(alpha, beta, k, ctx, cfg.tolerance)
    meta = {key: r[key] for key in r if key not in ("closed", "direct", "residual", "dps")}
    return {"alpha": alpha, "beta": beta, "k": k}, r["closed"], r["direct"], r["residual"], r["dps"], meta


def _phi1(rng, ctx, cfg) -> tuple:
    lo, hi = cfg.magnitude
    return random_complex(rng, lo, hi), random_complex(rng, lo, hi), rng.randrange(ctx.N)


def _z4(rng, ctx, cfg):
    a, b, k = _phi1(rng, ctx, cfg)
    (chk,), dps = _adaptive(lambda c: [verify_z4(Phi1Params.from_branch(a, b, k, c))], ctx, cfg.tolerance)
    meta = {"residuals": chk.extra["residuals"], "mu4_residual": chk.extra["mu4_residual"]}
    return {"alpha": a, "beta": b, "k": k}, chk.lhs, chk.rhs, chk.residual, dps, meta


def _recurrence(rng, ctx, cfg):
    a, b, k = _phi1(rng, ctx, cfg)
    n = rng.randrange(ctx.N + 1)
    (chk,), dps = _adaptive(lambda c: [recurrence_check(Phi1Params.from_branch(a, b, k, c), n)], ctx, cfg.tolerance)
    return {"alpha": a, "beta": b, "k": k, "n": n}, chk.lhs, chk.rhs, chk.residual, dps, {}


def _phi2(rng, ctx, cfg):
    raw = [_phi1(rng, ctx, cfg) for _ in range(2)]

    def build(c):
        return Phi2Params(Phi1Params.from_branch(*raw[0], c), Phi1Params.from_branch(*raw[1], c))

    params = {"alpha1": raw[0][0], "beta1": raw[0][1], "k1": raw[0][2], "alpha2": raw[1][0], "beta2": raw[1][1], "k2": raw[1][2]}
    return build, params


def _convolution(rng, ctx, cfg):
    build, params = _phi2(rng, ctx, cfg)
    (chk,), dps = _adaptive(lambda c: [convolution_3phi2(build(c))], ctx, cfg.tolerance)
    return params, chk.lhs, chk.rhs, chk.residual, dps, {}


def _roundtrip_residual(a: Phi2Params, b: Phi2Params) -> float:
    worst = 0.0
    for u, v in zip(a.as_tuple(), b.as_tuple()):
        u, v = complex(u), complex(v)
        worst = max(worst, abs(u - v) / max(1.0, abs(v)))
    return worst


def _transform(rng, ctx, cfg):
    build, params = _phi2(rng, ctx, cfg)
    holder = {}

    def run(c):
        p = build(c)
        new, _, chk = transform_3phi2(p)
        back, _, _ = m_transform(new)
        holder["roundtrip"] = _roundtrip_residual(back, p)
        return [chk]

    (chk,), dps = _adaptive(run, ctx, cfg.tolerance)
    meta = {"identity_residual": chk.residual, "roundtrip_residual": holder["roundtrip"]}
    return params, chk.lhs, chk.rhs, max(chk.residual, holder["roundtrip"]), dps, meta


def _m_transform(rng, ctx, cfg):
    build, params = _phi2(rng, ctx, cfg)
    holder = {}

    def run(c):
        p = build(c)
        new, _, chk = m_transform(p)
        back, _, _ = transform_3phi2(new)
        holder["roundtrip"] = _roundtrip_residual(back, p)
        return [chk]

    (chk,), dps = _adaptive(run, ctx, cfg.tolerance)
    meta = {"identity_residual": chk.residual, "roundtrip_residual": holder["roundtrip"]}
    return params, chk.lhs, chk.rhs, max(chk.residual, holder["roundtrip"]), dps, meta


def random_rapidity(rng, ctx, moduli: cp.Moduli, cfg) -> cp.RapidityPoint:
    lo, hi = cfg.magnitude
    t = random_complex(rng, lo, hi)
    choice = rng.choice([cp.LambdaChoice.INSIDE, cp.LambdaChoice.OUTSIDE])
    return cp.solve_rapidity(moduli, t, ctx, choice, rng.randrange(ctx.N), rng.randrange(ctx.N))


def _point_params(p: cp.RapidityPoint) -> dict:
    return {"t": complex(p.t), "choice": p.choice.value, "indices": list(p.indices)}


def _weights(rng, ctx, cfg):
    """Curve equations, n = N periodicity, product-form bridge and dual structure."""
    N = ctx.N
    moduli = cp.Moduli.from_kprime(rng.uniform(0.1, 0.9))
    p, q = random_rapidity(rng, ctx, moduli, cfg), random_rapidity(rng, ctx, moduli, cfg)
    dps = precision_for(cp.weight_sensitivity([p, q]), cfg.tolerance, N)
    if dps is not None:
        hi = ctx.with_dps(dps)
        p, q = p.at(hi), q.at(hi)
    curve = max(max(pt.residuals().values()) for pt in (p, q))
    period = float(max(abs(cp.weight_W(p, q, N) - 1), abs(cp.weight_Wbar(p, q, N) - 1)))
    bridge = 0.0
    dual = 0.0
    for kind in ("W", "Wbar"):
        h, res = cp.product_form_residual(p, q, kind)
        bridge = max(bridge, res)
        got = fourier_dual(product_form_table(h), p.ctx).normalized()
        want = product_form_table(mu_transform(h))
        dual = max(dual, max(float(abs(u - v) / max(1.0, abs(v))) for u, v in zip(got.values, want.values)))
    residuals = {"curve": curve, "periodicity": period, "product_form": bridge, "dual_structure": dual}
    params = {"kprime": moduli.kprime.real, "p": _point_params(p), "q": _point_params(q)}
    return params, cp.weight_W(p, q, N), 1.0, max(residuals.values()), dps, residuals


def _star_triangle(rng, ctx, cfg):
    moduli = cp.Moduli.from_kprime(rng.uniform(0.1, 0.9))
    pts = [random_rapidity(rng, ctx, moduli, cfg) for _ in range(3)]
    const, report = cp.star_triangle_check(*pts)
    dps = precision_for(report.condition * cp.weight_sensitivity(pts), cfg.tolerance, ctx.N)
    if dps is not None:
        hi = ctx.with_dps(dps)
        const, report = cp.star_triangle_check(*(pt.at(hi) for pt in pts))
    worst = max(report.ratios.values(), key=lambda v: abs(v - const))
    params = {"kprime": moduli.kprime.real, "p": _point_params(pts[0]), "q": _point_params(pts[1]), "r": _point_params(pts[2])}
    return params, const, worst, report.spread, dps, {"constant": const}


def _psi(rng, ctx, cfg):
    lo, hi = cfg.magnitude
    r = rng.randint(1, 3)
    pts = [affine_to_fermat(BranchedValue.principal(random_complex(rng, lo, hi), ctx), ctx) for _ in range(2 * r)]
    numer, denom = pts[:r], pts[r:]
    n = rng.randrange(ctx.N)

    spec, _ = translate_psi(numer, denom, n)
    cyclic = is_cyclic(spec)
    dps = precision_for(phi_condition(spec), cfg.tolerance, ctx.N)
    c = ctx if dps is None else ctx.with_dps(dps)
    lhs = complex(psi_direct(numer, denom, n, c))
    rhs = complex(psi_via_phi(numer, denom, n, c))
    params = {
        "r": r,
        "n": n,
        "numer": [[pt.x, pt.y, pt.z, pt.l, pt.m] for pt in numer],
        "denom": [[pt.x, pt.y, pt.z, pt.l, pt.m] for pt in denom],
    }
    meta = {"cyclic": cyclic.ok, "cyclic_residual": cyclic.residual}
    res = abs(lhs - rhs) / abs(lhs) if lhs != 0 else abs(rhs)
    if not cyclic.ok:
        res = max(res, float("inf"))
    return params, lhs, rhs, res, dps, meta


SAMPLERS = {
    "summation": _summation,
    "z4": _z4,
    "recurrence": _recurrence,
    "convolution": _convolution,
    "transform-3phi2": _transform,
    "m-transform": _m_transform,
    "weights": _weights,
    "star-triangle": _star_triangle,
    "psi-translation": _psi,
}


def run_sample(identity: str, N: int, index: int, cfg: SweepConfig) -> IdentityReport:
    """One report; points rejected as on-cut or on a pole are redrawn."""
    sampler = SAMPLERS[identity]
    ctx = UnityContext(N, cfg.numeric)
    rng = sample_rng(cfg.seed, identity, N, index)
    for rejected in range(MAX_ATTEMPTS):
        try:
            params, lhs, rhs, res, dps, meta = sampler(rng, ctx, cfg)
        except SKIPPABLE:
            continue
        return IdentityReport(identity, N, index, params, complex(lhs), complex(rhs), float(res), cfg.tolerance, dps, rejected, meta)
    raise RuntimeError(f"{identity}: no admissible sample after {MAX_ATTEMPTS} draws")


def _run_chunk(args):
    identity, N, indices, cfg = args
    return [run_sample(identity, N, i, cfg) for i in indices]


def run_sweep(identity: str, cfg: SweepConfig, jobs: int = 1):
    """All reports, in (N, index) order whatever ``jobs`` is."""
    if identity not in SAMPLERS:
        raise ValueError(f"unknown identity {identity!r}")
    tasks = []
    chunk = 250
    for N in cfg.n_values:
        for start in range(0, cfg.samples, chunk):
            tasks.append((identity, N, range(start, min(start + chunk, cfg.samples)), cfg))
    if jobs <= 1:
        for task in tasks:
            yield from _run_chunk(task)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for block in pool.map(_run_chunk, tasks):
            yield from block


@dataclass
class Summary:
    identity: str
    total: int = 0
    passed: int = 0
    rejected: int = 0
    escalated: int = 0
    max_residual: float = 0.0
    per_N: dict = field(default_factory=dict)
    per_region: dict = field(default_factory=dict)
    phase_disagreements: int = 0
    phase_not_allowed: int = 0

    def add(self, r: IdentityReport):
        self.total += 1
        self.passed += r.passed
        self.rejected += r.rejected
        self.escalated += r.dps is not None
        if not r.residual <= self.max_residual:
            self.max_residual = r.residual
        slot = self.per_N.setdefault(r.N, {"samples": 0, "failures": 0, "max_residual": 0.0})
        slot["samples"] += 1
        slot["failures"] += not r.passed
        slot["max_residual"] = max(slot["max_residual"], r.residual)
        if "region" in r.meta:
            reg = self.per_region.setdefault(r.meta["region"], {"samples": 0, "failures": 0})
            reg["samples"] += 1
            reg["failures"] += not r.passed
            self.phase_disagreements += not r.meta["agree"]
            self.phase_not_allowed += not r.meta["phase_allowed"]

    @property
    def failures(self) -> int:
        return self.total - self.passed

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.phase_disagreements == 0 and self.phase_not_allowed == 0

    def to_json(self) -> dict:
        out = {
            "type": "summary",
            "identity": self.identity,
            "samples": self.total,
            "passed": self.passed,
            "failures": self.failures,
            "rejected_draws": self.rejected,
            "escalated": self.escalated,
            "max_residual": self.max_residual,
            "per_N": {str(k): v for k, v in sorted(self.per_N.items())},
        }
        if self.per_region:
            out["per_region"] = {k: self.per_region[k] for k in sorted(self.per_region)}
            out["phase_disagreements"] = self.phase_disagreements
            out["phase_not_allowed"] = self.phase_not_allowed
        return out


def summarize(identity: str, reports) -> Summary:
    s = Summary(identity)
    for r in reports:
        s.add(r)
    return s


def region_counts(reports) -> dict:
    counts = {r.value: 0 for r in Region}
    for rep in reports:
        counts[rep.meta["region"]] += 1
    return counts
