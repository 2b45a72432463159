import cmath
import itertools
import math
import random

import pytest

from conftest import rel
from cyclichyp.chiral_potts import (
    LambdaChoice,
    Moduli,
    order_parameter,
    product_form_residual,
    solve_rapidity,
    star_triangle_check,
    weight_sensitivity,
    weight_table,
    weight_W,
    weight_Wbar,
    weights_to_hyp,
)
from cyclichyp.context import UnityContext
from cyclichyp.errors import BranchPoint, DerivationMismatch, DomainError, InconsistentRoots
from cyclichyp.series import HypSpec, is_saalschutz, phi_eval
from cyclichyp.transformations import fourier_dual, mu_transform, product_form_table


def random_point(N, kprime, r: random.Random, ctx=None):
    ctx = ctx or UnityContext(N)
    t = math.exp(r.uniform(math.log(0.1), math.log(3))) * cmath.exp(1j * r.uniform(0, 2 * math.pi))
    choice = r.choice(list(LambdaChoice))
    return solve_rapidity(Moduli.from_kprime(kprime), t, ctx, choice, r.randrange(N), r.randrange(N))


def test_moduli():
    m = Moduli.from_kprime(0.6)
    assert abs(m.k - 0.8) < 1e-15
    with pytest.raises(DomainError):
        Moduli(0.5, 0.5)
    with pytest.raises(DomainError):
        Moduli(1, 0)


@pytest.mark.parametrize("N", range(2, 7))
def test_t_zero_inside(N):
    ctx = UnityContext(N)
    m = Moduli.from_kprime(0.6)
    p = solve_rapidity(m, 0, ctx)
    assert abs(p.lam - 0.6) < 1e-15
    assert p.x == 0
    assert rel(p.y, 0.8 ** (1 / N)) < 1e-15
    assert max(p.residuals().values()) < 1e-14


@pytest.mark.parametrize("N", range(2, 7))
def test_t_zero_outside(N):
    ctx = UnityContext(N)
    p = solve_rapidity(Moduli.from_kprime(0.6), 0, ctx, LambdaChoice.OUTSIDE)
    assert rel(p.lam, 1 / 0.6) < 1e-15
    assert p.y == 0
    assert rel(p.x, 0.8 ** (1 / N)) < 1e-15
    assert max(p.residuals().values()) < 1e-14


def test_branch_point():
    # |lambda| = 1 where the discriminant of the lambda quadratic vanishes
    m = Moduli.from_kprime(0.6)
    c_target = 2.0  # lambda + 1/lambda = 2 at lambda = 1
    tN = (1 + 0.36 - 0.6 * c_target) / 0.64
    with pytest.raises(BranchPoint):
        solve_rapidity(m, tN ** (1 / 3), UnityContext(3))


@pytest.mark.parametrize("N", range(2, 7))
def test_random_points_on_curve(N):
    r = random.Random(N)
    for _ in range(200):
        kp = r.uniform(0.1, 0.9)
        try:
            p = random_point(N, kp, r)
        except BranchPoint:
            continue
        assert max(p.residuals().values()) < 1e-10
        assert (abs(p.lam) < 1) == (p.choice is LambdaChoice.INSIDE)


def test_small_t_stays_consistent():
    ctx = UnityContext(5)
    m = Moduli.from_kprime(0.3)
    for t in (1e-3, 1e-6 * (1 + 1j), 1e-9j):
        for choice in LambdaChoice:
            p = solve_rapidity(m, t, ctx, choice)
            assert max(p.residuals().values()) < 1e-12


def test_indices_and_inconsistent_y():
    ctx = UnityContext(4)
    m = Moduli.from_kprime(0.5)
    p = solve_rapidity(m, 0.7 + 0.2j, ctx, x_index=1, mu_index=3)
    assert p.indices[0] == 1 and p.indices[2] == 3
    assert p.at(UnityContext(4, dps=30)).indices == p.indices
    bad = (p.indices[1] + 1) % 4
    with pytest.raises(InconsistentRoots):
        solve_rapidity(m, 0.7 + 0.2j, ctx, x_index=1, mu_index=3, y_index=bad)


def test_extended_point_agrees():
    ctx = UnityContext(3)
    p = solve_rapidity(Moduli.from_kprime(0.6), 0.3 + 0.2j, ctx, LambdaChoice.OUTSIDE, 2, 1)
    hi = p.at(ctx.with_dps(40))
    for a, b in ((p.x, hi.x), (p.y, hi.y), (p.mu, hi.mu)):
        assert rel(a, complex(b)) < 1e-14
    assert max(hi.residuals().values()) < 1e-35


# 40-digit references, k' = 0.6, inside points with zero indices
FROZEN_W = {
    2: (
        [complex(-0.46844566106179656433, -0.17819254937128629202)],
        [complex(3.6101889466405904149, 2.0425628177792723683)],
    ),
    3: (
        [
            complex(-0.1400237632810712185, 0.354384195498375574),
            complex(-0.32643826239826436159, -0.04084680183243626219),
        ],
        [
            complex(2.8121989407893127879, -3.6401806175600132057),
            complex(1.5544419255688053458, -1.1156047987291983142),
        ],
    ),
}


@pytest.mark.parametrize("N", sorted(FROZEN_W))
def test_frozen_weights(N):
    ctx = UnityContext(N)
    m = Moduli.from_kprime(0.6)
    p = solve_rapidity(m, 0.3 + 0.2j, ctx)
    q = solve_rapidity(m, -0.4 + 0.5j, ctx)
    w_ref, wb_ref = FROZEN_W[N]
    assert weight_W(p, q, 0) == 1 and weight_Wbar(p, q, 0) == 1
    for n in range(1, N):
        assert rel(weight_W(p, q, n), w_ref[n - 1]) < 1e-13
        assert rel(weight_Wbar(p, q, n), wb_ref[n - 1]) < 1e-13


@pytest.mark.parametrize("N", range(2, 7))
def test_periodicity_and_negative_index(N):
    r = random.Random(100 + N)
    for _ in range(50):
        try:
            p, q = random_point(N, 0.4, r), random_point(N, 0.4, r)
        except BranchPoint:
            continue
        if weight_sensitivity([p, q]) > 1e4:
            continue
        assert abs(weight_W(p, q, N) - 1) < 1e-10
        assert abs(weight_Wbar(p, q, N) - 1) < 1e-10
        assert weight_W(p, q, -1) == weight_W(p, q, N - 1)


@pytest.mark.parametrize("N", range(2, 7))
@pytest.mark.parametrize("kind", ["W", "Wbar"])
def test_weights_to_hyp(N, kind):
    r = random.Random(200 + N)
    checked = 0
    for _ in range(60):
        try:
            p, q = random_point(N, 0.7, r), random_point(N, 0.7, r)
        except BranchPoint:
            continue
        if weight_sensitivity([p, q]) > 1e4:
            continue
        params = weights_to_hyp(p, q, kind)
        table = product_form_table(params, kind)
        direct = weight_table(p, q, kind)
        for n in range(N):
            assert abs(table[n] - direct[n]) < 1e-10 * max(1.0, abs(direct[n]))
        # Fourier dual of a product form is the product form of mu X
        dual = fourier_dual(table, p.ctx).normalized()
        hat = product_form_table(mu_transform(params), kind)
        for n in range(N):
            assert abs(dual[n] - hat[n]) < 1e-10 * max(1.0, abs(hat[n]))
        checked += 1
    assert checked > 30


def test_weights_to_hyp_rejects_mismatch():
    ctx = UnityContext(3)
    m = Moduli.from_kprime(0.6)
    p = solve_rapidity(m, 0.3 + 0.2j, ctx)
    q = solve_rapidity(m, -0.4 + 0.5j, ctx)
    _, worst = product_form_residual(p, q, "W")
    assert worst < 1e-14
    with pytest.raises(DerivationMismatch):
        weights_to_hyp(p, q, "W", tol=-1.0)
    with pytest.raises(ValueError):
        product_form_residual(p, q, "V")


@pytest.mark.parametrize("N", range(2, 6))
def test_star_triangle(N):
    r = random.Random(300 + N)
    done = 0
    while done < 10:
        try:
            p, q, s = (random_point(N, 0.55, r) for _ in range(3))
        except BranchPoint:
            continue
        if weight_sensitivity([p, q, s]) > 1e4:
            continue
        const, report = star_triangle_check(p, q, s)
        assert report.spread < 1e-10
        assert len(report.ratios) == N**3
        assert report.constant == const
        done += 1


def test_star_triangle_spin_shift():
    N = 4
    r = random.Random(7)
    p, q, s = (random_point(N, 0.3, r) for _ in range(3))
    for a, b, c in itertools.islice(itertools.product(range(N), repeat=3), 10):
        base, _ = star_triangle_check(p, q, s, spins=(a, b, c))
        shifted, _ = star_triangle_check(p, q, s, spins=(a + 1, b + 1, c + 1))
        assert rel(base, shifted) < 1e-13


def test_star_triangle_fails_off_curve_labels():
    # mixing moduli breaks integrability: the ratio is no longer spin independent
    N = 3
    ctx = UnityContext(N)
    p = solve_rapidity(Moduli.from_kprime(0.3), 0.5 + 0.1j, ctx)
    q = solve_rapidity(Moduli.from_kprime(0.7), -0.2 + 0.6j, ctx)
    s = solve_rapidity(Moduli.from_kprime(0.5), 0.4 - 0.9j, ctx)
    _, report = star_triangle_check(p, q, s)
    assert report.spread > 1e-3


def test_order_parameter():
    assert order_parameter(1, 2, 0.6) == pytest.approx(0.9457416090031758133, rel=1e-15)
    assert order_parameter(1, 3, 0.6) == pytest.approx(0.9516219295946543884, rel=1e-15)
    for N in range(2, 9):
        assert order_parameter(N, N, 0.4) == 1.0
        for n in range(1, N):
            assert order_parameter(n, N, 0.4) == order_parameter(N - n, N, 0.4)
    with pytest.raises(DomainError):
        order_parameter(0, 3, 0.5)
    with pytest.raises(DomainError):
        order_parameter(1, 3, 1.0)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_star_sum_is_saalschutzian(N):
    # the star sum over d, started at d = c, is a cyclic 4phi3 whose three
    # parameter pairs come from the product forms of the three weights
    ctx = UnityContext(N)
    r = random.Random(400 + N)
    p, q, s = (random_point(N, 0.55, r, ctx) for _ in range(3))
    a, b, c = 1, 2, 0
    # weights in a spin difference that decreases with d: n -> n - 1 flips the pair
    al, be, ga = weights_to_hyp(q, s, "Wbar").as_tuple()
    A1, B1, f1 = ctx.root(1 - b) / be, ctx.root(1 - b) / al, be / (al * ga)
    al, be, ga = weights_to_hyp(p, s, "W").as_tuple()
    A2, B2, f2 = ctx.root(1 - a) / be, ctx.root(1 - a) / al, be / (al * ga)
    al, be, ga = weights_to_hyp(p, q, "Wbar").as_tuple()
    A3, B3, f3 = al * ctx.root(-c), be * ctx.root(-c), ga
    spec = HypSpec([A1, A2, A3], [B1, B2, B3], f1 * f2 * f3, ctx)
    assert is_saalschutz(spec)
    wb_qr, w_pr, wb_pq = weight_table(q, s, "Wbar"), weight_table(p, s, "W"), weight_table(p, q, "Wbar")
    star = sum(wb_qr[b - d] * w_pr[a - d] * wb_pq[d - c] for d in range(N))
    first = wb_qr[b - c] * w_pr[a - c] * wb_pq[0]
    assert rel(star / first, phi_eval(spec)) < 1e-10
