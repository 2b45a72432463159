import cmath
import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import complexes, rel, small_N
from cyclichyp.context import UnityContext
from cyclichyp.errors import DegenerateAlpha, PoleInDenominator
from cyclichyp.series import (
    HypSpec,
    factor_sensitivity,
    is_cyclic,
    is_saalschutz,
    phi_condition,
    phi_eval,
    phi_terms,
    precision_for,
)


def test_spec_shape():
    ctx = UnityContext(3)
    with pytest.raises(ValueError):
        HypSpec([], [], 1, ctx)
    with pytest.raises(ValueError):
        HypSpec([0.1, 0.2], [0.3], 1, ctx)
    assert HypSpec([0.1, 0.2], [0.3, 0.4], 1, ctx).p == 2


def test_phi_frozen():
    # 40-digit reference for N = 3, alpha = 0.3+0.1i, beta = 0.2-0.5i,
    # z = Delta(beta)/Delta(alpha)
    ctx = UnityContext(3)
    a, b = 0.3 + 0.1j, 0.2 - 0.5j
    z = cmath.exp(cmath.log(1 - b**3) / 3) / cmath.exp(cmath.log(1 - a**3) / 3)
    val = phi_eval(HypSpec([a], [b], z, ctx))
    assert rel(val, complex(2.8466396998852204891, -0.93300260048405197459)) < 1e-14


def test_phi_terms_count():
    for N in (2, 5, 9):
        assert len(phi_terms(HypSpec([0.3], [0.7j], 0.5, UnityContext(N)))) == N


@pytest.mark.parametrize("N", range(2, 9))
def test_equal_parameters_geometric(N):
    # alpha = beta collapses the series to sum z^l
    ctx = UnityContext(N)
    a = 0.4 - 0.9j
    assert abs(phi_eval(HypSpec([a], [a], ctx.omega, ctx))) < 1e-13
    assert rel(phi_eval(HypSpec([a], [a], 1, ctx)), N) < 1e-14


@given(complexes, complexes, complexes, complexes, complexes, small_N)
@settings(max_examples=100)
def test_permutation_invariance(a1, a2, b1, b2, z, N):
    ctx = UnityContext(N)
    try:
        s = phi_eval(HypSpec([a1, a2], [b1, b2], z, ctx))
    except PoleInDenominator:
        return
    t = phi_eval(HypSpec([a2, a1], [b2, b1], z, ctx))
    u = phi_eval(HypSpec([a2, a1], [b1, b2], z, ctx))
    assert s == t or rel(s, t) < 1e-12
    assert rel(s, u) < 1e-12 * max(1.0, phi_condition(HypSpec([a1, a2], [b1, b2], z, ctx)))


def test_pole_in_denominator():
    ctx = UnityContext(4)
    with pytest.raises(PoleInDenominator) as e:
        phi_eval(HypSpec([0.5], [ctx.root(-2)], 1, ctx))
    assert e.value.order == 3
    # beta = 1 makes the l = 1 factor vanish
    with pytest.raises(PoleInDenominator):
        phi_eval(HypSpec([0.5], [1.0], 1, ctx))
    # beta = omega^-(N-1) = omega only enters at l = N, which is never reached
    phi_eval(HypSpec([0.5], [ctx.omega], 1, ctx))


def test_is_cyclic():
    ctx = UnityContext(3)
    a, b = 0.3 + 0.2j, -0.5 + 1.1j
    z = ((1 - b**3) / (1 - a**3)) ** (1 / 3)
    check = is_cyclic(HypSpec([a], [b], z, ctx))
    assert check and check.residual < 1e-14
    for s in range(3):
        assert is_cyclic(HypSpec([a], [b], z * ctx.root(s), ctx))
    assert not is_cyclic(HypSpec([a], [b], 1.01 * z, ctx))
    with pytest.raises(DegenerateAlpha):
        is_cyclic(HypSpec([ctx.omega], [b], z, ctx))


def test_is_saalschutz():
    ctx = UnityContext(5)
    a1, a2, b1 = 0.3 + 0.4j, 1.2 - 0.1j, 0.7j
    b2 = ctx.root(2) * a1 * a2 / b1
    assert is_saalschutz(HypSpec([a1, a2], [b1, b2], ctx.omega, ctx))
    bad = is_saalschutz(HypSpec([a1, a2], [b1, b2], 1, ctx))
    assert not bad and bad.detail == "z != omega"
    assert not is_saalschutz(HypSpec([a1, a2], [b1, 1.1 * b2], ctx.omega, ctx))


def test_factor_sensitivity():
    ctx = UnityContext(3)
    assert factor_sensitivity(HypSpec([0.0], [0.0], 1, ctx)) == 1.0
    near = HypSpec([1 - 1e-6], [0.3], 1, ctx)
    assert factor_sensitivity(near) > 1e5


def test_condition_flags_cancellation():
    ctx = UnityContext(4)
    a = 0.4 - 0.9j
    # all terms equal: no cancellation, only the factor sensitivity remains
    spec = HypSpec([a], [a], 1, ctx)
    assert phi_condition(spec) == pytest.approx(factor_sensitivity(spec))
    # terms summing to zero
    assert phi_condition(HypSpec([a], [a], 1j, ctx)) > 1e12


def test_precision_for():
    assert precision_for(1.0, 1e-10, 5) is None
    digits = precision_for(1e8, 1e-10, 5)
    assert digits is not None and digits >= 28
    assert precision_for(float("inf"), 1e-10, 5) == 60
    # a tighter target asks for more digits
    assert precision_for(1e8, 1e-14, 5) > digits


def test_extended_precision_agrees():
    ctx = UnityContext(5)
    spec = HypSpec([0.3 + 0.1j, 1.7j], [0.2 - 0.5j, -0.4], 0.8 * cmath.exp(0.3j), ctx)
    hi = phi_eval(spec.at(ctx.with_dps(40)))
    assert rel(phi_eval(spec), complex(hi)) < 1e-13


@given(st.lists(st.tuples(complexes, complexes), min_size=1, max_size=3), small_N)
@settings(max_examples=50)
def test_terms_periodic_when_cyclic(pairs, N):
    # the summand continued past l = N repeats with period N
    ctx = UnityContext(N)
    alphas = [a for a, _ in pairs]
    betas = [b for _, b in pairs]
    assume(all(abs(1 - a**N) > 1e-3 and abs(1 - b**N) > 1e-3 for a, b in pairs))
    num = 1
    den = 1
    for a, b in pairs:
        num *= 1 - b**N
        den *= 1 - a**N
    z = (num / den) ** (1 / N)
    assert is_cyclic(HypSpec(alphas, betas, z, ctx))
    t = 1
    for l in range(N):
        w = ctx.root(l)
        for a, b in pairs:
            t *= (1 - a * w) / (1 - b * w)
        t *= z
    assert abs(t - 1) < 1e-9
