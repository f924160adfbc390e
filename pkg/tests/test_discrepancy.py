import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszcap.discrepancy import (
    DiscrepancyReport,
    _cap_sup_given_centers,
    _direct_dsq_per_center,
    _sqrt_clamped,
    cap_sup_discrepancy_lower,
    cui_freeden,
    l2_cap_discrepancy,
    l2_cap_discrepancy_direct,
    leveque_functionals,
    leveque_report,
    mean_distance,
    sample_centers,
    sigma_cap,
    sum_distance_discrepancy,
    weyl_sums,
)
from rieszcap.energy import ball_sphere_ratio, continuous_energy
from rieszcap.errors import (
    DimensionError,
    DomainError,
    NegativeVarianceError,
    RangeError,
)
from rieszcap.pointsets import PointSet, fibonacci_sphere, random_uniform, roots_of_unity

# Frozen Monte-Carlo fixture: cap-sup lower bound for a single point at the
# north pole, 64 centers from seed 123.  Independently equal to
# (1 + max_c |<c, x>|)/2 over those centers.
CAPSUP_SINGLE_64_SEED123 = 0.9956483807180742


def _antipodal_s2():
    return PointSet(2, np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))


def _antipodal_s1():
    return PointSet(1, np.array([[1.0, 0.0], [-1.0, 0.0]]))


def _single(d):
    x = np.zeros(d + 1)
    x[-1] = 1.0
    return PointSet(d, x[None, :])


def _octahedron():
    eye = np.eye(3)
    return PointSet(2, np.concatenate([eye, -eye], axis=0))


def _rotate(X, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((X.d + 1, X.d + 1))
    q, r = np.linalg.qr(m)
    q *= np.sign(np.diag(r))
    return PointSet(X.d, X.points @ q.T, norm_tol=1e-9), q


# ---------------------------------------------------------------- sigma_cap

def test_sigma_cap_values():
    assert sigma_cap(2, 0.0) == 0.5
    assert sigma_cap(2, -1.0) == 1.0
    assert sigma_cap(2, 1.0) == 0.0
    assert sigma_cap(1, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert sigma_cap(1, -1.0) == pytest.approx(1.0, abs=1e-15)


def test_sigma_cap_s3_closed_form():
    # d=3: sigma = (arccos t - t sqrt(1-t^2)) / pi
    for t in (-0.9, -0.3, 0.0, 0.2, 0.7, 0.99):
        closed = (math.acos(t) - t * math.sqrt(1.0 - t * t)) / math.pi
        assert sigma_cap(3, t) == pytest.approx(closed, abs=1e-14)


def test_sigma_cap_higher_dim_monotone_and_normalized():
    for d in (4, 5, 8):
        ts = np.linspace(-1.0, 1.0, 41)
        vals = [sigma_cap(d, t) for t in ts]
        assert vals[0] == pytest.approx(1.0, abs=1e-12)
        assert vals[-1] == pytest.approx(0.0, abs=1e-12)
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        assert sigma_cap(d, 0.0) == pytest.approx(0.5, abs=1e-12)


def test_sigma_cap_domain():
    with pytest.raises(DomainError):
        sigma_cap(2, 1.5)
    with pytest.raises(DomainError):
        sigma_cap(2, float("nan"))


# ------------------------------------------------------------- closed L2

def test_l2_closed_single_point():
    # one point: mean distance 0, D^2 = ratio * V_{-1}
    for d in (1, 2, 3):
        rep = l2_cap_discrepancy(_single(d))
        expect = ball_sphere_ratio(d) * continuous_energy(d, -1.0)
        assert rep.kind == "L2CapClosed"
        assert rep.value == pytest.approx(math.sqrt(expect), abs=1e-15)
    assert l2_cap_discrepancy(_single(2)).diagnostics["d_squared"] == pytest.approx(
        1.0 / 3.0, abs=1e-15
    )
    assert l2_cap_discrepancy(_single(1)).diagnostics["d_squared"] == pytest.approx(
        4.0 / math.pi**2, abs=1e-15
    )


def test_l2_closed_antipodal_s1():
    rep = l2_cap_discrepancy(_antipodal_s1())
    assert rep.diagnostics["d_squared"] == pytest.approx(
        4.0 / math.pi**2 - 1.0 / math.pi, abs=1e-15
    )


def test_stolarsky_identity_random():
    # mean distance + (1/ratio) * D^2 recovers the continuous energy
    for d in (1, 2, 3):
        for n in (2, 17, 250):
            X = random_uniform(d, n, seed=100 * d + n)
            rep = l2_cap_discrepancy(X)
            lhs = rep.diagnostics["mean_distance"] + rep.diagnostics["d_squared"] / ball_sphere_ratio(d)
            assert abs(lhs - continuous_energy(d, -1.0)) < 1e-10


def test_l2_closed_rotation_invariant():
    X = random_uniform(2, 40, seed=4)
    Y, _ = _rotate(X, 9)
    assert l2_cap_discrepancy(Y).value == pytest.approx(
        l2_cap_discrepancy(X).value, abs=1e-10
    )


@settings(max_examples=30, deadline=None)
@given(
    d=st.integers(min_value=1, max_value=3),
    n=st.integers(min_value=1, max_value=25),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_l2_closed_nonnegative_and_consistent(d, n, seed):
    X = random_uniform(d, n, seed=seed)
    rep = l2_cap_discrepancy(X)
    assert rep.value >= 0.0
    assert rep.value == pytest.approx(math.sqrt(max(rep.diagnostics["d_squared"], 0.0)))


# ------------------------------------------------------------ sqrt clamp

def test_sqrt_clamp_policy():
    assert _sqrt_clamped(4.0, "x") == 2.0
    with pytest.warns(RuntimeWarning):
        assert _sqrt_clamped(-1e-13, "x") == 0.0
    with pytest.raises(NegativeVarianceError):
        _sqrt_clamped(-1e-11, "x")


# ------------------------------------------------------- direct estimator

def test_direct_single_point_s2_per_center():
    # N=1 at the pole: exact per-center integral is 1/6 + u^2/2 with u = <c, x>;
    # the 1/3 closed-form value is its average over centers, not each center.
    one = _single(2)
    C = sample_centers(2, 16, 7)
    per = _direct_dsq_per_center(one, C)
    u = (C @ one.points.T)[:, 0]
    np.testing.assert_allclose(per, 1.0 / 6.0 + 0.5 * u * u, atol=1e-14)


def test_direct_single_point_s2_mean():
    rep = l2_cap_discrepancy_direct(_single(2), 20000, 5)
    dsq = rep.diagnostics["d_squared"]
    se = rep.diagnostics["standard_error_d_squared"]
    assert abs(dsq - 1.0 / 3.0) < 3.0 * se


def test_direct_single_point_s1_mean():
    rep = l2_cap_discrepancy_direct(_single(1), 50000, 3)
    dsq = rep.diagnostics["d_squared"]
    se = rep.diagnostics["standard_error_d_squared"]
    assert abs(dsq - 4.0 / math.pi**2) < 3.0 * se


def test_direct_matches_closed_s2():
    X = random_uniform(2, 50, seed=11)
    rep = l2_cap_discrepancy_direct(X, 4096, 5)
    closed = l2_cap_discrepancy(X).diagnostics["d_squared"]
    se = rep.diagnostics["standard_error_d_squared"]
    assert se > 0.0
    assert abs(rep.diagnostics["d_squared"] - closed) < 3.0 * se


def test_direct_matches_closed_s1():
    X = roots_of_unity(9)
    rep = l2_cap_discrepancy_direct(X, 4096, 21)
    closed = l2_cap_discrepancy(X).diagnostics["d_squared"]
    assert abs(rep.diagnostics["d_squared"] - closed) < 3.0 * rep.diagnostics[
        "standard_error_d_squared"
    ]


def test_direct_quadrature_fallback_s3():
    X = random_uniform(3, 20, seed=2)
    rep = l2_cap_discrepancy_direct(X, 2000, 9)
    closed = l2_cap_discrepancy(X).diagnostics["d_squared"]
    assert abs(rep.diagnostics["d_squared"] - closed) < 3.0 * rep.diagnostics[
        "standard_error_d_squared"
    ]


def test_direct_deterministic_and_seed_sensitive():
    X = random_uniform(2, 12, seed=0)
    a = l2_cap_discrepancy_direct(X, 500, 42)
    b = l2_cap_discrepancy_direct(X, 500, 42)
    c = l2_cap_discrepancy_direct(X, 500, 43)
    assert a.value == b.value
    assert a.value != c.value


def test_direct_rotation_invariant_given_centers():
    # the estimator itself is rotation invariant once centers co-rotate
    X = random_uniform(2, 15, seed=6)
    C = sample_centers(2, 300, 8)
    Y, q = _rotate(X, 13)
    a = _direct_dsq_per_center(X, C)
    b = _direct_dsq_per_center(Y, C @ q.T)
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_direct_center_guard():
    with pytest.raises(DomainError):
        l2_cap_discrepancy_direct(_single(2), 0, 1)


# ---------------------------------------------------------- Cui-Freeden

def test_cui_freeden_single_point():
    rep = cui_freeden(_single(2))
    assert rep.kind == "CuiFreeden"
    assert rep.value == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi)), abs=1e-15)


def test_cui_freeden_antipodal_exact():
    rep = cui_freeden(_antipodal_s2())
    assert rep.diagnostics["d_squared"] == pytest.approx(
        (1.0 - math.log(2.0)) / (4.0 * math.pi), abs=1e-15
    )


def test_cui_freeden_trend_on_spirals():
    vals = [cui_freeden(fibonacci_sphere(n)).value for n in (50, 100, 200, 400)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_cui_freeden_dimension_guard():
    with pytest.raises(DimensionError):
        cui_freeden(roots_of_unity(4))


def test_cui_freeden_rotation_invariant():
    X = random_uniform(2, 30, seed=1)
    Y, _ = _rotate(X, 2)
    assert cui_freeden(Y).value == pytest.approx(cui_freeden(X).value, abs=1e-10)


# ---------------------------------------------------------- sum distance

def test_sum_distance_values():
    assert sum_distance_discrepancy(_single(2)).diagnostics["d_squared"] == pytest.approx(
        4.0 / 3.0, abs=1e-15
    )
    assert sum_distance_discrepancy(_antipodal_s2()).diagnostics["d_squared"] == pytest.approx(
        1.0 / 3.0, abs=1e-12
    )


def test_sum_distance_is_4x_l2():
    for seed in range(20):
        X = random_uniform(2, 25, seed=seed)
        sd = sum_distance_discrepancy(X).diagnostics["d_squared"]
        l2 = l2_cap_discrepancy(X).diagnostics["d_squared"]
        assert abs(sd - 4.0 * l2) < 1e-10


def test_sum_distance_dimension_guard():
    with pytest.raises(DimensionError):
        sum_distance_discrepancy(_single(1))


# ------------------------------------------------------------ Weyl sums

def test_weyl_single_point():
    s = weyl_sums(_single(2), 3)
    for l, s_l in enumerate(s, start=1):
        assert s_l == pytest.approx((2 * l + 1) / (4.0 * math.pi), abs=1e-15)


def test_weyl_octahedron_zeros():
    s = weyl_sums(_octahedron(), 4)
    assert s[0] == 0.0 and s[1] == 0.0 and s[2] == 0.0
    assert s[3] > 0.1  # degree 4 survives the symmetry


def test_weyl_antipodal_odd_degrees_vanish():
    s = weyl_sums(_antipodal_s2(), 5)
    assert s[0] == 0.0 and s[2] == 0.0 and s[4] == 0.0


def test_weyl_resummation_identity():
    # recompute each S_l from scratch with an independent Legendre evaluation
    from rieszcap.special_functions import legendre_P

    X = random_uniform(2, 18, seed=5)
    g = np.clip(X.points @ X.points.T, -1.0, 1.0)
    s = weyl_sums(X, 12)
    for l, s_l in enumerate(s, start=1):
        direct = (2 * l + 1) / (4.0 * math.pi) * float(np.sum(legendre_P(l, g))) / X.n**2
        assert abs(s_l - max(direct, 0.0)) < 1e-12


def test_weyl_nonnegative_random():
    for seed in range(5):
        X = random_uniform(2, 30, seed=seed)
        assert all(s_l >= 0.0 for s_l in weyl_sums(X, 40))


def test_weyl_guards():
    with pytest.raises(RangeError):
        weyl_sums(_single(2), 257)
    with pytest.raises(DomainError):
        weyl_sums(_single(2), 0)
    with pytest.raises(DimensionError):
        weyl_sums(roots_of_unity(4), 3)


def test_weyl_rotation_invariant():
    X = random_uniform(2, 20, seed=3)
    Y, _ = _rotate(X, 4)
    np.testing.assert_allclose(weyl_sums(X, 10), weyl_sums(Y, 10), atol=1e-10)


# --------------------------------------------------------------- LeVeque

def test_leveque_single_point_degree_one():
    lower, upper = leveque_functionals(_single(2), 1)
    # a_1 = Gamma(1/2)/Gamma(7/2) = 8/15, S_1 = 3/(4 pi)
    assert lower == pytest.approx(math.sqrt(2.0 / (5.0 * math.pi)), abs=1e-14)
    assert upper == pytest.approx((3.0 / (4.0 * math.pi)) ** 0.25, abs=1e-14)


def test_leveque_octahedron_degree_three():
    assert leveque_functionals(_octahedron(), 3) == (0.0, 0.0)


def test_leveque_trend():
    lo100, up100 = leveque_functionals(fibonacci_sphere(100), 50)
    lo400, up400 = leveque_functionals(fibonacci_sphere(400), 50)
    assert lo400 < lo100
    assert up400 < up100


def test_leveque_report_shape():
    rep = leveque_report(fibonacci_sphere(64), 20)
    assert rep.kind == "LeVeque"
    assert rep.value == rep.diagnostics["lower_functional"]
    assert rep.diagnostics["degree"] == 20
    assert rep.diagnostics["upper_functional"] > rep.value > 0.0


# --------------------------------------------------------------- cap sup

def test_cap_sup_single_point_fixture():
    rep = cap_sup_discrepancy_lower(_single(2), 64, 123)
    assert rep.kind == "CapSupLower"
    assert rep.value == pytest.approx(CAPSUP_SINGLE_64_SEED123, abs=1e-15)
    # independent oracle: for one point the sup over a center c is (1+|<c,x>|)/2
    C = sample_centers(2, 64, 123)
    u = np.abs(C @ _single(2).points.T)[:, 0]
    assert rep.value == pytest.approx((1.0 + u.max()) / 2.0, abs=1e-15)


def test_cap_sup_antipodal_s1_approaches_half():
    rep = cap_sup_discrepancy_lower(_antipodal_s1(), 5000, 1)
    assert rep.value <= 0.5 + 1e-12
    assert rep.value > 0.499


def test_cap_sup_bounded_by_one():
    for seed in range(5):
        X = random_uniform(2, 15, seed=seed)
        v = cap_sup_discrepancy_lower(X, 200, seed).value
        assert 0.0 <= v <= 1.0


def test_cap_sup_monotone_in_centers():
    X = random_uniform(2, 50, seed=11)
    vals = [cap_sup_discrepancy_lower(X, m, 77).value for m in (10, 50, 100, 400)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_cap_sup_rotation_invariant_given_centers():
    X = random_uniform(1, 9, seed=12)
    C = sample_centers(1, 150, 3)
    Y, q = _rotate(X, 5)
    assert _cap_sup_given_centers(X, C) == pytest.approx(
        _cap_sup_given_centers(Y, C @ q.T), abs=1e-10
    )


def test_cap_sup_dimension_guard():
    X = random_uniform(3, 5, seed=0)
    with pytest.raises(DimensionError):
        cap_sup_discrepancy_lower(X, 10, 0)


# ---------------------------------------------------------------- report

def test_report_to_json_round_trip():
    rep = l2_cap_discrepancy(fibonacci_sphere(30))
    blob = rep.to_json()
    assert set(blob) == {"kind", "value", "diagnostics"}
    assert blob["kind"] == "L2CapClosed"
    assert blob["value"] == rep.value
    blob["diagnostics"]["extra"] = 1
    assert "extra" not in rep.diagnostics  # to_json copies


def test_mean_distance_matches_brute_force():
    X = random_uniform(2, 10, seed=8)
    brute = 0.0
    pts = X.points
    for j in range(10):
        for k in range(10):
            brute += np.linalg.norm(pts[j] - pts[k])
    assert mean_distance(X) == pytest.approx(brute / 100.0, rel=1e-12)
