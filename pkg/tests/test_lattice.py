import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import qbessel as qb
from qbessel.lattice import jackson_weighted

qs = st.sampled_from([0.3, 0.5, 0.7, 0.8, 0.9])


def _fn(grid, func):
    return qb.LatticeFn(grid, func(grid.points))


def test_build_grid_powers_of_half():
    g = qb.build_grid(0.5, -2, 2)
    assert g.points.tolist() == [4.0, 2.0, 1.0, 0.5, 0.25]
    assert g.indices.tolist() == [-2, -1, 0, 1, 2]


def test_build_grid_q09_matches_exponentiation():
    g = qb.build_grid(0.9, 0, 3)
    assert g.points.tolist() == [0.9 ** k for k in range(4)]
    np.testing.assert_allclose(g.points, [1, 0.9, 0.81, 0.729], rtol=1e-15)


@pytest.mark.parametrize("args", [(1.0, -1, 1), (0.0, 0, 3), (-0.5, 0, 3), (1.5, 0, 2), (0.5, 3, 3),
                                  (0.5, 4, 1), (0.5, -2000, 0), (0.5, 0, 2000)])
def test_build_grid_rejects(args):
    with pytest.raises(qb.DomainError):
        qb.build_grid(*args)


def test_grid_points_reproducible():
    a = qb.build_grid(0.8, -12, 150).points
    b = qb.build_grid(0.8, -12, 150).points
    assert a.tobytes() == b.tobytes()
    assert np.all(np.diff(a) < 0)


def test_lattice_fn_validation():
    g = qb.build_grid(0.5, 0, 3)
    assert qb.lattice_fn(g, lambda x: 2 * x).values.tolist() == [2.0, 1.0, 0.5, 0.25]
    with pytest.raises(qb.DomainError):
        qb.LatticeFn(g, [1.0, 2.0])
    with pytest.raises(qb.DomainError):
        qb.LatticeFn(g, [1.0, np.nan, 0.0, 0.0])


def test_integral_zero_and_point_mass():
    g = qb.build_grid(0.5, -5, 60)
    assert qb.jackson_integral_0_to_inf(qb.zeros(g)) == 0.0
    assert qb.jackson_integral_0_to_inf(qb.point_mass(g, 0, 3.25)) == pytest.approx(0.5 * 3.25, rel=1e-16)


def test_integral_of_x_on_nonnegative_part():
    g = qb.build_grid(0.5, 0, 60)
    val = qb.jackson_integral_0_to_inf(_fn(g, lambda x: x))
    assert abs(val - 2.0 / 3.0) < 1e-15


def test_integral_0_to_a_examples():
    g = qb.build_grid(0.5, -5, 60)
    assert abs(qb.jackson_integral_0_to_a(_fn(g, np.ones_like), 0) - 1.0) < 1e-14
    assert abs(qb.jackson_integral_0_to_a(_fn(g, lambda x: x), 0) - 2.0 / 3.0) < 1e-14
    assert qb.jackson_integral_0_to_a(qb.zeros(g), 3) == 0.0
    with pytest.raises(qb.DomainError):
        qb.jackson_integral_0_to_a(qb.zeros(g), 61)


def test_integral_a_to_b_examples():
    g = qb.build_grid(0.5, -5, 60)
    one = _fn(g, np.ones_like)
    assert qb.jackson_integral_a_to_b(one, 2, 2) == 0.0
    assert qb.jackson_integral_a_to_b(one, 1, 0) == pytest.approx(0.5, abs=1e-15)
    assert qb.jackson_integral_a_to_b(qb.zeros(g), 1, 0) == 0.0


def test_q_derivative_examples():
    g = qb.build_grid(0.5, -5, 20)
    ident = _fn(g, lambda x: x)
    for k in range(-5, 20):
        assert qb.q_derivative(ident, k) == pytest.approx(1.0, rel=1e-15)
    assert qb.q_derivative(_fn(g, lambda x: 7.0 + 0 * x), 3) == 0.0
    assert qb.q_derivative(_fn(g, lambda x: x * x), 0) == pytest.approx(1.5, rel=1e-15)
    with pytest.raises(IndexError):
        qb.q_derivative(ident, 20)


def test_norm_examples(rng):
    g = qb.build_grid(0.5, -5, 60)
    v = qb.VParams(0.5, 0)
    assert qb.norm_qpv(qb.zeros(g), 2, v) == 0.0
    assert qb.norm_qpv(qb.point_mass(g, 0), 2, v) == pytest.approx(math.sqrt(0.5), rel=1e-15)
    f = qb.LatticeFn(g, rng.standard_normal(g.size))
    for c in (-3.5, 0.25, 17.0):
        assert qb.norm_qpv(c * f, 2, v) == pytest.approx(abs(c) * qb.norm_qpv(f, 2, v), rel=1e-14)
    with pytest.raises(qb.DomainError):
        qb.norm_qpv(f, 0.5, v)


def test_nonnegative_only_mask():
    g = qb.build_grid(0.5, -5, 60, nonnegative_only=True)
    f = qb.point_mass(g, -2)
    assert qb.jackson_integral_0_to_inf(f) == 0.0
    assert qb.jackson_integral_0_to_inf(qb.point_mass(g, 0)) == 0.5


@given(q=qs, seed=st.integers(0, 2 ** 32 - 1), a=st.floats(-10, 10), b=st.floats(-10, 10))
def test_linearity(q, seed, a, b):
    r = np.random.default_rng(seed)
    g = qb.build_grid(q, -10, 40)
    f = qb.LatticeFn(g, r.standard_normal(g.size))
    h = qb.LatticeFn(g, r.standard_normal(g.size))
    lhs = qb.jackson_integral_0_to_inf(a * f + b * h)
    rhs = a * qb.jackson_integral_0_to_inf(f) + b * qb.jackson_integral_0_to_inf(h)
    scale = (abs(a) * jackson_weighted(np.abs(f.values), g, 0) + abs(b) * jackson_weighted(np.abs(h.values), g, 0))
    assert abs(lhs - rhs) <= 1e-14 * max(scale, 1e-300)


@given(q=qs, seed=st.integers(0, 2 ** 32 - 1))
def test_product_rule(q, seed):
    r = np.random.default_rng(seed)
    g = qb.build_grid(q, -6, 12)
    f = qb.LatticeFn(g, r.standard_normal(g.size))
    h = qb.LatticeFn(g, r.standard_normal(g.size))
    fh = f * h
    for k in range(-6, 12):
        i = k - g.n_min
        lhs = qb.q_derivative(fh, k)
        rhs = f.values[i + 1] * qb.q_derivative(h, k) + qb.q_derivative(f, k) * h.values[i]
        scale = (abs(f.values[i + 1] * qb.q_derivative(h, k)) + abs(qb.q_derivative(f, k) * h.values[i]))
        assert abs(lhs - rhs) <= 1e-13 * scale


@given(q=qs, seed=st.integers(0, 2 ** 32 - 1))
def test_quotient_rule(q, seed):
    r = np.random.default_rng(seed)
    g = qb.build_grid(q, -6, 12)
    f = qb.LatticeFn(g, r.standard_normal(g.size))
    h = qb.LatticeFn(g, r.uniform(0.5, 2.0, g.size) * r.choice([-1.0, 1.0], g.size))
    ratio = qb.LatticeFn(g, f.values / h.values)
    for k in range(-6, 12):
        i = k - g.n_min
        df, dh = qb.q_derivative(f, k), qb.q_derivative(h, k)
        rhs = (df * h.values[i] - f.values[i] * dh) / (h.values[i] * h.values[i + 1])
        scale = (abs(df * h.values[i]) + abs(f.values[i] * dh)) / abs(h.values[i] * h.values[i + 1])
        assert abs(qb.q_derivative(ratio, k) - rhs) <= 1e-13 * scale


@given(q=qs, seed=st.integers(0, 2 ** 32 - 1), ja=st.integers(-8, 4), span=st.integers(1, 10))
def test_integration_by_parts(q, seed, ja, span):
    r = np.random.default_rng(seed)
    g = qb.build_grid(q, -10, 30)
    f = qb.LatticeFn(g, r.standard_normal(g.size))
    h = qb.LatticeFn(g, r.standard_normal(g.size))
    # a = q**jb < b = q**ja
    jb = ja + span
    df = qb.LatticeFn(g, np.append(qb.q_derivative_values(f), 0.0))
    dh = qb.LatticeFn(g, np.append(qb.q_derivative_values(h), 0.0))
    fq = qb.LatticeFn(g, np.append(f.values[1:], 0.0))
    lhs = qb.jackson_integral_a_to_b(h * df, jb, ja)
    boundary = f.at(ja) * h.at(ja) - f.at(jb) * h.at(jb)
    rhs = boundary - qb.jackson_integral_a_to_b(fq * dh, jb, ja)
    sl = slice(ja - g.n_min, jb - g.n_min)
    scale = abs(boundary) + (1 - q) * np.sum(np.abs((h.values * df.values)[sl] * g.points[sl])
                                             + np.abs((fq.values * dh.values)[sl] * g.points[sl]))
    assert abs(lhs - rhs) <= 1e-12 * scale


@given(q=qs, seed=st.integers(0, 2 ** 32 - 1))
def test_integrals_deterministic(q, seed):
    r = np.random.default_rng(seed)
    g = qb.build_grid(q, -10, 40)
    f = qb.LatticeFn(g, r.standard_normal(g.size))
    assert qb.jackson_integral_0_to_inf(f) == qb.jackson_integral_0_to_inf(qb.LatticeFn(g, f.values.copy()))


@given(q=qs, seed=st.integers(0, 2 ** 32 - 1), j=st.integers(-10, 40))
def test_split_integral(q, seed, j):
    # int_0^inf = int_0^a + (1-q) sum over points above a
    r = np.random.default_rng(seed)
    g = qb.build_grid(q, -10, 40)
    f = qb.LatticeFn(g, r.standard_normal(g.size))
    head = (1 - q) * math.fsum(f.values[: j - g.n_min] * g.points[: j - g.n_min])
    total = qb.jackson_integral_0_to_inf(f)
    scale = (1 - q) * np.sum(np.abs(f.values) * g.points)
    assert abs(head + qb.jackson_integral_0_to_a(f, j) - total) <= 1e-14 * scale
