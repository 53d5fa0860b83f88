import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fwldg.driver import convergence_orders
from fwldg.field import (
    DGField, dump_csv, norms, project_gauss_radau, project_l2, sample, traces)
from fwldg.mesh import build_mesh, gauss_legendre


def _order_study(proj, ns=(20, 40, 80, 160), k=2):
    errs = []
    for n in ns:
        mesh = build_mesh(0.0, 2 * np.pi, n)
        errs.append(norms(proj(mesh, k), np.sin).l2)
    return convergence_orders(list(ns), errs)


def test_constant_is_reproduced():
    mesh = build_mesh(0.0, 1.0, 5)
    u = project_l2(lambda x: np.ones_like(x), mesh, 3)
    assert np.allclose(u.coeffs[:, 0], 1.0, rtol=0, atol=1e-15)
    assert np.allclose(u.coeffs[:, 1:], 0.0, rtol=0, atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_linear_function_is_reproduced(k):
    mesh = build_mesh(0.0, 1.0, 6)
    u = project_l2(lambda x: x, mesh, k)
    nodes = gauss_legendre(k + 3).nodes
    x = mesh.physical_points(nodes)
    assert np.max(np.abs(u.at_reference(nodes) - x)) <= 1e-14


def test_l2_projection_order():
    orders = _order_study(lambda m, k: project_l2(np.sin, m, k))
    assert all(o >= 2.9 for o in orders[1:])


@pytest.mark.parametrize("side", ["minus", "plus"])
def test_gauss_radau_order(side):
    orders = _order_study(lambda m, k: project_gauss_radau(np.sin, m, k, side))
    assert all(o >= 2.9 for o in orders[1:])


def test_gauss_radau_minus_endpoint():
    mesh = build_mesh(0.0, 2 * np.pi, 20)
    u = project_gauss_radau(np.sin, mesh, 2, "minus")
    assert np.max(np.abs(u.right_values - np.sin(mesh.cell_edges[1:]))) <= 1e-13


@pytest.mark.parametrize("side", ["minus", "plus"])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_gauss_radau_reproduces_polynomials(side, k, rng):
    coef = rng.normal(size=k + 1)
    g = lambda x: np.polyval(coef, x)  # noqa: E731
    mesh = build_mesh(-1.0, 2.0, 7, 0.4, rng)
    pg = project_gauss_radau(g, mesh, k, side)
    pl = project_l2(g, mesh, k)
    assert np.allclose(pg.coeffs, pl.coeffs, rtol=0, atol=1e-12)
    x = np.linspace(-0.99, 1.99, 50)
    assert np.allclose(pg(x), g(x), rtol=0, atol=1e-12)


def test_gauss_radau_rejects_bad_side():
    with pytest.raises(ValueError):
        project_gauss_radau(np.sin, build_mesh(0, 1, 4), 2, "left")


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(0.5, 4), c=st.floats(-1, 1),
       k=st.integers(1, 4), side=st.sampled_from(["minus", "plus"]))
def test_gauss_radau_conditions_random_smooth(a, b, c, k, side):
    g = lambda x: a * np.sin(b * x + c) + np.cos(x) ** 2  # noqa: E731
    mesh = build_mesh(0.0, 3.0, 9)
    u = project_gauss_radau(g, mesh, k, side)
    if side == "minus":
        assert np.allclose(u.right_values, g(mesh.cell_edges[1:]), rtol=0, atol=1e-12)
    else:
        assert np.allclose(u.left_values, g(mesh.cell_edges[:-1]), rtol=0, atol=1e-12)
    # orthogonal to P^{k-1}: lower modes equal the L2 ones
    l2 = project_l2(g, mesh, k)
    assert np.allclose(u.coeffs[:, :k], l2.coeffs[:, :k], rtol=0, atol=1e-13)


def test_projection_idempotent(rng):
    mesh = build_mesh(0.0, 2 * np.pi, 12, 0.3, rng)
    u = project_l2(lambda x: np.exp(np.sin(x)), mesh, 3)
    again = project_l2(u, mesh, 3)
    assert np.allclose(again.coeffs, u.coeffs, rtol=0, atol=1e-14)


def test_kinked_projection_split():
    mesh = build_mesh(-1.0, 1.0, 5)
    g = lambda x: np.abs(x - 0.13)  # noqa: E731
    u = project_l2(g, mesh, 2, kinks=[0.13])
    # cells without the kink see a linear function
    assert np.allclose(u.means[[0, 1, 3, 4]], g(mesh.cell_centers[[0, 1, 3, 4]]), atol=1e-15)
    # the kinked cell is integrated exactly (piecewise linear)
    j = 2
    lo, hi = mesh.cell_edges[j], mesh.cell_edges[j + 1]
    mean = ((0.13 - lo) ** 2 + (hi - 0.13) ** 2) / 2 / (hi - lo)
    assert abs(u.means[j] - mean) <= 1e-15


def test_traces_of_constant():
    mesh = build_mesh(0.0, 1.0, 5)
    tr = traces(DGField(mesh, np.tile([2.5, 0.0, 0.0], (5, 1))))
    assert np.all(tr.jump == 0) and np.all(tr.average == 2.5)
    assert len(tr) == 5


def test_wrap_interface_jump():
    mesh = build_mesh(0.0, 1.0, 2)
    u = project_l2(lambda x: x, mesh, 1)
    pair = traces(u)[0]
    assert pair.minus == pytest.approx(1.0, abs=1e-14)
    assert pair.plus == pytest.approx(0.0, abs=1e-14)
    assert pair.jump == pytest.approx(-1.0, abs=1e-14)
    assert traces(u)[1].jump == pytest.approx(0.0, abs=1e-14)


def test_traces_are_local(random_field):
    mesh = build_mesh(0.0, 1.0, 8)
    u = random_field(mesh, 2)
    v = u.copy()
    v.coeffs[3] += 1.0
    changed = np.nonzero((traces(u).minus != traces(v).minus)
                         | (traces(u).plus != traces(v).plus))[0]
    assert list(changed) == [3, 4]


def test_norms_examples():
    mesh = build_mesh(0.0, 1.0, 4)
    two = DGField(mesh, np.tile([2.0, 0.0], (4, 1)))
    n = norms(two)
    assert n.l2 == pytest.approx(2.0, rel=1e-14) and n.linf == pytest.approx(2.0)
    z = norms(DGField.zeros(mesh, 2))
    assert z.l2 == z.linf == z.boundary_l2 == 0.0

    mesh = build_mesh(0.0, 2 * np.pi, 40)
    u = project_l2(np.sin, mesh, 2)
    assert abs(norms(u).l2 ** 2 - np.pi) <= 1e-6


def test_boundary_norm_formula(random_field):
    mesh = build_mesh(0.0, 1.0, 6)
    u = random_field(mesh, 2)
    expected = math.sqrt(np.sum(u.right_values**2) + np.sum(u.left_values**2))
    assert norms(u).boundary_l2 == pytest.approx(expected, rel=1e-14)


def test_inverse_inequality_constant_bounded(rng):
    k = 3
    constants = []
    for n in (8, 16, 32, 64, 128):
        mesh = build_mesh(0.0, 1.0, n, 0.3, rng)
        worst = 0.0
        for _ in range(20):
            u = DGField(mesh, rng.normal(size=(n, k + 1)))
            nu = norms(u)
            worst = max(worst, nu.boundary_l2 * math.sqrt(mesh.h) / nu.l2)
        constants.append(worst)
    # sharp constant on a uniform mesh is (k+1)/sqrt(...); only boundedness matters
    assert max(constants) < 2 * (k + 1) * math.sqrt(2)
    assert max(constants) / min(constants) < 1.6


def test_field_arithmetic_and_checks(random_field):
    mesh = build_mesh(0.0, 1.0, 4)
    u, v = random_field(mesh, 2), random_field(mesh, 2)
    assert np.allclose((u + v - v).coeffs, u.coeffs)
    assert np.allclose((u * 2.0).coeffs, 2 * u.coeffs)
    assert np.allclose((-u).coeffs, -u.coeffs)
    with pytest.raises(ValueError):
        u + random_field(mesh, 1)
    with pytest.raises(ValueError):
        u + random_field(build_mesh(0.0, 1.0, 5), 2)


def test_inner_and_integral_exact(random_field):
    mesh = build_mesh(0.0, 2.0, 5)
    u, v = random_field(mesh, 3), random_field(mesh, 3)
    xs, ws = [], []
    rule = gauss_legendre(8)
    x = mesh.physical_points(rule.nodes)
    w = 0.5 * mesh.cell_widths[:, None] * rule.weights[None, :]
    ux, vx = u.at_reference(rule.nodes), v.at_reference(rule.nodes)
    assert u.inner(v) == pytest.approx(np.sum(w * ux * vx), rel=1e-13)
    assert u.integral() == pytest.approx(np.sum(w * ux), rel=1e-13, abs=1e-14)
    assert np.allclose(u(x.ravel()), ux.ravel())


def test_sample_and_csv(tmp_path):
    mesh = build_mesh(0.0, 1.0, 3)
    u = project_l2(lambda x: x, mesh, 1)
    x, values = sample(u, 4)
    assert x.size == 12 and np.allclose(values, x)
    path = tmp_path / "u.csv"
    dump_csv(u, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,u" and len(lines) == 1 + 3 * 8
