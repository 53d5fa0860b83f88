import numpy as np
import pytest

from fwldg.driver import convergence_orders
from fwldg.field import DGField, norms, project_l2
from fwldg.mesh import build_mesh
from fwldg.scheme2 import (
    SchemeFW2, assemble_elliptic_fw2, energy_identity_residual, reconstruct_u, rhs_fw2)

KINDS = ("d2", "c2")


def _smooth_state(rng, mesh, k):
    a = rng.normal(size=3)
    g = lambda x: a[0] * np.sin(2 * np.pi * x / mesh.length) + a[1] * np.cos(  # noqa: E731
        4 * np.pi * x / mesh.length) + a[2]
    return project_l2(g, mesh, k)


def _random(rng, mesh, k):
    return DGField(mesh, rng.normal(size=(mesh.n_cells, k + 1)))


@pytest.mark.parametrize("kind", KINDS)
def test_constant_fixed_point(kind):
    mesh = build_mesh(0.0, 1.0, 6, 0.3, np.random.default_rng(2))
    solver = assemble_elliptic_fw2(mesh, 2, kind)
    w = DGField(mesh, np.tile([3.0, 0.0, 0.0], (6, 1)))
    u, r = reconstruct_u(solver, w, check=True)
    assert np.allclose(u.coeffs, w.coeffs, rtol=0, atol=1e-12)
    assert np.max(np.abs(r.coeffs)) <= 1e-12


@pytest.mark.parametrize(("kind", "k"), [("d2", 1), ("d2", 2), ("c2", 2), ("c2", 3)])
def test_helmholtz_reconstruction_converges(kind, k):
    ns = [20, 40, 80]
    errs = []
    for n in ns:
        mesh = build_mesh(0.0, 2 * np.pi, n)
        w = project_l2(lambda x: 2 * np.cos(x), mesh, k)
        u, _ = assemble_elliptic_fw2(mesh, k, kind).solve(w)
        errs.append(norms(u, np.cos).l2)
    # central fluxes only guarantee order k (odd k attains exactly that)
    expected = k + 0.5 if kind.startswith("d") else k - 0.05
    assert min(convergence_orders(ns, errs)[1:]) >= expected


@pytest.mark.parametrize("kind", KINDS)
def test_forward_map_inverts_reconstruction(kind, rng):
    mesh = build_mesh(0.0, 2.0, 9, 0.2, rng)
    solver = assemble_elliptic_fw2(mesh, 2, kind)
    u = _random(rng, mesh, 2)
    w, r = solver.forward(u)
    u2, r2 = solver.solve(w)
    assert np.allclose(u2.coeffs, u.coeffs, rtol=0, atol=1e-11)
    assert np.allclose(r2.coeffs, r.coeffs, rtol=0, atol=1e-11)
    scheme = SchemeFW2(mesh, 2, 2, kind)
    assert np.allclose(scheme.solution(scheme.initial_state(u)).coeffs, u.coeffs, atol=1e-11)


@pytest.mark.parametrize("kind", KINDS)
def test_reconstruction_linear(kind, rng):
    mesh = build_mesh(0.0, 1.0, 8)
    solver = assemble_elliptic_fw2(mesh, 2, kind)
    w1, w2 = _random(rng, mesh, 2), _random(rng, mesh, 2)
    u, _ = solver.solve(w1 * 2.0 - w2)
    assert np.allclose(u.coeffs, 2 * solver.solve(w1)[0].coeffs - solver.solve(w2)[0].coeffs,
                       atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_rhs_conserves_w_integral(kind, rng, perturbed_mesh):
    mesh = perturbed_mesh(12)
    scheme = SchemeFW2(mesh, 2, 3, kind)
    for _ in range(10):
        w = _random(rng, mesh, 2)
        assert abs(rhs_fw2(scheme, w).integral()) <= 1e-12 * max(
            1.0, np.max(np.abs(scheme.solution(w).coeffs)) ** 3)


def test_energy_signs(rng, perturbed_mesh):
    mesh = perturbed_mesh(12)
    for p in (2, 3):
        c2 = SchemeFW2(mesh, 2, p, "c2")
        d2 = SchemeFW2(mesh, 2, p, "d2")
        for _ in range(10):
            w = _random(rng, mesh, 2)
            u = c2.solution(w)
            dudt = c2.time_derivative_of_solution(w, c2.rhs(w))
            assert abs(dudt.inner(u)) <= 1e-10 * (1 + u.inner(u)) ** ((p + 1) / 2)
            u = d2.solution(w)
            dudt = d2.time_derivative_of_solution(w, d2.rhs(w))
            assert dudt.inner(u) <= 1e-10


@pytest.mark.parametrize("kind", KINDS)
def test_constant_state_chain(kind):
    mesh = build_mesh(0.0, 3.0, 7, 0.2, np.random.default_rng(5))
    scheme = SchemeFW2(mesh, 2, 3, kind)
    w = DGField(mesh, np.tile([1.5, 0.0, 0.0], (7, 1)))
    st = scheme.stage(w)
    assert np.max(np.abs(st.s.coeffs)) <= 1e-12
    assert np.allclose(st.p.coeffs, -st.u.coeffs, atol=1e-12)
    assert np.max(np.abs(st.dwdt.means)) <= 1e-11


@pytest.mark.parametrize("kind", KINDS)
def test_energy_identity_residual(kind, rng):
    mesh = build_mesh(0.0, 2 * np.pi, 16)
    scheme = SchemeFW2(mesh, 2, 3, kind)
    for _ in range(5):
        assert energy_identity_residual(scheme, _smooth_state(rng, mesh, 2)) <= 1e-9
    assert energy_identity_residual(scheme, DGField.zeros(mesh, 2)) == 0.0


def test_source_enters_w_equation(rng):
    mesh = build_mesh(0.0, 2 * np.pi, 10)
    src = lambda x, t: np.sin(x + t)  # noqa: E731
    scheme = SchemeFW2(mesh, 2, 3, "d2", source_w=src)
    w = _random(rng, mesh, 2)
    diff = scheme.rhs(w, 0.2) - scheme.rhs(w, 0.2, with_source=False)
    assert np.allclose(diff.coeffs, project_l2(lambda x: src(x, 0.2), mesh, 2).coeffs)


def test_rejects_bad_arguments():
    mesh = build_mesh(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        SchemeFW2(mesh, 1, 2, "c1")
    with pytest.raises(ValueError):
        SchemeFW2(mesh, 1, 1, "c2")
