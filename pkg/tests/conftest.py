from __future__ import annotations

import numpy as np
import pytest

from fwldg.field import DGField
from fwldg.mesh import build_mesh

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def random_field(rng):
    def make(mesh, k, scale=1.0):
        return DGField(mesh, scale * rng.normal(size=(mesh.n_cells, k + 1)))
    return make


@pytest.fixture
def perturbed_mesh(rng):
    def make(n_cells, a=0.0, b=1.0, perturbation=0.3):
        return build_mesh(a, b, n_cells, perturbation, rng)
    return make


@pytest.fixture(scope="session")
def acceptance():
    """Collects one pass/fail line per acceptance criterion."""
    def record(name: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((name, passed, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  {detail}")
