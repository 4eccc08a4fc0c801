import os

import numpy as np
import pytest

from ppachaos import _kernels_py, kernels
from ppachaos.multiindex import enumerate_basis

compiled = pytest.importorskip("ppachaos._kernels")


@pytest.fixture
def pts():
    return np.random.default_rng(0).standard_normal((300, 4))


def test_hermite_table(pts):
    assert np.allclose(compiled.hermite_table(pts, 5), _kernels_py.hermite_table(pts, 5), rtol=1e-13, atol=1e-13)


def test_design_and_gradient(pts):
    idx = enumerate_basis(4, 3).indices
    assert np.allclose(compiled.design_matrix(pts, idx, 3), _kernels_py.design_matrix(pts, idx, 3), rtol=1e-13, atol=1e-13)
    for k in range(4):
        assert np.allclose(compiled.gradient_matrix(pts, idx, 3, k),
                           _kernels_py.gradient_matrix(pts, idx, 3, k), rtol=1e-13, atol=1e-13)


def test_kde_sum(pts):
    grid = np.linspace(-4, 4, 512)
    a = compiled.kde_sum(pts[:, 0], grid, 0.3)
    b = _kernels_py.kde_sum(pts[:, 0], grid, 0.3)
    assert np.allclose(a, b, rtol=1e-12)


@pytest.mark.skipif(os.environ.get("PPACHAOS_PURE", "") not in ("", "0"), reason="fallback forced")
def test_backend_selected():
    assert kernels.BACKEND == "cython"
