"""Both kernel backends must return identical results."""

import numpy as np
import pytest

from cyctomo import _kernels
from cyctomo.cyclotomic import CycNum, reduction_matrix
from cyctomo.modelset import ModelSetSpec, generate_patch
from cyctomo.solutions import _fixing_units, quadruple_array
from cyctomo.tomography import point_tables

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture
def restore_backend():
    saved = _kernels.backend()
    yield
    _kernels.set_backend(saved)


def both(fn):
    out = {}
    for b in ("numpy", "numba"):
        _kernels.set_backend(b)
        out[b] = fn()
    return out["numpy"], out["numba"]


@needs_numba
@pytest.mark.parametrize("m, D", [(24, 3), (48, 2), (60, 5)])
def test_galois_screen_agrees(restore_backend, m, D):
    quads = quadruple_array(m)
    red = reduction_matrix(m)
    autos = np.array(_fixing_units(m, D), dtype=np.int64)
    a, b = both(lambda: _kernels.galois_screen(quads, m, red, autos))
    assert np.array_equal(a, b)
    assert a.sum() > 0


@needs_numba
def test_f_numerators_agree(restore_backend):
    m = 36
    quads = quadruple_array(m)[::7]
    red = reduction_matrix(m)
    (na, da), (nb, db) = both(lambda: _kernels.f_numerators(quads, m, red))
    assert np.array_equal(na, nb) and np.array_equal(da, db)


@needs_numba
@pytest.mark.parametrize("n", [4, 8, 12])
def test_patch_agrees(restore_backend, n):
    spec = ModelSetSpec.default(n)
    a, b = both(lambda: generate_patch(spec, 5))
    assert a.points == b.points and len(a.points) > 10


@needs_numba
def test_enumerate_convex_agrees(restore_backend):
    pts = [CycNum.from_coeffs(4, [x, y]) for x in range(3) for y in range(4)]
    o, bt, lex = point_tables(pts)
    w = np.random.default_rng(1).integers(0, 1 << 40, size=len(pts), dtype=np.int64)
    (ma, ha, ca), (mb, hb, cb) = both(lambda: _kernels.enumerate_convex(o, bt, lex, w))
    assert ca and cb
    assert sorted(zip(ma.tolist(), ha.tolist())) == sorted(zip(mb.tolist(), hb.tolist()))


def test_backend_flag(restore_backend):
    _kernels.set_backend("numpy")
    assert _kernels.backend() == "numpy"
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


def test_backend_env(monkeypatch):
    monkeypatch.setenv("CYCTOMO_BACKEND", "numpy")
    assert _kernels._initial_backend() == "numpy"
