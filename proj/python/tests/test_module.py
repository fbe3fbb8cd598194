import math

import numpy as np
import pytest

import minkembed as mk


def test_decompose_diagonal():
    f = mk.lorentz_decompose([[-4.0, 0.0], [0.0, 9.0]], 0.1)
    np.testing.assert_allclose(f, [[2.0, 0.0], [0.0, 3.0]], atol=1e-14)


def test_decompose_reproduces_matrix():
    g = np.array([[-2.0, 0.3, 0.1], [0.3, 1.5, 0.2], [0.1, 0.2, 1.0]])
    f = mk.lorentz_decompose(g, 0.1)
    eta = np.diag([-1.0, 1.0, 1.0])
    np.testing.assert_allclose(f.T @ eta @ f, g, atol=1e-12)


def test_wrong_signature_raises_with_code():
    with pytest.raises(mk.MinkembedError) as info:
        mk.lorentz_decompose(np.eye(2), 0.1)
    assert info.value.code == "WrongSignature"


def test_fixture_arrays_follow_the_chart():
    d = mk.generate("rindler", samples=9)
    assert d["g"].shape == (9, 9, 2, 2)
    tau = np.linspace(0.0, 1.0, 9)
    rho = np.linspace(0.5, 1.5, 9)
    np.testing.assert_allclose(d["g"][3, :, 0, 0], -rho**2, atol=1e-15)
    assert "hyperboloid_forms" in mk.fixture_names()
    assert tau.size == 9


def test_rindler_is_flat_and_de_sitter_is_not():
    flat = mk.generate("rindler", samples=65)
    curved = mk.generate("desitter_slice", samples=65)
    assert mk.flatness_residual(flat["axes"], flat["g"])["max_abs"] < 1e-2
    assert mk.flatness_residual(curved["axes"], curved["g"])["max_abs"] > 0.05


def test_rindler_immersion_matches_embedding_up_to_isometry():
    d = mk.generate("rindler", samples=65)
    r = mk.immerse_manifold(d["axes"], d["g"], epsilon=0.1)
    assert r["isometry_recomputed"]["max_abs"] < 1e-3
    f = r["f"]
    eta = np.diag([-1.0, 1.0])
    # Minkowski distances between image points are isometry invariant
    tau = np.linspace(0.0, 1.0, 65)
    rho = np.linspace(0.5, 1.5, 65)
    def exact(i, j):
        return np.array([rho[j] * math.sinh(tau[i]), rho[j] * math.cosh(tau[i])])
    for (a, b) in [((0, 0), (64, 64)), ((10, 50), (40, 5))]:
        df = f[a] - f[b]
        de = exact(*a) - exact(*b)
        assert abs(df @ eta @ df - de @ eta @ de) < 1e-3


def test_hyperboloid_forms_pipeline():
    d = mk.generate("hyperboloid_forms", samples=33)
    gc = mk.classical_gc_residual(d["axes"], d["g"], d["K"], lambda_=d["lambda"])
    assert gc["max_abs"] < 1e-2
    r = mk.immerse_hypersurface_forms(d["axes"], d["g"], d["K"], lambda_=d["lambda"])
    y = r["f"] - r["f"][16, 16] - r["rigging"][16, 16]
    # image lies on a translate of {y.y = -1}
    q = -y[..., 0] ** 2 + y[..., 1] ** 2 + y[..., 2] ** 2
    assert np.max(np.abs(q + 1.0)) < 1e-3


def test_alignment_and_gaps():
    a = mk.generate("rindler", samples=17)
    b = mk.generate("rindler", samples=17, params={"delta": 1e-3})
    res = mk.align_manifold(a["axes"], a["g"], b["g"])
    assert 0.0 < res["aligned_gap_w2p"] < 1.0
    assert res["input_gap"] > 0.0
    same = mk.align_manifold(a["axes"], a["g"], a["g"])
    assert same["aligned_gap_w2p"] == 0.0
    c = 0.25
    gap = mk.sobolev_gap(a["axes"], a["g"], a["g"] + c, 1, 2.0)
    assert gap == pytest.approx(c * math.sqrt(1.0), rel=1e-12)


def test_shape_errors_are_value_errors():
    d = mk.generate("rindler", samples=9)
    with pytest.raises(ValueError):
        mk.flatness_residual(d["axes"], d["g"][:-1])
