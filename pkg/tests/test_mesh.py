import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loqrc.mesh import (MeshError, MeshLayout, MziParams, MziSpec, Role, apply_mzis,
                        build_default_layout, compose_mesh, mzi_unitary, sample_static_params)

from oracles import embed, light_cone_wedge_counts

angles = st.floats(min_value=-20, max_value=20, allow_nan=False, allow_infinity=False)


def test_mzi_identity():
    np.testing.assert_allclose(mzi_unitary(MziParams(0.0, 0.0)), np.eye(2), atol=0)


def test_mzi_balanced():
    r = math.sqrt(2) / 2
    np.testing.assert_allclose(mzi_unitary(MziParams(math.pi / 4, 0.0)),
                               [[r, -r], [r, r]], atol=1e-15)


def test_mzi_generic_entries_and_unitarity():
    t, p = math.pi / 3, math.pi / 5
    u = mzi_unitary(MziParams(t, p))
    e = np.exp(1j * p)
    expected = np.array([[e * math.cos(t), -math.sin(t)], [e * math.sin(t), math.cos(t)]])
    np.testing.assert_allclose(u, expected, atol=1e-15)
    assert np.abs(u.conj().T @ u - np.eye(2)).max() < 1e-12


@given(angles, angles)
def test_mzi_unitary_property(t, p):
    u = mzi_unitary(MziParams(t, p))
    assert np.abs(u.conj().T @ u - np.eye(2)).max() < 1e-12


@pytest.mark.parametrize("bad", [(math.nan, 0.0), (0.0, math.inf), (-math.inf, 1.0)])
def test_mzi_rejects_non_finite(bad):
    with pytest.raises(MeshError):
        MziParams(*bad)


def test_default_layout_16_modes():
    lay = build_default_layout(16, 4)
    assert lay.central_block == (7, 10)
    assert lay.layers == 16
    assert lay.wedge_depth == 7
    per_layer = [sum(1 for m in lay.mzis if m.role is Role.WEDGE and m.layer == l)
                 for l in range(2, 8)]
    assert per_layer == [3, 4, 5, 6, 7, 8]
    assert lay.n_wedge == 33
    inputs = [lay.mzis[i] for i in lay.indices(Role.INPUT)]
    assert len(inputs) == 2
    assert [m.mode_pair for m in inputs] == [(7, 8), (9, 10)]
    assert all(m.layer == 1 for m in inputs)


def test_default_layout_8_modes():
    lay = build_default_layout(8, 2)
    assert lay.central_block == (3, 6)
    assert lay.wedge_depth == 3
    assert lay.n_wedge == 7


@pytest.mark.parametrize("modes", [8, 12, 16])
def test_wedge_size_matches_hand_count(modes):
    counts = light_cone_wedge_counts(modes)
    lay = build_default_layout(modes, 4)
    assert lay.n_wedge == sum(counts.values())
    assert lay.wedge_depth == max(counts)


@pytest.mark.parametrize("modes", [8, 10, 12, 16, 20])
def test_layout_structure(modes):
    lay = build_default_layout(modes, 4)
    for layer in range(1, lay.layers + 1):
        pairs = [m.mode_pair for m in lay.mzis if m.layer == layer]
        first = 1 if layer % 2 else 2
        assert pairs == [(i, i + 1) for i in range(first, modes, 2)]
        used = [k for p in pairs for k in p]
        assert len(used) == len(set(used))
        assert all(1 <= k <= modes for k in used)
    for m in lay.mzis:
        if m.layer > lay.wedge_depth:
            assert m.role is Role.STATIC
        else:
            assert m.role is not Role.STATIC


@pytest.mark.parametrize("modes", [6, 7, 9, 15])
def test_unsupported_geometry(modes):
    with pytest.raises(MeshError):
        build_default_layout(modes, 2)


def test_layout_dump_golden():
    text = build_default_layout(8, 2).dump()
    lines = text.splitlines()
    assert lines[0] == "# modes=8 layers=8 central_block=3-6 R_fb=7"
    assert lines[1] == "index\tlayer\tmodes\trole"
    assert lines[2:6] == ["0\t1\t1-2\tunused", "1\t1\t3-4\tinput",
                          "2\t1\t5-6\tinput", "3\t1\t7-8\tunused"]
    assert lines[6] == "4\t2\t2-3\twedge"
    assert len(lines) == 2 + 28


def test_static_params_deterministic_and_in_range():
    lay = build_default_layout(16, 4)
    a = sample_static_params(lay, np.random.default_rng(7))
    b = sample_static_params(lay, np.random.default_rng(7))
    assert a == b
    for i, m in enumerate(lay.mzis):
        if m.role is Role.STATIC:
            assert 0 <= a[i].theta <= math.pi / 2
            assert 0 <= a[i].phi < 2 * math.pi
        elif m.role is Role.INPUT:
            assert a[i] == MziParams(math.pi / 4, 0.0)
        elif m.role is Role.WEDGE:
            assert a[i] == MziParams(math.pi / 4, math.pi)
        else:
            assert i not in a


def test_static_params_differ_between_seeds():
    lay = build_default_layout(16, 4)
    for s in range(10):
        a = sample_static_params(lay, np.random.default_rng(2 * s))
        b = sample_static_params(lay, np.random.default_rng(2 * s + 1))
        assert any(a[i] != b[i] for i in lay.indices(Role.STATIC))


def _all_params(lay, theta, phi):
    return {i: MziParams(theta, phi) for i, m in enumerate(lay.mzis) if m.role is not Role.UNUSED}


def test_compose_identity():
    lay = build_default_layout(16, 4)
    np.testing.assert_array_equal(compose_mesh(lay, _all_params(lay, 0.0, 0.0)), np.eye(16))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from([8, 12, 16]))
def test_compose_is_unitary(seed, modes):
    rng = np.random.default_rng(seed)
    lay = build_default_layout(modes, 4)
    params = {i: MziParams(*rng.uniform(-10, 10, size=2))
              for i, m in enumerate(lay.mzis) if m.role is not Role.UNUSED}
    v = compose_mesh(lay, params)
    assert np.abs(v.conj().T @ v - np.eye(modes)).max() < 1e-10


def test_toy_embedding():
    lay = MeshLayout(4, 1, (MziSpec(1, (2, 3), Role.STATIC),), (1, 4))
    p = MziParams(0.7, 1.9)
    v = compose_mesh(lay, {0: p})
    np.testing.assert_allclose(v, embed(4, 1, 2, mzi_unitary(p)), atol=0)


def test_layer_order_first_layer_acts_first():
    lay = MeshLayout(3, 2, (MziSpec(1, (1, 2), Role.STATIC), MziSpec(2, (2, 3), Role.STATIC)),
                     (1, 3))
    p1, p2 = MziParams(0.3, 0.4), MziParams(1.1, -0.2)
    expected = embed(3, 1, 2, mzi_unitary(p2)) @ embed(3, 0, 1, mzi_unitary(p1))
    np.testing.assert_allclose(compose_mesh(lay, {0: p1, 1: p2}), expected, atol=1e-15)


def test_same_layer_permutation_invariance():
    lay = build_default_layout(12, 4)
    rng = np.random.default_rng(3)
    params = {i: MziParams(*rng.uniform(0, 6, size=2))
              for i, m in enumerate(lay.mzis) if m.role is not Role.UNUSED}
    ref = compose_mesh(lay, params)
    order = sorted(range(len(lay.mzis)), key=lambda i: (lay.mzis[i].layer, -i))
    v = apply_mzis(np.eye(12, dtype=complex), lay, params, order)
    assert np.abs(v - ref).max() < 1e-12


def test_unused_parameters_are_ignored():
    lay = build_default_layout(16, 4)
    params = sample_static_params(lay, np.random.default_rng(0))
    ref = compose_mesh(lay, params)
    extra = dict(params)
    for i in lay.indices(Role.UNUSED):
        extra[i] = MziParams(1.234, 5.678)
    np.testing.assert_array_equal(compose_mesh(lay, extra), ref)


def test_missing_parameter_is_an_error():
    lay = build_default_layout(8, 4)
    params = sample_static_params(lay, np.random.default_rng(0))
    del params[lay.indices(Role.STATIC)[3]]
    with pytest.raises(MeshError, match="incomplete"):
        compose_mesh(lay, params)
