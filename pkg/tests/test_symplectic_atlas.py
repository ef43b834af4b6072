import itertools

import numpy as np
import pytest

from k3cert.quartic_surface import QuarticSurface, SurfacePointNum, sample_points, tangent_frame
from k3cert.symplectic_atlas import (
    PATCHES,
    omega_eval,
    overlap_consistency,
    pivot_consistency,
    pullback_on_disk,
)

W = np.exp(1j * np.pi / 4)


@pytest.fixture(scope="module")
def samples(fermat):
    return sample_points(fermat, 100, seed=21)


def _perm_sign(p):
    inv = sum(1 for i, j in itertools.combinations(range(4), 2) if p[i] > p[j])
    return -1 if inv % 2 else 1


def test_patch_table_is_even_permutations():
    assert len(PATCHES) == 12
    for (c, p), patch in PATCHES.items():
        assert _perm_sign((c, p, patch.a, patch.b)) == 1


def test_first_pivot_value_is_reciprocal_partial(fermat, samples):
    for p in samples:
        f1, f2, f3 = fermat.chart_gradient(0, p.affine(0))
        V1 = np.array([-f2 / f1, 1, 0])
        V2 = np.array([-f3 / f1, 0, 1])
        val = omega_eval(fermat, p, V1, V2, chart=0, pivot=1)
        assert abs(val - 1 / f1) <= 1e-12 * abs(1 / f1)


def test_antisymmetry_and_bilinearity(fermat, samples, rng):
    for p in samples:
        fr = tangent_frame(fermat, p)
        a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
        v = a * fr.V1 + b * fr.V2
        w = c * fr.V1 + d * fr.V2
        vw = omega_eval(fermat, p, v, w)
        scale = max(1.0, abs(vw))
        assert abs(omega_eval(fermat, p, v, v)) <= 1e-12 * scale
        assert abs(vw + omega_eval(fermat, p, w, v)) <= 1e-12 * scale
        assert abs(omega_eval(fermat, p, 2 * v, w) - 2 * vw) <= 1e-12 * scale
        assert abs(omega_eval(fermat, p, v + fr.V1, w) - vw - omega_eval(fermat, p, fr.V1, w)) <= 1e-12 * scale


def test_non_tangent_vector_rejected(fermat, samples):
    p = samples[0]
    grad = fermat.chart_gradient(p.chart, p.affine())
    with pytest.raises(ValueError):
        omega_eval(fermat, p, np.conj(grad), tangent_frame(fermat, p).V1)


def test_pivot_consistency_on_samples(fermat, samples):
    assert max(pivot_consistency(fermat, p) for p in samples) <= 1e-9


def test_single_admissible_pivot_is_an_error(fermat):
    p = SurfacePointNum((1 + 0j, W, 0j, 0j), 0, 0.0)
    with pytest.raises(ValueError, match="pivot"):
        pivot_consistency(fermat, p)


def _pivot_disagreement(grad, chart, v, w):
    vals = [PATCHES[k].evaluate(grad, v, w) for k in PATCHES if k[0] == chart]
    return max(abs(x - y) for x in vals for y in vals) / max(abs(x) for x in vals)


def test_pivot_disagreement_invariant_under_joint_scaling(fermat, samples):
    # a non-tangent pair makes the pivots disagree; the relative measure ignores scale
    for p in samples[:20]:
        fr = tangent_frame(fermat, p)
        v = fr.V1 + np.array([0.1, 0.0, 0.05j])
        w = fr.V2
        base = _pivot_disagreement(fr.partials, p.chart, v, w)
        assert base > 1e-6
        for s in (1e-3, 7.0, 2 - 3j):
            assert _pivot_disagreement(fr.partials, p.chart, s * v, s * w) == pytest.approx(base, rel=1e-12)


def test_overlap_first_two_charts(fermat, samples):
    devs = [overlap_consistency(fermat, p, 0, 1) for p in samples]
    assert max(devs) <= 1e-9


def test_overlap_all_pairs(fermat, samples):
    covered = set()
    for p in samples:
        for a, b in itertools.combinations(range(4), 2):
            assert overlap_consistency(fermat, p, a, b) <= 1e-9
            covered.add((a, b))
    assert len(covered) == 6


def test_overlap_same_chart_is_zero(fermat, samples):
    for c in range(4):
        assert overlap_consistency(fermat, samples[0], c, c) == 0.0


def test_pullback_of_holomorphic_disk_vanishes(fermat):
    # the map h with its first argument fixed to 1, read in chart 0
    psi = lambda z: (W, z, W * z)
    grid = [0.3 + 0.2j, -0.5j, 0.7, 0.1 - 0.4j]
    vals = pullback_on_disk(fermat, psi, grid)
    assert max(abs(v) for v in vals) <= 1e-8


def test_pullback_of_constant_map_vanishes(fermat):
    psi = lambda z: (W, 0, 0)
    assert pullback_on_disk(fermat, psi, [0, 0.5]) == [0, 0]


def test_pullback_on_flat_patch():
    # on x0^3 x1 + x2^4 + x3^4 = 0 the first chart coordinate is -(z2^4 + z3^4)
    X = QuarticSurface.from_text("x0^3*x1+x2^4+x3^4")
    psi = lambda z: (-(np.conj(z) ** 4 + z**4), np.conj(z), z)
    vals = pullback_on_disk(X, psi, [0.2 + 0.1j, -0.3j, 0.25], chart=0, pivot=1)
    # f_z1 = 1 on this chart, so the coefficient is -1 / f_pivot = -1
    for v in vals:
        assert abs(v + 1) <= 1e-8


def test_pullback_rejects_off_surface_map(fermat):
    with pytest.raises(ValueError):
        pullback_on_disk(fermat, lambda z: (1, z, 0), [0.1])
