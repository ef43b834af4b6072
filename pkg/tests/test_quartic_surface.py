import numpy as np
import pytest

from k3cert.exactpoly import GaussRat
from k3cert.projective import ProjPoint
from k3cert.quartic_surface import (
    QuarticSurface,
    SingularPointError,
    certify_nonsingular,
    contains,
    exact_det,
    sample_points,
    singular_residual,
    tangent_frame,
)
from oracles import newton_singular_search

W = np.exp(1j * np.pi / 4)


def _verify_singular_witness(X, p):
    """Independent re-check of the five vanishing conditions."""
    if p.exact:
        from k3cert.exactpoly import evaluate_exact

        return all(evaluate_exact(g, list(p.coords)).is_zero() for g in (X.f, *X.partials))
    return singular_residual(X, p.numeric()) <= 1e-8


def test_contains_examples(fermat):
    # x^4 = -1 has no Gaussian-rational root: every exact [1 : x : 0 : 0] is off the surface
    for a in range(-4, 5):
        for b in range(-4, 5):
            for d in (1, 2, 3):
                assert not contains(fermat, ProjPoint([1, GaussRat(a, b) / d, 0, 0]))
    assert contains(fermat, ProjPoint([1, W, 0, 0]))
    assert not contains(fermat, ProjPoint([1, 0, 0, 0]))


def test_fermat_certified(fermat):
    st = certify_nonsingular(fermat)
    assert st.kind == "certified-nonsingular"
    assert st.witness is None


def test_degenerate_quartic_singular_at_expected_point():
    X = QuarticSurface.from_text("x0^4+x1^4+x2^4")
    st = certify_nonsingular(X)
    assert st.kind == "singular"
    assert st.witness == ProjPoint([0, 0, 0, 1])
    assert _verify_singular_witness(X, st.witness)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x0^3*x1+x1^4+x2^4+x3^4", "certified-nonsingular"),
        ("x0^4+2*x1^4+3*x2^4+5*x3^4", "certified-nonsingular"),
        ("x0^4+x1^4+x2^4+x3^4+x0*x1*x2*x3", "certified-nonsingular"),
        ("x0^4+x1^4+x2^4+x3^4-4*x0*x1*x2*x3", "singular"),
        ("x0^2*x1^2+x2^4+x3^4+x0^4", "singular"),
    ],
)
def test_certificate_agrees_with_newton_search(text, expected):
    X = QuarticSurface.from_text(text)
    st = certify_nonsingular(X)
    assert st.kind == expected
    rng = np.random.default_rng(5)
    hits = newton_singular_search(text, starts=300, rng=rng)
    if expected == "singular":
        assert _verify_singular_witness(X, st.witness)
        assert hits, "numeric search should find the singular point too"
    else:
        assert not hits


def test_non_reduced_quartic_gets_witness():
    X = QuarticSurface.from_text("(x0^2+x1^2+x2^2+x3^2)^2")
    st = certify_nonsingular(X)
    assert st.kind == "singular"
    assert _verify_singular_witness(X, st.witness)


def test_exact_det():
    assert exact_det([[2, 1], [1, 1]]) == 1
    assert exact_det([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 0


def test_sampling_residuals_and_determinism(fermat):
    pts = sample_points(fermat, 100, seed=3)
    assert len(pts) == 100
    assert max(p.residual for p in pts) <= 1e-10
    again = sample_points(fermat, 100, seed=3)
    assert [p.coords for p in pts] == [p.coords for p in again]
    for p in pts:
        mags = np.abs(p.x)
        assert mags[p.chart] == mags.max()


def test_tangent_frame_formula_with_first_pivot(fermat):
    for p in sample_points(fermat, 200, seed=11):
        fr = tangent_frame(fermat, p, chart=0)
        if fr.pivot != 0:
            continue
        f1, f2, f3 = fr.partials
        assert np.allclose(fr.V1, [-f2 / f1, 1, 0], rtol=0, atol=1e-14)
        assert np.allclose(fr.V2, [-f3 / f1, 0, 1], rtol=0, atol=1e-14)
        return
    pytest.fail("no sample with the first chart coordinate as pivot")


def test_tangent_frame_duality_and_tangency(fermat):
    for p in sample_points(fermat, 100, seed=4):
        fr = tangent_frame(fermat, p)
        grad = fr.partials
        dual = np.array([[fr.phi1 @ fr.V1, fr.phi1 @ fr.V2], [fr.phi2 @ fr.V1, fr.phi2 @ fr.V2]])
        assert np.abs(dual - np.eye(2)).max() <= 1e-10
        for V in (fr.V1, fr.V2):
            assert abs(grad @ V) <= 1e-10 * np.abs(grad).max()
        assert fr.S >= 1


def test_tangent_frame_at_singular_point_errors():
    X = QuarticSurface.from_text("x0^4+x1^4+x2^4")
    from k3cert.quartic_surface import SurfacePointNum

    p = SurfacePointNum((0j, 0j, 0j, 1 + 0j), 3, 0.0)
    with pytest.raises(SingularPointError):
        tangent_frame(X, p)


def test_rejects_non_quartic():
    with pytest.raises(ValueError):
        QuarticSurface.from_text("x0^3+x1^3")
