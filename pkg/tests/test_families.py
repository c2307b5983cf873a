"""Family checks, invertibility routes, spectra through families."""

import numpy as np
import pytest

from specfam import (
    AlgebraElement,
    NotCertified,
    Representation,
    RepFamily,
    SpectrumSet,
    ToeplitzElement,
    UnsupportedModel,
    build_family,
    build_model,
    check_exhausting,
    check_faithful,
    check_full,
    direct_invertible,
    elem_norm,
    family_report,
    fredholm_via_family,
    hausdorff,
    invertible_via_exhausting,
    invertible_via_faithful,
    member_invertibility,
    member_norm,
    norm_via_family,
    spectrum_union,
    standard_probes,
)

from util import matrix_model, counterexample_element, random_selfadjoint_element


def ramp_element(model):
    # f(t) = diag(1, 1 - t): norm 1 everywhere, lower entry dies at t = 1
    return counterexample_element(model)


# ---------------------------------------------------------------------------
# probe gallery


def test_gallery_is_deterministic():
    model = matrix_model()
    g1 = standard_probes(model)
    g2 = standard_probes(model)
    assert [p.label for p in g1] == [p.label for p in g2]
    assert g1[0].label == "probe:1"
    labels = [p.label for p in g1]
    assert "tent(1)[0]" in labels and "tent(1)[1]" in labels


def test_gallery_extends_with_element_and_gap_probe():
    model = matrix_model()
    f = ramp_element(model)
    gallery = standard_probes(model, extras=(f,))
    labels = [p.label for p in gallery]
    assert "f" in labels and "gap(f)" in labels
    gap = gallery[labels.index("gap(f)")]
    # the gap probe is |f|^2 - f*f, self-adjoint by construction
    for t in (0.0, 0.5, 1.0):
        m = gap.value_at(t)
        assert np.allclose(m, m.conj().T)
    # for this ramp: 1 - diag(1, (1-t)^2), which peaks at t = 1
    assert abs(elem_norm(gap).value - 1.0) <= 1e-12


def test_tent_probe_shape():
    model = build_model("interval-scalar", step=1 / 4)
    gallery = standard_probes(model)
    tent = next(p for p in gallery if p.label == "tent(0.5)")
    assert abs(tent.value_at(0.5)[0, 0] - 1.0) <= 1e-12
    assert abs(tent.value_at(0.25)[0, 0]) <= 1e-12
    assert abs(tent.value_at(0.375)[0, 0] - 0.5) <= 1e-12


# ---------------------------------------------------------------------------
# norms through families


def test_norm_via_family_single_block_kills_ramp():
    model = matrix_model()
    f = ramp_element(model)
    fam = RepFamily(model, (Representation.block_eval(1.0, 1),), label="endpoint-block")
    assert norm_via_family(fam, f) == pytest.approx(0.0, abs=1e-12)
    assert elem_norm(f).value == pytest.approx(1.0)


def test_norm_via_family_full_family_attains():
    model = matrix_model()
    f = ramp_element(model)
    fam = build_family(model, "prim-all")
    assert norm_via_family(fam, f) == pytest.approx(elem_norm(f).value)


def test_member_norm_uses_ladder_for_section_member():
    model = build_model("toeplitz", theta_count=8, sections=(4, 8, 16))
    s = ToeplitzElement.shift(model)
    assert member_norm(Representation.toeplitz_identity(), s) == pytest.approx(1.0)
    assert member_norm(Representation.toeplitz_character(0.0), s) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# the three checks


def test_full_family_passes_all_checks():
    model = matrix_model()
    report = family_report(build_family(model, "prim-all"))
    assert report.full and report.exhausting and report.faithful
    assert report.full_witness is None


def test_blocks_only_family_fails_full_with_witness():
    model = matrix_model()
    fam = build_family(model, "blocks-only")
    res = check_full(fam)
    assert not res.ok
    assert res.witness == "ev(0)"


def test_section_ladder_family_is_full():
    model = build_model("toeplitz", theta_count=8)
    report = family_report(build_family(model, "toeplitz-pi"))
    assert report.full and report.exhausting and report.faithful


def test_characters_fail_every_check_on_symbol_model():
    # characters kill every finite-rank correction, so they cannot be
    # faithful on the corrected algebra, only on its quotient
    model = build_model("toeplitz", theta_count=8)
    report = family_report(build_family(model, "toeplitz-chars"))
    assert not report.full and not report.exhausting and not report.faithful
    assert report.faithful_witness == "probe:e00"


def test_coarse_family_faithful_but_not_exhausting():
    model = build_model("interval-scalar", step=1 / 8)
    fam = build_family(model, "coarse", stride=2)
    report = family_report(fam)
    assert report.faithful
    assert not report.exhausting
    assert not report.full
    assert report.exhausting_witness.startswith("tent(")


def test_single_point_family_not_faithful():
    model = build_model("interval-scalar", step=1 / 8)
    fam = build_family(model, "single", at=0.0)
    res = check_faithful(fam, standard_probes(model))
    assert not res.ok
    assert res.witness == "ev(0.25)"
    assert "open region" in res.detail


def test_unfaithful_family_admits_lambda_shift_kernel():
    # a family that only sees t = 1/2 annihilates lam - a for
    # lam = a(1/2), a nonzero element whenever a is nonconstant
    model = build_model("interval-scalar", step=1 / 8)
    fam = build_family(model, "single", at=0.5)
    a = AlgebraElement.from_polynomials(model, {(0, 0): [0.0, 1.0]}, label="t")
    lam = complex(a.value_at(0.5)[0, 0])
    c = AlgebraElement.from_polynomials(
        model, {(0, 0): [lam.real, -1.0]}, label="lam-a"
    )
    assert elem_norm(c).value > 0.4
    assert norm_via_family(fam, c) == 0.0


def test_check_exhausting_requires_probes():
    model = matrix_model()
    fam = build_family(model, "prim-all")
    with pytest.raises(ValueError):
        check_exhausting(fam, ())
    with pytest.raises(ValueError):
        check_faithful(fam, ())


def test_family_needs_members_of_its_model():
    model = matrix_model()
    with pytest.raises(ValueError):
        RepFamily(model, ())
    with pytest.raises(ValueError):
        RepFamily(model, (Representation.toeplitz_identity(),))


# ---------------------------------------------------------------------------
# implication chain over the gallery


def _gallery_families():
    mm = matrix_model()
    cs = build_model("circle-scalar", step=1 / 8)
    dm = build_model("discrete", points=4, dim=2)
    tp = build_model("toeplitz", theta_count=8)
    fams = [
        build_family(mm, "prim-all"),
        build_family(mm, "eval-grid"),
        build_family(mm, "eval-grid", exclude_points=[1.0], add_blocks=[(1.0, 0)]),
        build_family(mm, "eval-grid", exclude_points=[1.0], add_blocks=[(1.0, 0), (1.0, 1)]),
        build_family(mm, "eval-grid", exclude_points=[0.0, 1.0]),
        build_family(mm, "coarse", stride=2),
        build_family(mm, "coarse", stride=3),
        build_family(mm, "single", at=0.0),
        build_family(mm, "single", at=0.5),
        build_family(mm, "blocks-only"),
        build_family(cs, "prim-all"),
        build_family(cs, "eval-grid"),
        build_family(cs, "coarse", stride=2),
        build_family(cs, "coarse", stride=4),
        build_family(cs, "single", at=0.5),
        build_family(dm, "prim-all"),
        build_family(dm, "eval-grid"),
        build_family(dm, "coarse", stride=2),
        build_family(dm, "single", at=0.0),
        build_family(tp, "toeplitz-pi"),
        build_family(tp, "toeplitz-chars"),
        build_family(tp, "toeplitz-all"),
    ]
    assert len(fams) >= 20
    return fams


def test_implication_chain_across_gallery():
    # full implies exhausting implies faithful, on every family
    for fam in _gallery_families():
        report = family_report(fam)
        if report.full:
            assert report.exhausting, fam.label
        if report.exhausting:
            assert report.faithful, fam.label


# ---------------------------------------------------------------------------
# invertibility routes


def test_paradox_family_reproduction():
    # drop the vanishing endpoint block: every member image stays
    # invertible while the element is not, and no uniform bound exists
    model = build_model("interval-matrix", step=1 / 64)
    f = ramp_element(model)
    fam = build_family(model, "eval-grid", exclude_points=[1.0], add_blocks=[(1.0, 0)])

    report = family_report(fam)
    assert report.faithful and not report.exhausting and not report.full
    assert report.full_witness == "ev(1)[1]"

    members = member_invertibility(fam, f)
    assert all(m.invertible for m in members)
    assert min(m.sigma_min for m in members) == pytest.approx(1 / 64)

    assert not direct_invertible(f).invertible

    for k in range(7):
        assert invertible_via_faithful(fam, f, 10.0**k) is False

    with pytest.raises(NotCertified):
        invertible_via_exhausting(fam, f)


def test_full_family_detects_noninvertibility():
    model = matrix_model()
    f = ramp_element(model)
    fam = build_family(model, "prim-all")
    assert invertible_via_exhausting(fam, f) is False


def test_full_family_certifies_invertibility():
    model = matrix_model()
    f = ramp_element(model) + 0.5
    fam = build_family(model, "prim-all")
    assert invertible_via_exhausting(fam, f) is True
    assert invertible_via_faithful(fam, f, bound=10.0) is True
    assert direct_invertible(f).invertible


def test_faithful_route_needs_a_large_enough_bound():
    model = matrix_model()
    f = ramp_element(model) + 0.5
    fam = build_family(model, "prim-all")
    # smallest member singular value is 0.5, so bound 1 is too small
    assert invertible_via_faithful(fam, f, bound=1.0) is False
    assert invertible_via_faithful(fam, f, bound=2.0 + 1e-9) is True
    with pytest.raises(ValueError):
        invertible_via_faithful(fam, f, bound=0.0)


def test_nonfaithful_family_is_rejected():
    # a single evaluation cannot certify: lam - a vanishes off the member
    model = build_model("interval-scalar", step=1 / 8)
    a = AlgebraElement.from_polynomials(model, {(0, 0): [0.0, 1.0]}, label="a")
    c = 0.5 - a
    fam = build_family(model, "single", at=0.0)
    assert member_invertibility(fam, c)[0].invertible
    assert not direct_invertible(c).invertible
    with pytest.raises(NotCertified):
        invertible_via_faithful(fam, c, bound=1e6)
    with pytest.raises(NotCertified):
        invertible_via_exhausting(fam, c)


def test_direct_check_rejects_symbol_elements():
    model = build_model("toeplitz", theta_count=8)
    with pytest.raises(UnsupportedModel):
        direct_invertible(ToeplitzElement.shift(model))


def test_discrete_routes_agree_with_direct():
    model = build_model("discrete", points=4, dim=2)
    fam = build_family(model, "prim-all")
    rng = np.random.default_rng(7)
    for trial in range(50):
        a = random_selfadjoint_element(model, rng)
        if trial % 3 == 0:
            # plant an exact zero eigenvalue in one fiber
            mats = list(a.matrices)
            w, v = np.linalg.eigh(mats[0])
            w[0] = 0.0
            planted = (v * w) @ v.conj().T
            a = AlgebraElement(model, a.breakpoints, (planted,) + tuple(mats[1:]), 0.0, "a0")
        assert invertible_via_exhausting(fam, a) == direct_invertible(a).invertible


# ---------------------------------------------------------------------------
# spectra through families


def test_spectrum_union_matches_direct_eigenvalues_on_discrete_base():
    model = build_model("discrete", points=3, dim=3)
    fam = build_family(model, "prim-all")
    rng = np.random.default_rng(11)
    for _ in range(25):
        mats = []
        for _ in range(3):
            # random normal fiber: unitary conjugate of a complex diagonal
            h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            q, _r = np.linalg.qr(h)
            d = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            mats.append((q * d) @ q.conj().T)
        a = AlgebraElement(model, model.space.sample_grid, tuple(mats), 0.0, "n")
        got = spectrum_union(fam, a, tol=1e-9)
        direct = np.concatenate([np.linalg.eigvals(m) for m in mats])
        want = SpectrumSet.canonical([complex(z) for z in direct], 1e-9)
        assert hausdorff(got, want) <= 1e-8


def test_spectrum_union_closure_refines_with_grid():
    # a(t) = t on [0, 1]: the union of member spectra is the grid, which
    # is h-dense in the spectrum and converges as the grid refines
    reference = SpectrumSet.canonical([k / 1024 for k in range(1025)], 1e-12)
    last = None
    for h in (1 / 16, 1 / 64, 1 / 256):
        model = build_model("interval-scalar", step=h)
        a = AlgebraElement.from_polynomials(model, {(0, 0): [0.0, 1.0]}, label="a")
        fam = build_family(model, "eval-grid")
        got = spectrum_union(fam, a, tol=1e-12)
        d = hausdorff(got, reference)
        assert d <= h
        if last is not None:
            assert d < last
        last = d


def test_spectrum_union_marks_ladder_members_truncated():
    model = build_model("toeplitz", theta_count=8, sections=(4, 8))
    fam = build_family(model, "toeplitz-all")
    x = ToeplitzElement.build(model, {1: 0.5, -1: 0.5}, label="cos")
    s = spectrum_union(fam, x, tol=1e-9)
    assert s.truncated
    assert all(abs(p.imag) <= 1e-9 for p in s.points)
    chars_only = spectrum_union(build_family(model, "toeplitz-chars"), x, tol=1e-9)
    assert not chars_only.truncated


# ---------------------------------------------------------------------------
# Fredholm detection through the quotient characters


def test_shift_is_fredholm_with_unit_bound():
    model = build_model("toeplitz", theta_count=16)
    fam = build_family(model, "toeplitz-chars")
    v = fredholm_via_family(fam, ToeplitzElement.shift(model))
    assert v.fredholm
    assert v.inverse_bound == pytest.approx(1.0)
    assert v.failing_theta is None


def test_shift_minus_one_is_not_fredholm():
    model = build_model("toeplitz", theta_count=16)
    fam = build_family(model, "toeplitz-chars")
    x = ToeplitzElement.shift(model) - 1.0
    v = fredholm_via_family(fam, x)
    assert not v.fredholm
    assert v.failing_theta == pytest.approx(0.0)
    assert v.inverse_bound is None
    assert v.min_symbol == pytest.approx(0.0)


def test_fredholm_certification_needs_fine_enough_characters():
    # symbol vanishing between characters: nonvanishing on the grid is
    # not enough, the slope certificate must close the gaps
    model = build_model("toeplitz", theta_count=16)
    fam = build_family(model, "toeplitz-chars")
    x = ToeplitzElement.shift(model) - complex(np.exp(1j * np.pi / 16))
    v = fredholm_via_family(fam, x)
    assert v.min_symbol > 0.1
    assert v.certified_margin <= 0
    assert not v.fredholm


def test_fredholm_ignores_corrections():
    model = build_model("toeplitz", theta_count=16)
    fam = build_family(model, "toeplitz-chars")
    e00 = np.array([[1.0]])
    x = ToeplitzElement.build(model, {1: 1.0}, correction=-e00, label="S-E")
    v = fredholm_via_family(fam, x)
    assert v.fredholm and v.inverse_bound == pytest.approx(1.0)


def test_fredholm_requires_character_family():
    model = build_model("toeplitz", theta_count=8)
    fam = build_family(model, "toeplitz-all")
    with pytest.raises(UnsupportedModel):
        fredholm_via_family(fam, ToeplitzElement.shift(model))
