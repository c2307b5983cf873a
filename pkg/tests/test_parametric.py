"""Parameter fibers: construction, reduction, spectra, ellipticity."""

import numpy as np
import pytest

from specfam import SpectrumSet, hausdorff
from specfam.errors import (
    CutoffTooSmall,
    IncompatibleQuery,
    NotElliptic,
    NotSelfAdjoint,
    UnsupportedModel,
)
from specfam.observables import Observable, spec_union_observable
from specfam.parametric import (
    CircleBase,
    GraphBase,
    InvariantOperator,
    LambdaGrid,
    fiber,
    invertible_parametric,
    order_reduction,
    principal_symbol,
    spectrum_parametric,
    symbol_restriction_check,
)


def path_graph(v: int) -> GraphBase:
    a = np.zeros((v, v))
    for i in range(v - 1):
        a[i, i + 1] = a[i + 1, i] = 1.0
    return GraphBase(a)


# ---------------------------------------------------------------------------
# construction and fibers


def test_circle_fiber_of_shifted_laplacian():
    op = InvariantOperator.shifted_laplacian(CircleBase(3), n=1, shift=1.0)
    m = fiber(op, (2.0,))
    # modes -3..3: 1 + lam^2 + k^2 with lam = 2
    want = np.diag([5.0 + k * k for k in range(-3, 4)])
    assert np.abs(m - want).max() <= 1e-12


def test_grid_always_contains_zero_and_is_symmetric():
    g = LambdaGrid.build(1, window=4.0, step=1 / 32)
    assert (0.0,) in g.nodes
    assert len(g.nodes) == 257
    xs = [x for (x,) in g.nodes]
    assert xs == sorted(xs)
    assert xs[0] == -4.0 and xs[-1] == 4.0


def test_grid_two_directions():
    g = LambdaGrid.build(2, window=1.0, step=0.5)
    assert len(g.nodes) == 25
    assert (0.0, 0.0) in g.nodes


def test_coupling_beyond_cutoff_is_rejected():
    with pytest.raises(CutoffTooSmall):
        InvariantOperator.build(
            CircleBase(2), 1, {(0, (0,)): 1.0},
            couplings={(0,): {(3, 0): 1.0}},
        )


def test_declared_order_is_validated():
    with pytest.raises(ValueError):
        InvariantOperator.build(CircleBase(2), 1, {(1, (0,)): 1.0}, order=3)


def test_fiber_dimension_mismatch_rejected():
    op = InvariantOperator.shifted_laplacian(CircleBase(2), n=2, shift=1.0)
    with pytest.raises(IncompatibleQuery):
        fiber(op, (1.0,))


def test_graph_fiber_uses_the_graph_laplacian():
    base = path_graph(3)
    op = InvariantOperator.shifted_laplacian(base, n=1, shift=0.0)
    m = fiber(op, (0.0,))
    want = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
    assert np.abs(m - want).max() <= 1e-12


# ---------------------------------------------------------------------------
# order reduction


def test_reduction_makes_identity_from_shifted_laplacian():
    # (1 - Laplacian) reduced at s = order: fibers become exactly 1
    op = InvariantOperator.shifted_laplacian(CircleBase(4), n=1, shift=1.0)
    red = order_reduction(op)
    for lam in ((0.0,), (1.5,), (-3.0,)):
        m = fiber(red, lam)
        assert np.abs(m - np.eye(op.base.dim)).max() <= 1e-12


def test_reduction_is_idempotent_and_keeps_symbol_data():
    op = InvariantOperator.shifted_laplacian(CircleBase(3), n=1, shift=2.0)
    red = order_reduction(op)
    assert order_reduction(red) is red
    assert red.terms == op.terms
    assert red.reduction == (2.0, 2.0)


def test_reduced_fibers_are_bounded_in_the_cutoff():
    # unreduced fibers grow like K^2; reduced ones stay order one
    for cutoff in (4, 16, 64):
        op = InvariantOperator.shifted_laplacian(CircleBase(cutoff), n=1, shift=1.0)
        raw = np.linalg.norm(fiber(op, (0.5,)), 2)
        red = np.linalg.norm(fiber(order_reduction(op), (0.5,)), 2)
        assert raw >= cutoff**2
        assert red <= 2.0


def test_reduction_preserves_invertibility_verdicts():
    rng = np.random.default_rng(23)
    base = CircleBase(4)
    grid = LambdaGrid.build(1, window=2.0, step=0.25)
    for _ in range(50):
        shift = float(rng.uniform(-3.0, 3.0))
        op = InvariantOperator.shifted_laplacian(base, n=1, shift=shift)
        red = order_reduction(op)
        # the reduced fiber is the raw fiber scaled by positive weights,
        # so singular fibers stay singular and invertible ones invertible
        v_red = invertible_parametric(red, grid)
        raw_singular = any(
            np.linalg.svd(fiber(op, lam), compute_uv=False)[-1] <= 1e-9
            for lam in grid.nodes
        )
        assert v_red.invertible == (not raw_singular)


# ---------------------------------------------------------------------------
# spectra


def test_spectrum_matches_analytic_laplacian_values():
    op = InvariantOperator.shifted_laplacian(CircleBase(16), n=1, shift=1.0)
    grid = LambdaGrid.build(1, window=4.0, step=1 / 32)
    got = spectrum_parametric(op, grid, tol=1e-9)
    assert got.truncated
    want_points = sorted(
        {1.0 + k * k + lam[0] ** 2 for k in range(-16, 17) for lam in grid.nodes}
    )
    want = SpectrumSet.canonical([complex(x) for x in want_points], 1e-9)
    assert hausdorff(got, want) <= 1e-9
    assert min(p.real for p in got.points) == pytest.approx(1.0, abs=1e-9)


def test_spectrum_union_refines_with_the_grid():
    op = InvariantOperator.shifted_laplacian(CircleBase(4), n=1, shift=0.0)
    coarse = spectrum_parametric(op, LambdaGrid.build(1, 2.0, 0.5), tol=1e-9)
    fine = spectrum_parametric(op, LambdaGrid.build(1, 2.0, 0.125), tol=1e-9)
    # every coarse point is a fine point
    for p in coarse.points:
        assert min(abs(p - q) for q in fine.points) <= 1e-9


def test_spectrum_agrees_with_observable_route():
    op = InvariantOperator.shifted_laplacian(CircleBase(6), n=1, shift=1.0)
    grid = LambdaGrid.build(1, window=2.0, step=0.25)
    direct = spectrum_parametric(op, grid, tol=1e-9)
    obs = Observable.fibered([fiber(op, lam) for lam in grid.nodes])
    via_cayley = spec_union_observable([obs], resolution=1e-9)
    assert hausdorff(direct, via_cayley) <= 1e-8


def test_spectrum_rejects_nonselfadjoint_operators():
    op = InvariantOperator.build(CircleBase(2), 1, {(1, (0,)): 1.0, (0, (2,)): 1.0 + 1j})
    with pytest.raises(NotSelfAdjoint):
        spectrum_parametric(op, LambdaGrid.build(1, 1.0, 0.5))
    bad = InvariantOperator.build(
        CircleBase(2), 1, {(1, (0,)): 1.0, (0, (2,)): 1.0},
        couplings={(0,): {(0, 1): 1.0}},
    )
    with pytest.raises(NotSelfAdjoint):
        spectrum_parametric(bad, LambdaGrid.build(1, 1.0, 0.5))


def test_spectrum_rejects_nonelliptic_operators():
    # compact-direction Laplacian alone: symbol xi^2 dies at pure
    # parameter directions
    op = InvariantOperator.build(CircleBase(2), 1, {(1, (0,)): 1.0})
    with pytest.raises(NotElliptic):
        spectrum_parametric(op, LambdaGrid.build(1, 1.0, 0.5))


def test_spectrum_checks_grid_dimension():
    op = InvariantOperator.shifted_laplacian(CircleBase(2), n=2, shift=1.0)
    with pytest.raises(IncompatibleQuery):
        spectrum_parametric(op, LambdaGrid.build(1, 1.0, 0.5))


def test_graph_spectrum_is_exact_in_the_compact_direction():
    base = path_graph(3)
    op = InvariantOperator.shifted_laplacian(base, n=1, shift=0.0)
    grid = LambdaGrid.build(1, window=1.0, step=0.5)
    got = spectrum_parametric(op, grid, tol=1e-9)
    lap_eigs = np.linalg.eigvalsh(base.laplacian())
    want = SpectrumSet.canonical(
        [complex(mu + lam[0] ** 2) for mu in lap_eigs for lam in grid.nodes], 1e-9
    )
    assert hausdorff(got, want) <= 1e-9


# ---------------------------------------------------------------------------
# invertibility


def test_shifted_laplacian_is_invertible():
    op = InvariantOperator.shifted_laplacian(CircleBase(16), n=1, shift=1.0)
    grid = LambdaGrid.build(1, window=4.0, step=1 / 32)
    v = invertible_parametric(op, grid)
    assert v.invertible
    assert v.failing_lambda is None and v.failing_direction is None
    assert v.min_symbol == pytest.approx(1.0)


def test_bare_laplacian_fails_at_the_zero_fiber():
    op = InvariantOperator.shifted_laplacian(CircleBase(16), n=1, shift=0.0)
    grid = LambdaGrid.build(1, window=4.0, step=1 / 32)
    v = invertible_parametric(op, grid)
    assert not v.invertible
    assert v.failing_lambda == (0.0,)
    assert v.min_sigma == pytest.approx(0.0, abs=1e-12)


def test_negative_shift_fails_on_some_interior_fiber():
    op = InvariantOperator.shifted_laplacian(CircleBase(8), n=1, shift=-1.0)
    grid = LambdaGrid.build(1, window=2.0, step=0.25)
    v = invertible_parametric(op, grid)
    assert not v.invertible
    assert v.failing_lambda is not None
    lam = v.failing_lambda[0]
    # -1 + lam^2 + k^2 = 0 needs lam = 1, k = 0 on this grid
    assert abs(abs(lam) - 1.0) <= 1e-12


def test_direction_margin_detects_degenerate_symbol():
    # xi^2 - eta^2 type symbol: elliptic nowhere near the diagonal
    op = InvariantOperator.build(
        CircleBase(4), 1, {(1, (0,)): 1.0, (0, (2,)): -1.0, (0, (0,)): 5.0}
    )
    grid = LambdaGrid.build(1, window=1.0, step=0.5)
    v = invertible_parametric(op, grid)
    assert not v.invertible
    assert v.failing_direction is not None
    assert v.min_symbol < 1e-6


def test_graph_invertibility():
    base = path_graph(4)
    good = InvariantOperator.shifted_laplacian(base, n=1, shift=1.0)
    bad = InvariantOperator.shifted_laplacian(base, n=1, shift=0.0)
    grid = LambdaGrid.build(1, window=2.0, step=0.5)
    assert invertible_parametric(good, grid).invertible
    v = invertible_parametric(bad, grid)
    assert not v.invertible and v.failing_lambda == (0.0,)


# ---------------------------------------------------------------------------
# symbol restriction


def test_restriction_check_passes_for_shifted_laplacian():
    op = InvariantOperator.shifted_laplacian(CircleBase(16), n=1, shift=1.0)
    r = symbol_restriction_check(op)
    assert r.passed
    assert r.c0 == pytest.approx(1.0, abs=0.01)
    assert r.c1 == pytest.approx(1.0, abs=0.01)


def test_restriction_check_fails_for_top_order_parameter_mixing():
    # k^2 * lam carries the parameter into the compact top order
    op = InvariantOperator.build(
        CircleBase(16), 1, {(1, (1,)): 1.0, (0, (3,)): 1.0, (1, (0,)): 1.0}
    )
    assert op.order == 3
    r = symbol_restriction_check(op)
    assert not r.passed


def test_restriction_check_needs_modes_and_circle():
    with pytest.raises(CutoffTooSmall):
        symbol_restriction_check(
            InvariantOperator.shifted_laplacian(CircleBase(1), n=1, shift=1.0)
        )
    with pytest.raises(UnsupportedModel):
        symbol_restriction_check(
            InvariantOperator.shifted_laplacian(path_graph(3), n=1, shift=1.0)
        )


# ---------------------------------------------------------------------------
# principal symbol values


def test_principal_symbol_of_shifted_laplacian_is_the_sphere_constant():
    op = InvariantOperator.shifted_laplacian(CircleBase(4), n=1, shift=7.0)
    for phi in np.linspace(0, 2 * np.pi, 9):
        xi, eta = np.cos(phi), (np.sin(phi),)
        sig = principal_symbol(op, xi, eta)
        assert np.abs(sig - np.eye(op.base.dim)).max() <= 1e-12


def test_two_direction_operator_full_roundtrip():
    op = InvariantOperator.shifted_laplacian(CircleBase(3), n=2, shift=1.0)
    grid = LambdaGrid.build(2, window=1.0, step=0.5)
    s = spectrum_parametric(op, grid, tol=1e-9)
    assert min(p.real for p in s.points) == pytest.approx(1.0, abs=1e-9)
    assert invertible_parametric(op, grid).invertible
