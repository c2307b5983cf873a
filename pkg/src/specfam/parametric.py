"""Translation-invariant operators studied through their parameter fibers.

The base geometry pairs a compact direction (circle modes up to a
cutoff, or a finite graph) with n flat directions carrying a continuous
parameter lam.  A polynomial invariant operator decomposes into a fiber
of finite matrices p-hat(lam); its spectrum is the closure of the fiber
spectra over lam, so sampling lam on a window grid yields a truncated
but certified-from-inside picture.

Invertibility of the operator between Sobolev levels is decided on the
order-reduced fibers, whose conjugation by powers of
    D(lam) = 1 + |lam|^2 + (compact-direction Laplacian)
turns an order-m operator into a bounded one, together with uniform
invertibility of the principal symbol along directions that keep a
definite parameter component.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    CutoffTooSmall,
    IncompatibleQuery,
    NotElliptic,
    NotSelfAdjoint,
    UnsupportedModel,
)
from .spectral import SpectrumSet

_THREADS_ENV = "SPECFAM_THREADS"


@dataclass(frozen=True)
class CircleBase:
    """Fourier modes k = -K .. K of the circle direction."""

    cutoff: int

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("the mode cutoff must be at least 1")

    @property
    def dim(self) -> int:
        return 2 * self.cutoff + 1

    def laplacian_diagonal(self) -> np.ndarray:
        k = np.arange(-self.cutoff, self.cutoff + 1, dtype=float)
        return k * k


@dataclass(frozen=True, eq=False)
class GraphBase:
    """Finite graph direction; the compact Laplacian is degree minus adjacency."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError("adjacency must be a nonempty square matrix")
        if not np.allclose(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.abs(a - np.round(a)).max() > 0 or a.min() < 0:
            raise ValueError("adjacency entries must be nonnegative integers")
        if np.abs(np.diag(a)).max() > 0:
            raise ValueError("adjacency must have a zero diagonal")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def dim(self) -> int:
        return self.adjacency.shape[0]

    def laplacian(self) -> np.ndarray:
        a = self.adjacency
        return np.diag(a.sum(axis=1)) - a


def _compact_laplacian(base) -> np.ndarray:
    if isinstance(base, CircleBase):
        return np.diag(base.laplacian_diagonal())
    if isinstance(base, GraphBase):
        return base.laplacian()
    raise UnsupportedModel(f"unknown base geometry {type(base).__name__}")


@dataclass(frozen=True, eq=False)
class InvariantOperator:
    """Polynomial invariant operator on (compact base) x R^n.

    terms maps (j, alpha) to a coefficient and contributes
    coeff * L^j * lam^alpha, where L is the compact-direction Laplacian
    (joint degree 2j + |alpha|).  couplings add lam^alpha times a fixed
    matrix on the compact fibers (joint degree |alpha|).  order must
    equal the maximal joint degree; sobolev = (s, s - order) declares
    the mapping levels, and reduction, when set to (s, m), means fibers
    come out conjugated to bounded form.
    """

    base: CircleBase | GraphBase
    n: int
    terms: tuple
    couplings: tuple
    order: int
    sobolev: tuple
    reduction: tuple | None = None
    label: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("the flat direction count n must be at least 1")
        terms = []
        degrees = [0]
        for (j, alpha), coeff in self.terms:
            alpha = tuple(int(x) for x in alpha)
            if len(alpha) != self.n or any(x < 0 for x in alpha) or int(j) < 0:
                raise ValueError(f"bad term exponents (j={j}, alpha={alpha})")
            c = complex(coeff)
            if c != 0:
                terms.append(((int(j), alpha), c))
                degrees.append(2 * int(j) + sum(alpha))
        couplings = []
        d = self.base.dim
        for alpha, mat in self.couplings:
            alpha = tuple(int(x) for x in alpha)
            if len(alpha) != self.n or any(x < 0 for x in alpha):
                raise ValueError(f"bad coupling exponents alpha={alpha}")
            m = np.asarray(mat, dtype=complex)
            if m.shape != (d, d):
                raise ValueError(f"coupling matrices must be {d}x{d}")
            m.setflags(write=False)
            couplings.append((alpha, m))
            degrees.append(sum(alpha))
        if self.order != max(degrees):
            raise ValueError(
                f"declared order {self.order} differs from the joint degree {max(degrees)}"
            )
        s, lo = (float(self.sobolev[0]), float(self.sobolev[1]))
        if abs((s - lo) - self.order) > 1e-12:
            raise ValueError("sobolev levels must differ by the order")
        if self.reduction is not None:
            object.__setattr__(
                self, "reduction", (float(self.reduction[0]), float(self.reduction[1]))
            )
        object.__setattr__(self, "terms", tuple(terms))
        object.__setattr__(self, "couplings", tuple(couplings))
        object.__setattr__(self, "sobolev", (s, lo))

    @classmethod
    def build(
        cls,
        base,
        n: int,
        terms: dict,
        couplings: dict | None = None,
        order: int | None = None,
        s: float | None = None,
        label: str = "",
    ) -> "InvariantOperator":
        """Operator from {(j, alpha): coeff} plus optional mode couplings.

        couplings maps alpha to {(k1, k2): value} in circle mode indices
        (CutoffTooSmall beyond the cutoff) or vertex indices for graphs.
        order defaults to the computed joint degree, s to the order.
        """
        term_list = tuple(terms.items())
        coupling_list = []
        d = base.dim
        for alpha, entries in (couplings or {}).items():
            m = np.zeros((d, d), dtype=complex)
            for (k1, k2), val in entries.items():
                i1, i2 = int(k1), int(k2)
                if isinstance(base, CircleBase):
                    if max(abs(i1), abs(i2)) > base.cutoff:
                        raise CutoffTooSmall(
                            f"coupling mode ({i1}, {i2}) needs cutoff above {base.cutoff}"
                        )
                    i1 += base.cutoff
                    i2 += base.cutoff
                elif not (0 <= i1 < d and 0 <= i2 < d):
                    raise ValueError(f"coupling vertex ({i1}, {i2}) outside the graph")
                m[i1, i2] += complex(val)
            coupling_list.append((tuple(int(x) for x in alpha), m))
        degrees = [0]
        degrees += [2 * int(j) + sum(alpha) for (j, alpha), c in term_list if complex(c) != 0]
        degrees += [sum(alpha) for alpha, _m in coupling_list]
        order = max(degrees) if order is None else int(order)
        s = float(order) if s is None else float(s)
        return cls(
            base, int(n), term_list, tuple(coupling_list), order,
            (s, s - order), None, label,
        )

    @classmethod
    def shifted_laplacian(cls, base, n: int, shift: float = 0.0, label: str = "") -> "InvariantOperator":
        """shift - (full Laplacian): compact part plus all flat directions."""
        terms = {(1, (0,) * n): 1.0}
        for i in range(n):
            alpha = tuple(2 if j == i else 0 for j in range(n))
            terms[(0, alpha)] = 1.0
        if shift != 0.0:
            terms[(0, (0,) * n)] = float(shift)
        return cls.build(base, n, terms, label=label or f"{shift:g}-laplacian")


def _lam_power(lam: tuple, alpha: tuple) -> float:
    out = 1.0
    for x, a in zip(lam, alpha):
        if a:
            out *= x**a
    return out


def _symbol_fiber(op: InvariantOperator, lam: tuple) -> np.ndarray:
    d = op.base.dim
    out = np.zeros((d, d), dtype=complex)
    if isinstance(op.base, CircleBase):
        diag = op.base.laplacian_diagonal()
        acc = np.zeros(d, dtype=complex)
        for (j, alpha), coeff in op.terms:
            acc += coeff * _lam_power(lam, alpha) * diag**j
        out += np.diag(acc)
    else:
        lap = _compact_laplacian(op.base)
        powers = {0: np.eye(d)}
        for (j, alpha), coeff in op.terms:
            if j not in powers:
                powers[j] = np.linalg.matrix_power(lap, j)
            out += coeff * _lam_power(lam, alpha) * powers[j]
    for alpha, mat in op.couplings:
        out += _lam_power(lam, alpha) * mat
    return out


def fiber(op: InvariantOperator, lam) -> np.ndarray:
    """Fiber matrix at one parameter value, reduced if the operator is."""
    lam = tuple(float(x) for x in (lam if np.iterable(lam) else (lam,)))
    if len(lam) != op.n:
        raise IncompatibleQuery(f"parameter must have {op.n} components, got {len(lam)}")
    m = _symbol_fiber(op, lam)
    if op.reduction is None:
        return m
    s, order = op.reduction
    lam_sq = sum(x * x for x in lam)
    if isinstance(op.base, CircleBase):
        d = 1.0 + lam_sq + op.base.laplacian_diagonal()
        left = d ** ((s - order) / 2.0)
        right = d ** (-s / 2.0)
        return (left[:, None] * m) * right[None, :]
    w, v = np.linalg.eigh(_compact_laplacian(op.base))
    d = 1.0 + lam_sq + w
    left = (v * d ** ((s - order) / 2.0)) @ v.conj().T
    right = (v * d ** (-s / 2.0)) @ v.conj().T
    return left @ m @ right


def order_reduction(op: InvariantOperator) -> InvariantOperator:
    """Bounded-form copy: same symbol data, fibers conjugated to order 0."""
    if op.reduction is not None:
        return op
    s = op.sobolev[0]
    return InvariantOperator(
        op.base, op.n, op.terms, op.couplings, op.order, op.sobolev,
        (s, float(op.order)), f"reduced({op.label})" if op.label else "reduced",
    )


@dataclass(frozen=True)
class LambdaGrid:
    """Symmetric parameter grid: every axis runs -window .. window by step."""

    n: int
    window: float
    step: float
    nodes: tuple

    @classmethod
    def build(cls, n: int, window: float, step: float) -> "LambdaGrid":
        if n < 1:
            raise ValueError("the grid dimension must be at least 1")
        if not (0 < step <= window):
            raise ValueError("need 0 < step <= window")
        half = int(round(window / step))
        axis = [k * step for k in range(-half, half + 1)]
        if n == 1:
            nodes = tuple((x,) for x in axis)
        else:
            nodes = [()]
            for _ in range(n):
                nodes = [node + (x,) for node in nodes for x in axis]
            nodes = tuple(nodes)
        return cls(int(n), float(window), float(step), nodes)


# ---------------------------------------------------------------------------
# principal symbol on the sphere of directions


def _sphere_directions(n: int, count: int = 64) -> list[tuple]:
    """Deterministic directions on the joint sphere (xi, eta) in R^(1+n).

    For n = 1 an even circle sampling (count divisible by 8 keeps the
    axes in the sample); higher n uses normalized small-lattice points,
    which also include every axis.
    """
    if n == 1:
        if count % 8:
            raise ValueError("direction count must be divisible by 8")
        return [
            (np.cos(2 * np.pi * i / count), (np.sin(2 * np.pi * i / count),))
            for i in range(count)
        ]
    dirs = []
    seen = set()
    rng = range(-2, 3)
    grids = [()]
    for _ in range(n + 1):
        grids = [g + (v,) for g in grids for v in rng]
    for g in grids:
        norm = float(np.sqrt(sum(x * x for x in g)))
        if norm == 0.0:
            continue
        vec = tuple(x / norm for x in g)
        key = tuple(round(x, 12) for x in vec)
        if key in seen:
            continue
        seen.add(key)
        dirs.append((vec[0], vec[1:]))
    return dirs


def _lambda_unit_directions(n: int) -> list[tuple]:
    if n == 1:
        return [(1.0,), (-1.0,)]
    seen = set()
    out = []
    grids = [()]
    for _ in range(n):
        grids = [g + (v,) for g in grids for v in range(-2, 3)]
    for g in grids:
        norm = float(np.sqrt(sum(x * x for x in g)))
        if norm == 0.0:
            continue
        vec = tuple(x / norm for x in g)
        key = tuple(round(x, 12) for x in vec)
        if key not in seen:
            seen.add(key)
            out.append(vec)
    return out


def _symbol_directions(op: InvariantOperator) -> list[tuple]:
    if isinstance(op.base, GraphBase):
        return [(0.0, eta) for eta in _lambda_unit_directions(op.n)]
    return _sphere_directions(op.n)


def principal_symbol(op: InvariantOperator, xi: float, eta: tuple) -> np.ndarray:
    """Top joint-degree part at the direction (xi, eta); matrix-valued.

    Circle modes carry a genuine compact cotangent direction xi; a graph
    has none, so its Laplacian powers enter as matrices and xi is
    ignored (graph directions are parameter-only).
    """
    d = op.base.dim
    out = np.zeros((d, d), dtype=complex)
    graph = isinstance(op.base, GraphBase)
    powers = {0: np.eye(d)} if graph else None
    for (j, alpha), coeff in op.terms:
        if 2 * j + sum(alpha) != op.order:
            continue
        if graph:
            if j not in powers:
                powers[j] = np.linalg.matrix_power(_compact_laplacian(op.base), j)
            out = out + coeff * _lam_power(eta, alpha) * powers[j]
        else:
            out = out + coeff * xi ** (2 * j) * _lam_power(eta, alpha) * np.eye(d)
    for alpha, mat in op.couplings:
        if sum(alpha) == op.order:
            out = out + _lam_power(eta, alpha) * mat
    return out


def _check_selfadjoint(op: InvariantOperator):
    for (j, alpha), coeff in op.terms:
        if abs(coeff.imag) > 1e-12:
            raise NotSelfAdjoint(
                f"term (j={j}, alpha={alpha}) has a non-real coefficient {coeff}"
            )
    for alpha, mat in op.couplings:
        if np.abs(mat - mat.conj().T).max() > 1e-12:
            raise NotSelfAdjoint(f"coupling at alpha={alpha} is not Hermitian")


def _check_elliptic(op: InvariantOperator):
    scale = max(
        [abs(c) for _ja, c in op.terms]
        + [float(np.abs(m).max()) for _a, m in op.couplings]
        + [1.0]
    )
    for xi, eta in _symbol_directions(op):
        sig = principal_symbol(op, xi, eta)
        smin = float(np.linalg.svd(sig, compute_uv=False)[-1])
        if smin <= 1e-12 * scale:
            raise NotElliptic(
                f"principal symbol degenerates at direction (xi={xi:.6g}, eta={eta})"
            )


def _norm(v: tuple) -> float:
    return float(np.sqrt(sum(x * x for x in v)))


def _fiber_eigs(op: InvariantOperator, grid: LambdaGrid) -> list[np.ndarray]:
    fibers = [_symbol_fiber(op, lam) for lam in grid.nodes]
    workers = int(os.environ.get(_THREADS_ENV, "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(np.linalg.eigvalsh, fibers))
    stacked = np.stack(fibers)
    return list(np.linalg.eigvalsh(stacked))


def spectrum_parametric(
    op: InvariantOperator, grid: LambdaGrid, tol: float = 1e-9
) -> SpectrumSet:
    """Union of unreduced fiber spectra over the grid; always truncated.

    The fibers exhaust the spectrum as the window and cutoff grow; any
    finite grid sees it from inside, hence the flag.  Requires a
    self-adjoint elliptic operator; reduction is ignored here because
    the reduced fibers belong to a different bounded operator.
    """
    if grid.n != op.n:
        raise IncompatibleQuery(
            f"grid has {grid.n} directions, the operator has {op.n}"
        )
    _check_selfadjoint(op)
    _check_elliptic(op)
    points: list[complex] = []
    for eigs in _fiber_eigs(op, grid):
        points.extend(complex(x) for x in eigs)
    return SpectrumSet.canonical(points, tol, truncated=True)


@dataclass(frozen=True)
class ParametricVerdict:
    invertible: bool
    min_sigma: float
    failing_lambda: tuple | None
    min_symbol: float
    failing_direction: tuple | None

    def as_dict(self) -> dict:
        return {
            "invertible": self.invertible,
            "min_sigma": self.min_sigma,
            "failing_lambda": list(self.failing_lambda) if self.failing_lambda else None,
            "min_symbol": self.min_symbol,
            "failing_direction": (
                list(self.failing_direction) if self.failing_direction else None
            ),
        }


def invertible_parametric(
    op: InvariantOperator,
    grid: LambdaGrid,
    delta_dir: float = 0.1,
    delta_sym: float = 1e-6,
    tol: float = 1e-9,
) -> ParametricVerdict:
    """Sobolev invertibility from reduced fibers plus the symbol margin.

    Every reduced fiber on the grid must clear tol in smallest singular
    value, and the principal symbol must stay at least delta_sym along
    sphere directions whose parameter part is at least delta_dir.
    """
    if grid.n != op.n:
        raise IncompatibleQuery(
            f"grid has {grid.n} directions, the operator has {op.n}"
        )
    reduced = op if op.reduction is not None else order_reduction(op)
    fibers = np.stack([fiber(reduced, lam) for lam in grid.nodes])
    sigmas = np.linalg.svd(fibers, compute_uv=False)[:, -1]
    worst = int(np.argmin(sigmas))
    min_sigma = float(sigmas[worst])
    fib_ok = min_sigma > tol

    min_symbol = np.inf
    failing_dir = None
    for xi, eta in _symbol_directions(op):
        if _norm(eta) < delta_dir:
            continue
        sig = principal_symbol(op, xi, eta)
        smin = float(np.linalg.svd(sig, compute_uv=False)[-1])
        if smin < min_symbol:
            min_symbol = float(smin)
            failing_dir = (float(xi), *(float(x) for x in eta))
    sym_ok = min_symbol >= delta_sym
    return ParametricVerdict(
        invertible=bool(fib_ok and sym_ok),
        min_sigma=min_sigma,
        failing_lambda=None if fib_ok else grid.nodes[worst],
        min_symbol=float(min_symbol),
        failing_direction=None if sym_ok else failing_dir,
    )


@dataclass(frozen=True)
class RestrictionCheck:
    passed: bool
    c0: float
    c1: float
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "c0": self.c0,
            "c1": self.c1,
            "tolerance": self.tolerance,
        }


def symbol_restriction_check(op: InvariantOperator) -> RestrictionCheck:
    """Is the compact-direction top growth independent of the parameter?

    Compares the top-mode diagonal growth coefficient
        c(lam) = fiber(lam)[K, K] / K^order
    at lam = 0 and lam = e1; restriction to the compact direction is
    consistent exactly when the difference is O(1/K).
    """
    if not isinstance(op.base, CircleBase):
        raise UnsupportedModel("the restriction check needs circle modes")
    k = op.base.cutoff
    if k < 2:
        raise CutoffTooSmall("the restriction check needs a mode cutoff of at least 2")
    top = 2 * k  # index of mode +K
    lam0 = (0.0,) * op.n
    lam1 = tuple(1.0 if i == 0 else 0.0 for i in range(op.n))
    c0 = float(_symbol_fiber(op, lam0)[top, top].real) / float(k**op.order)
    c1 = float(_symbol_fiber(op, lam1)[top, top].real) / float(k**op.order)
    tolerance = (abs(c0) + abs(c1) + 1e-9) / k
    return RestrictionCheck(abs(c0 - c1) <= tolerance, c0, c1, tolerance)
