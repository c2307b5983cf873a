"""Dense spectral primitives: norms, normal eigensystems, functional calculus.

Everything here works on finite square complex matrices (numpy arrays
validated by as_matrix).  Default tolerances are absolute and tuned for
operators of norm up to about 1e3; callers above that scale should
pre-normalize.

Spectra are returned as SpectrumSet values: a canonicalized tuple of
points together with the resolution at which nearby points were merged
and a flag marking sets that sample a possibly larger object (finite
sections, truncated parameter windows).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, EmptySet, NoConvergence, NotNormal

DEFAULT_RESOLUTION = 1e-10

_CLUSTER_FLOOR = 1e-8  # relative width for joint-diagonalization clusters


def as_matrix(entries) -> np.ndarray:
    """Validate and return a square complex matrix.

    Rejects non-square and non-finite input at construction time so the
    operations below can assume a clean operand.
    """
    a = np.asarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def op_norm(a) -> float:
    """Operator norm (largest singular value)."""
    m = as_matrix(a)
    if m.size == 0:
        return 0.0
    try:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK breakdown
        raise NoConvergence(f"singular value iteration failed: {exc}") from exc


@dataclass(frozen=True)
class SpectrumSet:
    """Canonicalized finite set of spectral points.

    points     -- sorted by (real, imag); no two points within `resolution`
    resolution -- merge radius used during canonicalization (>= 0)
    truncated  -- True when the set samples a larger / unbounded object
    """

    points: tuple[complex, ...]
    resolution: float
    truncated: bool = False

    def __post_init__(self):
        if self.resolution < 0:
            raise ValueError("resolution must be nonnegative")

    @classmethod
    def canonical(
        cls,
        points: Iterable[complex],
        resolution: float = DEFAULT_RESOLUTION,
        truncated: bool = False,
    ) -> "SpectrumSet":
        """Sort by (real, imag) and greedily merge points within resolution.

        The kept representative of each cluster is its smallest member in
        the (real, imag) order, which makes the result independent of the
        input ordering.
        """
        if resolution < 0:
            raise ValueError("resolution must be nonnegative")
        pts = sorted((complex(p) for p in points), key=lambda z: (z.real, z.imag))
        kept: list[complex] = []
        for p in pts:
            merged = False
            for q in reversed(kept):
                if p.real - q.real > resolution:
                    break
                if abs(p - q) <= resolution:
                    merged = True
                    break
            if not merged:
                kept.append(p)
        return cls(tuple(kept), float(resolution), bool(truncated))

    def union(self, other: "SpectrumSet") -> "SpectrumSet":
        return SpectrumSet.canonical(
            self.points + other.points,
            max(self.resolution, other.resolution),
            self.truncated or other.truncated,
        )

    def __len__(self) -> int:
        return len(self.points)

    def as_dict(self) -> dict:
        return {
            "points": [[p.real, p.imag] for p in self.points],
            "resolution": self.resolution,
            "truncated": self.truncated,
        }


def union_spectra(parts: Sequence[SpectrumSet], resolution: float | None = None) -> SpectrumSet:
    """Canonicalized union of several spectrum sets."""
    pts: list[complex] = []
    trunc = False
    res = 0.0
    for s in parts:
        pts.extend(s.points)
        trunc = trunc or s.truncated
        res = max(res, s.resolution)
    if resolution is not None:
        res = resolution
    return SpectrumSet.canonical(pts, res, trunc)


def _hermitian_eigensystem(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigensolver did not converge: {exc}") from exc


def normal_eigensystem(a, tol: float = DEFAULT_RESOLUTION) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and an orthonormal eigenbasis of a normal matrix.

    The matrix is split into commuting self-adjoint parts
    h = (a + a*)/2 and k = (a - a*)/(2i); h is diagonalized, then k is
    diagonalized inside each eigenvalue cluster of h.  Eigenvalues are
    recovered as Rayleigh quotients in the joint basis and returned
    sorted by (real, imag) together with the unitary of eigenvectors.

    Raises NotNormal when ||a*a - aa*|| > tol * ||a||^2.
    """
    m = as_matrix(a)
    if m.size == 0:
        return np.zeros(0, dtype=complex), np.zeros((0, 0), dtype=complex)
    scale = op_norm(m)
    if scale == 0.0:
        n = m.shape[0]
        return np.zeros(n, dtype=complex), np.eye(n, dtype=complex)
    adj = m.conj().T
    defect = op_norm(adj @ m - m @ adj)
    if defect > tol * scale * scale:
        raise NotNormal(
            f"commutator norm {defect:.3e} exceeds {tol:.1e} * ||a||^2 = {tol * scale * scale:.3e}"
        )
    if op_norm(m - adj) <= tol * scale:
        w, v = _hermitian_eigensystem((m + adj) / 2.0)
        order = np.argsort(w, kind="stable")
        return w[order].astype(complex), v[:, order]

    h = (m + adj) / 2.0
    k = (m - adj) / 2.0j
    wh, v = _hermitian_eigensystem(h)
    cluster_tol = max(_CLUSTER_FLOOR, 10.0 * tol) * scale
    start = 0
    n = m.shape[0]
    for i in range(1, n + 1):
        if i == n or wh[i] - wh[i - 1] > cluster_tol:
            if i - start > 1:
                block = v[:, start:i]
                kc = block.conj().T @ k @ block
                kc = (kc + kc.conj().T) / 2.0
                _, u = _hermitian_eigensystem(kc)
                v[:, start:i] = block @ u
            start = i
    eigs = np.einsum("ij,ik,kj->j", v.conj(), m, v)
    order = sorted(range(n), key=lambda j: (eigs[j].real, eigs[j].imag))
    return eigs[order], v[:, order]


def eig_normal(a, tol: float = DEFAULT_RESOLUTION) -> SpectrumSet:
    """Spectrum of a normal matrix as a SpectrumSet at resolution tol."""
    eigs, _ = normal_eigensystem(a, tol)
    return SpectrumSet.canonical(eigs, tol, truncated=False)


@dataclass(frozen=True)
class SampledFunction:
    """Piecewise-linear function given by breakpoints on a real interval.

    Evaluation outside [breakpoints[0], breakpoints[-1]] raises
    DomainError rather than extrapolating; a relative slack of 1e-12 at
    the endpoints absorbs rounding in eigenvalue computations.
    """

    breakpoints: tuple[float, ...]
    values: tuple[complex, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) or not self.breakpoints:
            raise ValueError("breakpoints and values must align and be nonempty")
        if any(b >= a for b, a in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def sample(
        cls, fn: Callable[[float], complex], lo: float, hi: float, count: int = 257
    ) -> "SampledFunction":
        if hi < lo:
            raise ValueError("empty sampling interval")
        if hi == lo:
            return cls((lo,), (complex(fn(lo)),))
        xs = np.linspace(lo, hi, count)
        return cls(tuple(float(x) for x in xs), tuple(complex(fn(float(x))) for x in xs))

    def domain(self) -> tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    def __call__(self, x: float) -> complex:
        lo, hi = self.domain()
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if x < lo - slack or x > hi + slack:
            raise DomainError(f"argument {x!r} outside the sampled domain [{lo}, {hi}]")
        x = min(max(x, lo), hi)
        if len(self.breakpoints) == 1:
            return self.values[0]
        xs = np.asarray(self.breakpoints)
        re = float(np.interp(x, xs, np.asarray([v.real for v in self.values])))
        im = float(np.interp(x, xs, np.asarray([v.imag for v in self.values])))
        return complex(re, im)


def func_calc(a, f: SampledFunction, tol: float = DEFAULT_RESOLUTION) -> np.ndarray:
    """Apply a sampled function to a normal matrix with real spectrum.

    Diagonalizes a, maps each eigenvalue through f and reassembles
    u f(d) u*.  Eigenvalues off the real axis (beyond tol * scale) or
    outside the sampled domain raise DomainError.
    """
    eigs, v = normal_eigensystem(a, tol)
    scale = max(1.0, float(np.max(np.abs(eigs))) if eigs.size else 0.0)
    vals = []
    for lam in eigs:
        if abs(lam.imag) > tol * scale:
            raise DomainError(
                f"eigenvalue {lam!r} lies off the real axis; sampled functions take real arguments"
            )
        vals.append(f(float(lam.real)))
    d = np.diag(np.asarray(vals, dtype=complex))
    return v @ d @ v.conj().T


def _directed_real(a: np.ndarray, b: np.ndarray) -> float:
    """max over a of distance to sorted real b."""
    idx = np.searchsorted(b, a)
    idx_lo = np.clip(idx - 1, 0, len(b) - 1)
    idx_hi = np.clip(idx, 0, len(b) - 1)
    d = np.minimum(np.abs(a - b[idx_lo]), np.abs(a - b[idx_hi]))
    return float(np.max(d))


def hausdorff(s1: SpectrumSet, s2: SpectrumSet) -> float:
    """Hausdorff distance between two nonempty spectrum sets.

    Raises EmptySet when either side has no points (the distance to an
    empty spectrum is not a number the callers can act on).
    """
    if not s1.points or not s2.points:
        raise EmptySet("hausdorff distance needs two nonempty spectra")
    a = np.asarray(s1.points, dtype=complex)
    b = np.asarray(s2.points, dtype=complex)
    if np.all(a.imag == 0.0) and np.all(b.imag == 0.0):
        ar = np.sort(a.real)
        br = np.sort(b.real)
        return max(_directed_real(ar, br), _directed_real(br, ar))
    # chunked pairwise distances; sets here are desk-sized
    def directed(x: np.ndarray, y: np.ndarray) -> float:
        worst = 0.0
        step = 512
        for i in range(0, len(x), step):
            block = np.abs(x[i : i + step, None] - y[None, :])
            worst = max(worst, float(np.max(np.min(block, axis=1))))
        return worst

    return max(directed(a, b), directed(b, a))
