"""Self-adjoint observables evaluated fiberwise through the Cayley map.

An observable is a tuple of fibers, each either a self-adjoint matrix
or the formal infinite fiber.  Spectra go through the bounded transform
    w = (lam + i) / (lam - i),
whose image is the unit circle minus the point 1; the infinite fiber is
exactly the constant 1 there and has empty spectrum.  Inverting the
transform is exact, so nothing is lost for bounded fibers, while
numerically huge eigenvalues land within the discard radius of w = 1
and are reported through the truncated flag rather than as garbage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotCertified, NotSelfAdjoint
from .spectral import DEFAULT_RESOLUTION, SpectrumSet, as_matrix, eig_normal, union_spectra

_SELFADJOINT_TOL = 1e-10


class _InfiniteFiber:
    """Marker for the formal infinite fiber; compares by identity."""

    __slots__ = ()

    def __repr__(self):
        return "INFINITE"


INFINITE = _InfiniteFiber()


@dataclass(frozen=True)
class Observable:
    """Fiberwise presentation of a self-adjoint observable."""

    fibers: tuple
    truncated: bool = False
    label: str = ""

    def __post_init__(self):
        if not self.fibers:
            raise ValueError("an observable needs at least one fiber")
        checked = []
        for f in self.fibers:
            if f is INFINITE:
                checked.append(f)
                continue
            m = as_matrix(f)
            scale = max(1.0, float(np.abs(m).max()))
            gap = float(np.abs(m - m.conj().T).max())
            if gap > _SELFADJOINT_TOL * scale:
                raise NotSelfAdjoint(
                    f"fiber is not self-adjoint (asymmetry {gap:.3e} at scale {scale:.3e})"
                )
            m.setflags(write=False)
            checked.append(m)
        object.__setattr__(self, "fibers", tuple(checked))

    @classmethod
    def bounded(cls, matrix, label: str = "") -> "Observable":
        return cls((matrix,), truncated=False, label=label)

    @classmethod
    def infinite(cls, label: str = "") -> "Observable":
        return cls((INFINITE,), truncated=False, label=label)

    @classmethod
    def fibered(cls, matrices, truncated: bool = True, label: str = "") -> "Observable":
        """Finitely many sampled fibers of a fibered observable.

        Sampling a continuum of fibers is a truncation, so the flag
        defaults to True.
        """
        return cls(tuple(matrices), truncated=truncated, label=label)


@dataclass(frozen=True)
class CayleyImage:
    """Unitary images (lam + i)/(lam - i) of the fibers, one per fiber."""

    fibers: tuple
    truncated: bool


def _cayley_matrix(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    circle = (w + 1j) / (w - 1j)
    return (v * circle) @ v.conj().T


def cayley(obs: Observable) -> CayleyImage:
    """Unitary fiber images; the infinite fiber maps to the constant 1."""
    out = []
    for f in obs.fibers:
        if f is INFINITE:
            out.append(np.array([[1.0 + 0j]]))
        else:
            out.append(_cayley_matrix(f))
    return CayleyImage(tuple(out), obs.truncated)


def _inverse_cayley(w: complex) -> float:
    lam = 1j * (w + 1.0) / (w - 1.0)
    return float(lam.real)


def spec_observable(
    obs: Observable, resolution: float = DEFAULT_RESOLUTION
) -> SpectrumSet:
    """Spectrum through the Cayley route.

    Unitary eigenvalues within the discard radius of w = 1 correspond
    to |lam| of order 2/resolution and are dropped with truncated=True;
    the infinite fiber contributes nothing and no truncation, its
    spectrum is exactly empty.
    """
    points: list[complex] = []
    truncated = obs.truncated
    for f in obs.fibers:
        if f is INFINITE:
            continue
        u = _cayley_matrix(f)
        for w in eig_normal(u, tol=max(resolution, 1e-12)).points:
            if abs(w - 1.0) <= resolution:
                truncated = True
                continue
            points.append(complex(_inverse_cayley(w)))
    return SpectrumSet.canonical(points, resolution, truncated=truncated)


def spec_union_observable(
    members, resolution: float = DEFAULT_RESOLUTION
) -> SpectrumSet:
    """Canonicalized union of member-observable spectra."""
    members = tuple(members)
    if not members:
        raise ValueError("the member list must be nonempty")
    return union_spectra(
        [spec_observable(o, resolution) for o in members], resolution=resolution
    )


@dataclass(frozen=True)
class ObservableVerdict:
    invertible: bool
    degenerate: bool
    min_distance: float | None
    bound_used: float | None
    certificate: str

    def as_dict(self) -> dict:
        return {
            "invertible": self.invertible,
            "degenerate": self.degenerate,
            "min_distance": self.min_distance,
            "bound_used": self.bound_used,
            "certificate": self.certificate,
        }


def invertible_observable(
    members,
    certificate: str = "exhausting",
    bound: float | None = None,
    tol: float = DEFAULT_RESOLUTION,
) -> ObservableVerdict:
    """Invertibility of a fibered observable from its member spectra.

    exhausting: invertible iff no member spectrum meets zero beyond tol.
    faithful:   additionally needs the uniform bound, and the distance
                from zero must clear 1/bound.
    All-infinite members make the union empty; that verdict is flagged
    degenerate rather than silently claimed.
    """
    if certificate not in ("exhausting", "faithful"):
        raise ValueError(f"unknown certificate {certificate!r}")
    if certificate == "faithful" and bound is None:
        raise NotCertified("the faithful route needs a uniform inverse bound")
    if bound is not None and bound <= 0:
        raise ValueError("the uniform inverse bound must be positive")
    union = spec_union_observable(members, resolution=tol)
    if len(union) == 0:
        return ObservableVerdict(
            invertible=True,
            degenerate=True,
            min_distance=None,
            bound_used=bound if certificate == "faithful" else None,
            certificate=certificate,
        )
    dist = min(abs(p) for p in union.points)
    ok = dist > tol
    if certificate == "faithful":
        ok = ok and dist * bound >= 1.0 - 1e-12
    return ObservableVerdict(
        invertible=bool(ok),
        degenerate=False,
        min_distance=float(dist),
        bound_used=bound if certificate == "faithful" else None,
        certificate=certificate,
    )
