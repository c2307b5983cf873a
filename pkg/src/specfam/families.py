"""Families of representations and the verdicts they certify.

A family can be checked for three nested completeness grades:

* full       -- its supports cover every enumerated primitive point;
* exhausting -- every probe's norm is attained by some member, within
                certified error bars (probe-certificate semantics over a
                deterministic gallery plus user elements);
* faithful   -- no nonzero probe is annihilated and the support union is
                dense at grid resolution.

full implies exhausting implies faithful, and family_report enforces the
chain on every emitted report.  Invertibility goes through two routes:
the exhausting route needs no bound, the faithful route needs a uniform
inverse bound; both count a member image invertible only when its
smallest singular value clears max(resolution, lipschitz * grid_step),
anything less is "not invertible at this resolution".
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import NotCertified, UnsupportedModel
from .models import (
    AlgebraElement,
    Element,
    FunctionModel,
    PrimPoint,
    Representation,
    ToeplitzElement,
    ToeplitzModel,
    elem_norm,
    enum_prim,
    rep_apply,
    toeplitz_norm,
)
from .spectral import DEFAULT_RESOLUTION, SpectrumSet, eig_normal, union_spectra

_SLACK = 1e-9


@dataclass(frozen=True)
class RepFamily:
    """Nonempty list of representations of one model."""

    model: FunctionModel | ToeplitzModel
    members: tuple[Representation, ...]
    label: str = ""

    def __post_init__(self):
        if not self.members:
            raise ValueError("a family needs at least one member")
        toeplitz = isinstance(self.model, ToeplitzModel)
        for m in self.members:
            if toeplitz != m.kind.startswith("toeplitz"):
                raise ValueError(f"member {m.label} does not act on this model")


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: str | None = None
    detail: str = ""


@dataclass(frozen=True)
class FamilyReport:
    """Serialized outcome of the three completeness checks."""

    label: str
    faithful: bool
    exhausting: bool
    full: bool
    faithful_witness: str | None
    exhausting_witness: str | None
    full_witness: str | None
    probes_used: tuple[str, ...]
    tolerances: dict

    def __post_init__(self):
        if self.full and not self.exhausting:
            raise RuntimeError("report violates full => exhausting")
        if self.exhausting and not self.faithful:
            raise RuntimeError("report violates exhausting => faithful")

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "faithful": self.faithful,
            "exhausting": self.exhausting,
            "full": self.full,
            "witnesses": {
                "faithful": self.faithful_witness,
                "exhausting": self.exhausting_witness,
                "full": self.full_witness,
            },
            "probes_used": list(self.probes_used),
            "tolerances": dict(self.tolerances),
        }


# ---------------------------------------------------------------------------
# probe gallery


def _tent_values(space, center: float) -> list[float]:
    h = space.grid_step if space.grid_step > 0 else 1.0
    return [max(0.0, 1.0 - space.distance(t, center) / h) for t in space.sample_grid]


def _tent_element(model: FunctionModel, center: float, block: int | None) -> AlgebraElement:
    d = model.fiber_dim
    space = model.space
    if block is None:
        proj = np.eye(d, dtype=complex)
        label = f"tent({center:.12g})"
    else:
        c = model.structure.constraint_at(center)
        proj = np.zeros((d, d), dtype=complex)
        for i in c.blocks[block]:
            proj[i, i] = 1.0
        label = f"tent({center:.12g})[{block}]"
    heights = _tent_values(space, center)
    mats = tuple(h * proj for h in heights)
    lip = 0.0 if space.grid_step == 0 else 1.0 / space.grid_step
    return AlgebraElement(model, space.sample_grid, mats, lip, label)


@functools.lru_cache(maxsize=64)
def _base_gallery(model) -> tuple[Element, ...]:
    probes: list[Element] = []
    if isinstance(model, FunctionModel):
        probes.append(AlgebraElement.identity(model, label="probe:1"))
        for prim in enum_prim(model):
            probes.append(_tent_element(model, prim.point, prim.block))
    elif isinstance(model, ToeplitzModel):
        probes.append(ToeplitzElement.identity(model, label="probe:1"))
        probes.append(ToeplitzElement.shift(model, label="probe:S"))
        probes.append(ToeplitzElement.shift(model).adjoint())
        probes.append(ToeplitzElement.build(model, {1: 1.0, -1: 1.0}, label="probe:2cos"))
        probes.append(
            ToeplitzElement.build(model, {}, correction=np.array([[1.0]]), label="probe:e00")
        )
    else:
        raise UnsupportedModel(f"no probe gallery for {type(model).__name__}")
    return tuple(probes)


def standard_probes(model, extras: tuple[Element, ...] = ()) -> tuple[Element, ...]:
    """Deterministic probe gallery: identity, one tent per primitive point,
    the user's elements, and the norm-gap probe |a|^2 - a*a of each."""
    probes = list(_base_gallery(model))
    for a in extras:
        probes.append(a)
        v = elem_norm(a).value
        gap = v * v - a.adjoint() * a
        object.__setattr__(gap, "label", f"gap({a.label})")
        probes.append(gap)
    return tuple(probes)


# ---------------------------------------------------------------------------
# member norms


def _batched_norms(mats: list[np.ndarray]) -> list[float]:
    by_shape: dict[tuple[int, int], list[int]] = {}
    for i, m in enumerate(mats):
        by_shape.setdefault(m.shape, []).append(i)
    out = [0.0] * len(mats)
    for shape, idx in by_shape.items():
        stack = np.stack([mats[i] for i in idx])
        svals = np.linalg.svd(stack, compute_uv=False)
        for j, i in enumerate(idx):
            out[i] = float(svals[j][0])
    return out


def member_norm(member: Representation, a: Element) -> float:
    """Norm of the element's image under one member (ladder-aware)."""
    if member.kind == "toeplitz-identity":
        return toeplitz_norm(a).value
    m = rep_apply(member, a)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def _family_norms(family: RepFamily, a: Element) -> list[float]:
    norms = []
    direct: list[np.ndarray] = []
    direct_pos: list[int] = []
    for i, member in enumerate(family.members):
        if member.kind == "toeplitz-identity":
            norms.append(toeplitz_norm(a).value)
        else:
            norms.append(0.0)
            direct.append(rep_apply(member, a))
            direct_pos.append(i)
    if direct:
        for pos, v in zip(direct_pos, _batched_norms(direct)):
            norms[pos] = v
    return norms


def norm_via_family(family: RepFamily, a: Element) -> float:
    """sup of member image norms; equals the norm for exhausting families."""
    return max(_family_norms(family, a))


# ---------------------------------------------------------------------------
# the three completeness checks


def _member_supports(family: RepFamily, prims: tuple[PrimPoint, ...]) -> set[str]:
    by_label = {p.label: p for p in prims}
    covered: set[str] = set()
    for member in family.members:
        hit: list[PrimPoint] = []
        if member.kind == "eval":
            hit = [
                p for p in prims
                if p.point is not None and abs(p.point - member.point) <= 1e-12
            ]
        elif member.kind == "block":
            hit = [
                p for p in prims
                if p.block == member.block
                and p.point is not None
                and abs(p.point - member.point) <= 1e-12
            ]
        elif member.kind == "toeplitz-identity":
            hit = [p for p in prims if p.kind == "toeplitz-identity"]
        elif member.kind == "toeplitz-character":
            hit = [
                p for p in prims
                if p.theta is not None and abs(p.theta - member.theta) <= 1e-12
            ]
        for p in hit:
            covered.add(p.label)
            covered.update(h for h in p.closure_hint if h in by_label)
    return covered


def check_full(family: RepFamily) -> CheckResult:
    """Exact support cover of the enumerated primitive points."""
    prims = enum_prim(family.model)
    covered = _member_supports(family, prims)
    for p in prims:
        if p.label not in covered:
            return CheckResult(False, p.label, "uncovered primitive point")
    return CheckResult(True)


def check_exhausting(
    family: RepFamily, probes: tuple[Element, ...], slack: float = _SLACK
) -> CheckResult:
    """Probe-certificate check: each probe's norm attained by some member."""
    if not probes:
        raise ValueError("probe set must be nonempty")
    for a in probes:
        value, error = elem_norm(a)
        attained = norm_via_family(family, a)
        if attained < value - error - slack:
            return CheckResult(
                False, a.label,
                f"norm {value:.6g} attained only to {attained:.6g} (bar {error:.3g})",
            )
    return CheckResult(True)


def _coverage_radius(family: RepFamily) -> float | None:
    """How far a base point can be from the family's nearest evaluation.

    None when the notion does not apply (no evaluation members, or no
    characters on a symbol model), in which case annihilation can only
    be certified for probes with zero slope.
    """
    model = family.model
    if isinstance(model, FunctionModel):
        pts = [m.point for m in family.members if m.kind == "eval"]
        if not pts:
            return None
        return max(
            min(model.space.distance(g, p) for p in pts)
            for g in model.space.sample_grid
        )
    thetas = sorted(
        m.theta % (2.0 * np.pi)
        for m in family.members
        if m.kind == "toeplitz-character"
    )
    if not thetas:
        return None
    gaps = [b - a for a, b in zip(thetas, thetas[1:])]
    gaps.append(thetas[0] + 2.0 * np.pi - thetas[-1])
    return max(gaps) / 2.0


def _probe_slope(a: Element) -> float:
    if isinstance(a, AlgebraElement):
        return a.lipschitz_bound
    return a.symbol_slope_bound()


def check_faithful(
    family: RepFamily, probes: tuple[Element, ...], slack: float = _SLACK
) -> CheckResult:
    """No certified-annihilated nonzero probe, supports dense at grid resolution.

    A probe counts annihilated only when every member maps it below the
    slack AND its slope cannot lift it above the slack anywhere within
    one coverage radius of the family's evaluations.  Vanishing exactly
    at the members of a resolution-h family is not an annihilation
    certificate; it is the expected blind spot of sampling.
    """
    if not probes:
        raise ValueError("probe set must be nonempty")
    radius = _coverage_radius(family)
    for a in probes:
        value, error = elem_norm(a)
        if value - error <= 2.0 * slack:
            continue
        if norm_via_family(family, a) > slack:
            continue
        slope = _probe_slope(a)
        allowance = 0.0 if slope == 0.0 else (np.inf if radius is None else slope * radius)
        if allowance <= slack:
            return CheckResult(False, a.label, "nonzero probe annihilated by every member")
    prims = enum_prim(family.model)
    covered = _member_supports(family, prims)
    if isinstance(family.model, FunctionModel):
        step = family.model.space.grid_step
        eval_points = [m.point for m in family.members if m.kind == "eval"]
        for p in prims:
            if p.label in covered:
                continue
            near = any(
                family.model.space.distance(p.point, q) <= step + 1e-12
                for q in eval_points
            )
            if not near:
                return CheckResult(
                    False, p.label, "open region uncovered beyond grid resolution"
                )
    else:
        for p in prims:
            if p.label not in covered:
                return CheckResult(
                    False, p.label, "open region uncovered beyond grid resolution"
                )
    return CheckResult(True)


def family_report(
    family: RepFamily,
    probes: tuple[Element, ...] = (),
    slack: float = _SLACK,
) -> FamilyReport:
    """Run all three checks over the standard gallery plus user probes."""
    gallery = standard_probes(family.model, extras=tuple(probes))
    full = check_full(family)
    exhausting = check_exhausting(family, gallery, slack)
    faithful = check_faithful(family, gallery, slack)
    return FamilyReport(
        label=family.label,
        faithful=faithful.ok,
        exhausting=exhausting.ok,
        full=full.ok,
        faithful_witness=faithful.witness,
        exhausting_witness=exhausting.witness,
        full_witness=full.witness,
        probes_used=tuple(p.label for p in gallery),
        tolerances={"slack": slack},
    )


# ---------------------------------------------------------------------------
# invertibility


def invertibility_threshold(a: Element, tol: float = DEFAULT_RESOLUTION) -> float:
    """Smallest singular value a member image must clear to count invertible."""
    if isinstance(a, AlgebraElement):
        return max(tol, a.lipschitz_bound * a.model.space.grid_step)
    return tol


@dataclass(frozen=True)
class MemberCheck:
    label: str
    sigma_min: float
    invertible: bool


def member_invertibility(
    family: RepFamily, a: Element, tol: float = DEFAULT_RESOLUTION
) -> list[MemberCheck]:
    """Plain per-member nonsingularity at bare resolution.

    This is the naive verdict; it is exactly the quantity that misleads
    for faithful-but-not-exhausting families, so it is reported
    separately from the certified routes.
    """
    out = []
    for member in family.members:
        m = rep_apply(member, a)
        sigma = float(np.linalg.svd(m, compute_uv=False)[-1]) if m.size else 0.0
        out.append(MemberCheck(member.label, sigma, sigma > tol))
    return out


def _member_sigma_mins(family: RepFamily, a: Element) -> list[tuple[str, float]]:
    out = []
    for member in family.members:
        m = rep_apply(member, a)
        sigma = float(np.linalg.svd(m, compute_uv=False)[-1]) if m.size else 0.0
        out.append((member.label, sigma))
    return out


def invertible_via_exhausting(
    family: RepFamily,
    a: Element,
    probes: tuple[Element, ...] = (),
    tol: float = DEFAULT_RESOLUTION,
    slack: float = _SLACK,
) -> bool:
    """Invertibility through an exhausting certificate.

    The certificate is recomputed over the standard gallery extended by
    the element and its norm-gap probe; NotCertified when it fails.
    """
    gallery = standard_probes(family.model, extras=(a,) + tuple(probes))
    cert = check_exhausting(family, gallery, slack)
    if not cert.ok:
        raise NotCertified(
            f"family {family.label!r} is not exhausting over the probe gallery "
            f"(witness {cert.witness})"
        )
    threshold = invertibility_threshold(a, tol)
    return all(sigma > threshold for _, sigma in _member_sigma_mins(family, a))


def invertible_via_faithful(
    family: RepFamily,
    a: Element,
    bound: float,
    probes: tuple[Element, ...] = (),
    tol: float = DEFAULT_RESOLUTION,
    slack: float = _SLACK,
) -> bool:
    """Invertibility through a faithful certificate plus a uniform bound.

    True iff every member image is invertible at this resolution with
    inverse norm at most `bound`.
    """
    if bound <= 0:
        raise ValueError("the uniform inverse bound must be positive")
    gallery = standard_probes(family.model, extras=(a,) + tuple(probes))
    cert = check_faithful(family, gallery, slack)
    if not cert.ok:
        raise NotCertified(
            f"family {family.label!r} is not faithful over the probe gallery "
            f"(witness {cert.witness})"
        )
    threshold = invertibility_threshold(a, tol)
    for _, sigma in _member_sigma_mins(family, a):
        if sigma <= threshold or sigma * bound < 1.0 - 1e-12:
            return False
    return True


@dataclass(frozen=True)
class DirectCheck:
    invertible: bool
    sigma_min: float
    margin: float


def direct_invertible(a: AlgebraElement, tol: float = DEFAULT_RESOLUTION) -> DirectCheck:
    """Certified direct invertibility over a midpoint-refined grid."""
    if not isinstance(a, AlgebraElement):
        raise UnsupportedModel("direct invertibility applies to function-model elements")
    bps = list(a.breakpoints)
    space = a.model.space
    if space.kind == "discrete":
        pts = bps
        gap = 0.0
    else:
        mids = [(s + t) / 2.0 for s, t in zip(bps, bps[1:])]
        pts = sorted(bps + mids)
        gap = max((t - s for s, t in zip(pts, pts[1:])), default=0.0)
        if space.kind == "circle":
            pts.append((bps[-1] + 1.0) / 2.0)
            gap = max(gap, 1.0 - bps[-1])
    mats = [a.value_at(t) for t in pts]
    sigmas = [float(np.linalg.svd(m, compute_uv=False)[-1]) for m in mats]
    sigma = min(sigmas)
    margin = sigma - a.lipschitz_bound * gap / 2.0
    return DirectCheck(margin > tol, sigma, margin)


# ---------------------------------------------------------------------------
# spectra and Fredholm detection


def spectrum_union(
    family: RepFamily, a: Element, tol: float = 1e-9
) -> SpectrumSet:
    """Canonicalized union of member spectra.

    Under an exhausting certificate the union equals the spectrum; under
    a faithful certificate it is dense in it.  Each member image must be
    normal (eig_normal enforces this fiberwise).
    """
    parts = []
    for member in family.members:
        if member.kind == "toeplitz-identity":
            m = rep_apply(member, a)
            parts.append(SpectrumSet.canonical(eig_normal(m, tol).points, tol, truncated=True))
        else:
            parts.append(eig_normal(rep_apply(member, a), tol))
    return union_spectra(parts, resolution=tol)


@dataclass(frozen=True)
class FredholmVerdict:
    fredholm: bool
    inverse_bound: float | None
    failing_theta: float | None
    min_symbol: float
    certified_margin: float

    def as_dict(self) -> dict:
        return {
            "fredholm": self.fredholm,
            "inverse_bound": self.inverse_bound,
            "failing_theta": self.failing_theta,
            "min_symbol": self.min_symbol,
            "certified_margin": self.certified_margin,
        }


def fredholm_via_family(
    family: RepFamily, x: ToeplitzElement, tol: float = DEFAULT_RESOLUTION
) -> FredholmVerdict:
    """Fredholm detection through the character family of the symbol.

    The finite-rank correction is invisible to characters, which is
    exactly the quotient the symbol lives in.  Nonvanishing is certified
    between samples by the symbol's slope bound; the reported uniform
    bound is 1 / min |symbol|.
    """
    if not isinstance(family.model, ToeplitzModel) or not isinstance(x, ToeplitzElement):
        raise UnsupportedModel("Fredholm detection applies to symbol-model elements")
    thetas = [m.theta for m in family.members if m.kind == "toeplitz-character"]
    if len(thetas) != len(family.members):
        raise UnsupportedModel("the quotient family must consist of characters")
    vals = [abs(x.symbol_at(th)) for th in thetas]
    worst = int(np.argmin(vals))
    min_symbol = vals[worst]
    ts = sorted(th % (2.0 * np.pi) for th in thetas)
    gaps = [b - a for a, b in zip(ts, ts[1:])]
    gaps.append(ts[0] + 2.0 * np.pi - ts[-1])
    margin = min_symbol - x.symbol_slope_bound() * max(gaps) / 2.0
    ok = bool(margin > tol)
    return FredholmVerdict(
        fredholm=ok,
        inverse_bound=float(1.0 / min_symbol) if min_symbol > tol else None,
        failing_theta=None if ok else float(thetas[worst]),
        min_symbol=float(min_symbol),
        certified_margin=float(margin),
    )
