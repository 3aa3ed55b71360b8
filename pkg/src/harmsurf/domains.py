"""Parameter domains, branch-cut bookkeeping, and period cycles.

Three domain kinds are supported: the punctured Riemann sphere, hyperelliptic
curves w^2 = prod(z - b_k) with all-real branch points, and rectangular tori.
The square-root product w is evaluated factor by factor with principal square
roots; with real branch points that convention is single valued off a set of
real slit intervals determined by a parity rule (a point x is on a slit iff an
odd number of branch points lies to its right).  Values *on* a slit are the
boundary values from the upper or lower half plane, selected explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleError, SlitError

#: Point at infinity on the Riemann sphere.
INF = complex(math.inf, 0.0)

_FEATURE_MERGE_TOL = 1e-12


def is_infinite(p: complex) -> bool:
    return math.isinf(complex(p).real) or math.isinf(complex(p).imag)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PuncturedSphere:
    """Riemann sphere minus a finite puncture set (at most one at infinity)."""

    punctures: tuple

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.punctures)
        object.__setattr__(self, "punctures", pts)
        n_inf = sum(1 for p in pts if is_infinite(p))
        if n_inf > 1:
            raise DomainError("at most one puncture may be the point at infinity")
        finite = [p for p in pts if not is_infinite(p)]
        for i in range(len(finite)):
            for j in range(i + 1, len(finite)):
                if abs(finite[i] - finite[j]) <= _FEATURE_MERGE_TOL:
                    raise DomainError(f"coincident punctures {finite[i]} and {finite[j]}")

    @property
    def finite_punctures(self):
        return tuple(p for p in self.punctures if not is_infinite(p))

    @property
    def has_infinity(self):
        return any(is_infinite(p) for p in self.punctures)


@dataclass(frozen=True)
class HyperellipticCurve:
    """w^2 = prod(z - b) over distinct real branch points.

    ``branch_points`` is kept sorted.  An odd count means the remaining branch
    point sits at infinity; the genus follows from the count.  ``chain`` is the
    ordered list of branch points along which the symmetry-reduced period
    segments run (consecutive pairs); it defaults to the sorted points but
    family builders may prescribe the construction order instead.
    """

    branch_points: tuple
    chain: tuple = None
    genus: int = field(init=False)
    slit_intervals: tuple = field(init=False)

    def __post_init__(self):
        pts = tuple(sorted(float(b) for b in self.branch_points))
        if len(pts) < 2:
            raise DomainError("need at least two branch points")
        for u, v in zip(pts, pts[1:]):
            if v - u <= _FEATURE_MERGE_TOL:
                raise DomainError(f"coincident branch points {u} and {v}")
        object.__setattr__(self, "branch_points", pts)
        m = len(pts)
        g = (m - 2) // 2 if m % 2 == 0 else (m - 1) // 2
        object.__setattr__(self, "genus", g)
        object.__setattr__(self, "slit_intervals", _slits_from_sorted(pts))
        chain = self.chain if self.chain is not None else pts
        chain = tuple(float(c) for c in chain)
        for c in chain:
            if not any(abs(c - b) <= _FEATURE_MERGE_TOL for b in pts):
                raise DomainError(f"chain point {c} is not a branch point")
        object.__setattr__(self, "chain", chain)

    @property
    def infinity_is_branch_point(self):
        return len(self.branch_points) % 2 == 1


@dataclass(frozen=True)
class RectTorus:
    """Rectangular torus spanned by 1 and tau (Im tau > 0), with punctures."""

    tau: complex
    punctures: tuple = ()

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise DomainError("torus modulus must have positive imaginary part")
        object.__setattr__(self, "tau", tau)
        pts = tuple(complex(p) for p in self.punctures)
        for p in pts:
            if not (0 <= p.real < 1 and 0 <= p.imag < tau.imag):
                raise DomainError(f"puncture {p} outside the fundamental cell")
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if abs(pts[i] - pts[j]) <= _FEATURE_MERGE_TOL:
                    raise DomainError("coincident punctures on the torus")
        object.__setattr__(self, "punctures", pts)


Domain = (PuncturedSphere, HyperellipticCurve, RectTorus)


def _slits_from_sorted(pts):
    """Open real intervals where the per-factor sqrt product jumps sign.

    Crossing the real axis at x flips the sign of prod sqrt(z - b) exactly when
    an odd number of branch points exceeds x.  For an even count that yields
    (b1,b2), (b3,b4), ...; for an odd count (-inf,b1), (b2,b3), ....
    """
    m = len(pts)
    slits = []
    if m % 2 == 1:
        slits.append((-math.inf, pts[0]))
        start = 1
    else:
        start = 0
    for i in range(start, m - 1, 2):
        slits.append((pts[i], pts[i + 1]))
    return tuple(slits)


def on_slit(curve: HyperellipticCurve, x: float) -> bool:
    for lo, hi in curve.slit_intervals:
        if lo < x < hi:
            return True
    return False


# ---------------------------------------------------------------------------
# per-factor square roots
# ---------------------------------------------------------------------------


def sqrt_factors(z, roots, slit_rule="upper"):
    """prod_k sqrt(z - r_k) with principal branches, vectorized over z.

    Real inputs are evaluated through a magnitude / quarter-turn decomposition
    so the result's real and imaginary parts are exact zeros where the product
    is exactly imaginary or real; ``slit_rule`` selects the boundary value
    ("upper" or "lower") used for real z sitting left of a root.
    """
    z = np.asarray(z)
    roots = [float(r) for r in roots]
    if z.dtype.kind != "c" and np.isrealobj(z):
        return _sqrt_factors_real(z.astype(float), roots, slit_rule)
    zc = z.astype(complex)
    real_mask = zc.imag == 0.0
    out = np.empty(zc.shape, dtype=complex)
    if real_mask.any():
        out[real_mask] = _sqrt_factors_real(zc.real[real_mask], roots, slit_rule)
    if (~real_mask).any():
        v = np.ones(np.count_nonzero(~real_mask), dtype=complex)
        zz = zc[~real_mask]
        for r in roots:
            v = v * np.sqrt(zz - r)
        out[~real_mask] = v
    return out


def _sqrt_factors_real(x, roots, slit_rule):
    sign = 1 if slit_rule == "upper" else -1
    if slit_rule not in ("upper", "lower"):
        raise ValueError(f"slit_rule must be 'upper' or 'lower', got {slit_rule!r}")
    mag = np.ones_like(x)
    qturns = np.zeros(x.shape, dtype=np.int64)
    for r in roots:
        dx = x - r
        neg = dx < 0
        mag = mag * np.sqrt(np.abs(dx))
        qturns = qturns + neg
    return _from_quarter_turns(mag, sign * qturns)


def _from_quarter_turns(mag, qturns):
    """mag * i**qturns with exact zeros in the untouched component."""
    q = np.mod(qturns, 4)
    re = np.where(q == 0, mag, np.where(q == 2, -mag, 0.0))
    im = np.where(q == 1, mag, np.where(q == 3, -mag, 0.0))
    return re + 1j * im


def half_power(z, p, slit_rule="upper"):
    """z**(p/2) (principal), exact-split on the real axis; p is an integer."""
    z = np.asarray(z)
    p = int(p)
    if p == 0:
        return np.ones(z.shape, dtype=complex)
    if z.dtype.kind != "c" and np.isrealobj(z):
        return _half_power_real(z.astype(float), p, slit_rule)
    zc = z.astype(complex)
    real_mask = zc.imag == 0.0
    out = np.empty(zc.shape, dtype=complex)
    if real_mask.any():
        out[real_mask] = _half_power_real(zc.real[real_mask], p, slit_rule)
    if (~real_mask).any():
        out[~real_mask] = np.power(zc[~real_mask], p / 2.0)
    return out


def _half_power_real(x, p, slit_rule):
    sign = 1 if slit_rule == "upper" else -1
    with np.errstate(divide="ignore"):
        mag = np.abs(x) ** (p / 2.0)
    qturns = np.where(x < 0, sign * p, 0)
    return _from_quarter_turns(mag, qturns)


def evaluate_w(curve: HyperellipticCurve, z, slit_rule="raise"):
    """The sqrt-product w(z) = prod sqrt(z - b_k), single valued off the slits.

    ``slit_rule="raise"`` (the default) signals real inputs that sit on a slit
    interval or at a branch point; "upper"/"lower" return the corresponding
    boundary values instead.
    """
    scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    if slit_rule == "raise":
        on_axis = za.imag == 0.0
        for x in za.real[on_axis]:
            if any(abs(x - b) <= _FEATURE_MERGE_TOL for b in curve.branch_points):
                raise PoleError(f"z={x} is a branch point of the curve")
            if on_slit(curve, x):
                raise SlitError(f"z={x} lies on a slit interval of the curve")
        rule = "upper"
    else:
        rule = slit_rule
    out = sqrt_factors(za, curve.branch_points, slit_rule=rule)
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# cycles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex
    singular_start: bool = False
    singular_end: bool = False
    sheet: int = 1
    slit_rule: str = "upper"

    def point(self, t):
        t = np.asarray(t)
        s, e = complex(self.start), complex(self.end)
        if s.imag == 0.0 and e.imag == 0.0:
            # keep real-axis paths exactly real so form evaluation can split
            return (s.real + t * (e.real - s.real)).astype(float)
        return s + t * (e - s)

    def derivative(self, t):
        t = np.asarray(t)
        return np.full(t.shape, complex(self.end) - complex(self.start))


@dataclass(frozen=True)
class ArcSegment:
    center: complex
    radius: float
    theta0: float
    theta1: float
    singular_start: bool = False
    singular_end: bool = False
    sheet: int = 1
    slit_rule: str = "upper"

    def point(self, t):
        t = np.asarray(t)
        th = self.theta0 + t * (self.theta1 - self.theta0)
        return complex(self.center) + self.radius * np.exp(1j * th)

    def derivative(self, t):
        t = np.asarray(t)
        th = self.theta0 + t * (self.theta1 - self.theta0)
        return 1j * self.radius * (self.theta1 - self.theta0) * np.exp(1j * th)


@dataclass(frozen=True)
class Cycle:
    """A period path: around-puncture / real-segment / half-circle / lattice-*."""

    kind: str
    pieces: tuple
    data: tuple = ()

    @property
    def label(self):
        if self.data:
            inner = ",".join(_fmt(d) for d in self.data)
            return f"{self.kind}({inner})"
        return self.kind

    @property
    def closed(self):
        return self.kind in ("around-puncture", "lattice-1", "lattice-tau")


def _fmt(v):
    v = complex(v)
    if v.imag == 0:
        return f"{v.real:g}"
    return f"{v:g}"


def around_puncture_cycle(p, radius, sheet_flips=(1, 1)):
    """Counterclockwise circle around p, split at the real axis.

    ``sheet_flips`` are the multiplicative sheet signs on the upper and lower
    semicircles; callers that track square-root monodromy pass (1, -1).
    """
    p = complex(p)
    upper = ArcSegment(p, radius, 0.0, math.pi, sheet=sheet_flips[0])
    lower = ArcSegment(p, radius, math.pi, 2 * math.pi, sheet=sheet_flips[1])
    return Cycle("around-puncture", (upper, lower), (p,))


def real_segment_cycle(a, b, singular=(True, True), slit_rule="upper"):
    seg = LineSegment(complex(a), complex(b), singular[0], singular[1], slit_rule=slit_rule)
    return Cycle("real-segment", (seg,), (a, b))


def half_circle_cycle(a, b, singular=(True, True)):
    """Upper half circle with diameter [a, b], run from a to b."""
    a, b = float(a), float(b)
    center = 0.5 * (a + b)
    radius = abs(b - a) / 2.0
    # stay in the upper half plane: counterclockwise when a is the right end
    if a > b:
        th0, th1 = 0.0, math.pi
    else:
        th0, th1 = math.pi, 0.0
    arc = ArcSegment(complex(center), radius, th0, th1, singular[0], singular[1])
    return Cycle("half-circle", (arc,), (a, b, "upper"))


def canonical_cycles(domain, horizontal_offset=0.3j):
    """The period cycles each domain kind is verified against.

    Punctured sphere: one counterclockwise circle around every finite
    puncture.  Hyperelliptic curve: the real segments joining consecutive
    points of the construction chain, with an upper half-circle substituted
    whenever the straight segment would run through z=0, infinity, or another
    branch point.  Torus: the horizontal cycle at ``horizontal_offset`` and the
    vertical cycle from 0 to tau.
    """
    if isinstance(domain, PuncturedSphere):
        finite = domain.finite_punctures
        cycles = []
        for p in finite:
            d = _min_dist(p, [q for q in finite if q != p])
            radius = 0.4 * d if d < math.inf else 0.5
            cycles.append(around_puncture_cycle(p, radius))
        return cycles
    if isinstance(domain, HyperellipticCurve):
        chain = domain.chain
        cycles = []
        others = set(domain.branch_points)
        for a, b in zip(chain, chain[1:]):
            lo, hi = min(a, b), max(a, b)
            blocked = any(lo < q < hi for q in others if q not in (a, b))
            blocked = blocked or (lo < 0.0 < hi)
            if blocked:
                cycles.append(half_circle_cycle(a, b))
            else:
                cycles.append(real_segment_cycle(a, b))
        return cycles
    if isinstance(domain, RectTorus):
        off = complex(horizontal_offset)
        tau = domain.tau
        for p in domain.punctures:
            if abs(p.imag - off.imag) < 1e-9 or min(p.real, abs(p.real - 1.0)) < 1e-9:
                raise DomainError(
                    f"puncture {p} lies on a lattice cycle; choose another horizontal_offset"
                )
        horiz = Cycle("lattice-1", (LineSegment(off, 1.0 + off),))
        vert = Cycle("lattice-tau", (LineSegment(0.0, tau),))
        return [horiz, vert]
    raise TypeError(f"not a domain: {domain!r}")


def _min_dist(p, others):
    ds = [abs(complex(p) - complex(q)) for q in others if not is_infinite(q)]
    return min(ds) if ds else math.inf


# ---------------------------------------------------------------------------
# feature distances
# ---------------------------------------------------------------------------


def nearest_feature_distance(domain, z) -> float:
    """Distance from z to the closest puncture or branch point of the domain."""
    z = complex(z)
    if isinstance(domain, PuncturedSphere):
        return _min_dist(z, domain.finite_punctures)
    if isinstance(domain, HyperellipticCurve):
        return _min_dist(z, domain.branch_points)
    if isinstance(domain, RectTorus):
        best = math.inf
        tau = domain.tau
        for p in domain.punctures:
            for m in (-1, 0, 1):
                for n in (-1, 0, 1):
                    best = min(best, abs(z - (p + m + n * tau)))
        return best
    raise TypeError(f"not a domain: {domain!r}")
