"""Meromorphic one-forms and their building blocks.

A ``OneForm`` is a finite sum of coefficient-weighted terms.  Five term kinds
cover all families in the gallery: rational functions, square-root products
with a half-integer power of z in front, holomorphic basis differentials
z^j dz / w on a hyperelliptic curve, quotients of translated odd theta
functions on a rectangular torus, and the constant form dz.

Conventions
-----------
* All values returned by evaluators are omega/dz, i.e. the chart coefficient
  of the form, never the form times a measure.
* Square-root terms use per-factor principal roots (see ``domains``).  Their
  values on a second sheet of the underlying curve differ by an overall sign;
  evaluators accept ``sheet=+1/-1`` and flip exactly the square-root-borne
  term kinds.
* The theta function here is the odd one,
      theta(z) = sum_n exp(pi*i*(n+1/2)^2*tau + 2*pi*i*(n+1/2)*(z+1/2)),
  which vanishes at the lattice points and satisfies
  theta(z+1) = -theta(z), theta(z+tau) = exp(-pi*i*tau - 2*pi*i*(z+1/2)) theta(z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import (
    HyperellipticCurve,
    RectTorus,
    PuncturedSphere,
    evaluate_w,
    half_power,
    is_infinite,
    on_slit,
    sqrt_factors,
)
from .errors import DomainError, PoleError, SlitError

_TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# theta functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaFunction:
    tau: complex
    truncation_tol: float = 1e-14

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise DomainError("theta modulus must have positive imaginary part")
        if not 0 < self.truncation_tol <= 1e-8:
            raise DomainError("truncation_tol must lie in (0, 1e-8]")
        object.__setattr__(self, "tau", tau)


def theta_eval(theta: ThetaFunction, z):
    """Vectorized partial sum of the odd theta series.

    The symmetric truncation index N is chosen from the Gaussian tail bound
    exp(-pi Im(tau) k^2 + 2 pi |Im z| k) < tol for all half-integers |k| > N,
    which keeps the dropped tail below truncation_tol * (|partial sum| + 1).
    """
    scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    a = math.pi * theta.tau.imag
    b = 2 * math.pi * (np.max(np.abs(za.imag)) if za.size else 0.0)
    margin = math.log(1.0 / theta.truncation_tol) + 6.0
    k_max = (b + math.sqrt(b * b + 4 * a * margin)) / (2 * a)
    n_terms = int(math.ceil(k_max + 0.5)) + 2
    if n_terms > 400:
        raise DomainError(
            "theta argument too far from the fundamental cell; reduce modulo the lattice"
        )
    k = np.arange(-n_terms, n_terms) + 0.5
    expo = 1j * math.pi * theta.tau * k[None, :] ** 2 + _TWO_PI_I * k[None, :] * (
        za[:, None] + 0.5
    )
    vals = np.exp(expo).sum(axis=1)
    return vals[0] if scalar else vals


# ---------------------------------------------------------------------------
# term kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rational:
    """numer(z) / denom(z); coefficient tuples run from the highest degree."""

    numer: tuple
    denom: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "numer", tuple(complex(c) for c in self.numer))
        object.__setattr__(self, "denom", tuple(complex(c) for c in self.denom))


@dataclass(frozen=True)
class SqrtProduct:
    """z^(z_half_power/2) * prod sqrt(z-r) / prod sqrt(z-s), per-factor roots."""

    numer_roots: tuple = ()
    denom_roots: tuple = ()
    z_half_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "numer_roots", tuple(float(r) for r in self.numer_roots))
        object.__setattr__(self, "denom_roots", tuple(float(r) for r in self.denom_roots))


@dataclass(frozen=True)
class HolomorphicBasis:
    """z^exponent / w(z) on a hyperelliptic curve."""

    curve: HyperellipticCurve
    exponent: int


@dataclass(frozen=True)
class ThetaQuotient:
    """prod theta(z-a)^alpha / prod theta(z-b)^beta on the torus of modulus tau."""

    zeros: tuple  # ((shift, order), ...)
    poles: tuple
    tau: complex

    def __post_init__(self):
        object.__setattr__(
            self, "zeros", tuple((complex(a), int(m)) for a, m in self.zeros)
        )
        object.__setattr__(
            self, "poles", tuple((complex(b), int(m)) for b, m in self.poles)
        )
        object.__setattr__(self, "tau", complex(self.tau))


@dataclass(frozen=True)
class ConstantDz:
    pass


@dataclass(frozen=True)
class Term:
    coefficient: complex
    kind: object

    def __post_init__(self):
        object.__setattr__(self, "coefficient", complex(self.coefficient))


@dataclass(frozen=True)
class OneForm:
    terms: tuple
    domain: object = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def scaled(self, factor):
        return OneForm(
            tuple(Term(t.coefficient * factor, t.kind) for t in self.terms), self.domain
        )

    def plus(self, other):
        dom = self.domain if self.domain is not None else other.domain
        return OneForm(self.terms + other.terms, dom)


@dataclass(frozen=True)
class WeierstrassTriple:
    domain: object
    omega: tuple  # three OneForm
    base_point: complex = 0.0

    def __post_init__(self):
        if len(self.omega) != 3:
            raise DomainError("a Weierstrass triple needs exactly three one-forms")
        object.__setattr__(self, "omega", tuple(self.omega))
        object.__setattr__(self, "base_point", complex(self.base_point))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _kind_values(kind, z, slit_rule, sheet):
    if isinstance(kind, Rational):
        num = np.polyval(np.asarray(kind.numer, dtype=complex), z)
        den = np.polyval(np.asarray(kind.denom, dtype=complex), z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return num / den
    if isinstance(kind, SqrtProduct):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = half_power(z, kind.z_half_power, slit_rule)
            if kind.numer_roots:
                v = v * sqrt_factors(z, kind.numer_roots, slit_rule)
            if kind.denom_roots:
                v = v / sqrt_factors(z, kind.denom_roots, slit_rule)
        return sheet * v
    if isinstance(kind, HolomorphicBasis):
        with np.errstate(divide="ignore", invalid="ignore"):
            w = evaluate_w(kind.curve, z, slit_rule if slit_rule != "raise" else "upper")
            zp = np.asarray(z, dtype=complex) ** kind.exponent if kind.exponent else 1.0
            return sheet * zp / w
    if isinstance(kind, ThetaQuotient):
        theta = ThetaFunction(kind.tau)
        v = np.ones(np.shape(z), dtype=complex)
        for a, m in kind.zeros:
            v = v * theta_eval(theta, np.asarray(z) - a) ** m
        for b, m in kind.poles:
            with np.errstate(divide="ignore", invalid="ignore"):
                v = v / theta_eval(theta, np.asarray(z) - b) ** m
        return v
    if isinstance(kind, ConstantDz):
        return np.ones(np.shape(z), dtype=complex)
    raise TypeError(f"unknown term kind {kind!r}")


def form_values(form: OneForm, z, slit_rule="upper", sheet=1):
    """omega/dz at an array of points; internal, does not police slits."""
    za = np.asarray(z)
    out = np.zeros(za.shape, dtype=complex)
    for term in form.terms:
        out = out + term.coefficient * _kind_values(term.kind, za, slit_rule, sheet)
    return out


def form_eval(form: OneForm, z, slit_rule="raise", sheet=1):
    """omega/dz at a single point, signalling poles and on-slit input."""
    zc = complex(z)
    if slit_rule == "raise":
        if zc.imag == 0.0:
            for lo, hi in _form_slits(form):
                if lo < zc.real < hi:
                    raise SlitError(f"z={zc.real} lies on a slit; pass slit_rule explicitly")
        slit_rule = "upper"
    val = complex(form_values(form, np.array([zc]), slit_rule, sheet)[0])
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise PoleError(f"form has a pole at z={zc}")
    return val


def _form_slits(form):
    """Union of real intervals where some term of the form jumps sign."""
    intervals = []
    for term in form.terms:
        kind = term.kind
        if isinstance(kind, SqrtProduct):
            roots = sorted(kind.numer_roots + kind.denom_roots)
            eff = list(roots)
            if kind.z_half_power % 2:
                eff = sorted(eff + [0.0])
            intervals.extend(_parity_slits(eff))
        elif isinstance(kind, HolomorphicBasis):
            intervals.extend(kind.curve.slit_intervals)
    return intervals


def _parity_slits(sorted_roots):
    m = len(sorted_roots)
    out = []
    if m % 2 == 1:
        out.append((-math.inf, sorted_roots[0]))
        start = 1
    else:
        start = 0
    for i in range(start, m - 1, 2):
        out.append((sorted_roots[i], sorted_roots[i + 1]))
    return out


def form_poles(form: OneForm):
    """Finite points where some term of the form is singular."""
    poles = set()
    for term in form.terms:
        kind = term.kind
        if isinstance(kind, Rational):
            den = np.asarray(kind.denom, dtype=complex)
            if den.size > 1:
                for r in np.roots(den):
                    poles.add(complex(round(r.real, 12), round(r.imag, 12)))
        elif isinstance(kind, SqrtProduct):
            for r in kind.denom_roots:
                poles.add(complex(r))
            if kind.z_half_power < 0:
                poles.add(0j)
        elif isinstance(kind, HolomorphicBasis):
            for b in kind.curve.branch_points:
                poles.add(complex(b))
        elif isinstance(kind, ThetaQuotient):
            for b, _ in kind.poles:
                poles.add(complex(b))
    return sorted(poles, key=lambda p: (p.real, p.imag))


def sqrt_terms_flip_parity(form: OneForm, x: float) -> int:
    """Number of sign flips (mod 2) of the sqrt-borne terms when crossing x.

    Raises if the form's square-root terms disagree, since then no common
    two-sheet structure exists for contour bookkeeping.
    """
    parities = set()
    has_sqrt = False
    for term in form.terms:
        kind = term.kind
        if isinstance(kind, SqrtProduct):
            has_sqrt = True
            count = sum(1 for r in kind.numer_roots + kind.denom_roots if r > x)
            if kind.z_half_power % 2 and x < 0:
                count += 1
            parities.add(count % 2)
        elif isinstance(kind, HolomorphicBasis):
            has_sqrt = True
            count = sum(1 for b in kind.curve.branch_points if b > x)
            parities.add(count % 2)
    if not has_sqrt:
        return 0
    if len(parities) != 1:
        raise DomainError("square-root terms with incompatible branch structure")
    return parities.pop()


def theta_quotient_eval(tq: ThetaQuotient, z):
    """Evaluate a theta quotient, signalling pole hits."""
    scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    tau = tq.tau
    for b, _ in tq.poles:
        # distance to the pole lattice b + Z + Z*tau
        for zz in za:
            d = _lattice_distance(zz - b, tau)
            if d < 1e-9:
                raise PoleError(f"theta quotient pole at z={zz}")
    out = _kind_values(tq, za, "upper", 1)
    return out[0] if scalar else out


def _lattice_distance(u, tau):
    n = round((u.imag / tau.imag))
    u = u - n * tau
    m = round(u.real)
    return abs(u - m)


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------


def rational_residue(numer, denom, p):
    """Residue of numer/denom at p via Taylor shift and power-series division."""
    nu = _taylor_shift_ascending(numer, p)
    de = _taylor_shift_ascending(denom, p)
    scale = max(abs(c) for c in de) or 1.0
    m = 0
    while m < len(de) and abs(de[m]) <= 1e-13 * scale:
        m += 1
    if m == 0:
        return 0j
    q = de[m:]
    order = m  # need series of numer/q up to degree m-1
    inv = [1.0 / q[0]]
    for k in range(1, order):
        s = 0j
        for j in range(1, min(k, len(q) - 1) + 1):
            s += q[j] * inv[k - j]
        inv.append(-s / q[0])
    res = 0j
    for j in range(order):
        a = nu[j] if j < len(nu) else 0j
        res += a * inv[order - 1 - j]
    return res


def _taylor_shift_ascending(coeffs_desc, p):
    """Coefficients of P(p+u) in ascending powers of u, by repeated division."""
    c = [complex(v) for v in coeffs_desc]
    out = []
    while c:
        c, rem = _syn_div(c, p)
        out.append(rem)
    return out


def _syn_div(coeffs_desc, p):
    quo = []
    acc = 0j
    for v in coeffs_desc:
        acc = acc * p + v
        quo.append(acc)
    rem = quo.pop() if quo else 0j
    return quo, rem


def residue(form: OneForm, puncture, domain=None, cfg=None, method="quadrature"):
    """(1/2*pi*i) times the integral of the form around the puncture.

    The circle radius is min(1e-2, half the nearest-feature distance).  When
    square-root terms are present the circle is split at the real axis and the
    two semicircles carry the sheet signs dictated by slit-crossing parity.
    ``method="partial-fractions"`` computes the residue exactly instead and
    requires a purely rational form.
    """
    from . import quadrature as quadmod

    p = complex(puncture)
    if is_infinite(p):
        raise DomainError("use the 1/z chart explicitly for residues at infinity")
    if method == "partial-fractions":
        res = 0j
        for term in form.terms:
            if isinstance(term.kind, Rational):
                res += term.coefficient * rational_residue(
                    term.kind.numer, term.kind.denom, p
                )
            elif isinstance(term.kind, (ConstantDz,)):
                continue
            else:
                raise DomainError("partial-fraction residues need a rational form")
        return res
    others = [q for q in form_poles(form) if abs(q - p) > 1e-12]
    if domain is not None:
        from .domains import nearest_feature_distance

        d_dom = nearest_feature_distance(domain, p)
    else:
        d_dom = math.inf
    d = min([abs(q - p) for q in others] + [d_dom])
    radius = min(1e-2, d / 2.0)
    if radius <= 0 or not math.isfinite(radius):
        radius = 1e-2
    for q in others:
        if abs(q - p) <= radius + 1e-12:
            raise DomainError(f"residue circle around {p} would enclose {q}")
    flips = (
        sqrt_terms_flip_parity(form, p.real - radius),
        sqrt_terms_flip_parity(form, p.real + radius),
    ) if p.imag == 0.0 else (0, 0)
    if flips[0] != flips[1]:
        raise DomainError(f"residue loop around {p} does not close (branch point inside)")
    sheet_lower = -1 if flips[0] else 1
    from .domains import around_puncture_cycle

    cycle = around_puncture_cycle(p, radius, sheet_flips=(1, sheet_lower))
    cfg = cfg or quadmod.QuadratureConfig()
    val = quadmod.integrate_cycle(form, cycle, cfg)
    return val / _TWO_PI_I


# ---------------------------------------------------------------------------
# bases and Gauss-map data
# ---------------------------------------------------------------------------


def holomorphic_basis(curve: HyperellipticCurve):
    """The g holomorphic differentials z^j dz / w, j = 0..g-1."""
    return [
        OneForm((Term(1.0, HolomorphicBasis(curve, j)),), curve)
        for j in range(curve.genus)
    ]


def _monomial_parts(term: Term):
    """Return (coefficient, power) if the term is c * z^m dz, else None."""
    kind = term.kind
    if isinstance(kind, ConstantDz):
        return term.coefficient, 0
    if not isinstance(kind, Rational):
        return None
    num = list(kind.numer)
    den = list(kind.denom)

    def monomial(coeffs):
        nz = [i for i, c in enumerate(coeffs) if c != 0]
        if len(nz) != 1:
            return None
        i = nz[0]
        power = len(coeffs) - 1 - i
        return coeffs[i], power
    mn = monomial(num)
    md = monomial(den)
    if mn is None or md is None:
        return None
    return term.coefficient * mn[0] / md[0], mn[1] - md[1]


def triple_from_gauss_map(g_spec: SqrtProduct, omega3: OneForm, domain=None):
    """Minimal-surface style triple from a stereographic Gauss map g.

    omega1 = (1/2)(1/g - g) omega3 and omega2 = (i/2)(1/g + g) omega3, so the
    conformality sum omega1^2+omega2^2+omega3^2 vanishes identically.  omega3
    must be a sum of monomial rational terms c * z^m dz for the products to
    stay inside the square-root-product term algebra.
    """
    if not isinstance(g_spec, SqrtProduct):
        raise DomainError("the Gauss map specification must be a SqrtProduct")
    inv = SqrtProduct(g_spec.denom_roots, g_spec.numer_roots, -g_spec.z_half_power)
    t1, t2 = [], []
    for term in omega3.terms:
        parts = _monomial_parts(term)
        if parts is None:
            raise DomainError("omega3 must be a sum of monomial rational terms c*z^m dz")
        c, m = parts
        inv_m = SqrtProduct(inv.numer_roots, inv.denom_roots, inv.z_half_power + 2 * m)
        g_m = SqrtProduct(
            g_spec.numer_roots, g_spec.denom_roots, g_spec.z_half_power + 2 * m
        )
        t1.append(Term(0.5 * c, inv_m))
        t1.append(Term(-0.5 * c, g_m))
        t2.append(Term(0.5j * c, inv_m))
        t2.append(Term(0.5j * c, g_m))
    dom = domain if domain is not None else omega3.domain
    omega1 = OneForm(tuple(t1), dom)
    omega2 = OneForm(tuple(t2), dom)
    return WeierstrassTriple(dom, (omega1, omega2, omega3))
