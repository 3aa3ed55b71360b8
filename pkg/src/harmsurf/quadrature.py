"""Complex path integration of one-forms.

Two engines drive everything: a batched adaptive Gauss-Kronrod (G7,K15)
subdivision scheme for analytic pieces, and tanh-sinh (double exponential)
quadrature for pieces whose endpoints touch branch points, where integrands
blow up like (z-a)^(-1/2).

Integrals whose imaginary part diverges (e.g. z^(-3/2) leaving a branch
puncture, whose real part is what period conditions constrain) are requested
with ``real_part_only=True``; the engines then accumulate only the real part
of the parametrized integrand, which is finite by the exact-split evaluation
rules in :mod:`harmsurf.forms`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domains import ArcSegment, LineSegment
from .errors import QuadratureError
from .forms import form_poles, form_values

# 7-point Gauss / 15-point Kronrod pair on [-1, 1]
_GK_X = np.array(
    [
        -0.991455371120813, -0.949107912342759, -0.864864423359769,
        -0.741531185599394, -0.586087235467691, -0.405845151377397,
        -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
        0.586087235467691, 0.741531185599394, 0.864864423359769,
        0.949107912342759, 0.991455371120813,
    ]
)
_GK_WK = np.array(
    [
        0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728, 0.204432940075298,
        0.190350578064785, 0.169004726639267, 0.140653259715525,
        0.104790010322250, 0.063092092629979, 0.022935322010529,
    ]
)
_GK_WG = np.array(
    [
        0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
        0.381830050505119, 0.0, 0.417959183673469, 0.0,
        0.381830050505119, 0.0, 0.279705391489277, 0.0,
        0.129484966168870, 0.0,
    ]
)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-11
    rel_tol: float = 1e-11
    max_refinement_depth: int = 12

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_refinement_depth < 1:
            raise ValueError("max_refinement_depth must be at least 1")


DEFAULT_CONFIG = QuadratureConfig()


@lru_cache(maxsize=8)
def gauss_legendre_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


# ---------------------------------------------------------------------------
# engines over vectorized callables on the parameter interval [0, 1]
# ---------------------------------------------------------------------------


def adaptive_gk(F, cfg: QuadratureConfig, real_only=False):
    """Adaptive (G7,K15) bisection of a vectorized integrand on [0, 1]."""
    t0 = np.array([0.0])
    t1 = np.array([1.0])
    vals, errs = _gk_panels(F, t0, t1, real_only)
    for _ in range(cfg.max_refinement_depth):
        total = vals.sum()
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        local = tol * (t1 - t0)
        bad = errs > local
        if not bad.any():
            return total
        mid = 0.5 * (t0[bad] + t1[bad])
        nt0 = np.concatenate([t0[~bad], t0[bad], mid])
        nt1 = np.concatenate([t1[~bad], mid, t1[bad]])
        keep_vals = vals[~bad]
        keep_errs = errs[~bad]
        new_vals, new_errs = _gk_panels(F, nt0[len(keep_vals):], nt1[len(keep_vals):], real_only)
        t0, t1 = nt0, nt1
        vals = np.concatenate([keep_vals, new_vals])
        errs = np.concatenate([keep_errs, new_errs])
    total = vals.sum()
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
    if errs.sum() > tol:
        raise QuadratureError(
            f"tolerance not reached at depth {cfg.max_refinement_depth} "
            f"(error estimate {errs.sum():.3e}, tolerance {tol:.3e})"
        )
    return total


def _gk_panels(F, t0, t1, real_only):
    half = 0.5 * (t1 - t0)
    mid = 0.5 * (t0 + t1)
    nodes = mid[:, None] + half[:, None] * _GK_X[None, :]
    fv = np.asarray(F(nodes.ravel())).reshape(nodes.shape)
    if real_only:
        fv = fv.real
    if not np.all(np.isfinite(fv)):
        raise QuadratureError("singularity strictly inside a segment")
    k15 = (fv * _GK_WK[None, :]).sum(axis=1) * half
    g7 = (fv * _GK_WG[None, :]).sum(axis=1) * half
    diff = np.abs(k15 - g7)
    errs = np.minimum(diff, (200.0 * diff) ** 1.5)
    return k15, errs


def tanh_sinh(F, cfg: QuadratureConfig, real_only=False):
    """Double-exponential quadrature on (0, 1), endpoint singularities allowed.

    Nodes closer than 1e-15 to an endpoint are dropped; their weights are below
    1e-29, so for the (z-a)^(-1/2) singularities this scheme is built for the
    dropped mass is far beneath the configured tolerances.
    """
    u_max = 6.5
    levels = min(cfg.max_refinement_depth, 10)
    h = 0.5
    running = _ts_level_sum(F, np.arange(-u_max, u_max + h / 2, h), real_only)
    prev_total = running * h
    for _ in range(levels):
        h *= 0.5
        new_u = np.arange(-u_max + h, u_max, 2 * h)
        running += _ts_level_sum(F, new_u, real_only)
        total = running * h
        if abs(total - prev_total) <= max(cfg.abs_tol, cfg.rel_tol * abs(total)):
            return total
        prev_total = total
    raise QuadratureError("tanh-sinh refinement did not converge within the depth limit")


def _ts_level_sum(F, u, real_only):
    su = np.sinh(u)
    t = 0.5 * (1.0 + np.tanh(0.5 * math.pi * su))
    w = 0.25 * math.pi * np.cosh(u) / np.cosh(0.5 * math.pi * su) ** 2
    keep = (t > 1e-15) & (t < 1.0 - 1e-15)
    t, w = t[keep], w[keep]
    fv = np.asarray(F(t))
    if real_only:
        fv = fv.real
    if not np.all(np.isfinite(fv)):
        raise QuadratureError("non-finite integrand away from the declared endpoints")
    return (fv * w).sum()


def fixed_gauss_legendre(F, n: int):
    """Non-adaptive n-point Gauss-Legendre on [0,1]; for analytic mesh edges."""
    x, w = gauss_legendre_rule(n)
    t = 0.5 * (x + 1.0)
    return 0.5 * (np.asarray(F(t)) * w).sum()


# ---------------------------------------------------------------------------
# one-form integration over path pieces
# ---------------------------------------------------------------------------


def _piece_integrand(form, piece):
    def F(t):
        z = piece.point(t)
        return form_values(form, z, piece.slit_rule, piece.sheet) * piece.derivative(t)

    return F


def _check_interior_poles(form, piece):
    if not isinstance(piece, LineSegment):
        return
    a, b = complex(piece.start), complex(piece.end)
    for q in form_poles(form):
        d, tproj = _point_segment(q, a, b)
        if d < 1e-12 and 1e-9 < tproj < 1.0 - 1e-9:
            raise QuadratureError(f"singularity at {q} strictly inside segment {a} -> {b}")


def _point_segment(q, a, b):
    ab = b - a
    L2 = abs(ab) ** 2
    if L2 == 0:
        return abs(q - a), 0.0
    t = ((q - a) * ab.conjugate()).real / L2
    tc = min(1.0, max(0.0, t))
    return abs(q - (a + tc * ab)), t


def integrate_piece(form, piece, cfg=None, real_part_only=False):
    cfg = cfg or DEFAULT_CONFIG
    _check_interior_poles(form, piece)
    F = _piece_integrand(form, piece)
    if piece.singular_start or piece.singular_end:
        return tanh_sinh(F, cfg, real_only=real_part_only)
    return adaptive_gk(F, cfg, real_only=real_part_only)


def integrate_segment(
    form,
    start,
    end,
    cfg=None,
    singular=(False, False),
    slit_rule="upper",
    sheet=1,
    real_part_only=False,
):
    """Integral of the form along the straight segment from start to end.

    Endpoints flagged in ``singular`` may be branch points; the integrand is
    then handled by tanh-sinh quadrature.  Segments are never split across
    slits automatically; the caller routes paths.
    """
    piece = LineSegment(
        complex(start), complex(end), singular[0], singular[1], sheet=sheet, slit_rule=slit_rule
    )
    return integrate_piece(form, piece, cfg, real_part_only)


def integrate_cycle(form, cycle, cfg=None, real_part_only=False):
    """Sum of the piece integrals along a cycle's path."""
    cfg = cfg or DEFAULT_CONFIG
    total = 0.0 if real_part_only else 0j
    for piece in cycle.pieces:
        total += integrate_piece(form, piece, cfg, real_part_only)
    return total
