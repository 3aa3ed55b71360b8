import math

import numpy as np
import pytest

from harmsurf import (
    ConstantDz,
    DomainError,
    HyperellipticCurve,
    OneForm,
    PuncturedSphere,
    Rational,
    SqrtProduct,
    Term,
    ThetaFunction,
    ThetaQuotient,
    form_eval,
    holomorphic_basis,
    residue,
    theta_eval,
    theta_quotient_eval,
    triple_from_gauss_map,
)
from harmsurf.forms import form_values, rational_residue

from oracles import theta_oracle_mpmath, theta_series_oracle

TAU = 1.2j


def stacked_planes_forms(n):
    """The parallel-plane family: catenoid ends at +-n, planar ends between."""
    t1 = [Term(1.0, Rational((1.0,), (1.0, 0.0, 0.0)))]
    t2 = [Term(-1j, Rational((1.0,), (1.0, 0.0, 0.0)))]
    for k in range(1, n + 1):
        for s in (1.0, -1.0):
            den = (1.0, -2.0 * s * k, float(k * k))  # (z - s*k)^2
            t1.append(Term((-1.0) ** k, Rational((1.0,), den)))
            t2.append(Term(-1j, Rational((1.0,), den)))
    t3 = [
        Term(1.0, Rational((1.0,), (1.0, float(n)))),
        Term(-1.0, Rational((1.0,), (1.0, float(-n)))),
    ]
    dom = PuncturedSphere(tuple(float(k) for k in range(-n, n + 1)))
    return [OneForm(tuple(t), dom) for t in (t1, t2, t3)]


class TestTheta:
    def test_zero_at_origin(self):
        th = ThetaFunction(TAU)
        assert abs(theta_eval(th, 0.0)) < 1e-14

    def test_matches_series_oracle(self):
        th = ThetaFunction(TAU)
        rng = np.random.default_rng(11)
        z = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1.2, 1.2, 50)
        got = theta_eval(th, z)
        want = np.array([theta_series_oracle(zz, TAU) for zz in z])
        assert np.max(np.abs(got - want)) < 1e-13 * np.max(np.abs(want))

    def test_matches_mpmath(self):
        th = ThetaFunction(TAU)
        for z in (0.3 + 0.4j, -0.7 + 0.9j, 1.5 - 0.2j):
            got = complex(theta_eval(th, z))
            want = theta_oracle_mpmath(z, TAU)
            assert abs(got - want) < 1e-12 * max(1.0, abs(want))

    def test_quasi_periodicity(self):
        th = ThetaFunction(TAU)
        rng = np.random.default_rng(5)
        z = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-0.5, 0.5, 50)
        lhs = theta_eval(th, z + 1.0)
        rhs = -theta_eval(th, z)
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(rhs))
        lhs = theta_eval(th, z + TAU)
        rhs = np.exp(-1j * np.pi * TAU - 2j * np.pi * (z + 0.5)) * theta_eval(th, z)
        assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) < 1e-11

    def test_tolerance_validation(self):
        with pytest.raises(DomainError):
            ThetaFunction(TAU, truncation_tol=1e-6)
        with pytest.raises(DomainError):
            ThetaFunction(0.5)


class TestThetaQuotient:
    def test_unit_shift_invariance(self):
        h = ThetaQuotient(((0.3, 1),), ((0.7, 1),), TAU)
        rng = np.random.default_rng(2)
        z = rng.uniform(0, 1, 20) + 1j * rng.uniform(0.05, 1.1, 20)
        v1 = theta_quotient_eval(h, z + 1.0)
        v0 = theta_quotient_eval(h, z)
        assert np.max(np.abs(v1 - v0) / np.abs(v0)) < 1e-10

    def test_tau_shift_multiplier(self):
        h = ThetaQuotient(((0.3, 1),), ((0.7, 1),), TAU)
        rng = np.random.default_rng(3)
        z = rng.uniform(0, 1, 20) + 1j * rng.uniform(0.05, 0.6, 20)
        ratio = theta_quotient_eval(h, z + TAU) / theta_quotient_eval(h, z)
        want = np.exp(2j * np.pi * (0.3 - 0.7))
        assert np.max(np.abs(ratio - want)) < 1e-10

    def test_lemma_quasiperiodicity_random_balanced_quotients(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            n_zero = rng.integers(1, 4)
            orders_z = rng.integers(1, 3, n_zero)
            orders_p = []
            remaining = int(orders_z.sum())
            while remaining > 0:
                m = int(rng.integers(1, remaining + 1))
                orders_p.append(m)
                remaining -= m
            zeros = tuple(
                (complex(rng.uniform(0, 1), rng.uniform(0, 1.2)), int(m)) for m in orders_z
            )
            poles = tuple(
                (complex(rng.uniform(0, 1), rng.uniform(0, 1.2)), int(m)) for m in orders_p
            )
            h = ThetaQuotient(zeros, poles, TAU)
            from harmsurf.forms import _lattice_distance

            pts = []
            while len(pts) < 50:
                z = complex(rng.uniform(0, 1), rng.uniform(0, 1.2))
                near = [a for a, _ in zeros + poles]
                if min(_lattice_distance(z - a, TAU) for a in near) > 0.12:
                    pts.append(z)
            z = np.array(pts)
            hz = theta_quotient_eval(h, z)
            s_alpha = sum(m for _, m in zeros)
            s_beta = sum(m for _, m in poles)
            lhs1 = theta_quotient_eval(h, z + 1.0)
            want1 = (-1.0) ** (s_alpha - s_beta) * hz
            assert np.max(np.abs(lhs1 - want1) / np.abs(hz)) < 1e-9
            lhs2 = theta_quotient_eval(h, z + TAU)
            mult = np.exp(
                2j
                * np.pi
                * (
                    sum(a * m for a, m in zeros)
                    - sum(b * m for b, m in poles)
                )
            )
            assert np.max(np.abs(lhs2 - mult * hz) / np.abs(hz)) < 1e-9

    def test_end_form_has_double_pole_only_at_half(self):
        # omega1/dz for the one-ended torus family with the end at 1/2
        h = ThetaQuotient(((0.5 + 0.6j, 1), (0.5 - 0.6j, 1)), ((0.5, 2),), TAU)
        for r in (1e-3, 1e-4):
            v = theta_quotient_eval(h, 0.5 + r)
            assert abs(v * r**2 - v * r**2) == 0  # finite
            assert abs(v) > 0.1 / r**2 * 0.01
        scaled = [
            complex(theta_quotient_eval(h, 0.5 + r)) * r**2 for r in (1e-3, 2e-4)
        ]
        assert abs(scaled[0] - scaled[1]) < 1e-4 * abs(scaled[0])
        # regular elsewhere in the cell
        rng = np.random.default_rng(23)
        z = rng.uniform(0, 1, 200) + 1j * rng.uniform(0, 1.2, 200)
        keep = np.abs(z - 0.5) > 0.1
        vals = theta_quotient_eval(h, z[keep])
        assert np.all(np.abs(vals) < 1e4)


class TestFormEval:
    def test_inverse_square_prototype(self):
        form = OneForm((Term(1.0, Rational((1.0,), (1.0, 0.0, 0.0))),))
        assert form_eval(form, 2.0) == pytest.approx(0.25)

    def test_log_differential(self):
        form = OneForm((Term(1.0, Rational((1.0,), (1.0, 0.0))),))
        assert form_eval(form, 1j) == pytest.approx(-1j)

    def test_stacked_planes_third_form_at_origin(self):
        _, _, w3 = stacked_planes_forms(1)
        assert form_eval(w3, 0.0) == pytest.approx(2.0)

    def test_pole_hit_signalled(self):
        form = OneForm((Term(1.0, Rational((1.0,), (1.0, 0.0))),))
        from harmsurf import PoleError

        with pytest.raises(PoleError):
            form_eval(form, 0.0)


class TestResidues:
    def test_stacked_planes_log_residues(self):
        w1, w2, w3 = stacked_planes_forms(2)
        dom = w3.domain
        assert residue(w3, -2.0, dom) == pytest.approx(1.0, abs=1e-10)
        assert residue(w3, 2.0, dom) == pytest.approx(-1.0, abs=1e-10)
        for p in (-1.0, 0.0, 1.0):
            assert abs(residue(w3, p, dom)) < 1e-10

    def test_double_poles_have_no_residue(self):
        w1, _, _ = stacked_planes_forms(1)
        for p in (-1.0, 0.0, 1.0):
            assert abs(residue(w1, p, w1.domain)) < 1e-10

    def test_all_residues_real_for_plane_family(self):
        forms = stacked_planes_forms(2)
        dom = forms[0].domain
        for f in forms:
            for p in dom.finite_punctures:
                assert abs(residue(f, p, dom).imag) < 1e-12

    def test_quadrature_matches_partial_fractions(self):
        rng = np.random.default_rng(9)
        for _ in range(8):
            roots = rng.uniform(-2, 2, 3) + 1j * rng.uniform(-2, 2, 3)
            num = tuple(rng.normal(size=3) + 1j * rng.normal(size=3))
            den = tuple(np.poly(roots))
            form = OneForm((Term(1.0, Rational(num, den)),))
            for p in roots:
                rq = residue(form, p)
                rp = residue(form, p, method="partial-fractions")
                assert abs(rq - rp) < 1e-10 * max(1.0, abs(rp))

    def test_partial_fractions_multiple_pole(self):
        # z / (z-1)^2 has residue 1 at z=1
        assert rational_residue((1.0, 0.0), (1.0, -2.0, 1.0), 1.0) == pytest.approx(1.0)
        # 1 / (z-1)^2 has residue 0
        assert abs(rational_residue((1.0,), (1.0, -2.0, 1.0), 1.0)) < 1e-14


class TestHolomorphicBasis:
    def test_genus_four_count(self):
        a = (0.2, 0.25, 0.3, 0.4, 1.0, 2.0, 2.2, 4.0)
        curve = HyperellipticCurve((0.0,) + a)
        basis = holomorphic_basis(curve)
        assert len(basis) == 4
        rng = np.random.default_rng(4)
        z = rng.uniform(-5, 5, 100) + 1j * rng.uniform(0.1, 3, 100)
        for f in basis:
            vals = form_values(f, z)
            assert np.all(np.isfinite(vals))

    def test_genus_one_and_zero(self):
        assert len(holomorphic_basis(HyperellipticCurve((0.0, 1.0, 2.0)))) == 1
        assert holomorphic_basis(HyperellipticCurve((0.0, 1.0))) == []


def scherk_gauss_map(a, orientation="outward"):
    a1, a2, a3, a4, a5 = a
    if orientation == "outward":
        b1 = -a1 * a3 * a5 / (a2 * a4)
        num, den = (a1, a3, a5), (a2, a4, b1)
    else:
        b1 = -a1 * a4 * a5 / (a2 * a3)
        num, den = (a1, a4, a5), (a2, a3, b1)
    return SqrtProduct(num, den), b1


class TestTripleFromGaussMap:
    def test_orthogonal_ends_normalization(self):
        g, b1 = scherk_gauss_map((1.0, 2.0, 3.0, 4.0, 5.0))
        assert b1 == pytest.approx(-15.0 / 8.0)
        val = form_values(OneForm((Term(1.0, g),)), np.array([0.0]))[0]
        assert abs(val - 1j) < 1e-12

    def test_conformality_residual_vanishes(self):
        g, _ = scherk_gauss_map((0.04, 0.08, 0.3, 0.9, 10.0))
        omega3 = OneForm((Term(1.0, Rational((1.0,), (1.0, 0.0))),))
        triple = triple_from_gauss_map(g, omega3)
        rng = np.random.default_rng(21)
        z = rng.uniform(-3, 3, 500) + 1j * rng.uniform(0.05, 3, 500)
        vals = np.stack([form_values(f, z) for f in triple.omega])
        s = (vals**2).sum(axis=0)
        scale = (np.abs(vals) ** 2).sum(axis=0)
        assert np.max(np.abs(s) / scale) < 1e-12

    def test_form_vanishes_where_gauss_map_is_one(self):
        from scipy.optimize import brentq

        g, _ = scherk_gauss_map((0.04, 0.08, 0.3, 0.9, 10.0))
        gform = OneForm((Term(1.0, g),))

        def g_minus_one(x):
            return form_values(gform, np.array([x]))[0].real - 1.0

        x1 = brentq(g_minus_one, 10.5, 1e6)
        omega3 = OneForm((Term(1.0, Rational((1.0,), (1.0, 0.0))),))
        triple = triple_from_gauss_map(g, omega3)
        assert abs(form_values(triple.omega[0], np.array([x1]))[0]) < 1e-10

    def test_rejects_non_monomial_omega3(self):
        g, _ = scherk_gauss_map((0.04, 0.08, 0.3, 0.9, 10.0))
        omega3 = OneForm((Term(1.0, Rational((1.0, 1.0), (1.0, 0.0))),))
        with pytest.raises(DomainError):
            triple_from_gauss_map(g, omega3)
