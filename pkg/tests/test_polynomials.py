import json
from math import comb, factorial

import numpy as np
import pytest

from greenvol.polynomials import (
    MultiIndex,
    Polynomial2,
    assemble_interpolant,
    assemble_regularizer,
    basis_size,
    dump_poly_tables_json,
    helmholtz_poly,
    laplace_poly,
    monomial_basis,
    particular_poly,
    pde_residual,
    poly_eval,
    poly_gradient,
    taylor_coeffs,
    translated_poly,
)


def helmholtz_table(k):
    """Published closed forms of the monomial solutions through degree 4."""
    k2, k4, k6 = k**2, k**4, k**6
    return {
        (0, 0): {(0, 0): 1 / k2},
        (1, 0): {(1, 0): 1 / k2},
        (0, 1): {(0, 1): 1 / k2},
        (2, 0): {(2, 0): 1 / k2, (0, 0): -2 / k4},
        (1, 1): {(1, 1): 1 / k2},
        (0, 2): {(0, 2): 1 / k2, (0, 0): -2 / k4},
        (3, 0): {(3, 0): 1 / k2, (1, 0): -6 / k4},
        (2, 1): {(2, 1): 1 / k2, (0, 1): -2 / k4},
        (1, 2): {(1, 2): 1 / k2, (1, 0): -2 / k4},
        (0, 3): {(0, 3): 1 / k2, (0, 1): -6 / k4},
        (4, 0): {(4, 0): 1 / k2, (2, 0): -12 / k4, (0, 0): 24 / k6},
        (3, 1): {(3, 1): 1 / k2, (1, 1): -6 / k4},
        (2, 2): {(2, 2): 1 / k2, (2, 0): -2 / k4, (0, 2): -2 / k4, (0, 0): 8 / k6},
        (1, 3): {(1, 3): 1 / k2, (1, 1): -6 / k4},
        (0, 4): {(0, 4): 1 / k2, (0, 2): -12 / k4, (0, 0): 24 / k6},
    }


LAPLACE_TABLE = {
    (0, 0): {(2, 0): 1 / 4, (0, 2): 1 / 4},
    (1, 0): {(3, 0): 1 / 6},
    # published value y^3/2 fails the residual check; y^3/6 is correct
    (0, 1): {(0, 3): 1 / 6},
    (2, 0): {(4, 0): 1 / 12},
    (1, 1): {(3, 1): 1 / 12, (1, 3): 1 / 12},
    (0, 2): {(0, 4): 1 / 12},
    (3, 0): {(5, 0): 1 / 20},
    (2, 1): {(4, 1): 1 / 12},
    (1, 2): {(1, 4): 1 / 12},
    (0, 3): {(0, 5): 1 / 20},
    (4, 0): {(6, 0): 1 / 30},
    (3, 1): {(5, 1): 1 / 20},
    # (x^2+y^2)(16 x^2 y^2 - x^4 - y^4)/360 expanded
    (2, 2): {(4, 2): 15 / 360, (2, 4): 15 / 360, (6, 0): -1 / 360, (0, 6): -1 / 360},
    (1, 3): {(1, 5): 1 / 20},
    (0, 4): {(0, 6): 1 / 30},
}


def coeffs_match(poly: Polynomial2, table: dict, tol=1e-12) -> bool:
    keys = set(poly.coeffs) | set(table)
    return all(abs(poly.coeff(key) - table.get(key, 0.0)) <= tol for key in keys)


class TestBasis:
    def test_graded_lex_order(self):
        assert monomial_basis(2) == [
            MultiIndex(0, 0), MultiIndex(1, 0), MultiIndex(0, 1),
            MultiIndex(2, 0), MultiIndex(1, 1), MultiIndex(0, 2),
        ]

    @pytest.mark.parametrize("n", range(8))
    def test_size_formula(self, n):
        assert len(monomial_basis(n)) == basis_size(n) == (n + 1) * (n + 2) // 2


class TestHelmholtzPoly:
    def test_constant_source(self):
        assert coeffs_match(helmholtz_poly((0, 0), 1.0), {(0, 0): 1.0})

    def test_x_squared_source_unit_k(self):
        assert coeffs_match(helmholtz_poly((2, 0), 1.0), {(2, 0): 1.0, (0, 0): -2.0})

    def test_xxyy_source_unit_k(self):
        assert coeffs_match(
            helmholtz_poly((2, 2), 1.0),
            {(2, 2): 1.0, (2, 0): -2.0, (0, 2): -2.0, (0, 0): 8.0},
        )

    @pytest.mark.parametrize("k", [1.0, 2.5])
    def test_full_table(self, k):
        for alpha, table in helmholtz_table(k).items():
            assert coeffs_match(helmholtz_poly(alpha, k), table), alpha

    def test_k_zero_routed_away(self):
        with pytest.raises(ValueError):
            helmholtz_poly((1, 1), 0.0)

    @pytest.mark.parametrize("k", [0.7, 1.0, 2.5])
    def test_uniqueness_against_linear_solve(self, k):
        # independent construction: solve for the coefficients of P on the
        # full monomial basis of degree <= |alpha| so that (lap+k^2)P = r^alpha
        for alpha in monomial_basis(5):
            basis = monomial_basis(alpha.order)
            size = len(basis)
            mat = np.zeros((size, size))
            for col, mono in enumerate(basis):
                img = Polynomial2.monomial(mono).laplacian() + Polynomial2.monomial(mono, k * k)
                for row, out in enumerate(basis):
                    mat[row, col] = img.coeff(out).real
            rhs = np.zeros(size)
            rhs[basis.index(MultiIndex(*alpha))] = 1.0
            sol = np.linalg.solve(mat, rhs)
            direct = helmholtz_poly(tuple(alpha), k)
            scale = max(1.0, direct.max_abs_coeff())
            for c, mono in zip(sol, basis):
                assert abs(c - direct.coeff(mono).real) <= 1e-11 * scale


class TestLaplacePoly:
    def test_constant_source(self):
        assert coeffs_match(laplace_poly((0, 0)), {(2, 0): 0.25, (0, 2): 0.25})

    def test_y_source_corrected_value(self):
        assert coeffs_match(laplace_poly((0, 1)), {(0, 3): 1 / 6})

    def test_published_y_source_value_fails_residual(self):
        wrong = Polynomial2({(0, 3): 0.5})
        assert pde_residual(wrong, (0, 1), 0.0).max_abs_coeff() > 0.1

    def test_diagonal_expansion(self):
        expected = {(4, 2): 1 / 24, (2, 4): 1 / 24, (6, 0): -1 / 360, (0, 6): -1 / 360}
        assert coeffs_match(laplace_poly((2, 2)), expected)

    def test_full_table(self):
        for alpha, table in LAPLACE_TABLE.items():
            assert coeffs_match(laplace_poly(alpha), table), alpha

    @pytest.mark.parametrize("j", [0, 1, 2, 3, 4])
    def test_diagonal_swap_symmetry_exact(self, j):
        p = laplace_poly((j, j))
        assert p.swap_xy().coeffs == p.coeffs

    def test_offdiagonal_swap_relation(self):
        for a1, a2 in [(3, 1), (5, 2), (4, 0), (6, 3)]:
            assert laplace_poly((a2, a1)).coeffs == laplace_poly((a1, a2)).swap_xy().coeffs


class TestResiduals:
    @pytest.mark.parametrize("k", [0.0, 1.0, 2.5])
    def test_zero_residual_through_order_eight(self, k):
        for alpha in monomial_basis(8):
            p = particular_poly(alpha, k)
            res = pde_residual(p, alpha, k)
            assert res.max_abs_coeff() <= 1e-11 * max(1.0, p.max_abs_coeff()), alpha

    def test_perturbation_detected(self):
        p = laplace_poly((3, 2)) + Polynomial2({(2, 0): 1e-6})
        assert pde_residual(p, (3, 2), 0.0).max_abs_coeff() > 1e-7


class TestTranslatedPoly:
    @pytest.mark.parametrize("k", [0.0, 1.3])
    def test_shifted_source_residual(self, k, rng):
        for _ in range(25):
            a1, a2 = int(rng.integers(0, 4)), int(rng.integers(0, 4))
            r0 = rng.normal(size=2)
            q = translated_poly((a1, a2), k, r0)
            image = q.laplacian() + q.scale(k * k) if k else q.laplacian()
            shifted_x = Polynomial2({(1, 0): 1.0, (0, 0): -r0[0]})
            shifted_y = Polynomial2({(0, 1): 1.0, (0, 0): -r0[1]})
            target = Polynomial2({(0, 0): 1.0})
            for _i in range(a1):
                target = target * shifted_x
            for _i in range(a2):
                target = target * shifted_y
            diff = image - target
            assert diff.max_abs_coeff() <= 1e-11 * max(1.0, target.max_abs_coeff())


class TestTaylorCoeffs:
    def test_constant_source(self):
        derivs = {key: 0.0 for key in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]}
        derivs[(0, 0)] = 3.25
        t = taylor_coeffs(derivs, (0.4, -1.2), 2)
        assert abs(t[0] - 3.25) < 1e-15
        assert np.max(np.abs(t[1:])) < 1e-15

    def test_linear_source(self):
        # f = x has D^(1,0) = 1 and all else 0; the shifted expansion
        # recombines to the plain monomial x at any expansion point
        derivs = {(0, 0): 0.7, (1, 0): 1.0, (0, 1): 0.0}
        derivs[(0, 0)] = 0.7  # f(r0) = x0; set below per point
        r0 = (0.7, 2.0)
        t = taylor_coeffs({(0, 0): r0[0], (1, 0): 1.0, (0, 1): 0.0}, r0, 1)
        basis = monomial_basis(1)
        assert abs(t[basis.index((1, 0))] - 1.0) < 1e-14
        assert abs(t[basis.index((0, 0))]) < 1e-14
        assert abs(t[basis.index((0, 1))]) < 1e-14

    def test_cosine_at_origin(self):
        derivs = {
            (0, 0): 1.0, (1, 0): 0.0, (0, 1): 0.0,
            (2, 0): 0.0, (1, 1): 0.0, (0, 2): 0.0,
        }
        t = taylor_coeffs(derivs, (0.0, 0.0), 2)
        assert abs(t[0] - 1.0) < 1e-15
        assert np.max(np.abs(t[1:])) < 1e-15

    def test_order_cap(self):
        with pytest.raises(ValueError):
            taylor_coeffs({}, (0.0, 0.0), 13)

    def test_missing_derivative(self):
        with pytest.raises(KeyError):
            taylor_coeffs({(0, 0): 1.0}, (0.0, 0.0), 1)

    def test_separable_expansion_matches_direct_taylor(self, rng):
        n = 4
        derivs = {
            (a1, d - a1): complex(rng.normal(), rng.normal())
            for d in range(n + 1)
            for a1 in range(d, -1, -1)
        }
        r0 = rng.normal(size=2)
        f_n = assemble_interpolant(taylor_coeffs(derivs, r0, n), n)
        pts = rng.normal(size=(100, 2))
        direct = np.zeros(100, dtype=complex)
        for (a1, a2), dval in derivs.items():
            direct += dval / (factorial(a1) * factorial(a2)) * (
                (pts[:, 0] - r0[0]) ** a1 * (pts[:, 1] - r0[1]) ** a2
            )
        got = f_n.eval(pts[:, 0], pts[:, 1])
        assert np.max(np.abs(got - direct)) <= 1e-12 * np.max(np.abs(direct))


class TestAssemble:
    def test_unit_coefficient_laplace(self):
        t = np.zeros(1, dtype=complex)
        t[0] = 1.0
        assert coeffs_match(assemble_interpolant(t, 0), {(0, 0): 1.0})
        assert coeffs_match(assemble_regularizer(t, 0, 0.0), {(2, 0): 0.25, (0, 2): 0.25})

    def test_unit_coefficient_helmholtz(self):
        t = np.ones(1, dtype=complex)
        assert coeffs_match(assemble_regularizer(t, 0, 1.0), {(0, 0): 1.0})

    def test_random_coefficients_solve_the_pde(self, rng):
        n = 4
        t = rng.normal(size=basis_size(n)) + 1j * rng.normal(size=basis_size(n))
        f_n = assemble_interpolant(t, n)
        phi = assemble_regularizer(t, n, 0.0)
        assert (phi.laplacian() - f_n).max_abs_coeff() <= 1e-12 * max(1.0, f_n.max_abs_coeff())

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            assemble_interpolant(np.zeros(4), 2)


class TestEvalAndGradient:
    def test_eval_simple(self):
        p = Polynomial2({(2, 0): 1.0, (0, 0): -2.0})
        assert poly_eval(p, 3.0, 0.0) == 7.0

    def test_gradient_of_xy(self):
        gx, gy = poly_gradient(Polynomial2({(1, 1): 1.0}))
        assert gx.coeffs == {(0, 1): 1.0}
        assert gy.coeffs == {(1, 0): 1.0}

    def test_gradient_of_laplace_solution(self):
        gx, gy = poly_gradient(laplace_poly((0, 0)))
        assert abs(gx.eval(1.0, 1.0) - 0.5) < 1e-15
        assert abs(gy.eval(1.0, 1.0) - 0.5) < 1e-15


def test_debug_table_dump(tmp_path):
    path = tmp_path / "tables.json"
    dump_poly_tables_json(2, 0.0, str(path))
    payload = json.loads(path.read_text())
    assert payload["order"] == 2
    assert "0,1" in payload["solutions"]
    assert payload["solutions"]["0,1"] == {"0,3": [1 / 6, 0.0]}
