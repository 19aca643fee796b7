"""Sparse bivariate polynomials and closed-form solutions of (lap + k^2) P = x^a y^b.

For each monomial source x^a y^b there is a polynomial P satisfying the
inhomogeneous Helmholtz equation (unique for k > 0) or the Poisson equation
(chosen here with as few monomials as possible, and symmetric under x <-> y
on the diagonal a = b). Linear combinations of these give, for any smooth
source f, a polynomial whose (lap + k^2)-image is the degree-n Taylor
polynomial of f; the combination coefficients on the fixed monomial basis are
produced by `taylor_coeffs` via the binomial theorem.
"""

from __future__ import annotations

import json
from functools import lru_cache
from math import comb, factorial
from typing import Mapping, NamedTuple

import numpy as np

MAX_ORDER = 12


class MultiIndex(NamedTuple):
    """Exponent pair (a1, a2) of the monomial x^a1 y^a2."""

    a1: int
    a2: int

    @property
    def order(self) -> int:
        return self.a1 + self.a2

    def contains(self, other: "MultiIndex") -> bool:
        """Componentwise beta <= alpha test."""
        return other.a1 <= self.a1 and other.a2 <= self.a2


def basis_size(n: int) -> int:
    """Number of monomials of total degree <= n: (n+1)(n+2)/2."""
    return (n + 1) * (n + 2) // 2


def monomial_basis(n: int) -> list[MultiIndex]:
    """Graded-lexicographic ordering of all multi-indices with |alpha| <= n.

    Within each total degree d the indices run (d,0), (d-1,1), ..., (0,d).
    This fixed ordering defines the column/row layout of every matrix built
    on the monomial basis.
    """
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    return [MultiIndex(d - j, j) for d in range(n + 1) for j in range(d + 1)]


class Polynomial2:
    """Sparse bivariate polynomial with complex coefficients.

    Stored as a dict mapping (a1, a2) -> coefficient; zero coefficients are
    dropped on construction.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[tuple[int, int], complex] | None = None):
        self.coeffs: dict[tuple[int, int], complex] = {}
        if coeffs:
            for key, c in coeffs.items():
                if c != 0:
                    self.coeffs[(int(key[0]), int(key[1]))] = complex(c)

    @classmethod
    def monomial(cls, alpha, c: complex = 1.0) -> "Polynomial2":
        return cls({(alpha[0], alpha[1]): c})

    @classmethod
    def zero(cls) -> "Polynomial2":
        return cls()

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        return max(a + b for a, b in self.coeffs)

    def coeff(self, alpha) -> complex:
        return self.coeffs.get((alpha[0], alpha[1]), 0.0 + 0.0j)

    def max_abs_coeff(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(abs(c) for c in self.coeffs.values())

    def __add__(self, other: "Polynomial2") -> "Polynomial2":
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0.0) + c
        return Polynomial2(out)

    def __sub__(self, other: "Polynomial2") -> "Polynomial2":
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0.0) - c
        return Polynomial2(out)

    def __neg__(self) -> "Polynomial2":
        return Polynomial2({key: -c for key, c in self.coeffs.items()})

    def scale(self, s: complex) -> "Polynomial2":
        return Polynomial2({key: s * c for key, c in self.coeffs.items()})

    def __mul__(self, other: "Polynomial2") -> "Polynomial2":
        out: dict[tuple[int, int], complex] = {}
        for (a1, a2), c1 in self.coeffs.items():
            for (b1, b2), c2 in other.coeffs.items():
                key = (a1 + b1, a2 + b2)
                out[key] = out.get(key, 0.0) + c1 * c2
        return Polynomial2(out)

    def laplacian(self) -> "Polynomial2":
        out: dict[tuple[int, int], complex] = {}
        for (a1, a2), c in self.coeffs.items():
            if a1 >= 2:
                key = (a1 - 2, a2)
                out[key] = out.get(key, 0.0) + c * a1 * (a1 - 1)
            if a2 >= 2:
                key = (a1, a2 - 2)
                out[key] = out.get(key, 0.0) + c * a2 * (a2 - 1)
        return Polynomial2(out)

    def swap_xy(self) -> "Polynomial2":
        return Polynomial2({(a2, a1): c for (a1, a2), c in self.coeffs.items()})

    def eval(self, x, y):
        """Evaluate at points; x and y broadcast together."""
        x = np.asarray(x)
        y = np.asarray(y)
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for (a1, a2), c in self.coeffs.items():
            out = out + c * x**a1 * y**a2
        return out

    def gradient(self) -> tuple["Polynomial2", "Polynomial2"]:
        dx: dict[tuple[int, int], complex] = {}
        dy: dict[tuple[int, int], complex] = {}
        for (a1, a2), c in self.coeffs.items():
            if a1 >= 1:
                dx[(a1 - 1, a2)] = dx.get((a1 - 1, a2), 0.0) + c * a1
            if a2 >= 1:
                dy[(a1, a2 - 1)] = dy.get((a1, a2 - 1), 0.0) + c * a2
        return Polynomial2(dx), Polynomial2(dy)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Polynomial2(0)"
        parts = [
            f"({c:g})*x^{a1}*y^{a2}"
            for (a1, a2), c in sorted(self.coeffs.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][1]))
        ]
        return "Polynomial2(" + " + ".join(parts) + ")"


def poly_eval(p: Polynomial2, x, y):
    """Functional form of Polynomial2.eval."""
    return p.eval(x, y)


def poly_gradient(p: Polynomial2) -> tuple[Polynomial2, Polynomial2]:
    """Functional form of Polynomial2.gradient."""
    return p.gradient()


# ---------------------------------------------------------------------------
# Monomial-source particular solutions
# ---------------------------------------------------------------------------
@lru_cache(maxsize=None)
def helmholtz_poly(alpha: tuple[int, int], k: float) -> Polynomial2:
    """The unique polynomial P with (lap + k^2) P = x^a1 y^a2, for k > 0.

    Built by the recurrence P_{a1,a2} = x^a1 y^a2 / k^2
    - [a1(a1-1) P_{a1-2,a2} + a2(a2-1) P_{a1,a2-2}] / k^2.
    """
    if k <= 0:
        raise ValueError("helmholtz_poly requires k > 0; use laplace_poly for k = 0")
    a1, a2 = int(alpha[0]), int(alpha[1])
    if a1 < 0 or a2 < 0:
        raise ValueError(f"multi-index components must be nonnegative, got {alpha}")
    k2 = float(k) ** 2
    p = Polynomial2.monomial((a1, a2), 1.0 / k2)
    if a1 >= 2:
        p = p - helmholtz_poly((a1 - 2, a2), k).scale(a1 * (a1 - 1) / k2)
    if a2 >= 2:
        p = p - helmholtz_poly((a1, a2 - 2), k).scale(a2 * (a2 - 1) / k2)
    return p


@lru_cache(maxsize=None)
def laplace_poly(alpha: tuple[int, int]) -> Polynomial2:
    """A sparse polynomial P with lap P = x^a1 y^a2.

    Polynomial solutions of the Poisson equation are only unique up to
    harmonic polynomials; this construction keeps the monomial count minimal
    and makes the diagonal entries symmetric, P_{j,j}(x,y) = P_{j,j}(y,x).
    For a1 > a2 the generator x^(a1+2) y^a2 / ((a1+1)(a1+2)) is corrected by
    a same-degree recurrence; a1 < a2 follows by swapping x and y.
    """
    a1, a2 = int(alpha[0]), int(alpha[1])
    if a1 < 0 or a2 < 0:
        raise ValueError(f"multi-index components must be nonnegative, got {alpha}")
    if a1 < a2:
        return laplace_poly((a2, a1)).swap_xy()
    if a1 == a2:
        j = a1
        denom = 2 * (j + 2) * (j + 1)
        p = Polynomial2({(j + 2, j): 1.0 / denom, (j, j + 2): 1.0 / denom})
        if j >= 2:
            corr = laplace_poly((j + 2, j - 2)) + laplace_poly((j - 2, j + 2))
            p = p - corr.scale(j * (j - 1) / denom)
        return p
    # a1 > a2: source x^a1 y^a2, generator raises the x-exponent by 2
    denom = (a1 + 1) * (a1 + 2)
    p = Polynomial2.monomial((a1 + 2, a2), 1.0 / denom)
    if a2 >= 2:
        p = p - laplace_poly((a1 + 2, a2 - 2)).scale(a2 * (a2 - 1) / denom)
    return p


def particular_poly(alpha, k: float) -> Polynomial2:
    """Monomial-source particular solution for either operator branch."""
    if k < 0:
        raise ValueError("wavenumber must be nonnegative")
    key = (int(alpha[0]), int(alpha[1]))
    if k == 0.0:
        return laplace_poly(key)
    return helmholtz_poly(key, float(k))


def pde_residual(p: Polynomial2, alpha, k: float) -> Polynomial2:
    """(lap + k^2) p - x^a1 y^a2, as an exact polynomial.

    The zero polynomial certifies that p solves the monomial-source equation.
    """
    res = p.laplacian()
    if k != 0.0:
        res = res + p.scale(k * k)
    return res - Polynomial2.monomial((alpha[0], alpha[1]))


def translated_poly(alpha, k: float, r0) -> Polynomial2:
    """Polynomial Q with (lap + k^2) Q = (r - r0)^alpha, on fixed monomials.

    Expands the shifted monomial by the binomial theorem:
    Q = sum_{beta <= alpha} C(alpha, beta) (-r0)^(alpha-beta) P_beta.
    """
    a1, a2 = int(alpha[0]), int(alpha[1])
    x0, y0 = float(r0[0]), float(r0[1])
    out = Polynomial2.zero()
    for b1 in range(a1 + 1):
        for b2 in range(a2 + 1):
            c = (
                comb(a1, b1)
                * comb(a2, b2)
                * (-x0) ** (a1 - b1)
                * (-y0) ** (a2 - b2)
            )
            out = out + particular_poly((b1, b2), k).scale(c)
    return out


# ---------------------------------------------------------------------------
# Taylor interpolation on the fixed monomial basis
# ---------------------------------------------------------------------------
def taylor_coeffs(derivs: Mapping[tuple[int, int], complex], r0, n: int) -> np.ndarray:
    """Coefficients of the degree-n Taylor polynomial at r0 on fixed monomials.

    Given derivative values D^alpha f(r0) for all |alpha| <= n, returns the
    vector T (length (n+1)(n+2)/2, graded-lex order) such that

        sum_beta T[beta] * x^b1 y^b2 = sum_alpha D^alpha f(r0)/alpha! (r-r0)^alpha.

    Binomials and factorials are exact integers; n is capped at 12, beyond
    which iterated numerical differentiation is useless anyway.
    """
    if n > MAX_ORDER:
        raise ValueError(f"interpolation order {n} exceeds supported maximum {MAX_ORDER}")
    basis = monomial_basis(n)
    x0, y0 = float(r0[0]), float(r0[1])
    out = np.zeros(len(basis), dtype=complex)
    for m, beta in enumerate(basis):
        acc = 0.0 + 0.0j
        for d in range(beta.order, n + 1):
            for a1 in range(d, -1, -1):
                a2 = d - a1
                if a1 < beta.a1 or a2 < beta.a2:
                    continue
                dval = derivs.get((a1, a2))
                if dval is None:
                    raise KeyError(f"missing derivative value for multi-index {(a1, a2)}")
                weight = (
                    comb(a1, beta.a1)
                    * comb(a2, beta.a2)
                    / (factorial(a1) * factorial(a2))
                )
                acc += weight * dval * (-x0) ** (a1 - beta.a1) * (-y0) ** (a2 - beta.a2)
        out[m] = acc
    return out


def assemble_interpolant(t_coeffs: np.ndarray, n: int) -> Polynomial2:
    """Taylor interpolant sum_beta T[beta] x^b1 y^b2 as a polynomial."""
    basis = monomial_basis(n)
    if len(t_coeffs) != len(basis):
        raise ValueError(f"expected {len(basis)} coefficients, got {len(t_coeffs)}")
    return Polynomial2({(b.a1, b.a2): c for b, c in zip(basis, t_coeffs)})


def assemble_regularizer(t_coeffs: np.ndarray, n: int, k: float) -> Polynomial2:
    """Polynomial whose (lap + k^2)-image is the assembled interpolant.

    Replaces each monomial of the interpolant by its particular solution:
    sum_beta T[beta] P_beta.
    """
    basis = monomial_basis(n)
    if len(t_coeffs) != len(basis):
        raise ValueError(f"expected {len(basis)} coefficients, got {len(t_coeffs)}")
    out = Polynomial2.zero()
    for beta, c in zip(basis, t_coeffs):
        if c != 0:
            out = out + particular_poly(beta, k).scale(c)
    return out


def dump_poly_tables_json(n: int, k: float, path: str) -> None:
    """Debug dump of the particular solutions for all |alpha| <= n."""
    table = {}
    for beta in monomial_basis(n):
        p = particular_poly(beta, k)
        table[f"{beta.a1},{beta.a2}"] = {
            f"{a},{b}": [c.real, c.imag] for (a, b), c in sorted(p.coeffs.items())
        }
    with open(path, "w") as fh:
        json.dump({"k": k, "order": n, "solutions": table}, fh, indent=1)
