"""Fejér first-rule quadrature on Chebyshev zero grids.

The one-dimensional rule uses the zeros of the Chebyshev polynomial T_N as
nodes, with positive weights given by a closed-form cosine sum. Tensor-product
versions integrate over the parameter square [-1,1]^2 of a patch; summing over
all patches of a mesh integrates over the physical domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .geometry import DomainMesh, PatchMap


@dataclass(frozen=True)
class ChebRule:
    """One-dimensional Fejér rule on the N Chebyshev zeros.

    Attributes
    ----------
    n : int
        Node count.
    angles : np.ndarray, shape (N,)
        theta_j = (2j-1)*pi/(2N), j = 1..N, all in (0, pi).
    nodes : np.ndarray, shape (N,)
        t_j = cos(theta_j), in (-1, 1), decreasing.
    weights : np.ndarray, shape (N,)
        Positive weights summing to 2.
    """

    n: int
    angles: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray


def fejer_rule(n: int) -> ChebRule:
    """Build the n-point Fejér first rule on (-1, 1).

    Weights come from direct summation of the cosine series

        w_j = (2/n) * (1 - 2 * sum_{l=1}^{floor(n/2)} cos(2 l theta_j) / (4 l^2 - 1)),

    an O(n^2) evaluation, which is plenty fast for the node counts used here.
    """
    if n < 1:
        raise ValueError(f"Fejér rule needs n >= 1, got {n}")
    j = np.arange(1, n + 1)
    angles = (2 * j - 1) * np.pi / (2 * n)
    nodes = np.cos(angles)
    weights = np.ones(n)
    for ell in range(1, n // 2 + 1):
        weights -= 2.0 * np.cos(2 * ell * angles) / (4 * ell * ell - 1)
    weights *= 2.0 / n
    return ChebRule(n=n, angles=angles, nodes=nodes, weights=weights)


def tensor_nodes(rule: ChebRule) -> tuple[np.ndarray, np.ndarray]:
    """Meshgrid (xi1, xi2) of the tensor-product nodes, each shape (N, N)."""
    return np.meshgrid(rule.nodes, rule.nodes, indexing="ij")


def tensor_weights(rule: ChebRule) -> np.ndarray:
    """Outer product w_i * w_j of the 1D weights, shape (N, N)."""
    return np.outer(rule.weights, rule.weights)


def integrate_patch(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    patch: "PatchMap",
    rule: ChebRule,
) -> complex:
    """Integrate f over one patch: sum f(t_i,t_j) |det J(t_i,t_j)| w_i w_j.

    Parameters
    ----------
    f : callable
        Vectorized function of parameter coordinates (xi1, xi2); both
        arguments arrive as (N, N) arrays.
    patch : PatchMap
        Supplies the Jacobian determinant.
    rule : ChebRule
        The 1D rule whose tensor product is used.
    """
    xi1, xi2 = tensor_nodes(rule)
    det = patch.jacobian_det(xi1, xi2)
    vals = f(xi1, xi2)
    return complex(np.sum(vals * np.abs(det) * tensor_weights(rule)))


def integrate_domain(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    mesh: "DomainMesh",
) -> complex:
    """Integrate f(x, y) over the whole meshed domain.

    Uses the mesh's precomputed node coordinates and weights, so this is a
    single weighted sum over all P*N^2 nodes.
    """
    vals = f(mesh.node_coords[:, 0], mesh.node_coords[:, 1])
    return complex(np.sum(vals * mesh.node_weights))
