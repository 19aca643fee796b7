"""FFT-based differentiation of functions sampled on Chebyshev tensor grids.

Samples on the zeros grid t_j = cos(theta_j) are interpolated by a cosine
series in theta (via a type-II DCT), the series is differentiated in theta,
and the chain rule d/dt = -(1/sin theta) d/dtheta converts back; the zeros
grid keeps sin(theta_j) away from zero. Physical derivatives follow from the
patch Jacobian, and higher derivatives by iterating the process.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .geometry import PatchMap
from .quadrature import ChebRule, tensor_nodes


@dataclass(frozen=True)
class GridField:
    """Samples of one function on one patch's N x N tensor grid.

    values[i, j] is the sample at (t_i, t_j); axis 0 follows xi1.
    """

    patch_index: int
    values: np.ndarray


@dataclass(frozen=True)
class DerivativeTensor:
    """All partial derivatives up to a given total order, on one patch grid.

    `data` maps a multi-index (a1, a2) with a1 + a2 <= order to the (N, N)
    array of d^(a1+a2) f / dx^a1 dy^a2 values at the grid nodes; (0, 0) is
    the raw sample array.
    """

    patch_index: int
    order: int
    data: dict[tuple[int, int], np.ndarray]


def _cheb_derivative(values: np.ndarray, angles: np.ndarray, axis: int) -> np.ndarray:
    """d/dt along `axis` of the cosine-series interpolant through `values`."""
    v = np.moveaxis(np.asarray(values), axis, 0)
    n = v.shape[0]
    if n == 1:
        return np.zeros_like(np.moveaxis(v, 0, axis))
    coef = scipy.fft.dct(v, type=2, axis=0) / n
    coef[0] *= 0.5
    m = np.arange(n).reshape((n,) + (1,) * (v.ndim - 1))
    sine_coef = m * coef
    shifted = np.zeros_like(sine_coef)
    shifted[:-1] = 0.5 * sine_coef[1:]
    series = scipy.fft.dst(shifted, type=3, axis=0)
    d = series / np.sin(angles).reshape((n,) + (1,) * (v.ndim - 1))
    return np.moveaxis(d, 0, axis)


def cheb_gradient_param(field: GridField, rule: ChebRule) -> tuple[GridField, GridField]:
    """Parameter-space gradient (dF/dxi1, dF/dxi2) of a grid field."""
    if field.values.shape != (rule.n, rule.n):
        raise ValueError(f"field shape {field.values.shape} does not match rule n={rule.n}")
    d1 = _cheb_derivative(field.values, rule.angles, axis=0)
    d2 = _cheb_derivative(field.values, rule.angles, axis=1)
    return (GridField(field.patch_index, d1), GridField(field.patch_index, d2))


def physical_gradient(field: GridField, patch: PatchMap, rule: ChebRule) -> tuple[GridField, GridField]:
    """Physical gradient (dF/dx, dF/dy) via the inverse patch Jacobian.

    Solves J^T grad_r F = grad_xi F nodewise with the explicit 2x2 inverse.
    """
    g1, g2 = cheb_gradient_param(field, rule)
    xi1, xi2 = tensor_nodes(rule)
    J = patch.jacobian(xi1, xi2)
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    if np.any(det == 0.0):
        raise ValueError("singular patch Jacobian at a grid node")
    fx = (J[..., 1, 1] * g1.values - J[..., 1, 0] * g2.values) / det
    fy = (-J[..., 0, 1] * g1.values + J[..., 0, 0] * g2.values) / det
    return (GridField(field.patch_index, fx), GridField(field.patch_index, fy))


def derivative_tensor(field: GridField, patch: PatchMap, rule: ChebRule, order: int) -> DerivativeTensor:
    """All physical derivatives of the field up to the given total order.

    Derivatives are generated breadth-first; the mixed derivative (a1, a2)
    always comes from differentiating (a1-1, a2) in x when a1 >= 1 and from
    (0, a2-1) in y otherwise, so each entry is computed exactly once along a
    fixed canonical path.
    """
    if order < 0:
        raise ValueError(f"derivative order must be >= 0, got {order}")
    data: dict[tuple[int, int], np.ndarray] = {(0, 0): np.asarray(field.values)}
    grads: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def grad_of(key):
        if key not in grads:
            fx, fy = physical_gradient(GridField(field.patch_index, data[key]), patch, rule)
            grads[key] = (fx.values, fy.values)
        return grads[key]

    for total in range(1, order + 1):
        for a1 in range(total, -1, -1):
            a2 = total - a1
            if a1 >= 1:
                data[(a1, a2)] = grad_of((a1 - 1, a2))[0]
            else:
                data[(a1, a2)] = grad_of((0, a2 - 1))[1]
    return DerivativeTensor(patch_index=field.patch_index, order=order, data=data)
