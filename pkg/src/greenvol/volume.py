"""Assembly and application of the regularized volume-potential operator.

The potential of a source f over the meshed domain is evaluated at all grid
nodes as

    V f  -  sum_beta (S + W)[:, beta] * T_beta(node),

where V is the punctured dense quadrature of the Green-function integral
(kernel zeroed at the target node), W holds V applied to each monomial of
total degree <= n, S holds the boundary-correction values of the associated
monomial particular solutions, and T_beta are the coefficients of the local
Taylor interpolant of f on the fixed monomial basis. The subtraction cancels
the quadrature error of the singular kernel against the same error committed
on the interpolant, leaving the smooth Taylor-remainder integral plus
near-machine-accurate layer potentials.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import comb, factorial
from typing import Callable

import numpy as np

from .geometry import DomainMesh, closest_boundary_point, closest_point_on_domain
from .kernels import hankel1_01
from .layers import (
    BoundaryDiscretization,
    discretize_boundary,
    s_beta_at,
    s_beta_columns,
)
from .polynomials import MAX_ORDER, basis_size, monomial_basis, taylor_coeffs
from .quadrature import tensor_nodes
from .spectral import GridField, derivative_tensor

DEFAULT_PANELS = 64
DEFAULT_GAUSS_ORDER = 12


@dataclass(frozen=True)
class SourceData:
    """Grid samples of a source and its derivatives up to a fixed order.

    `values` has one entry per mesh node; `derivs` maps each multi-index
    (a1, a2) with a1 + a2 <= order to the per-node array of D^(a1,a2) f,
    with (0, 0) equal to `values`.
    """

    mesh: DomainMesh
    order: int
    values: np.ndarray
    derivs: dict[tuple[int, int], np.ndarray]

    @classmethod
    def from_function(cls, mesh: DomainMesh, f: Callable, order: int) -> "SourceData":
        """Sample f on the mesh and differentiate spectrally per patch."""
        if order > MAX_ORDER:
            raise ValueError(f"order {order} exceeds supported maximum {MAX_ORDER}")
        n = mesh.grid.n
        xi1, xi2 = tensor_nodes(mesh.grid)
        n_tot = mesh.n_nodes
        derivs = {
            (a1, a2): np.empty(n_tot, dtype=complex)
            for d in range(order + 1)
            for a1, a2 in [(d - j, j) for j in range(d + 1)]
        }
        for p, patch in enumerate(mesh.patches):
            pts = patch.map(xi1, xi2)
            samples = np.asarray(f(pts[..., 0], pts[..., 1]), dtype=complex)
            tensor = derivative_tensor(GridField(p, samples), patch, mesh.grid, order)
            sl = slice(p * n * n, (p + 1) * n * n)
            for key, arr in tensor.data.items():
                derivs[key][sl] = arr.reshape(-1)
        return cls(mesh=mesh, order=order, values=derivs[(0, 0)], derivs=derivs)


def volume_kernel_matrix(mesh: DomainMesh, k: float) -> np.ndarray:
    """Dense punctured quadrature matrix of the volume potential.

    M[l, l'] = G_k(r_l, r_l') w_l' with M[l, l] = 0, so that M @ f applies
    the plain product rule to the source samples. O(N_tot^2) storage; the
    single seam a fast summation backend would need to replace.
    """
    pts = mesh.node_coords
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, 1.0)
    if k == 0.0:
        mat = -np.log(dist) / (2.0 * np.pi) + 0.0j
    else:
        h0, _ = hankel1_01(k * dist)
        mat = 0.25j * h0
    np.fill_diagonal(mat, 0.0)
    return mat * mesh.node_weights[None, :]


def apply_V(mesh: DomainMesh, k: float, f: np.ndarray, matrix: np.ndarray | None = None) -> np.ndarray:
    """Punctured quadrature of the volume potential at all grid nodes.

    Low-order on its own because of the kernel singularity; the regularized
    pipeline in `evaluate` is what converges fast. Pass `matrix` (from
    `volume_kernel_matrix`) to reuse a prebuilt kernel matrix.
    """
    f = np.asarray(f)
    if f.shape != (mesh.n_nodes,):
        raise ValueError(f"source vector has shape {f.shape}, expected ({mesh.n_nodes},)")
    if matrix is None:
        matrix = volume_kernel_matrix(mesh, k)
    return matrix @ f


@dataclass(frozen=True)
class VolumeOperator:
    """Precomputed operator data for one mesh, wavenumber, and order.

    `s_matrix` and `w_matrix` are (N_tot, N_ind) with columns following the
    graded-lex monomial ordering; they are kept separate so each can be
    validated against its own oracle.
    """

    mesh: DomainMesh
    k: float
    order: int
    s_matrix: np.ndarray
    w_matrix: np.ndarray
    bd: BoundaryDiscretization
    kernel: np.ndarray

    @property
    def n_columns(self) -> int:
        return self.s_matrix.shape[1]


def build_operator(
    mesh: DomainMesh,
    k: float,
    order: int,
    panels: int = DEFAULT_PANELS,
    gauss_order: int = DEFAULT_GAUSS_ORDER,
) -> VolumeOperator:
    """Assemble the dense volume map plus its monomial correction matrices."""
    if order > MAX_ORDER:
        raise ValueError(f"order {order} exceeds supported maximum {MAX_ORDER}")
    betas = monomial_basis(order)
    kernel = volume_kernel_matrix(mesh, k)
    x = mesh.node_coords[:, 0]
    y = mesh.node_coords[:, 1]
    w_matrix = np.empty((mesh.n_nodes, len(betas)), dtype=complex)
    for m, beta in enumerate(betas):
        w_matrix[:, m] = kernel @ (x**beta.a1 * y**beta.a2)
    bd = discretize_boundary(mesh.boundary, panels, gauss_order)
    s_matrix = s_beta_columns(k, bd, mesh, betas)
    return VolumeOperator(
        mesh=mesh, k=k, order=order,
        s_matrix=s_matrix, w_matrix=w_matrix, bd=bd, kernel=kernel,
    )


def assemble_T(source: SourceData, order: int) -> np.ndarray:
    """Taylor coefficient matrix T of shape (N_ind, N_tot).

    Row m holds T_beta(m) evaluated with the expansion point at each grid
    node; column l is exactly taylor_coeffs(derivatives at node l, node l).
    """
    if order > source.order:
        raise ValueError(f"source carries derivatives to order {source.order}, need {order}")
    mesh = source.mesh
    basis = monomial_basis(order)
    x0 = mesh.node_coords[:, 0]
    y0 = mesh.node_coords[:, 1]
    t = np.zeros((len(basis), mesh.n_nodes), dtype=complex)
    for m, beta in enumerate(basis):
        for d in range(beta.order, order + 1):
            for a1 in range(d, -1, -1):
                a2 = d - a1
                if a1 < beta.a1 or a2 < beta.a2:
                    continue
                weight = comb(a1, beta.a1) * comb(a2, beta.a2) / (factorial(a1) * factorial(a2))
                t[m] += weight * source.derivs[(a1, a2)] * (-x0) ** (a1 - beta.a1) * (-y0) ** (a2 - beta.a2)
    return t


def evaluate(op: VolumeOperator, source: SourceData) -> np.ndarray:
    """Regularized volume potential of the source at all grid nodes."""
    if source.mesh is not op.mesh and source.mesh.n_nodes != op.mesh.n_nodes:
        raise ValueError("source sampled on a different mesh than the operator")
    vf = op.kernel @ source.values
    t = assemble_T(source, op.order)
    correction = np.einsum("lm,ml->l", op.s_matrix + op.w_matrix, t)
    return vf - correction


def evaluate_at_points(op: VolumeOperator, source: SourceData, targets) -> np.ndarray:
    """Volume potential of the source at arbitrary targets.

    Exterior targets farther than one local panel length from the boundary
    use the plain smooth quadrature. All others (interior, boundary, or
    near-boundary exterior) are regularized with the expansion anchored at
    the grid node nearest the closest domain point; nearest-node ties break
    to the lowest global index. A target coinciding with a grid node follows
    the same code path as `evaluate` and reproduces its value exactly.
    """
    targets = np.asarray(targets, dtype=float).reshape(-1, 2)
    mesh = op.mesh
    t_full = assemble_T(source, op.order)
    betas = monomial_basis(op.order)
    x = mesh.node_coords[:, 0]
    y = mesh.node_coords[:, 1]
    monomials = np.stack([x**b.a1 * y**b.a2 for b in betas])  # (N_ind, N_tot)
    node_values: np.ndarray | None = None
    out = np.empty(targets.shape[0], dtype=complex)
    for i, r in enumerate(targets):
        hits = np.nonzero((mesh.node_coords[:, 0] == r[0]) & (mesh.node_coords[:, 1] == r[1]))[0]
        if hits.size:
            if node_values is None:
                node_values = evaluate(op, source)
            out[i] = node_values[hits[0]]
            continue
        _, location = closest_point_on_domain(mesh, r)
        bparam, bpoint, bdist = closest_boundary_point(mesh.boundary, r)
        panel = min(int(np.searchsorted(op.bd.breaks, bparam, side="right")) - 1,
                    op.bd.n_panels - 1)
        local_len = op.bd.panel_lengths[panel]

        dvec = np.linalg.norm(mesh.node_coords - r, axis=1)
        safe = np.where(dvec == 0.0, 1.0, dvec)
        if op.k == 0.0:
            kv = -np.log(safe) / (2.0 * np.pi) + 0.0j
        else:
            h0, _ = hankel1_01(op.k * safe)
            kv = 0.25j * h0
        kv = np.where(dvec == 0.0, 0.0, kv) * mesh.node_weights
        vf = kv @ source.values

        if location == "exterior" and bdist >= local_len:
            out[i] = vf
            continue

        if location == "interior":
            kappa, rstar = 1.0, r
        elif location == "boundary":
            kappa, rstar = 0.5, bpoint
        else:
            kappa, rstar = 0.0, bpoint
        anchor = int(np.argmin(np.linalg.norm(mesh.node_coords - rstar, axis=1)))
        w_row = monomials @ kv  # (N_ind,)
        s_row = np.array([
            s_beta_at(op.k, op.bd, beta, r.reshape(1, 2), kappa)[0] for beta in betas
        ])
        out[i] = vf - (w_row + s_row) @ t_full[:, anchor]
    return out


# ---------------------------------------------------------------------------
# Binary export of the operator matrices
# ---------------------------------------------------------------------------
_MAGIC = b"GVOP"


def export_operator(op: VolumeOperator, path: str) -> None:
    """Dump S and W to a flat little-endian binary file.

    Layout: magic "GVOP", int64 rows, int64 cols, float64 k, int64 order,
    then S and then W as row-major (re, im) float64 pairs.
    """
    rows, cols = op.s_matrix.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<qqdq", rows, cols, float(op.k), op.order))
        for mat in (op.s_matrix, op.w_matrix):
            interleaved = np.empty((rows, cols, 2), dtype="<f8")
            interleaved[..., 0] = mat.real
            interleaved[..., 1] = mat.imag
            fh.write(interleaved.tobytes())


def read_operator_matrices(path: str):
    """Read back an export_operator dump: (k, order, S, W)."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not an operator matrix dump")
        rows, cols, k, order = struct.unpack("<qqdq", fh.read(32))
        mats = []
        for _ in range(2):
            raw = np.frombuffer(fh.read(rows * cols * 16), dtype="<f8").reshape(rows, cols, 2)
            mats.append(raw[..., 0] + 1j * raw[..., 1])
    return k, order, mats[0], mats[1]
