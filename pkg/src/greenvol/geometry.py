"""Quadrilateral-patch representation of smooth 2D domains.

A domain is covered by non-overlapping curvilinear quadrilaterals, each given
by a smooth bijection from the parameter square H = [-1,1]^2. Built-in domains
(disk, kite, jellyfish) use a five-patch "star" layout: a central straight-edge
quadrilateral surrounded by four patches built by transfinite (Coons)
interpolation between a boundary arc and the central quad. Each patch can be
split into D x D subpatches by restricting the parameter map.

Parameter points are plain (xi1, xi2) pairs/arrays with both coordinates in
[-1, 1]; no wrapper type is used.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import ChebRule, fejer_rule, tensor_nodes, tensor_weights

Vec2Fn = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Boundary curves
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class BoundaryCurve:
    """Closed counterclockwise curve t in [0, 2*pi) -> R^2.

    `position` and `derivative` must accept arrays of parameters and return
    arrays of shape (..., 2). `second_derivative` is optional and only used
    to speed up Newton refinement of closest-point queries; when absent a
    finite difference of `derivative` is used.

    For a counterclockwise curve the outward unit normal is the tangent
    rotated by -90 degrees: n = (t_y, -t_x)/|t|.
    """

    position: Vec2Fn
    derivative: Vec2Fn
    second_derivative: Optional[Vec2Fn] = None

    def speed(self, t: np.ndarray) -> np.ndarray:
        d = self.derivative(np.asarray(t, dtype=float))
        return np.linalg.norm(d, axis=-1)

    def outward_normal(self, t: np.ndarray) -> np.ndarray:
        d = self.derivative(np.asarray(t, dtype=float))
        n = np.stack([d[..., 1], -d[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def curvature_vector(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.second_derivative is not None:
            return self.second_derivative(t)
        h = 1e-6
        return (self.derivative(t + h) - self.derivative(t - h)) / (2 * h)


# ---------------------------------------------------------------------------
# Edges and transfinite (Coons) patches
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class EdgeCurve:
    """One patch edge s in [-1, 1] -> R^2 with analytic derivative."""

    position: Vec2Fn
    derivative: Vec2Fn


def line_edge(p0, p1) -> EdgeCurve:
    """Straight edge from p0 to p1."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    half = (p1 - p0) / 2.0

    def pos(s):
        s = np.asarray(s, dtype=float)
        return p0 + (s[..., None] + 1.0) * half

    def der(s):
        s = np.asarray(s, dtype=float)
        return np.broadcast_to(half, s.shape + (2,)).copy()

    return EdgeCurve(pos, der)


def curve_edge(curve: BoundaryCurve, t0: float, t1: float) -> EdgeCurve:
    """Sub-arc of a boundary curve, reparametrized from [t0, t1] onto [-1, 1]."""
    scale = (t1 - t0) / 2.0

    def pos(s):
        s = np.asarray(s, dtype=float)
        return curve.position(t0 + (s + 1.0) * scale)

    def der(s):
        s = np.asarray(s, dtype=float)
        return curve.derivative(t0 + (s + 1.0) * scale) * scale

    return EdgeCurve(pos, der)


@dataclass(frozen=True)
class PatchMap:
    """Smooth bijection from the parameter square onto one patch.

    Attributes
    ----------
    map : callable
        (xi1, xi2) arrays -> points of shape broadcast(xi1, xi2).shape + (2,).
    jacobian : callable
        (xi1, xi2) arrays -> Jacobian matrices of shape (..., 2, 2) with
        J[..., i, k] = d x_i / d xi_k.
    provenance : str
        One of "analytic", "transfinite", or "subpatch(...)"; informational.
    """

    map: Callable[[np.ndarray, np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray, np.ndarray], np.ndarray]
    provenance: str = "analytic"

    def jacobian_det(self, xi1: np.ndarray, xi2: np.ndarray) -> np.ndarray:
        J = self.jacobian(xi1, xi2)
        return J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]

    def corners(self) -> np.ndarray:
        """Images of (-1,-1), (1,-1), (1,1), (-1,1), shape (4, 2)."""
        s = np.array([-1.0, 1.0, 1.0, -1.0])
        u = np.array([-1.0, -1.0, 1.0, 1.0])
        return self.map(s, u)


def transfinite_map(edges: tuple[EdgeCurve, EdgeCurve, EdgeCurve, EdgeCurve]) -> PatchMap:
    """Bilinearly blended Coons patch through four edges.

    The edges are (bottom, right, top, left): bottom and top run left to
    right (as functions of xi1 at xi2 = -1 and +1), left and right run bottom
    to top (as functions of xi2 at xi1 = -1 and +1). The four edge endpoints
    must agree at the corners to within 1e-12.
    """
    bottom, right, top, left = edges
    m1 = np.asarray(-1.0)
    p1 = np.asarray(1.0)
    c_bl = bottom.position(m1)
    c_br = bottom.position(p1)
    c_tl = top.position(m1)
    c_tr = top.position(p1)
    mismatch = max(
        np.linalg.norm(c_bl - left.position(m1)),
        np.linalg.norm(c_br - right.position(m1)),
        np.linalg.norm(c_tl - left.position(p1)),
        np.linalg.norm(c_tr - right.position(p1)),
    )
    if mismatch > 1e-12:
        raise ValueError(f"transfinite edges do not close: corner mismatch {mismatch:.3e}")

    def pos(xi1, xi2):
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        xi1, xi2 = np.broadcast_arrays(xi1, xi2)
        s1 = xi1[..., None]
        s2 = xi2[..., None]
        blend = (
            0.5 * (1 - s2) * bottom.position(xi1)
            + 0.5 * (1 + s2) * top.position(xi1)
            + 0.5 * (1 - s1) * left.position(xi2)
            + 0.5 * (1 + s1) * right.position(xi2)
        )
        corner = 0.25 * (
            (1 - s1) * (1 - s2) * c_bl
            + (1 + s1) * (1 - s2) * c_br
            + (1 - s1) * (1 + s2) * c_tl
            + (1 + s1) * (1 + s2) * c_tr
        )
        return blend - corner

    def jac(xi1, xi2):
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        xi1, xi2 = np.broadcast_arrays(xi1, xi2)
        s1 = xi1[..., None]
        s2 = xi2[..., None]
        d1 = (
            0.5 * (1 - s2) * bottom.derivative(xi1)
            + 0.5 * (1 + s2) * top.derivative(xi1)
            + 0.5 * (right.position(xi2) - left.position(xi2))
            - 0.25 * ((1 - s2) * (c_br - c_bl) + (1 + s2) * (c_tr - c_tl))
        )
        d2 = (
            0.5 * (top.position(xi1) - bottom.position(xi1))
            + 0.5 * (1 - s1) * left.derivative(xi2)
            + 0.5 * (1 + s1) * right.derivative(xi2)
            - 0.25 * ((1 - s1) * (c_tl - c_bl) + (1 + s1) * (c_tr - c_br))
        )
        return np.stack([d1, d2], axis=-1)

    return PatchMap(map=pos, jacobian=jac, provenance="transfinite")


def subdivide_patch(parent: PatchMap, d: int) -> list[PatchMap]:
    """Split a patch into d x d subpatches by restricting the parameter map.

    Subpatch (a, b) maps xi to parent.map(offset + xi/d) with
    offset = (-1 + (2a+1)/d, -1 + (2b+1)/d); its Jacobian is the parent's
    scaled by 1/d. Cells are ordered row-major in (a, b).
    """
    if d < 1:
        raise ValueError(f"subdivision count must be >= 1, got {d}")
    if d == 1:
        return [parent]
    out = []
    scale = 1.0 / d
    for a in range(d):
        for b in range(d):
            off1 = -1.0 + (2 * a + 1) * scale
            off2 = -1.0 + (2 * b + 1) * scale

            def pos(xi1, xi2, off1=off1, off2=off2):
                xi1 = np.asarray(xi1, dtype=float)
                xi2 = np.asarray(xi2, dtype=float)
                return parent.map(off1 + scale * xi1, off2 + scale * xi2)

            def jac(xi1, xi2, off1=off1, off2=off2):
                xi1 = np.asarray(xi1, dtype=float)
                xi2 = np.asarray(xi2, dtype=float)
                return parent.jacobian(off1 + scale * xi1, off2 + scale * xi2) * scale

            out.append(PatchMap(map=pos, jacobian=jac, provenance=f"subpatch({a},{b})/{d}"))
    return out


# ---------------------------------------------------------------------------
# Built-in domains
# ---------------------------------------------------------------------------
def _disk_curve() -> BoundaryCurve:
    def pos(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.cos(t), np.sin(t)], axis=-1)

    def der(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-np.sin(t), np.cos(t)], axis=-1)

    def der2(t):
        return -pos(t)

    return BoundaryCurve(pos, der, der2)


def _kite_curve() -> BoundaryCurve:
    def pos(t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.cos(t) + 0.65 * np.cos(2 * t) - 0.65, 1.5 * np.sin(t)], axis=-1)

    def der(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-np.sin(t) - 1.3 * np.sin(2 * t), 1.5 * np.cos(t)], axis=-1)

    def der2(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-np.cos(t) - 2.6 * np.cos(2 * t), -1.5 * np.sin(t)], axis=-1)

    return BoundaryCurve(pos, der, der2)


def _jellyfish_curve() -> BoundaryCurve:
    def parts(t):
        t = np.asarray(t, dtype=float)
        phi = 4 * t + 2 * np.sin(t)
        rho = 1 + 0.3 * np.cos(phi)
        e = np.stack([np.sin(t), -np.cos(t)], axis=-1)
        de = np.stack([np.cos(t), np.sin(t)], axis=-1)
        return t, phi, rho, e, de

    def pos(t):
        _, _, rho, e, _ = parts(t)
        return rho[..., None] * e

    def der(t):
        t, phi, rho, e, de = parts(t)
        dphi = 4 + 2 * np.cos(t)
        drho = -0.3 * np.sin(phi) * dphi
        return drho[..., None] * e + rho[..., None] * de

    def der2(t):
        t, phi, rho, e, de = parts(t)
        dphi = 4 + 2 * np.cos(t)
        ddphi = -2 * np.sin(t)
        drho = -0.3 * np.sin(phi) * dphi
        ddrho = -0.3 * np.cos(phi) * dphi * dphi - 0.3 * np.sin(phi) * ddphi
        return (ddrho - rho)[..., None] * e + 2 * drho[..., None] * de

    return BoundaryCurve(pos, der, der2)


# Star-layout parameters per domain: anchor point, corner fraction lambda, and
# the four boundary parameters (lower-left, lower-right, upper-right,
# upper-left) where the radial patch seams meet the boundary. Values were
# chosen so that every Coons patch has det J bounded well away from zero
# (minimum scanned det J is ~0.06 for disk/kite and ~0.04 for jellyfish).
_QP = np.pi / 4
_STAR_LAYOUTS: dict[str, dict] = {
    "disk": {"curve": _disk_curve, "anchor": (0.0, 0.0), "fraction": 0.5,
             "corners": (5 * _QP, 7 * _QP, _QP, 3 * _QP)},
    "kite": {"curve": _kite_curve, "anchor": (-0.15, 0.0), "fraction": 0.45,
             "corners": (np.pi + 0.6, 2 * np.pi - 0.6, 0.6, np.pi - 0.6)},
    "jellyfish": {"curve": _jellyfish_curve, "anchor": (0.0, 0.0), "fraction": 0.5,
                  "corners": (5 * _QP, 7 * _QP, _QP, 3 * _QP)},
}

BUILTIN_DOMAINS = tuple(_STAR_LAYOUTS)


def _star_patches(curve: BoundaryCurve, anchor, fraction: float, corners) -> list[PatchMap]:
    """Central quad plus four boundary-hugging Coons patches."""
    anchor = np.asarray(anchor, dtype=float)
    bpts = [curve.position(np.asarray(t)) for t in corners]
    inner = [anchor + fraction * (p - anchor) for p in bpts]
    patches = [
        transfinite_map((
            line_edge(inner[0], inner[1]),
            line_edge(inner[1], inner[2]),
            line_edge(inner[3], inner[2]),
            line_edge(inner[0], inner[3]),
        ))
    ]
    for i in range(4):
        j = (i + 1) % 4
        t0 = corners[i]
        t1 = corners[j]
        if t1 < t0:
            t1 += 2 * np.pi
        patches.append(transfinite_map((
            curve_edge(curve, t0, t1),
            line_edge(curve.position(np.asarray(t1)), inner[j]),
            line_edge(inner[i], inner[j]),
            line_edge(curve.position(np.asarray(t0)), inner[i]),
        )))
    return patches


# ---------------------------------------------------------------------------
# Mesh
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DomainMesh:
    """Quadrilateral-patch mesh with its tensor Chebyshev grid.

    Nodes are ordered patch by patch; within patch p, node (i, j) of the
    N x N tensor grid (i along xi1, j along xi2, both 0-based) has global
    index p*N^2 + i*N + j. `node_weights` holds |det J| w_i w_j per node, so
    that sum(values * node_weights) integrates over the domain.
    """

    domain: str
    n: int
    subdivisions: int
    patches: list[PatchMap]
    grid: ChebRule
    boundary: BoundaryCurve
    node_coords: np.ndarray  # (N_tot, 2)
    node_weights: np.ndarray  # (N_tot,)
    _boundary_samples: np.ndarray = field(repr=False, default=None)

    @property
    def n_patches(self) -> int:
        return len(self.patches)

    @property
    def n_nodes(self) -> int:
        return self.node_coords.shape[0]

    def node_index(self, p: int, i: int, j: int) -> int:
        """Global index of tensor node (i, j) on patch p (all 0-based)."""
        n = self.grid.n
        return p * n * n + i * n + j


def build_builtin_domain(name: str, n: int, d: int = 1) -> DomainMesh:
    """Mesh one of the built-in domains (disk, kite, jellyfish).

    Parameters
    ----------
    name : str
        Domain name.
    n : int
        Chebyshev grid order per patch direction (N^2 nodes per patch).
    d : int
        Each base patch is split into d x d subpatches.

    Returns
    -------
    DomainMesh with 5*d^2 patches and 5*d^2*n^2 nodes.
    """
    if name not in _STAR_LAYOUTS:
        raise ValueError(f"unknown domain {name!r}; choose from {sorted(_STAR_LAYOUTS)}")
    if n < 2:
        raise ValueError(f"grid order must be >= 2, got {n}")
    if d < 1:
        raise ValueError(f"subdivision count must be >= 1, got {d}")
    layout = _STAR_LAYOUTS[name]
    curve = layout["curve"]()
    base = _star_patches(curve, layout["anchor"], layout["fraction"], layout["corners"])
    patches: list[PatchMap] = []
    for parent in base:
        patches.extend(subdivide_patch(parent, d))

    rule = fejer_rule(n)
    xi1, xi2 = tensor_nodes(rule)
    ww = tensor_weights(rule)
    coords = np.empty((len(patches) * n * n, 2))
    weights = np.empty(len(patches) * n * n)
    for p, patch in enumerate(patches):
        pts = patch.map(xi1, xi2)
        det = patch.jacobian_det(xi1, xi2)
        if np.any(det == 0.0) or not np.all(np.isfinite(det)):
            raise ValueError(f"degenerate Jacobian in patch {p} of domain {name!r}")
        sl = slice(p * n * n, (p + 1) * n * n)
        coords[sl] = pts.reshape(-1, 2)
        weights[sl] = (np.abs(det) * ww).reshape(-1)
    if np.any(weights <= 0.0):
        raise ValueError("non-positive quadrature weight in mesh")

    tsamp = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
    return DomainMesh(
        domain=name,
        n=n,
        subdivisions=d,
        patches=patches,
        grid=rule,
        boundary=curve,
        node_coords=coords,
        node_weights=weights,
        _boundary_samples=curve.position(tsamp),
    )


# ---------------------------------------------------------------------------
# Closest point and inside/outside classification
# ---------------------------------------------------------------------------
_SCAN_SAMPLES = 4096
_NEWTON_STEPS = 20
_NEWTON_TOL = 1e-12
_BOUNDARY_BAND = 1e-12


def closest_boundary_point(curve: BoundaryCurve, r, samples: int = _SCAN_SAMPLES):
    """Closest point on the curve to r.

    Coarse scan over `samples` uniformly spaced parameters, then Newton
    iteration on g(t) = (gamma(t) - r) . gamma'(t). Ties in the coarse scan
    resolve to the smallest parameter.

    Returns
    -------
    (t, point, dist)
    """
    r = np.asarray(r, dtype=float)
    ts = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    pts = curve.position(ts)
    d2 = np.sum((pts - r) ** 2, axis=-1)
    t = ts[int(np.argmin(d2))]
    for _ in range(_NEWTON_STEPS):
        ta = np.asarray(t)
        g = curve.position(ta) - r
        dg = curve.derivative(ta)
        ddg = curve.curvature_vector(ta)
        num = float(np.dot(g, dg))
        den = float(np.dot(dg, dg) + np.dot(g, ddg))
        if den == 0.0:
            break
        step = num / den
        t = t - step
        if abs(step) < _NEWTON_TOL:
            break
    t = t % (2 * np.pi)
    point = curve.position(np.asarray(t))
    return t, point, float(np.linalg.norm(point - r))


def winding_number(curve: BoundaryCurve, r, samples: int = _SCAN_SAMPLES) -> float:
    """Winding number of the sampled curve around r (1 inside, 0 outside)."""
    r = np.asarray(r, dtype=float)
    ts = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    g = curve.position(ts) - r
    ang = np.arctan2(g[:, 1], g[:, 0])
    dang = np.diff(ang, append=ang[:1])
    dang = (dang + np.pi) % (2 * np.pi) - np.pi
    return float(np.sum(dang) / (2 * np.pi))


def closest_point_on_domain(mesh: DomainMesh, r):
    """Closest point of the closed domain to r, with a location tag.

    Returns (r_star, location) where location is "interior", "boundary", or
    "exterior". Interior and boundary points return r itself (projected to
    the curve when within the boundary tolerance band); exterior points
    return the closest boundary point.

    Classification uses the winding number of the boundary around r; for
    points closer to the curve than a few scan-sample spacings, where the
    sampled winding number is unreliable, the sign of (r - r_star) . n(r_star)
    decides instead.
    """
    r = np.asarray(r, dtype=float)
    t, point, dist = closest_boundary_point(mesh.boundary, r)
    if dist < _BOUNDARY_BAND:
        return point, "boundary"
    spacing = 2 * np.pi * float(np.max(mesh.boundary.speed(np.linspace(0, 2 * np.pi, 64)))) / _SCAN_SAMPLES
    if dist > 4 * spacing:
        inside = abs(winding_number(mesh.boundary, r)) > 0.5
    else:
        normal = mesh.boundary.outward_normal(np.asarray(t))
        inside = float(np.dot(r - point, normal)) < 0.0
    if inside:
        return r, "interior"
    return point, "exterior"


# ---------------------------------------------------------------------------
# JSON export
# ---------------------------------------------------------------------------
def mesh_to_json(mesh: DomainMesh) -> dict:
    """Plot-ready mesh dump: patch corners plus node coordinates/weights."""
    return {
        "domain": mesh.domain,
        "N": mesh.n,
        "D": mesh.subdivisions,
        "patches": [
            {"corners": patch.corners().tolist(), "type": patch.provenance}
            for patch in mesh.patches
        ],
        "nodes": np.column_stack([mesh.node_coords, mesh.node_weights]).tolist(),
    }


def export_mesh_json(mesh: DomainMesh, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(mesh_to_json(mesh), fh)
