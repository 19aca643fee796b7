#!/usr/bin/env python
# Build the three built-in domains, look at their patch layouts, and check
# the tensor-product Fejér quadrature against an independent area oracle.
import numpy as np
import matplotlib.pyplot as plt

from greenvol import build_builtin_domain, export_mesh_json, fejer_rule, integrate_domain

# Each domain is covered by 5 smooth quadrilateral patches: a central quad
# plus four transfinite patches that follow the boundary. Splitting every
# patch D x D refines the mesh without changing the per-patch grid.
fig, axes = plt.subplots(1, 3, figsize=(12, 4))
for ax, name in zip(axes, ("disk", "kite", "jellyfish")):
    mesh = build_builtin_domain(name, N := 8, D := 1)
    ax.scatter(mesh.node_coords[:, 0], mesh.node_coords[:, 1],
               s=4, c=np.repeat(np.arange(mesh.n_patches), N * N), cmap="tab10")
    t = np.linspace(0, 2 * np.pi, 600)
    ax.plot(*mesh.boundary.position(t).T, "k-", lw=1)
    ax.set_title(f"{name}: {mesh.n_patches} patches, {mesh.n_nodes} nodes")
    ax.set_aspect("equal")
fig.tight_layout()
fig.savefig("mesh_layouts.png", dpi=130)
print("wrote mesh_layouts.png")

# quadrature sanity: total weight = area, from Green's theorem on the boundary
for name in ("disk", "kite", "jellyfish"):
    mesh = build_builtin_domain(name, 16, 1)
    t = np.linspace(0, 2 * np.pi, 200_001, endpoint=False)
    p = mesh.boundary.position(t)
    d = mesh.boundary.derivative(t)
    area_oracle = 0.5 * np.mean(p[:, 0] * d[:, 1] - p[:, 1] * d[:, 0]) * 2 * np.pi
    area_mesh = float(np.sum(mesh.node_weights))
    print(f"{name:10s} area: quadrature {area_mesh:.12f}  boundary oracle {area_oracle:.12f}"
          f"  diff {abs(area_mesh - area_oracle):.2e}")

# the 1D rule integrates polynomials of degree < N exactly
rule = fejer_rule(6)
print("\nFejér-6 nodes  :", np.round(rule.nodes, 6))
print("Fejér-6 weights:", np.round(rule.weights, 6), " sum =", rule.weights.sum())

# smooth integrands converge spectrally
mesh = build_builtin_domain("kite", 16, 1)
val = integrate_domain(lambda x, y: np.exp(-x) * np.cos(y), mesh)
ref = integrate_domain(lambda x, y: np.exp(-x) * np.cos(y), build_builtin_domain("kite", 24, 1))
print(f"\nintegral of exp(-x)cos(y) over the kite: {val.real:.14f} (N=16 vs N=24 diff {abs(val-ref):.1e})")

export_mesh_json(build_builtin_domain("jellyfish", 6, 2), "jellyfish_mesh.json")
print("wrote jellyfish_mesh.json (plotting-ready dump)")
