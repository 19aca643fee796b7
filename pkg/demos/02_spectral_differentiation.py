#!/usr/bin/env python
# Differentiate grid-sampled functions spectrally and watch the accuracy
# decay as the derivative order grows -- the reason the convergence study
# offers a subdivision-refinement mode.
import numpy as np

from greenvol import GridField, build_builtin_domain, derivative_tensor, physical_gradient
from greenvol.quadrature import tensor_nodes

mesh = build_builtin_domain("disk", 16, 1)
patch = mesh.patches[0]  # the central quad
xi1, xi2 = tensor_nodes(mesh.grid)
pts = patch.map(xi1, xi2)
x, y = pts[..., 0], pts[..., 1]

# first derivatives of cos(xy) through the patch map
fx, fy = physical_gradient(GridField(0, np.cos(x * y)), patch, mesh.grid)
print("d/dx cos(xy) max error:", np.max(np.abs(fx.values + y * np.sin(x * y))))
print("d/dy cos(xy) max error:", np.max(np.abs(fy.values + x * np.sin(x * y))))

# iterate to higher orders: each differentiation costs accuracy
tensor = derivative_tensor(GridField(0, np.cos(x * y)), patch, mesh.grid, 4)
exact = {
    (0, 0): np.cos(x * y),
    (1, 0): -y * np.sin(x * y),
    (2, 0): -y**2 * np.cos(x * y),
    (2, 1): -2 * y * np.cos(x * y) + x * y**2 * np.sin(x * y),
    (2, 2): (x**2 * y**2 - 2) * np.cos(x * y) + 4 * x * y * np.sin(x * y),
}
print("\norder | max error of one representative derivative")
for key in [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)]:
    err = np.max(np.abs(tensor.data[key] - exact[key]))
    print(f"{sum(key):5d} | D^{key} error {err:.3e}")
