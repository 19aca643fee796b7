"""Command-line interface: convergence runs, error fields, and self-tests."""

from __future__ import annotations

import argparse
import os
import sys
import traceback

import numpy as np


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _cmd_run(args) -> int:
    from .validation import (
        ConvergenceRow,
        ExperimentConfig,
        run_manufactured,
        rows_to_csv,
        write_manifest,
    )

    fixed = args.D if args.strategy == "fixD" else args.N
    config = ExperimentConfig(
        domain=args.domain, k=args.k, orders=_parse_int_list(args.orders),
        strategy=args.strategy, ladder=_parse_int_list(args.ladder),
        fixed=fixed, out_dir=args.out,
    )
    os.makedirs(args.out, exist_ok=True)
    rows: list[ConvergenceRow] = []
    failures: dict[str, str] = {}
    # run ladder steps one at a time so one failure does not void the rest
    for step in config.ladder:
        single = ExperimentConfig(
            domain=config.domain, k=config.k, orders=config.orders,
            strategy=config.strategy, ladder=(step,), fixed=config.fixed,
        )
        try:
            rows.extend(run_manufactured(single))
        except Exception as exc:  # noqa: BLE001 - report and continue the ladder
            failures[str(step)] = f"{type(exc).__name__}: {exc}"
            traceback.print_exc()
    # recompute pairwise orders across the merged ladder
    from dataclasses import replace

    merged: list[ConvergenceRow] = []
    for n in config.orders:
        prev = None
        for row in [r for r in rows if r.n == n]:
            if prev is not None:
                eoc = float(np.log(prev.error / row.error) / np.log(
                    (row.grid_order * row.subdivisions)
                    / (prev.grid_order * prev.subdivisions)
                ))
                row = replace(row, eoc=eoc)
            merged.append(row)
            prev = row
    tag = f"{config.domain}_{config.strategy}"
    rows_to_csv(merged, os.path.join(args.out, f"convergence_{tag}.csv"))
    write_manifest(config, merged, os.path.join(args.out, f"manifest_{tag}.json"), failures)
    for row in merged:
        eoc = "-" if row.eoc is None else f"{row.eoc:6.2f}"
        print(
            f"n={row.n} N={row.grid_order:3d} D={row.subdivisions:2d} "
            f"N_tot={row.n_total:6d} error={row.error:.3e} eoc={eoc}"
        )
    return 1 if failures else 0


def _cmd_field(args) -> int:
    from .validation import emit_error_field

    emit_error_field(args.domain, args.n, args.N, args.D, args.out, k=args.k)
    print(f"wrote {args.out}")
    if args.mesh_json:
        from .geometry import build_builtin_domain, export_mesh_json

        export_mesh_json(build_builtin_domain(args.domain, args.N, args.D), args.mesh_json)
        print(f"wrote {args.mesh_json}")
    return 0


def _selftest_checks():
    from . import geometry, kernels, layers, polynomials, quadrature, validation, volume

    def fejer_basics():
        rule = quadrature.fejer_rule(3)
        assert np.allclose(rule.weights, [4 / 9, 10 / 9, 4 / 9], atol=1e-15)
        for n in (1, 2, 7, 16, 33):
            assert abs(quadrature.fejer_rule(n).weights.sum() - 2.0) < 1e-14
        rule = quadrature.fejer_rule(12)
        for m in range(12):
            exact = 0.0 if m % 2 else 2.0 / (m + 1)
            assert abs(np.sum(rule.weights * rule.nodes**m) - exact) < 1e-13

    def polynomial_residuals():
        for k in (0.0, 1.0, 2.5):
            for beta in polynomials.monomial_basis(6):
                p = polynomials.particular_poly(beta, k)
                res = polynomials.pde_residual(p, beta, k)
                assert res.max_abs_coeff() <= 1e-11 * max(1.0, p.max_abs_coeff())

    def gauss_lemma():
        for name in geometry.BUILTIN_DOMAINS:
            mesh = geometry.build_builtin_domain(name, 4, 1)
            bd = layers.discretize_boundary(mesh.boundary, 64, 12)
            trace = layers.LayerDensityTrace(
                dirichlet=np.ones_like(bd.speed), neumann=np.zeros_like(bd.speed)
            )
            anchor = mesh.patches[0].map(np.array(0.0), np.array(0.0))
            inside = layers.layer_combo(0.0, bd, trace, anchor)
            outside = layers.layer_combo(0.0, bd, trace, np.array([50.0, 0.0]))
            assert abs(inside - (-1.0)) < 1e-9
            assert abs(outside) < 1e-9

    def disk_closed_form():
        mesh = geometry.build_builtin_domain("disk", 8, 1)
        op = volume.build_operator(mesh, 0.0, 0)
        src = volume.SourceData.from_function(mesh, lambda x, y: np.ones_like(x), 0)
        v = volume.evaluate(op, src)
        exact = (1.0 - mesh.node_coords[:, 0] ** 2 - mesh.node_coords[:, 1] ** 2) / 4.0
        assert np.max(np.abs(v - exact)) < 1e-7

    def spectral_gradient():
        from .quadrature import tensor_nodes
        from .spectral import GridField, physical_gradient

        mesh = geometry.build_builtin_domain("disk", 16, 1)
        patch = mesh.patches[0]
        xi1, xi2 = tensor_nodes(mesh.grid)
        pts = patch.map(xi1, xi2)
        x, y = pts[..., 0], pts[..., 1]
        fx, fy = physical_gradient(GridField(0, np.cos(x * y)), patch, mesh.grid)
        assert np.max(np.abs(fx.values - (-y * np.sin(x * y)))) < 1e-8
        assert np.max(np.abs(fy.values - (-x * np.sin(x * y)))) < 1e-8

    def reference_consistency():
        u, grad_u, f = validation.manufactured_solution(0.0)
        mesh = geometry.build_builtin_domain("disk", 8, 1)
        op = volume.build_operator(mesh, 0.0, 2)
        src = volume.SourceData.from_function(mesh, f, 2)
        v = volume.evaluate(op, src)
        bd = layers.discretize_boundary(mesh.boundary, 256, 16)
        v_ref = layers.reference_potential(0.0, bd, u, grad_u, mesh.node_coords)
        err = validation.relative_l2_error(v, v_ref, mesh.node_weights)
        assert err < 5e-4

    return [
        ("fejer-rule basics", fejer_basics),
        ("monomial-solution residuals", polynomial_residuals),
        ("gauss lemma on built-in curves", gauss_lemma),
        ("disk closed-form potential", disk_closed_form),
        ("spectral gradient accuracy", spectral_gradient),
        ("manufactured-solution consistency", reference_consistency),
    ]


def _cmd_selftest(_args) -> int:
    failed = 0
    for name, check in _selftest_checks():
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - report every failure
            failed += 1
            print(f"FAIL {name}: {type(exc).__name__}: {exc}")
        else:
            print(f"PASS {name}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenvol",
        description="High-order 2D Laplace/Helmholtz volume potentials on patch meshes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="manufactured-solution convergence study")
    run.add_argument("--domain", required=True, choices=["disk", "kite", "jellyfish"])
    run.add_argument("--k", type=float, default=0.0)
    run.add_argument("--orders", default="0,1,2,3,4", help="comma-separated interpolation orders")
    run.add_argument("--strategy", required=True, choices=["fixD", "fixN"])
    run.add_argument("--ladder", required=True, help="comma-separated N (fixD) or D (fixN) values")
    run.add_argument("--D", type=int, default=1, help="fixed subdivision count for fixD")
    run.add_argument("--N", type=int, default=5, help="fixed grid order for fixN")
    run.add_argument("--out", required=True, help="output directory")
    run.set_defaults(func=_cmd_run)

    fld = sub.add_parser("field", help="pointwise error field for one configuration")
    fld.add_argument("--domain", required=True, choices=["disk", "kite", "jellyfish"])
    fld.add_argument("--k", type=float, default=0.0)
    fld.add_argument("--n", type=int, required=True, help="interpolation order")
    fld.add_argument("--N", type=int, required=True)
    fld.add_argument("--D", type=int, default=1)
    fld.add_argument("--out", required=True, help="output CSV file")
    fld.add_argument("--mesh-json", default=None, help="also dump the mesh as JSON here")
    fld.set_defaults(func=_cmd_field)

    st = sub.add_parser("selftest", help="run the built-in invariant checks")
    st.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
