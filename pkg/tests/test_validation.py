import json

import numpy as np
import pytest

from greenvol.validation import (
    ExperimentConfig,
    emit_error_field,
    manufactured_solution,
    rows_to_csv,
    run_manufactured,
    write_manifest,
)


class TestConfig:
    def test_strategy_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig("disk", 0.0, (0,), "growboth", (1, 2), 5)

    def test_ladder_must_increase(self):
        with pytest.raises(ValueError):
            ExperimentConfig("disk", 0.0, (0,), "fixN", (2, 1), 5)

    def test_orders_range(self):
        with pytest.raises(ValueError):
            ExperimentConfig("disk", 0.0, (13,), "fixN", (1, 2), 5)

    def test_grid_for(self):
        cfg = ExperimentConfig("disk", 0.0, (0,), "fixD", (6, 8), 2)
        assert cfg.grid_for(6) == (6, 2)
        cfg = ExperimentConfig("disk", 0.0, (0,), "fixN", (1, 2), 5)
        assert cfg.grid_for(2) == (5, 2)


class TestManufactured:
    def test_source_consistent_with_u(self, rng):
        # f must equal (lap + k^2) u; check by finite differences
        for k in (0.0, 1.3):
            u, grad_u, f = manufactured_solution(k)
            pts = rng.uniform(-1, 1, size=(20, 2))
            h = 1e-5
            x, y = pts[:, 0], pts[:, 1]
            lap = (
                u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4 * u(x, y)
            ) / h**2
            assert np.max(np.abs(lap + k * k * u(x, y) - f(x, y))) < 1e-5
            g = grad_u(x, y)
            gx = (u(x + h, y) - u(x - h, y)) / (2 * h)
            assert np.max(np.abs(g[..., 0] - gx)) < 1e-8

    def test_fixd_ladder_disk_order_zero(self):
        cfg = ExperimentConfig("disk", 0.0, (0,), "fixD", (6, 10, 14), 1)
        rows = run_manufactured(cfg)
        errors = [r.error for r in rows]
        assert errors[0] > errors[1] > errors[2]
        assert rows[-1].eoc >= 2.5

    def test_fixn_ladder_disk_order_two(self):
        cfg = ExperimentConfig("disk", 0.0, (2,), "fixN", (1, 2, 4), 5)
        rows = run_manufactured(cfg)
        assert rows[-1].eoc >= 4.5

    def test_polynomial_source_error_flat(self):
        # constant source: the pipeline is exact up to layer-potential
        # accuracy at every ladder step
        def solution():
            u = lambda x, y: (x * x + y * y) / 4 + 0j
            grad = lambda x, y: np.stack([x / 2, y / 2], axis=-1)
            f = lambda x, y: np.ones_like(x) + 0j
            return u, grad, f

        cfg = ExperimentConfig("disk", 0.0, (0,), "fixD", (5, 8), 1)
        rows = run_manufactured(cfg, solution=solution())
        for row in rows:
            assert row.error <= 1e-7

    def test_row_bookkeeping(self):
        cfg = ExperimentConfig("disk", 0.0, (0, 1), "fixN", (1, 2), 4)
        rows = run_manufactured(cfg)
        assert len(rows) == 4
        assert [r.n for r in rows] == [0, 0, 1, 1]
        assert rows[0].eoc is None and rows[2].eoc is None
        assert rows[1].n_total == 4 * 4 * 5 * 4  # P*D^2*N^2 = 5*4*16
        assert all(r.wall_time > 0 for r in rows)


class TestOutputs:
    def test_csv_determinism(self, tmp_path):
        cfg = ExperimentConfig("disk", 0.0, (0,), "fixD", (4, 5), 1)
        paths = []
        for tag in ("a", "b"):
            rows = run_manufactured(cfg)
            path = tmp_path / f"conv_{tag}.csv"
            rows_to_csv(rows, str(path))
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_csv_format(self, tmp_path):
        cfg = ExperimentConfig("disk", 0.0, (1,), "fixD", (4, 5), 1)
        rows = run_manufactured(cfg)
        path = tmp_path / "conv.csv"
        rows_to_csv(rows, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "n,N,D,N_tot,error,eoc"
        assert len(lines) == 3
        assert lines[1].split(",")[5] == ""  # first row has no eoc

    def test_manifest(self, tmp_path):
        cfg = ExperimentConfig("disk", 0.0, (0,), "fixD", (4,), 1)
        rows = run_manufactured(cfg)
        path = tmp_path / "manifest.json"
        write_manifest(cfg, rows, str(path))
        payload = json.loads(path.read_text())
        assert payload["config"]["domain"] == "disk"
        assert len(payload["rows"]) == 1
        assert payload["rows"][0]["wall_time_s"] > 0

    def test_error_field_file(self, tmp_path):
        path = tmp_path / "field.csv"
        emit_error_field("disk", 1, 5, 1, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "x,y,log10_abs_error"
        assert len(lines) == 1 + 5 * 25
        vals = np.array([line.split(",") for line in lines[1:]], dtype=float)
        assert np.all(np.isfinite(vals))

    def test_reference_independence(self):
        # doubling the reference boundary refinement moves the reported
        # error by far less than the error itself
        import greenvol.validation as val

        cfg = ExperimentConfig("disk", 0.0, (1,), "fixD", (8,), 1)
        rows_a = run_manufactured(cfg)
        original = val.REFERENCE_PANEL_FACTOR
        try:
            val.REFERENCE_PANEL_FACTOR = 2 * original
            rows_b = run_manufactured(cfg)
        finally:
            val.REFERENCE_PANEL_FACTOR = original
        rel_change = abs(rows_a[0].error - rows_b[0].error) / rows_a[0].error
        assert rel_change < 0.01
