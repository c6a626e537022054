import json

import numpy as np
import pytest

from fracnoether import Grid, SampledPath
from fracnoether import io


class TestCsv:
    def test_round_trip_is_exact(self, tmp_path):
        g = Grid(0.0, 1.0, 10)
        vals = np.column_stack([np.sin(g.nodes), np.exp(g.nodes) / 3])
        io.write_columns(tmp_path / "f.csv", ["t", "a", "b"], [g.nodes, vals[:, 0], vals[:, 1]])
        f = io.read_path_csv(tmp_path / "f.csv")
        assert f.grid.N == 10 and f.dim == 2
        np.testing.assert_array_equal(f.values, vals)

    def test_header_row(self, tmp_path):
        io.write_columns(tmp_path / "f.csv", ["t", "x"], [[0.0, 0.5], [1.0, 2.0]])
        assert (tmp_path / "f.csv").read_text().splitlines() == ["t,x", "0.0,1.0", "0.5,2.0"]

    def test_non_uniform_t_rejected(self, tmp_path):
        io.write_columns(tmp_path / "f.csv", ["t", "x"], [[0.0, 0.1, 0.5], [1.0, 2.0, 3.0]])
        with pytest.raises(ValueError):
            io.read_path_csv(tmp_path / "f.csv")

    def test_mismatched_columns(self, tmp_path):
        with pytest.raises(ValueError):
            io.write_columns(tmp_path / "f.csv", ["t"], [[0.0], [1.0]])

    def test_triple_columns(self, tmp_path, solved):
        tr = solved("example3", 1.0, 60)
        io.write_triple_csv(tmp_path / "tr.csv", tr)
        header, data = io.read_columns(tmp_path / "tr.csv")
        assert header == ["t", "q1", "q2", "q3", "u1", "u2", "p1", "p2", "p3"]
        np.testing.assert_array_equal(data[:, 4:6], tr.u.values)


class TestJson:
    def test_schema_and_nonfinite(self, tmp_path):
        io.write_json(tmp_path / "r.json", {"x": np.float64(np.nan), "y": np.arange(2), "ok": np.bool_(True)})
        doc = json.loads((tmp_path / "r.json").read_text())
        assert doc == {"schema": "fracnoether/1", "x": None, "y": [0, 1], "ok": True}
