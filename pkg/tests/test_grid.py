import numpy as np
import pytest

import saddle
from saddle.errors import DimensionMismatchError, GridFileError
from saddle.grid import GridFunction, GridSpec, read_solution, write_solution


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec.rectangle(-1, 1, -1, 1, 3)
    with pytest.raises(ValueError):
        GridSpec.interval(1.0, 0.0, 16)
    g = GridSpec.rectangle(-1, 1, -1, 1, 8)
    assert g.hx == pytest.approx(0.25)
    assert g.npoints == 81
    assert GridSpec.interval(0, 1, 8).npoints == 9


def test_gridspec_masks():
    g = GridSpec.rectangle(0, 1, 0, 1, 4)
    assert g.interior_mask().sum() == 9
    assert g.boundary_mask().sum() == g.npoints - 9
    gi = GridSpec.interval(0, 1, 4)
    assert gi.interior_mask().sum() == 3


def test_gridfunction_validation():
    g = GridSpec.rectangle(0, 1, 0, 1, 4)
    with pytest.raises(DimensionMismatchError):
        GridFunction(np.zeros(7), g)
    bad = np.zeros(g.npoints)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        GridFunction(bad, g)


def test_roundtrip_exact(tmp_path, rng):
    g = GridSpec.rectangle(-1, 1, -0.5, 0.5, 12)
    w = GridFunction(rng.standard_normal(g.npoints), g)
    path = tmp_path / "w.grid"
    write_solution(w, path)
    back = read_solution(path)
    assert back.grid == g
    assert np.max(np.abs(back.values - w.values)) == 0.0


def test_roundtrip_1d(tmp_path, rng):
    g = GridSpec.interval(0, 1, 10)
    w = GridFunction(rng.standard_normal(g.npoints), g)
    path = tmp_path / "w.grid"
    write_solution(w, path)
    back = read_solution(path)
    assert back.grid.is_1d
    assert np.max(np.abs(back.values - w.values)) == 0.0


def test_read_rejects_malformed(tmp_path):
    path = tmp_path / "bad.grid"
    path.write_text("not-a-grid 1 2 3\n")
    with pytest.raises(GridFileError):
        read_solution(path)
    path.write_text("saddle-grid v1 8 8 0 1 0 1\n1 2 3\n")
    with pytest.raises(GridFileError, match="values"):
        read_solution(path)
    path.write_text("saddle-grid v9 8 8 0 1 0 1\n")
    with pytest.raises(GridFileError, match="version"):
        read_solution(path)


def test_grid_identity_in_errors():
    g1 = GridSpec.rectangle(-1, 1, -1, 1, 8)
    g2 = GridSpec.rectangle(-1, 1, -1, 1, 16)
    u = GridFunction(np.zeros(g1.npoints), g1)
    v = GridFunction(np.zeros(g2.npoints), g2)
    with pytest.raises(DimensionMismatchError) as err:
        saddle.grid.require_same_grid(u, v)
    assert g1.grid_id in str(err.value) and g2.grid_id in str(err.value)
