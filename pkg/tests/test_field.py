import numpy as np
import pytest

from periodic_euler.field import Field, read_field_csv, read_table, write_field_csv, write_table
from periodic_euler.gasdyn import GasParams


@pytest.fixture
def field():
    t = np.arange(-8, 33) / 8
    x = np.linspace(0.0, 1.0, 6)
    T, X = np.meshgrid(t, x, indexing="ij")
    return Field(t, x, -0.4 + 0.01 * T + 0.02 * X, 2.4 + 0.03 * T - 0.01 * X, GasParams())


def test_sample_bilinear_exact_on_linear(field):
    r, s = field.sample(np.array([0.33, 1.7]), np.array([0.11, 0.95]))
    np.testing.assert_allclose(r, -0.4 + 0.01 * np.array([0.33, 1.7]) + 0.02 * np.array([0.11, 0.95]), atol=1e-15)
    assert isinstance(field.sample(0.5, 0.5)[0], float)


def test_indexing(field):
    assert field.time_index(1.0) == 16
    with pytest.raises(ValueError):
        field.time_index(0.3)
    assert field.period_shift(1.0) == 8
    with pytest.raises(ValueError):
        field.period_shift(0.3)
    g = field.restrict(0.0, 2.0)
    assert g.t[0] == 0.0 and g.t[-1] == 2.0 and g.shape == (17, 6)


def test_csv_roundtrip(field, tmp_path):
    path = tmp_path / "f.csv"
    write_field_csv(field, path, ["hello", "k = 1"])
    lines = path.read_text().splitlines()
    assert lines[:3] == ["# hello", "# k = 1", "t,x,r,s,rho,u,lambda1,lambda2"]
    back = read_field_csv(path, field.params)
    np.testing.assert_array_equal(back.r, field.r)
    np.testing.assert_array_equal(back.s, field.s)
    write_field_csv(field, path, stride_t=4, stride_x=5)
    sub = read_field_csv(path, field.params)
    assert sub.shape == (11, 2)


def test_table_roundtrip(tmp_path):
    path = tmp_path / "t.csv"
    write_table(path, ("a", "b"), (np.arange(3.0), np.ones(3) / 3), ["note"])
    cols, data = read_table(path)
    assert cols == ["a", "b"]
    assert data[2, 1] == 1 / 3
