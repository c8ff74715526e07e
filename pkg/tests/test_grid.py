import numpy as np
import pytest

from pmdiff import ScalarField
from pmdiff.grid import grid_index, linear_index, mirror_sample, neighbors

from conftest import make_field


class TestScalarField:
    def test_accepts_2d_and_reshapes_1d(self):
        f = ScalarField([[1.0, 2.0], [3.0, 4.0]])
        assert f.shape == (2, 2)
        g = ScalarField([1.0, 2.0, 3.0])
        assert g.shape == (1, 3)

    def test_default_unit_spacing(self):
        f = ScalarField([0.0])
        assert f.dx == 1.0 and f.dy == 1.0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            ScalarField([0.0, np.nan])
        with pytest.raises(ValueError):
            ScalarField([np.inf])

    def test_rejects_bad_spacing(self):
        with pytest.raises(ValueError):
            ScalarField([0.0], dx=0.0)
        with pytest.raises(ValueError):
            ScalarField([0.0], dy=-1.0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ScalarField(np.zeros((0, 3)))

    def test_values_are_read_only(self):
        f = ScalarField([1.0, 2.0])
        with pytest.raises(ValueError):
            f.values[0, 0] = 5.0

    def test_construction_copies_input(self):
        src = np.array([[1.0, 2.0]])
        f = ScalarField(src)
        src[0, 0] = 99.0
        assert f.values[0, 0] == 1.0

    def test_as_vector_row_major(self):
        f = make_field([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        np.testing.assert_array_equal(f.as_vector(), [1, 2, 3, 4, 5, 6])

    def test_with_values_keeps_spacing(self):
        f = ScalarField([1.0, 2.0], dx=0.5, dy=2.0)
        g = f.with_values([3.0, 4.0])
        assert g.dx == 0.5 and g.dy == 2.0
        np.testing.assert_array_equal(g.values, [[3.0, 4.0]])


class TestLinearIndex:
    def test_origin_is_zero(self):
        assert linear_index(0, 0, (3, 4)) == 0

    def test_row_one_col_zero(self):
        assert linear_index(1, 0, (3, 4)) == 4

    def test_last_element(self):
        assert linear_index(2, 3, (3, 4)) == 11

    @pytest.mark.parametrize("dims", [(3, 4), (1, 6), (5, 1), (2, 2)])
    def test_bijection_round_trip(self, dims):
        m, n = dims
        seen = set()
        for i in range(m):
            for j in range(n):
                k = linear_index(i, j, dims)
                assert grid_index(k, dims) == (i, j)
                seen.add(k)
        assert seen == set(range(m * n))

    def test_out_of_range_rejected(self):
        for i, j in [(-1, 0), (0, -1), (3, 0), (0, 4)]:
            with pytest.raises(IndexError):
                linear_index(i, j, (3, 4))
        with pytest.raises(IndexError):
            grid_index(12, (3, 4))

    def test_accepts_field_argument(self):
        f = ScalarField(np.zeros((3, 4)))
        assert linear_index(2, 3, f) == 11


class TestNeighbors:
    def test_interior_x(self):
        assert set(neighbors(1, 1, "x", (3, 3))) == {(1, 0), (1, 2)}

    def test_interior_y(self):
        assert set(neighbors(1, 1, "y", (3, 3))) == {(0, 1), (2, 1)}

    def test_corner_has_one_neighbor_per_axis(self):
        assert neighbors(0, 0, "x", (3, 3)) == [(0, 1)]
        assert neighbors(0, 0, "y", (3, 3)) == [(1, 0)]

    def test_single_row_has_no_y_neighbors(self):
        for j in range(5):
            assert neighbors(0, j, "y", (1, 5)) == []

    def test_single_column_has_no_x_neighbors(self):
        for i in range(4):
            assert neighbors(i, 0, "x", (4, 1)) == []

    def test_never_self_never_out_of_grid(self):
        dims = (3, 4)
        for i in range(3):
            for j in range(4):
                for axis in ("x", "y"):
                    for p, q in neighbors(i, j, axis, dims):
                        assert (p, q) != (i, j)
                        assert 0 <= p < 3 and 0 <= q < 4

    def test_bad_axis_rejected(self):
        with pytest.raises(ValueError):
            neighbors(0, 0, "z", (3, 3))


class TestMirrorSample:
    def test_in_range_identity(self):
        f = make_field(np.arange(9.0).reshape(3, 3))
        assert mirror_sample(f, 0, 1) == f.values[0, 1]

    def test_reflects_about_boundary_pixel(self):
        f = make_field(np.arange(9.0).reshape(3, 3))
        assert mirror_sample(f, -1, 1) == f.values[1, 1]
        assert mirror_sample(f, 3, 1) == f.values[1, 1]
        assert mirror_sample(f, 1, -1) == f.values[1, 1]
        assert mirror_sample(f, 1, 3) == f.values[1, 1]

    def test_degenerate_axis_clamps(self):
        f = make_field([[1.0, 2.0, 3.0, 4.0, 5.0]])
        assert mirror_sample(f, -1, 0) == f.values[0, 0]
        assert mirror_sample(f, 1, 2) == f.values[0, 2]

    def test_overreach_beyond_one_pixel_rejected(self):
        f = make_field(np.zeros((3, 3)))
        for i, j in [(-2, 0), (4, 0), (0, -2), (0, 4)]:
            with pytest.raises(IndexError):
                mirror_sample(f, i, j)

    def test_constant_field_always_constant(self):
        f = make_field(np.full((3, 4), 0.7))
        for i in range(-1, 4):
            for j in range(-1, 5):
                assert mirror_sample(f, i, j) == 0.7

    def test_discrete_neumann_consistency(self):
        # constant along rows: the vertical central difference at the top
        # and bottom boundary must vanish through the mirror
        f = make_field(np.tile(np.array([1.0, 2.0, 3.0]), (4, 1)))
        for j in range(3):
            assert mirror_sample(f, -1, j) - mirror_sample(f, 1, j) == 0.0
            assert mirror_sample(f, 4, j) - mirror_sample(f, 2, j) == 0.0
