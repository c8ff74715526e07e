import warnings

import numpy as np
import pytest

from pmdiff import ParseError, read_csv_signal, read_pgm, write_csv_signal, write_pgm

from conftest import make_field


class TestReadPGM:
    def test_minimal_ascii_image(self):
        f = read_pgm(b"P2 1 1 255 0")
        assert f.shape == (1, 1)
        assert f.values[0, 0] == 0.0

    def test_two_pixel_row(self):
        f = read_pgm(b"P2 2 1 255 0 255")
        np.testing.assert_array_equal(f.values, [[0.0, 1.0]])

    def test_row_major_layout(self):
        f = read_pgm(b"P2 2 3 255 0 51 102 153 204 255")
        assert f.shape == (3, 2)
        assert f.values[1, 0] == 102 / 255
        assert f.values[2, 1] == 1.0

    def test_comments_anywhere_in_header(self):
        data = b"P2 # magic\n# a comment line\n2 1 # size\n255\n128 255\n"
        f = read_pgm(data)
        np.testing.assert_array_equal(f.values, [[128 / 255, 1.0]])

    def test_binary_matches_ascii(self):
        ascii_f = read_pgm(b"P2 3 2 255 0 10 20 30 40 50")
        binary_f = read_pgm(b"P5 3 2 255 " + bytes([0, 10, 20, 30, 40, 50]))
        np.testing.assert_array_equal(ascii_f.values, binary_f.values)

    def test_binary_payload_may_contain_whitespace_bytes(self):
        f = read_pgm(b"P5 2 1 255 " + bytes([10, 32]))
        np.testing.assert_array_equal(f.values, [[10 / 255, 32 / 255]])

    def test_truncated_binary_payload(self):
        data = b"P5 4 4 255 " + bytes(10)
        with pytest.raises(ParseError, match="truncated"):
            read_pgm(data)
        try:
            read_pgm(data)
        except ParseError as e:
            assert e.offset == len(data)

    def test_truncated_ascii_payload(self):
        with pytest.raises(ParseError, match="sample"):
            read_pgm(b"P2 2 2 255 0 1 2")

    def test_bad_magic(self):
        with pytest.raises(ParseError, match="magic"):
            read_pgm(b"P3 1 1 255 0")

    def test_unsupported_maxval(self):
        with pytest.raises(ParseError, match="255"):
            read_pgm(b"P2 1 1 65535 0")

    def test_sample_out_of_range(self):
        with pytest.raises(ParseError, match="outside"):
            read_pgm(b"P2 1 1 255 256")

    def test_non_positive_dimensions(self):
        with pytest.raises(ParseError, match="width"):
            read_pgm(b"P2 0 1 255")
        with pytest.raises(ParseError, match="height"):
            read_pgm(b"P2 1 -2 255")

    def test_non_numeric_header_token(self):
        try:
            read_pgm(b"P2 six 1 255 0")
        except ParseError as e:
            assert "width" in str(e)
            assert e.offset == 3
        else:
            pytest.fail("expected ParseError")

    def test_trailing_bytes_warn_but_parse(self):
        with pytest.warns(UserWarning, match="trailing"):
            f = read_pgm(b"P5 1 1 255 " + bytes([7, 99, 99]))
        assert f.values[0, 0] == 7 / 255
        with pytest.warns(UserWarning, match="trailing"):
            read_pgm(b"P2 1 1 255 7 99")

    def test_exact_payload_is_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            read_pgm(b"P5 2 2 255 " + bytes(4))
            read_pgm(b"P2 1 1 255 8\n")


class TestWritePGM:
    def test_quantization_round_trip_all_levels(self):
        levels = np.arange(256, dtype=np.float64).reshape(16, 16) / 255.0
        f = make_field(levels)
        for fmt in ("P5", "P2"):
            back = read_pgm(write_pgm(f, format=fmt))
            np.testing.assert_array_equal(back.values, levels)

    def test_clamps_out_of_range_values(self):
        data = write_pgm(make_field([[1.7, -0.2]]))
        assert data.endswith(bytes([255, 0]))

    def test_half_rounds_away_from_zero(self):
        assert write_pgm(make_field([[0.5]])).endswith(bytes([128]))

    def test_deterministic(self, random_field):
        assert write_pgm(random_field) == write_pgm(random_field)

    def test_ascii_lines_stay_short(self):
        data = write_pgm(make_field(np.full((9, 40), 100 / 255)), format="P2")
        assert all(len(line) < 70 for line in data.decode("ascii").split("\n"))

    def test_rejects_unknown_format(self):
        with pytest.raises(ValueError, match="format"):
            write_pgm(make_field([[0.0]]), format="P4")


class TestCSVSignal:
    def test_one_value_per_line(self):
        f = read_csv_signal("0\n1\n2\n")
        assert f.shape == (1, 3)
        np.testing.assert_array_equal(f.values, [[0.0, 1.0, 2.0]])

    def test_single_comma_separated_line(self):
        f = read_csv_signal("0.5, 1.5, -3.25\n")
        np.testing.assert_array_equal(f.values, [[0.5, 1.5, -3.25]])

    def test_blank_lines_skipped(self):
        assert read_csv_signal("\n1\n\n2\n\n").width == 2

    def test_empty_input(self):
        with pytest.raises(ParseError, match="empty"):
            read_csv_signal("")

    def test_non_numeric_token_reports_line(self):
        try:
            read_csv_signal("0\n1\nbogus\n")
        except ParseError as e:
            assert e.line == 3
        else:
            pytest.fail("expected ParseError")

    def test_non_finite_rejected(self):
        with pytest.raises(ParseError, match="non-finite"):
            read_csv_signal("0\nnan\n")
        with pytest.raises(ParseError, match="non-finite"):
            read_csv_signal("inf\n")

    def test_round_trip_is_exact(self, rng):
        f = make_field(rng.uniform(-10.0, 10.0, (1, 1000)))
        back = read_csv_signal(write_csv_signal(f))
        np.testing.assert_array_equal(back.values, f.values)

    def test_write_rejects_2d_fields(self):
        with pytest.raises(ValueError, match="single-row"):
            write_csv_signal(make_field(np.zeros((2, 2))))
