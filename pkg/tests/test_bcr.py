from fractions import Fraction

import pytest

from semlink import GeometryError, ImageGeometry, bcr_table, channel_uses, compute_bcr


class TestChannelUses:
    def test_default_geometry(self):
        assert channel_uses(32, 768) == 12288

    def test_exact_halving(self):
        assert channel_uses(4, 8) == 16

    def test_odd_product_rejected(self):
        with pytest.raises(GeometryError):
            channel_uses(3, 3)

    @pytest.mark.parametrize("n,d", [(0, 8), (4, 0), (-2, 8)])
    def test_nonpositive_rejected(self, n, d):
        with pytest.raises(GeometryError):
            channel_uses(n, d)


class TestComputeBcr:
    def test_worked_example_is_exact(self):
        ratio = compute_bcr(32, 768, ImageGeometry(3, 256, 256))
        assert isinstance(ratio, Fraction)
        assert ratio == Fraction(1, 16)

    def test_other_resolutions(self):
        assert compute_bcr(32, 768, ImageGeometry(3, 128, 128)) == Fraction(1, 4)
        assert compute_bcr(32, 768, ImageGeometry(3, 512, 512)) == Fraction(1, 64)
        assert compute_bcr(32, 768, ImageGeometry(1, 256, 256)) == Fraction(3, 16)

    def test_channel_uses_do_not_depend_on_resolution(self):
        for geom in (ImageGeometry(3, 96, 96), ImageGeometry(3, 1024, 1024)):
            ratio = compute_bcr(32, 768, geom)
            assert ratio * geom.samples == 12288

    def test_geometry_validation(self):
        with pytest.raises(GeometryError):
            ImageGeometry(0, 256, 256)
        with pytest.raises(GeometryError):
            ImageGeometry(3, -1, 256)

    def test_samples(self):
        assert ImageGeometry(3, 256, 256).samples == 196608


class TestTable:
    def test_rows_cover_geometries(self):
        geoms = [ImageGeometry(3, 128, 128), ImageGeometry(3, 256, 256)]
        rows = bcr_table(32, 768, geoms)
        assert len(rows) == 2
        assert rows[0]["channel_uses"] == rows[1]["channel_uses"] == 12288
        assert rows[1]["bcr"] == Fraction(1, 16)
        assert rows[1]["bcr_real"] == pytest.approx(0.0625)
