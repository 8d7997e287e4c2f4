import numpy as np
import pytest

from rigidstyle.codec import Codec, get_codec
from rigidstyle.features import DimensionError


@pytest.fixture(scope="module")
def codec():
    return get_codec()


class TestShapes:
    def test_level_shapes(self, codec):
        img = np.random.default_rng(0).random((32, 32, 3))
        for level in range(1, 5):
            f = codec.encode(img, level)
            assert f.shape == (3 * 4 ** level, 32 // 2 ** level, 32 // 2 ** level)

    def test_level2_example(self, codec):
        f = codec.encode(np.zeros((32, 32, 3)), 2)
        assert f.shape == (48, 8, 8)

    def test_divisibility_error(self, codec):
        with pytest.raises(DimensionError):
            codec.encode(np.zeros((30, 32, 3)), 2)

    def test_channel_mismatch_on_decode(self, codec):
        from rigidstyle.features import FeatureMap
        with pytest.raises(DimensionError):
            codec.decode(FeatureMap(np.zeros((12, 4, 4))), 2)


class TestInvertibility:
    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_round_trip(self, codec, level):
        img = np.random.default_rng(1).random((32, 32, 3))
        back = codec.decode(codec.encode(img, level), level)
        assert np.max(np.abs(back - img)) <= 1e-5

    def test_zero_image(self, codec):
        f = codec.encode(np.zeros((16, 16, 3)), 2)
        assert np.all(f.data == 0.0)
        assert np.all(codec.decode(f, 2) == 0.0)

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_isometry(self, codec, level):
        img = np.random.default_rng(2).random((32, 32, 3))
        f = codec.encode(img, level)
        assert np.linalg.norm(f.data) == pytest.approx(np.linalg.norm(img), rel=1e-5)
        assert np.linalg.norm(codec.decode(f, level)) == pytest.approx(
            np.linalg.norm(img), rel=1e-5)

    def test_perturbation_bounded_by_isometry(self, codec):
        rng = np.random.default_rng(3)
        img = rng.random((16, 16, 3))
        f = codec.encode(img, 2)
        delta = rng.standard_normal(f.shape) * 1e-3
        from rigidstyle.features import FeatureMap
        perturbed = codec.decode(FeatureMap(f.data + delta), 2)
        assert np.linalg.norm(perturbed - img) == pytest.approx(
            np.linalg.norm(delta), rel=1e-6)

    def test_decode_image_clamps(self, codec):
        from rigidstyle.features import FeatureMap
        img = codec.decode_image(FeatureMap(np.zeros((48, 4, 4))), 2)
        assert np.all(img.data == 0.0)


class TestDeterminism:
    def test_same_seed_same_tables(self):
        a, b = Codec(seed=42), Codec(seed=42)
        for k in range(1, 5):
            assert np.array_equal(a.mixing_matrix(k), b.mixing_matrix(k))

    def test_different_seed_different_tables(self):
        a, b = Codec(seed=42), Codec(seed=43)
        assert not np.array_equal(a.mixing_matrix(1), b.mixing_matrix(1))

    def test_matrices_are_orthogonal(self, codec):
        for k in range(1, 5):
            m = codec.mixing_matrix(k)
            assert m.shape == (3 * 4 ** k, 3 * 4 ** k)
            assert m.T @ m == pytest.approx(np.eye(m.shape[0]), abs=1e-6)

    def test_get_codec_caches(self):
        assert get_codec(7) is get_codec(7)
