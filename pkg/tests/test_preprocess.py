import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dietwise.errors import ValidationError
from dietwise.preprocess import (PreprocessConfig, augment,
                                 compute_dataset_stats, denormalize, normalize,
                                 resize)


def random_image(height, width, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0, 255, size=(height, width, 3))


def identity_config(**overrides):
    fields = dict(target=(8, 8), flip_probability=0.0, crop_scale_range=(1.0, 1.0),
                  brightness_delta_max=0.0, hue_delta_max=0.0, seed=3)
    fields.update(overrides)
    return PreprocessConfig(**fields)


class TestResize:
    def test_target_shape(self):
        out = resize(random_image(768, 1024), (512, 512))
        assert out.shape == (512, 512, 3)

    def test_identity_at_same_size(self):
        img = random_image(512, 512)
        assert np.array_equal(resize(img, (512, 512)), img)

    def test_constant_image_stays_constant(self):
        img = np.full((30, 40, 3), 77.0)
        out = resize(img, (16, 16))
        assert np.allclose(out, 77.0)

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValidationError):
            resize(np.zeros((0, 4, 3)), (8, 8))

    def test_idempotent_at_target(self):
        img = random_image(64, 64)
        once = resize(img, (64, 64))
        assert np.array_equal(resize(once, (64, 64)), once)

    def test_finite_outputs(self):
        assert np.isfinite(resize(random_image(33, 47), (12, 29))).all()


class TestDatasetStats:
    def test_single_constant_image(self):
        mean, std = compute_dataset_stats([np.full((4, 4, 3), 128.0)])
        assert np.allclose(mean, 128.0)
        assert np.allclose(std, 0.0)

    def test_two_point_population_std(self):
        images = [np.full((4, 4, 3), 0.0), np.full((4, 4, 3), 255.0)]
        mean, std = compute_dataset_stats(images)
        assert np.allclose(mean, 127.5)
        assert np.allclose(std, 127.5)

    def test_order_invariant(self):
        a, b = random_image(5, 7, 1), random_image(6, 4, 2)
        first = compute_dataset_stats([a, b])
        second = compute_dataset_stats([b, a])
        assert np.allclose(first[0], second[0]) and np.allclose(first[1], second[1])

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValidationError):
            compute_dataset_stats([])


class TestNormalize:
    def test_pointwise_arithmetic(self):
        img = np.full((1, 1, 3), 192.0)
        out = normalize(img, (128, 128, 128), (64, 64, 64))
        assert np.allclose(out, 1.0)

    def test_normalize_by_own_stats(self):
        images = [random_image(16, 16, s) for s in range(4)]
        mean, std = compute_dataset_stats(images)
        normalized = [normalize(img, mean, std) for img in images]
        new_mean, new_std = compute_dataset_stats(normalized)
        assert np.all(np.abs(new_mean) < 1e-6)
        assert np.all(np.abs(new_std - 1) < 1e-6)

    def test_round_trip_affine(self):
        img = random_image(8, 8)
        mean, std = (10.0, 20.0, 30.0), (2.0, 3.0, 4.0)
        back = denormalize(normalize(img, mean, std), mean, std)
        assert np.allclose(back, img, atol=1e-9)

    def test_zero_std_rejected(self):
        with pytest.raises(ValidationError, match="degenerate"):
            normalize(random_image(4, 4), (0, 0, 0), (1, 0, 1))


class TestAugment:
    def test_pure_flip_is_involution(self):
        img = random_image(8, 8)
        config = identity_config(flip_probability=1.0)
        once = augment(img, config, sample_index=0)
        assert np.array_equal(once, img[:, ::-1, :])
        assert np.array_equal(augment(once, config, sample_index=0), img)

    def test_identity_configuration(self):
        img = random_image(8, 8)
        assert np.array_equal(augment(img, identity_config(), 0), img)

    def test_deterministic(self):
        img = random_image(10, 10)
        config = PreprocessConfig(target=(8, 8), seed=17)
        first = augment(img, config, sample_index=5)
        second = augment(img, config, sample_index=5)
        assert np.array_equal(first, second)

    def test_different_indices_differ(self):
        img = random_image(32, 32)
        config = PreprocessConfig(target=(16, 16), seed=17)
        assert not np.array_equal(augment(img, config, 0), augment(img, config, 1))

    def test_output_always_target_sized(self):
        config = PreprocessConfig(target=(16, 16), seed=2)
        for shape in ((16, 16), (40, 30), (9, 33)):
            out = augment(random_image(*shape), config, 1)
            assert out.shape == (16, 16, 3)

    def test_outputs_clamped_and_finite(self):
        config = PreprocessConfig(target=(8, 8), brightness_delta_max=300.0, seed=9)
        out = augment(random_image(8, 8), config, 3)
        assert np.isfinite(out).all()
        assert out.min() >= 0 and out.max() <= 255

    def test_brightness_commutes_with_flip(self):
        img = random_image(8, 8)
        delta = 13.0
        flipped_then_bright = np.clip(img[:, ::-1, :] + delta, 0, 255)
        bright_then_flipped = np.clip(img + delta, 0, 255)[:, ::-1, :]
        assert np.allclose(flipped_then_bright, bright_then_flipped)

    def test_invalid_crop_range(self):
        with pytest.raises(ValidationError):
            PreprocessConfig(crop_scale_range=(0.9, 0.5)).validate()


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 64 - 1),
       index=st.integers(min_value=0, max_value=1000))
def test_augment_dimension_property(seed, index):
    config = PreprocessConfig(target=(8, 8), seed=seed)
    out = augment(random_image(12, 20, seed % 100), config, index)
    assert out.shape == (8, 8, 3)
    assert np.isfinite(out).all()
