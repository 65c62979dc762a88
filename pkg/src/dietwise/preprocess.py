"""Image pipeline: bilinear resize to a fixed square, per-channel
normalization by dataset statistics, and seeded augmentation.

Images are HxWx3 float arrays with samples in [0, 255] before
normalization. Augmentation is a pure function of (image, seed,
sample_index), so corpora can be processed in parallel and replayed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .rng import MASK64, SplitMix64

DEFAULT_TARGET = (512, 512)


@dataclass(frozen=True)
class PreprocessConfig:
    target: tuple[int, int] = DEFAULT_TARGET  # (height, width)
    channel_mean: tuple[float, float, float] = (0.0, 0.0, 0.0)
    channel_std: tuple[float, float, float] = (1.0, 1.0, 1.0)
    flip_probability: float = 0.5
    crop_scale_range: tuple[float, float] = (0.8, 1.0)
    brightness_delta_max: float = 25.0
    hue_delta_max: float = 0.05  # in turns (fraction of the full hue circle)
    seed: int = 0

    def validate(self) -> None:
        if any(s <= 0 for s in self.channel_std):
            raise ValidationError("channel_std components must be positive")
        lo, hi = self.crop_scale_range
        if not (0 < lo <= hi <= 1):
            raise ValidationError("crop_scale_range must satisfy 0 < lo <= hi <= 1")
        if not 0 <= self.flip_probability <= 1:
            raise ValidationError("flip_probability must be in [0, 1]")


def check_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValidationError(f"expected HxWx3 image, got shape {img.shape}")
    if img.shape[0] <= 0 or img.shape[1] <= 0:
        raise ValidationError("image has zero dimension")
    if not np.isfinite(img).all():
        raise ValidationError("image contains non-finite values")
    return img


def resize(img: np.ndarray, target: tuple[int, int]) -> np.ndarray:
    """Bilinear square-stretch resize (aspect ratio not preserved).

    Uses half-pixel-center source mapping, so resizing to the input size
    is an exact identity.
    """
    img = check_image(img)
    out_h, out_w = target
    if out_h <= 0 or out_w <= 0:
        raise ValidationError("target dimensions must be positive")
    in_h, in_w = img.shape[:2]

    def axis_coords(out_n: int, in_n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        src = (np.arange(out_n) + 0.5) * (in_n / out_n) - 0.5
        src = np.clip(src, 0.0, in_n - 1.0)
        lo = np.floor(src).astype(np.int64)
        hi = np.minimum(lo + 1, in_n - 1)
        frac = src - lo
        return lo, hi, frac

    y0, y1, fy = axis_coords(out_h, in_h)
    x0, x1, fx = axis_coords(out_w, in_w)
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    top = img[y0][:, x0] * (1 - fx) + img[y0][:, x1] * fx
    bottom = img[y1][:, x0] * (1 - fx) + img[y1][:, x1] * fx
    return top * (1 - fy) + bottom * fy


def compute_dataset_stats(images) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean and population std over all pixels of all images."""
    total = np.zeros(3)
    total_sq = np.zeros(3)
    count = 0
    for img in images:
        img = check_image(img)
        flat = img.reshape(-1, 3)
        total += flat.sum(axis=0)
        total_sq += (flat ** 2).sum(axis=0)
        count += flat.shape[0]
    if count == 0:
        raise ValidationError("cannot compute stats over an empty image sequence")
    mean = total / count
    variance = np.maximum(total_sq / count - mean ** 2, 0.0)
    return mean, np.sqrt(variance)


def normalize(img: np.ndarray, channel_mean, channel_std) -> np.ndarray:
    img = check_image(img)
    std = np.asarray(channel_std, dtype=np.float64)
    if np.any(std <= 0):
        raise ValidationError("channel_std components must be positive (degenerate channel)")
    return (img - np.asarray(channel_mean, dtype=np.float64)) / std


def denormalize(img: np.ndarray, channel_mean, channel_std) -> np.ndarray:
    return np.asarray(img, dtype=np.float64) * np.asarray(channel_std) + np.asarray(channel_mean)


def _rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb / 255.0
    maxc = rgb.max(axis=2)
    minc = rgb.min(axis=2)
    v = maxc
    spread = maxc - minc
    s = np.where(maxc > 0, spread / np.where(maxc > 0, maxc, 1), 0.0)
    safe = np.where(spread > 0, spread, 1)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    rc = (maxc - r) / safe
    gc = (maxc - g) / safe
    bc = (maxc - b) / safe
    h = np.where(r == maxc, bc - gc, np.where(g == maxc, 2.0 + rc - bc, 4.0 + gc - rc))
    h = np.where(spread > 0, (h / 6.0) % 1.0, 0.0)
    return np.stack([h, s, v], axis=2)


def _hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.astype(np.int64) % 6
    choices_r = [v, q, p, p, t, v]
    choices_g = [t, v, v, q, p, p]
    choices_b = [p, p, t, v, v, q]
    r = np.select([i == k for k in range(6)], choices_r)
    g = np.select([i == k for k in range(6)], choices_g)
    b = np.select([i == k for k in range(6)], choices_b)
    return np.stack([r, g, b], axis=2) * 255.0


def _sample_rng(seed: int, sample_index: int) -> SplitMix64:
    mixed = (seed ^ ((sample_index + 1) * 0x9E3779B97F4A7C15)) & MASK64
    return SplitMix64(SplitMix64(mixed).next_u64())


def augment(img: np.ndarray, config: PreprocessConfig, sample_index: int) -> np.ndarray:
    """Seeded augmentation: crop+resize, horizontal flip, brightness, hue.

    Deterministic in (img, config.seed, sample_index); output is always
    config.target sized and clamped to [0, 255].
    """
    config.validate()
    img = check_image(img)
    rng = _sample_rng(config.seed, sample_index)

    # crop: one scale for both axes, offsets uniform over the slack
    scale = rng.next_in(*config.crop_scale_range)
    in_h, in_w = img.shape[:2]
    crop_h = max(1, round(scale * in_h))
    crop_w = max(1, round(scale * in_w))
    off_y = rng.next_below(in_h - crop_h + 1)
    off_x = rng.next_below(in_w - crop_w + 1)
    img = img[off_y:off_y + crop_h, off_x:off_x + crop_w]
    if img.shape[:2] != tuple(config.target):
        img = resize(img, config.target)

    if rng.next_unit() < config.flip_probability:
        img = img[:, ::-1, :]

    brightness = rng.next_in(-config.brightness_delta_max, config.brightness_delta_max)
    if brightness != 0.0:
        img = img + brightness

    hue = rng.next_in(-config.hue_delta_max, config.hue_delta_max)
    if hue != 0.0:
        hsv = _rgb_to_hsv(np.clip(img, 0.0, 255.0))
        hsv[..., 0] = (hsv[..., 0] + hue) % 1.0
        img = _hsv_to_rgb(hsv)

    return np.clip(img, 0.0, 255.0)
