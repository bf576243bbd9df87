"""Optic-lobe image pipeline: Gaussian blur, downsample, Sobel, flatten.

Panoramic views are 2-D grayscale arrays with values in [0, 1].  Columns
span the full 360° horizontally and wrap at the seam; rows clamp at the
top/bottom border.  The pipeline output is the projection-neuron (PN)
vector: the row-major flattening of the edge-filtered thumbnail.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.ndimage import convolve1d

# Largest gradient magnitude a 3x3 Sobel pair can produce on [0, 1] input:
# |Gx| <= 4 and |Gy| <= 4, hence |(Gx, Gy)| <= 4*sqrt(2).
SOBEL_MAX = 4.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class VisionConfig:
    """Thumbnail geometry and blur width for the PN pipeline."""

    thumb_w: int = 32
    thumb_h: int = 32
    gaussian_sigma: float = 2.0

    def __post_init__(self):
        if self.thumb_w < 1 or self.thumb_h < 1:
            raise ValueError("thumbnail dimensions must be positive")
        if self.gaussian_sigma <= 0:
            raise ValueError("gaussian_sigma must be > 0")

    @property
    def n_pn(self) -> int:
        return self.thumb_w * self.thumb_h

    @property
    def resolution_deg_per_px(self) -> float:
        """Azimuthal resolution when the thumbnail spans the full panorama."""
        return 360.0 / self.thumb_w


# Named presets: the default 32x32 thumbnail (1024 PNs), a 750-PN variant,
# and the two azimuthal resolutions used by the network-size sweep.
VISION_PRESETS = {
    "pn1024": VisionConfig(32, 32),
    "pn750": VisionConfig(30, 25),
    "res7": VisionConfig(51, 51),
    "res5": VisionConfig(72, 72),
}


def vision_preset(name: str) -> VisionConfig:
    try:
        return VISION_PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown vision preset {name!r}; "
                         f"choose from {sorted(VISION_PRESETS)}") from None


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled Gaussian, radius ceil(3*sigma), normalized to sum 1."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _check_view(view) -> np.ndarray:
    view = np.asarray(view, dtype=float)
    if view.ndim != 2:
        raise ValueError(f"view must be 2-D, got shape {view.shape}")
    return view


def gaussian_blur(view, sigma: float) -> np.ndarray:
    """Separable blur; horizontal wraps at the seam, vertical clamps."""
    view = _check_view(view)
    k = gaussian_kernel(sigma)
    out = convolve1d(view, k, axis=1, mode="wrap")
    out = convolve1d(out, k, axis=0, mode="nearest")
    return out


def downsample(view, thumb_w: int, thumb_h: int) -> np.ndarray:
    """Area-mean downsample with fractional-area weighting.

    Each output pixel is the mean of the source region it covers, so any
    source size >= the target is accepted; for integer ratios this is the
    plain block mean.
    """
    view = _check_view(view)
    src_h, src_w = view.shape
    if src_w < thumb_w or src_h < thumb_h:
        raise ValueError(
            f"source {src_w}x{src_h} smaller than target {thumb_w}x{thumb_h}")
    wr = _area_weights(src_h, thumb_h)
    wc = _area_weights(src_w, thumb_w)
    return wr @ view @ wc.T


def _area_weights(n_src: int, n_dst: int) -> np.ndarray:
    """(n_dst, n_src) matrix of overlap fractions; rows sum to 1."""
    w = np.zeros((n_dst, n_src))
    scale = n_src / n_dst
    for j in range(n_dst):
        lo = j * scale
        hi = (j + 1) * scale
        first = int(math.floor(lo))
        last = int(math.ceil(hi))
        for i in range(first, min(last, n_src)):
            w[j, i] = min(hi, i + 1) - max(lo, i)
    return w / scale


def sobel_edges(view) -> np.ndarray:
    """Gradient magnitude of the 3x3 Sobel pair, rescaled to [0, 1].

    The horizontal axis wraps, the vertical axis replicates its border
    rows.  Output = sqrt(Gx^2 + Gy^2) / SOBEL_MAX.
    """
    view = _check_view(view)
    p = np.pad(view, ((0, 0), (1, 1)), mode="wrap")
    p = np.pad(p, ((1, 1), (0, 0)), mode="edge")
    # Separable forms: Gx = [1,2,1]^T (x) [-1,0,1], Gy = [-1,0,1]^T (x) [1,2,1]
    dx = p[:, 2:] - p[:, :-2]
    gx = dx[:-2, :] + 2.0 * dx[1:-1, :] + dx[2:, :]
    sy = p[:, 2:] + 2.0 * p[:, 1:-1] + p[:, :-2]
    gy = sy[2:, :] - sy[:-2, :]
    return np.hypot(gx, gy) / SOBEL_MAX


def process(view, cfg: VisionConfig) -> np.ndarray:
    """Full pipeline: blur -> downsample -> Sobel -> row-major flatten."""
    blurred = gaussian_blur(view, cfg.gaussian_sigma)
    thumb = downsample(blurred, cfg.thumb_w, cfg.thumb_h)
    edges = sobel_edges(thumb)
    return edges.ravel()
