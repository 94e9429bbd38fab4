"""Image to point cloud: smooth, flatten the background, pick ridge maxima.

The stages mirror the usual centerline-seeding recipe: a separable Gaussian
filter suppresses pixel noise, a grayscale opening with a generous disk
estimates the background which is then subtracted, local maxima of the
enhanced image become candidate nodes, and pruning removes duplicates and
isolated detections. The returned cloud stays bound to the enhanced image so
downstream intensity sampling sees exactly what the detector saw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InputError
from .geometry import Node, PointCloud
from .raster import RasterImage, bilinear_sample


@dataclass(frozen=True)
class PipelineParams:
    gaussian_sigma: float = 1.5      # smoothing scale, pixels
    background_radius: float = 15.0  # opening disk radius, pixels
    maxima_window: int = 3           # odd window for the local-maximum test
    min_separation: float = 2.0      # dedup radius for detections
    min_neighbor_dist: float = 5.0   # isolation radius; lonelier nodes are dropped
    detection_floor: float = 0.05    # maxima below this value are ignored

    def __post_init__(self) -> None:
        if self.gaussian_sigma <= 0 or self.background_radius <= 0:
            raise InputError("gaussianSigma and backgroundRadius must be > 0")
        if self.maxima_window < 1 or self.maxima_window % 2 == 0:
            raise InputError(f"maximaWindow must be odd and >= 1, got {self.maxima_window}")
        if self.min_separation < 0 or self.min_neighbor_dist < 0 or self.detection_floor < 0:
            raise InputError("separation, neighbor distance, and floor must be >= 0")


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1-D Gaussian taps truncated at +-3 sigma and renormalized to sum 1."""
    radius = int(np.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(t * t) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_filter(img: RasterImage, sigma: float) -> RasterImage:
    """Separable Gaussian smoothing with mirror-reflected edges."""
    if sigma <= 0:
        raise InputError(f"sigma must be > 0, got {sigma}")
    kernel = gaussian_kernel(sigma)
    out = ndimage.correlate1d(img.pixels, kernel, axis=1, mode="mirror")
    out = ndimage.correlate1d(out, kernel, axis=0, mode="mirror")
    return RasterImage(np.clip(out, 0.0, 1.0))


def _disk(radius: float) -> np.ndarray:
    r = int(np.floor(radius))
    y, x = np.mgrid[-r : r + 1, -r : r + 1]
    return x * x + y * y <= radius * radius


def subtract_background(img: RasterImage, radius: float) -> RasterImage:
    """Remove everything wider than the disk: subtract the grayscale opening."""
    if radius <= 0:
        raise InputError(f"radius must be > 0, got {radius}")
    fp = _disk(radius)
    eroded = ndimage.grey_erosion(img.pixels, footprint=fp, mode="mirror")
    background = ndimage.grey_dilation(eroded, footprint=fp, mode="mirror")
    return RasterImage(np.clip(img.pixels - background, 0.0, 1.0))


def find_local_maxima(img: RasterImage, window: int, floor: float) -> list[np.ndarray]:
    """Pixel-center coordinates (x, y) of strict windowed maxima above ``floor``.

    A plateau inside one window emits only its lexicographically smallest
    pixel (row-major order), so flat crests do not flood the output.
    """
    if window < 1 or window % 2 == 0:
        raise InputError(f"window must be odd and >= 1, got {window}")
    arr = img.pixels
    h, w = arr.shape
    # cvals outside the valid range so borders compare only against real pixels
    neighborhood_max = ndimage.maximum_filter(arr, size=window, mode="constant", cval=-1.0)
    neighborhood_min = ndimage.minimum_filter(arr, size=window, mode="constant", cval=2.0)
    # a crest must rise above something nearby; constant regions are not maxima
    cand = np.argwhere((arr >= neighborhood_max) & (arr > neighborhood_min) & (arr > floor))
    half = window // 2
    points: list[np.ndarray] = []
    for iy, ix in cand:
        val = arr[iy, ix]
        y0, y1 = max(iy - half, 0), min(iy + half + 1, h)
        x0, x1 = max(ix - half, 0), min(ix + half + 1, w)
        tie_rows, tie_cols = np.nonzero(arr[y0:y1, x0:x1] == val)
        first = (int(tie_rows[0]) + y0, int(tie_cols[0]) + x0)
        if first == (int(iy), int(ix)):
            points.append(np.array([float(ix), float(iy)]))
    return points


def prune_nodes(points: list[np.ndarray], img: RasterImage, params: PipelineParams) -> PointCloud:
    """Deduplicate close detections (brighter wins), drop isolated ones, and
    attach image intensities. The result is a cloud bound to ``img``."""
    if not points:
        return PointCloud([], 2, image=img)
    pts = np.asarray(points, dtype=np.float64)
    vals = bilinear_sample(img, pts[:, 0], pts[:, 1])
    # Brightest first; ties resolved by raster order for determinism.
    order = np.lexsort((pts[:, 0], pts[:, 1], -vals))
    kept: list[int] = []
    for idx in order.tolist():
        p = pts[idx]
        if all(np.linalg.norm(p - pts[j]) >= params.min_separation for j in kept):
            kept.append(idx)
    survivors = pts[kept]
    sval = vals[kept]
    if len(survivors) > 1:
        diff = survivors[:, None, :] - survivors[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=-1))
        np.fill_diagonal(dist, np.inf)
        lonely = dist.min(axis=1) > params.min_neighbor_dist
    else:
        lonely = np.ones(len(survivors), dtype=bool)
    survivors = survivors[~lonely]
    sval = sval[~lonely]
    order = np.lexsort((survivors[:, 0], survivors[:, 1]))
    nodes = [
        Node(id=i, loc=survivors[k], intensity=float(np.clip(sval[k], 0.0, 1.0)))
        for i, k in enumerate(order.tolist())
    ]
    return PointCloud(nodes, 2, image=img)


def extract_nodes(img: RasterImage, params: PipelineParams) -> PointCloud:
    """Full image-to-cloud pipeline; the cloud binds the enhanced image."""
    smoothed = gaussian_filter(img, params.gaussian_sigma)
    enhanced = subtract_background(smoothed, params.background_radius)
    points = find_local_maxima(enhanced, params.maxima_window, params.detection_floor)
    return prune_nodes(points, enhanced, params)
