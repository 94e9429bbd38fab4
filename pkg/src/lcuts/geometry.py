"""Spatial primitives: nodes, point clouds, line fits, and cloud CSV IO.

Locations are in pixel units, 2-D (x, y) or 3-D (x, y, z), with the raster
convention that y grows downward. A total-least-squares line fit summarizes a
group of points by its principal axis; the orthogonal residual spread and the
projection span onto that axis drive the clustering stop rules.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, DimensionMismatchError, InputError
from .raster import RasterImage


@dataclass(frozen=True)
class Node:
    """One point of a cloud.

    ``intensity`` is the image brightness at the node (absent for plain
    clouds); ``dir`` is the locally estimated unit axis (absent until
    direction assignment runs, or when the node has no neighbors).
    """

    id: int
    loc: np.ndarray
    intensity: float | None = None
    dir: np.ndarray | None = None

    def __post_init__(self) -> None:
        loc = np.asarray(self.loc, dtype=np.float64)
        if loc.ndim != 1 or loc.shape[0] not in (2, 3):
            raise DimensionMismatchError(f"node {self.id}: loc must be a 2- or 3-vector")
        if not np.all(np.isfinite(loc)):
            raise InputError(f"node {self.id}: non-finite location")
        object.__setattr__(self, "loc", loc)
        if self.intensity is not None:
            val = float(self.intensity)
            if not 0.0 <= val <= 1.0:
                raise InputError(f"node {self.id}: intensity {val} outside [0, 1]")
            object.__setattr__(self, "intensity", val)
        if self.dir is not None:
            d = np.asarray(self.dir, dtype=np.float64)
            if d.shape != loc.shape:
                raise DimensionMismatchError(f"node {self.id}: dir/loc dimension mismatch")
            if abs(float(np.linalg.norm(d)) - 1.0) > 1e-9:
                raise InputError(f"node {self.id}: dir is not unit length")
            object.__setattr__(self, "dir", d)


@dataclass
class PointCloud:
    """An ordered set of nodes with ids 0..N-1 and a common dimension.

    ``image`` optionally binds the raster the nodes were extracted from; it is
    required for any intensity-based weighting or stop checks.
    """

    nodes: list[Node]
    dim: int
    image: RasterImage | None = None

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise DimensionMismatchError(f"dim must be 2 or 3, got {self.dim}")
        seen: set[tuple[float, ...]] = set()
        for idx, node in enumerate(self.nodes):
            if node.id != idx:
                raise InputError(f"node ids must be 0..N-1 in order (index {idx} has id {node.id})")
            if node.loc.shape[0] != self.dim:
                raise DimensionMismatchError(f"node {idx} has dimension {node.loc.shape[0]}, cloud is {self.dim}-D")
            key = tuple(node.loc.tolist())
            if key in seen:
                raise InputError(f"duplicate node location {key}")
            seen.add(key)
        if self.image is not None and self.dim != 2:
            raise DimensionMismatchError("only 2-D clouds can bind an image")

    def __len__(self) -> int:
        return len(self.nodes)

    def locs(self) -> np.ndarray:
        """All locations as an (N, dim) array."""
        if not self.nodes:
            return np.zeros((0, self.dim))
        return np.stack([n.loc for n in self.nodes])

    def intensities(self) -> list[float | None]:
        return [n.intensity for n in self.nodes]

    def has_all_intensities(self) -> bool:
        return bool(self.nodes) and all(n.intensity is not None for n in self.nodes)

    def with_image(self, image: RasterImage | None) -> "PointCloud":
        return PointCloud(self.nodes, self.dim, image)

    def with_nodes(self, nodes: list[Node]) -> "PointCloud":
        return PointCloud(nodes, self.dim, self.image)


@dataclass(frozen=True)
class LineFit:
    """Total-least-squares line summary of a point set."""

    centroid: np.ndarray  # mean location
    axis: np.ndarray      # unit principal axis (sign: largest component positive)
    std: float            # RMS orthogonal distance to the fitted line
    eccentricity: float   # sqrt(1 - lam2/lam1) of the two largest moments
    extent: float         # span of projections onto the axis


def _canonical_order(pts: np.ndarray) -> np.ndarray:
    # Lexicographic point order makes every accumulation order-independent,
    # so fit_line(points) == fit_line(shuffled points) bit for bit.
    return pts[np.lexsort(pts.T[::-1])]


def _moments(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Centroid, centered residuals, and eigen-decomposition of the second-moment matrix."""
    centroid = pts.mean(axis=0)
    resid = pts - centroid
    moment = resid.T @ resid / len(pts)
    vals, vecs = np.linalg.eigh(moment)  # ascending eigenvalues
    return centroid, resid, vals, vecs


def _validate_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise DimensionMismatchError("points must be an (N, 2) or (N, 3) array")
    if len(pts) < 2:
        raise DegenerateInputError("need at least 2 points to fit a line")
    if not np.all(np.isfinite(pts)):
        raise InputError("points contain non-finite values")
    return _canonical_order(pts)


def fit_line(points) -> LineFit:
    """Fit a line by total least squares.

    The axis is the principal eigenvector of the second-moment matrix about
    the centroid; residuals are measured orthogonally to it. Coincident point
    sets have no axis and raise DegenerateInputError.
    """
    pts = _validate_points(points)
    centroid, resid, vals, vecs = _moments(pts)
    if not np.any(resid):
        raise DegenerateInputError("all points coincide; line axis undefined")
    axis = vecs[:, -1]
    pivot = int(np.argmax(np.abs(axis)))
    if axis[pivot] < 0:
        axis = -axis
    proj = resid @ axis
    orth = resid - proj[:, None] * axis[None, :]
    std = float(np.sqrt((orth * orth).sum() / len(pts)))
    extent = float(proj.max() - proj.min())
    lam1 = float(vals[-1])
    lam2 = max(float(vals[-2]), 0.0)
    ecc = float(np.sqrt(max(1.0 - lam2 / lam1, 0.0)))
    return LineFit(centroid=centroid, axis=axis, std=std, eccentricity=ecc, extent=extent)


def eccentricity(points) -> float:
    """sqrt(1 - lam2/lam1) for the two largest second-moment eigenvalues.

    1 for exactly collinear sets, 0 for isotropic ones.
    """
    pts = _validate_points(points)
    _, resid, vals, _ = _moments(pts)
    if not np.any(resid):
        raise DegenerateInputError("all points coincide; eccentricity undefined")
    lam1 = float(vals[-1])
    lam2 = max(float(vals[-2]), 0.0)
    return float(np.sqrt(max(1.0 - lam2 / lam1, 0.0)))


def pairwise_distance(a, b) -> float:
    """Euclidean distance between two locations of equal dimension."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise DimensionMismatchError(f"dimension mismatch: {av.shape} vs {bv.shape}")
    diff = av - bv
    # coordinate-ordered sum, not BLAS norm: keeps the scalar route bit-equal
    # to the batched distance matrix
    return float(np.sqrt((diff * diff).sum()))


# ----------------------------------------------------------------------------
# Cloud CSV: header x,y[,z],intensity[,group]; intensity cells may be empty.


def read_cloud_csv(path: str | Path) -> tuple[PointCloud, list[set[int]] | None]:
    """Read a point-cloud CSV.

    Returns the cloud plus ground-truth groups when a ``group`` column is
    present (sets of node ids, ordered by ascending label), else None.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: empty cloud file")
    header = [h.strip() for h in rows[0]]
    if header[:2] != ["x", "y"]:
        raise InputError(f"{path}: cloud header must start with x,y")
    rest = header[2:]
    dim = 2
    if rest and rest[0] == "z":
        dim = 3
        rest = rest[1:]
    if not rest or rest[0] != "intensity":
        raise InputError(f"{path}: cloud header must contain an intensity column")
    has_group = rest[1:] == ["group"]
    if rest[1:] and not has_group:
        raise InputError(f"{path}: unexpected cloud columns {rest[1:]}")

    nodes: list[Node] = []
    labels: list[int] = []
    ncols = dim + 1 + (1 if has_group else 0)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != ncols:
            raise InputError(f"{path}:{lineno}: expected {ncols} columns, got {len(row)}")
        try:
            loc = np.array([float(c) for c in row[:dim]])
            cell = row[dim].strip()
            inten = float(cell) if cell else None
            if has_group:
                labels.append(int(row[dim + 1]))
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
        nodes.append(Node(id=len(nodes), loc=loc, intensity=inten))
    try:
        cloud = PointCloud(nodes, dim)
    except (InputError, DimensionMismatchError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    groups = None
    if has_group:
        groups = [set(np.nonzero(np.asarray(labels) == lab)[0].tolist())
                  for lab in sorted(set(labels))]
    return cloud, groups


def write_cloud_csv(path: str | Path, cloud: PointCloud, groups: list[set[int]] | None = None) -> None:
    """Write a cloud CSV; appends a group column when groups are given."""
    label_of: dict[int, int] = {}
    if groups is not None:
        for lab, members in enumerate(groups):
            for nid in members:
                label_of[nid] = lab
        missing = [n.id for n in cloud.nodes if n.id not in label_of]
        if missing:
            raise InputError(f"groups do not cover nodes {missing[:5]}")
    header = ["x", "y"] + (["z"] if cloud.dim == 3 else []) + ["intensity"]
    if groups is not None:
        header.append("group")
    lines = [",".join(header)]
    for node in cloud.nodes:
        cells = [repr(float(v)) for v in node.loc]
        cells.append("" if node.intensity is None else repr(float(node.intensity)))
        if groups is not None:
            cells.append(str(label_of[node.id]))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
