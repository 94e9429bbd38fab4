"""Per-node axis estimation by multi-hop neighborhood voting.

Each node gets a unit direction estimated from the nodes reachable within a
few short hops: every member contributes the normalized offset from the
center as a candidate axis, candidates vote for each other when their mutual
angle falls into the first quantization bin, and the winners are averaged
after sign alignment. Majority voting keeps junction nodes from blending the
axes of two chains into a diagonal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .geometry import Node, PointCloud

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class VotingParams:
    """Neighborhood and vote quantization settings.

    ``hop_radius`` is the per-hop reach in pixels; ``n_rel_bins`` quantizes
    relative angles over [0, 90] degrees and defaults to ``hops``.
    """

    hops: int = 4
    hop_radius: float = 5.0
    n_rel_bins: int | None = None

    def __post_init__(self) -> None:
        if self.hops < 1:
            raise InputError(f"hops must be >= 1, got {self.hops}")
        if not self.hop_radius > 0:
            raise InputError(f"hopRadius must be > 0, got {self.hop_radius}")
        if self.n_rel_bins is not None and self.n_rel_bins < 1:
            raise InputError(f"nRelBins must be >= 1, got {self.n_rel_bins}")

    @property
    def rel_bins(self) -> int:
        return self.n_rel_bins if self.n_rel_bins is not None else self.hops


@dataclass(frozen=True)
class Neighborhood:
    center: int
    members: frozenset[int]


def _radius_adjacency(locs: np.ndarray, radius: float) -> np.ndarray:
    diff = locs[:, None, :] - locs[None, :, :]
    d2 = (diff * diff).sum(axis=-1)
    adj = d2 <= radius * radius
    np.fill_diagonal(adj, False)
    return adj


def _bfs_members(adj: np.ndarray, start: int, hops: int) -> set[int]:
    visited = np.zeros(adj.shape[0], dtype=bool)
    visited[start] = True
    frontier = np.array([start])
    members: set[int] = set()
    for _ in range(hops):
        if frontier.size == 0:
            break
        reach = adj[frontier].any(axis=0) & ~visited
        frontier = np.nonzero(reach)[0]
        visited |= reach
        members.update(frontier.tolist())
    return members


def hop_neighborhood(cloud: PointCloud, center: int, params: VotingParams) -> Neighborhood:
    """Nodes reachable from ``center`` in at most ``hops`` steps of length
    <= ``hop_radius`` each; the center itself is excluded."""
    if not 0 <= center < len(cloud):
        raise InputError(f"center id {center} out of range")
    adj = _radius_adjacency(cloud.locs(), params.hop_radius)
    return Neighborhood(center, frozenset(_bfs_members(adj, center, params.hops)))


def _vote(locs: np.ndarray, center: int, members: list[int], n_bins: int) -> np.ndarray | None:
    offsets = locs[members] - locs[center]
    norms = np.linalg.norm(offsets, axis=1)
    keepable = norms > 0
    if not keepable.all():
        offsets, norms = offsets[keepable], norms[keepable]
    if len(offsets) == 0:
        return None
    cand = offsets / norms[:, None]
    cos = np.clip(np.abs(cand @ cand.T), 0.0, 1.0)
    phi = np.arccos(cos)
    bin_width = (np.pi / 2) / n_bins
    # Count, per candidate, how many others fall in the first angular bin.
    first = phi < bin_width
    counts = first.sum(axis=1) - 1  # the diagonal always votes for itself
    kept = cand[counts == counts.max()]
    ref = kept[0]
    signs = np.where(kept @ ref < 0.0, -1.0, 1.0)
    mean = (signs[:, None] * kept).sum(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm < 1e-12:
        # Perfectly antagonistic survivors; fall back to the reference candidate.
        mean, norm = ref.copy(), 1.0
    axis = mean / norm
    # An axis has no inherent sign; fix it the same way fit_line does.
    pivot = int(np.argmax(np.abs(axis)))
    if axis[pivot] < 0:
        axis = -axis
    return axis


def _location_order(locs: np.ndarray, members: list[int]) -> list[int]:
    # order votes by coordinates, not ids, so relabeling cannot change the sum
    pts = locs[members]
    return [members[k] for k in np.lexsort(pts.T[::-1])]


def estimate_direction(cloud: PointCloud, center: int, nbhd: Neighborhood,
                       params: VotingParams) -> np.ndarray | None:
    """Majority-vote axis estimate for one node; None when the neighborhood is empty."""
    if nbhd.center != center:
        raise InputError("neighborhood was built for a different center")
    if not nbhd.members:
        return None
    locs = cloud.locs()
    members = _location_order(locs, sorted(nbhd.members))
    return _vote(locs, center, members, params.rel_bins)


def assign_all_directions(cloud: PointCloud, params: VotingParams) -> PointCloud:
    """Estimate a direction for every node, returning a new cloud.

    Nodes with empty neighborhoods keep ``dir=None``; their count is logged.
    """
    if not cloud.nodes:
        return cloud
    locs = cloud.locs()
    adj = _radius_adjacency(locs, params.hop_radius)
    nodes: list[Node] = []
    unassigned = 0
    for node in cloud.nodes:
        members = _location_order(locs, sorted(_bfs_members(adj, node.id, params.hops)))
        direction = _vote(locs, node.id, members, params.rel_bins) if members else None
        if direction is None:
            unassigned += 1
        nodes.append(Node(id=node.id, loc=node.loc, intensity=node.intensity, dir=direction))
    if unassigned:
        log.warning("%d of %d nodes have empty neighborhoods and no direction", unassigned, len(cloud))
    return cloud.with_nodes(nodes)
