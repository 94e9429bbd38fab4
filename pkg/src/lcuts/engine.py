"""Recursive clustering: split by normalized cuts until groups look like lines.

Each component is either accepted as a group, declared outlier noise, or
bipartitioned and recursed into. Acceptance requires a small orthogonal
residual, a high eccentricity (skipped for tiny groups), and, when an image
is bound, no intensity valley between consecutive nodes along the axis.
Components that are too long to be a single object are always split first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .direction import VotingParams, assign_all_directions
from .errors import InputError
from .geometry import LineFit, Node, PointCloud, fit_line
from .graph import GraphParams, WeightedGraph, build_adjacency, intensity_threshold, segment_min_intensity
from .spectral import ncut_bipartition


@dataclass(frozen=True)
class StoppingLimits:
    size_limit: float = 60.0        # max projection span of an accepted group, pixels
    ecc_limit: float = 0.9          # min eccentricity of an accepted group
    std_limit: float = 3.75         # max RMS orthogonal residual, pixels
    min_group_size: int = 2         # smaller components become outliers
    check_intensity: bool = True    # test along-axis intensity continuity (needs an image)
    check_eccentricity: bool = True

    def __post_init__(self) -> None:
        if self.size_limit <= 0 or self.std_limit < 0:
            raise InputError("sizeLimit must be > 0 and stdLimit >= 0")
        if not 0.0 <= self.ecc_limit <= 1.0:
            raise InputError(f"eccLimit must be in [0, 1], got {self.ecc_limit}")
        if self.min_group_size < 1:
            raise InputError(f"minGroupSize must be >= 1, got {self.min_group_size}")


class Decision(str, Enum):
    ACCEPT = "accept"
    RECURSE = "recurse"
    OUTLIER = "outlier"


@dataclass(frozen=True)
class StopCheck:
    decision: Decision
    forced: bool = False  # accepted despite failing linearity (unsplittable group)


@dataclass
class TreeNode:
    """One node of the recursion record."""

    ids: list[int]
    decision: str = ""
    ncut: float | None = None
    forced: bool = False
    stripped: list[int] = field(default_factory=list)
    children: list["TreeNode"] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ids": self.ids,
            "decision": self.decision,
            "ncut": self.ncut,
            "forced": self.forced,
            "stripped": self.stripped,
            "children": [c.to_dict() for c in self.children],
        }


@dataclass
class ClusterResult:
    groups: list[list[int]]            # sorted ids, groups ordered by smallest member
    outliers: list[int]                # sorted ids
    per_group: list[LineFit | None]    # aligned with groups; None for 1-node groups
    forced: list[bool]                 # aligned with groups: accepted with a warning
    tree: TreeNode | None

    def group_sets(self) -> list[set[int]]:
        return [set(g) for g in self.groups]


def check_stopping(cloud: PointCloud, group, limits: StoppingLimits,
                   thresh: float | None = None, sampling_step: float = 0.5) -> StopCheck:
    """Classify one candidate group: accept it, recurse into it, or drop it.

    ``thresh`` is the global intensity threshold; pass None to skip the
    intensity test (no image, or intensities unavailable).
    """
    ids = sorted(group)
    if len(ids) < limits.min_group_size:
        return StopCheck(Decision.OUTLIER)
    if len(ids) == 1:
        return StopCheck(Decision.ACCEPT)  # single node, nothing to fit or split

    locs = cloud.locs()
    fit = fit_line(locs[ids])
    if fit.extent > limits.size_limit:
        return StopCheck(Decision.RECURSE)

    linear = fit.std <= limits.std_limit
    if linear and limits.check_eccentricity and len(ids) > 3:
        linear = fit.eccentricity >= limits.ecc_limit
    if linear and limits.check_intensity and cloud.image is not None and thresh is not None:
        proj = (locs[ids] - fit.centroid) @ fit.axis
        along = [ids[k] for k in np.lexsort((ids, proj))]
        for u, v in zip(along, along[1:]):
            m = segment_min_intensity(cloud.image, locs[u], locs[v], sampling_step)
            if m <= thresh:
                linear = False
                break

    if linear:
        return StopCheck(Decision.ACCEPT)
    if len(ids) <= 2:
        # Cannot be split into anything but outliers; keep it, flagged.
        return StopCheck(Decision.ACCEPT, forced=True)
    return StopCheck(Decision.RECURSE)


def lcuts(cloud: PointCloud, gparams: GraphParams | None = None,
          vparams: VotingParams | None = None,
          limits: StoppingLimits | None = None) -> ClusterResult:
    """Cluster a point cloud into approximately collinear groups.

    Directions are estimated once, the affinity matrix is built once, and the
    recursion then only restricts that matrix to sub-components. Zero-degree
    nodes of a component are stripped to outliers before any split.
    """
    gparams = gparams or GraphParams()
    vparams = vparams or VotingParams()
    limits = limits or StoppingLimits()

    if len(cloud) == 0:
        return ClusterResult([], [], [], [], None)

    # Work in location-sorted order: ties and rounding then resolve the same
    # way no matter how the caller happened to label the nodes.
    back = np.lexsort(cloud.locs().T[::-1]).tolist()
    work = PointCloud(
        [Node(id=k, loc=cloud.nodes[i].loc, intensity=cloud.nodes[i].intensity)
         for k, i in enumerate(back)],
        cloud.dim, image=cloud.image)

    work = assign_all_directions(work, vparams)
    # The intensity factor of the adjacency is active whenever an image is
    # bound; the check_intensity flag only gates the stopping test.
    thresh: float | None = None
    if work.image is not None and work.has_all_intensities():
        thresh = intensity_threshold(work)
    graph = build_adjacency(work, gparams, thresh=thresh)
    w = graph.weights

    groups: list[list[int]] = []
    forced_flags: list[bool] = []
    outliers: list[int] = []
    root = TreeNode(ids=list(range(len(work))))
    stack = [root]
    while stack:
        node = stack.pop()
        ids = node.ids
        idx = np.asarray(ids, dtype=np.int64)
        sub = w[np.ix_(idx, idx)]
        if len(ids) > 1:
            dead = np.nonzero(sub.sum(axis=1) == 0.0)[0]
            if dead.size:
                stripped = [ids[k] for k in dead.tolist()]
                node.decision = "strip"
                node.stripped = stripped
                outliers.extend(stripped)
                rest = sorted(set(ids) - set(stripped))
                if rest:
                    child = TreeNode(ids=rest)
                    node.children.append(child)
                    stack.append(child)
                continue

        chk = check_stopping(work, ids, limits, thresh=thresh,
                             sampling_step=gparams.intensity_sampling_step)
        node.decision = chk.decision.value
        node.forced = chk.forced
        if chk.decision is Decision.ACCEPT:
            groups.append(ids)
            forced_flags.append(chk.forced)
        elif chk.decision is Decision.OUTLIER:
            outliers.extend(ids)
        else:
            part = ncut_bipartition(WeightedGraph(sub))
            node.ncut = part.ncut
            side_a = sorted(ids[k] for k in part.group_a)
            side_b = sorted(ids[k] for k in part.group_b)
            kids = [TreeNode(ids=side_a), TreeNode(ids=side_b)]
            node.children.extend(kids)
            stack.extend(reversed(kids))

    # translate back to the caller's node ids
    groups = [sorted(back[k] for k in g) for g in groups]
    outliers = [back[k] for k in outliers]
    walk = [root]
    while walk:
        node = walk.pop()
        node.ids = sorted(back[k] for k in node.ids)
        if node.stripped:
            node.stripped = sorted(back[k] for k in node.stripped)
        walk.extend(node.children)

    order = np.argsort([g[0] for g in groups]) if groups else []
    groups = [groups[i] for i in order]
    forced_flags = [forced_flags[i] for i in order]
    locs = cloud.locs()
    fits: list[LineFit | None] = [fit_line(locs[g]) if len(g) >= 2 else None for g in groups]
    return ClusterResult(groups, sorted(outliers), fits, forced_flags, root)
