"""Flat key=value configuration files for the CLI.

One ``key = value`` pair per line; blank lines and ``#`` comments are
ignored. Unknown keys are rejected so typos fail loudly. Every knob of the
voting, graph, stopping, and pipeline parameter sets is exposed, plus the
evaluation overlap fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .direction import VotingParams
from .engine import StoppingLimits
from .errors import InputError, LcutsError
from .graph import GraphParams
from .pipeline import PipelineParams
from .synth import SynthSpec

_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _parse_bool(raw: str) -> bool:
    try:
        return _BOOL_WORDS[raw.strip().lower()]
    except KeyError:
        raise InputError(f"expected a boolean, got {raw!r}") from None


def parse_kv(path: str | Path) -> dict[str, str]:
    """Read a flat key=value file into a string dict (last duplicate wins)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    return out


# key -> (target section, attribute, converter)
_CONFIG_KEYS: dict[str, tuple[str, str, object]] = {
    "hops": ("voting", "hops", int),
    "hopRadius": ("voting", "hop_radius", float),
    "nRelBins": ("voting", "n_rel_bins", int),
    "r": ("graph", "r", float),
    "sigmaD": ("graph", "sigma_d", float),
    "sigmaT": ("graph", "sigma_t", float),
    "intensitySamplingStep": ("graph", "intensity_sampling_step", float),
    "sizeLimit": ("limits", "size_limit", float),
    "eccLimit": ("limits", "ecc_limit", float),
    "stdLimit": ("limits", "std_limit", float),
    "minGroupSize": ("limits", "min_group_size", int),
    "checkIntensity": ("limits", "check_intensity", _parse_bool),
    "checkEccentricity": ("limits", "check_eccentricity", _parse_bool),
    "gaussianSigma": ("pipeline", "gaussian_sigma", float),
    "backgroundRadius": ("pipeline", "background_radius", float),
    "maximaWindow": ("pipeline", "maxima_window", int),
    "minSeparation": ("pipeline", "min_separation", float),
    "minNeighborDist": ("pipeline", "min_neighbor_dist", float),
    "detectionFloor": ("pipeline", "detection_floor", float),
    "overlapFrac": ("eval", "overlap_frac", float),
}


@dataclass(frozen=True)
class Config:
    voting: VotingParams
    graph: GraphParams
    limits: StoppingLimits
    pipeline: PipelineParams
    overlap_frac: float = 0.5

    @classmethod
    def default(cls) -> "Config":
        return cls(VotingParams(), GraphParams(), StoppingLimits(), PipelineParams())

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        raw = parse_kv(path)
        sections: dict[str, dict[str, object]] = {
            "voting": {}, "graph": {}, "limits": {}, "pipeline": {}, "eval": {}}
        for key, value in raw.items():
            if key not in _CONFIG_KEYS:
                raise InputError(f"{path}: unknown config key {key!r}")
            section, attr, conv = _CONFIG_KEYS[key]
            try:
                sections[section][attr] = conv(value)
            except (ValueError, InputError) as exc:
                raise InputError(f"{path}: bad value for {key}: {exc}") from exc
        try:
            return cls(
                voting=VotingParams(**sections["voting"]),
                graph=GraphParams(**sections["graph"]),
                limits=StoppingLimits(**sections["limits"]),
                pipeline=PipelineParams(**sections["pipeline"]),
                overlap_frac=float(sections["eval"].get("overlap_frac", 0.5)),
            )
        except LcutsError as exc:
            raise InputError(f"{path}: {exc}") from exc

    def echo(self) -> dict:
        """Fully resolved parameter set for embedding in output artifacts."""
        return {
            "hops": self.voting.hops,
            "hopRadius": self.voting.hop_radius,
            "nRelBins": self.voting.rel_bins,
            "r": self.graph.r,
            "sigmaD": self.graph.sigma_d,
            "sigmaT": self.graph.sigma_t,
            "intensitySamplingStep": self.graph.intensity_sampling_step,
            "sizeLimit": self.limits.size_limit,
            "eccLimit": self.limits.ecc_limit,
            "stdLimit": self.limits.std_limit,
            "minGroupSize": self.limits.min_group_size,
            "checkIntensity": self.limits.check_intensity,
            "checkEccentricity": self.limits.check_eccentricity,
            "gaussianSigma": self.pipeline.gaussian_sigma,
            "backgroundRadius": self.pipeline.background_radius,
            "maximaWindow": self.pipeline.maxima_window,
            "minSeparation": self.pipeline.min_separation,
            "minNeighborDist": self.pipeline.min_neighbor_dist,
            "detectionFloor": self.pipeline.detection_floor,
            "overlapFrac": self.overlap_frac,
        }


_SYNTH_KEYS: dict[str, tuple[str, object]] = {
    "dim": ("dim", int),
    "nRods": ("n_rods", int),
    "lengthMin": ("length_min", float),
    "lengthMax": ("length_max", float),
    "spacingAlongRod": ("spacing_along_rod", float),
    "orthoNoiseStd": ("ortho_noise_std", float),
    "minRodGap": ("min_rod_gap", float),
    "crossings": ("crossings", int),
    "intensityValley": ("intensity_valley", float),
    "seed": ("seed", int),
}


def read_synth_spec(path: str | Path) -> SynthSpec:
    """Parse a generator spec file (same flat format; lengthRange is split
    into lengthMin / lengthMax keys)."""
    raw = parse_kv(path)
    fields: dict[str, object] = {}
    for key, value in raw.items():
        if key not in _SYNTH_KEYS:
            raise InputError(f"{path}: unknown synth key {key!r}")
        attr, conv = _SYNTH_KEYS[key]
        try:
            fields[attr] = conv(value)
        except ValueError as exc:
            raise InputError(f"{path}: bad value for {key}: {exc}") from exc
    defaults = SynthSpec()
    length_range = (
        float(fields.pop("length_min", defaults.length_range[0])),
        float(fields.pop("length_max", defaults.length_range[1])),
    )
    try:
        return SynthSpec(length_range=length_range, **fields)
    except LcutsError as exc:
        raise InputError(f"{path}: {exc}") from exc
