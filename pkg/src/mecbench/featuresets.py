"""Feature-set configuration: file format, defaults, and derived subsets.

The config file is YAML with a ``groups`` map (feature name -> group) and
a ``sets`` list of ``{name, members}`` entries; see data/features_default.yaml
for the shipped default covering the 30-feature vocabulary.

Five of the six standard subsets depend on the data, so they are derived,
not hard-coded: features are ranked by information gain on the training
split, then

    AAS-12a / AAS-11b   top 12 / top 11 overall,
    VA-8a / VA-7b       top 8 / top 7 within the surface group,
    RA-8                top 7 within semi_domain + infrastructure,
                        plus SSLfinal_State.

Members are listed in dataset column order, which keeps downstream
tie-breaking aligned with column order. ``mecbench featuresets`` freezes
the derived sets into a config file for reuse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
import yaml

from .dataset import LabeledDataset
from .errors import ConfigError, MecbenchError
from .schema import SSL_FEATURE, FeatureGroup, FeatureSetConfig


@dataclass(frozen=True)
class FeatureConfig:
    group_map: dict[str, FeatureGroup]
    sets: dict[str, FeatureSetConfig]


def _parse_feature_config(data: dict) -> FeatureConfig:
    groups_raw = data.get("groups")
    if not isinstance(groups_raw, dict) or not groups_raw:
        raise ConfigError("feature config needs a nonempty 'groups' map")
    group_map = {str(name): FeatureGroup.parse(g) for name, g in groups_raw.items()}
    sets: dict[str, FeatureSetConfig] = {}
    for entry in data.get("sets") or []:
        cfg = FeatureSetConfig(str(entry["name"]), tuple(str(m) for m in entry["members"]))
        unknown = [m for m in cfg.members if m not in group_map]
        if unknown:
            raise ConfigError(f"set {cfg.name!r} references unmapped features {unknown}")
        sets[cfg.name] = cfg
    return FeatureConfig(group_map, sets)


def load_feature_config(path: str) -> FeatureConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_feature_config(yaml.safe_load(fh))


def default_feature_config() -> FeatureConfig:
    text = resources.files("mecbench.data").joinpath("features_default.yaml").read_text()
    return _parse_feature_config(yaml.safe_load(text))


def save_feature_config(cfg: FeatureConfig, path: str) -> None:
    payload = {
        "version": 1,
        "groups": {name: group.value for name, group in cfg.group_map.items()},
        "sets": [
            {"name": s.name, "members": list(s.members)} for s in cfg.sets.values()
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(payload, fh, sort_keys=False)


# ---------------------------------------------------------------------------
# Information-gain ranking and derived subsets


def information_gain(ds: LabeledDataset) -> list[float]:
    """Empirical mutual information (nats) between each feature and the label."""
    n = ds.n
    if n == 0:
        raise MecbenchError("empty dataset")
    h_y = _entropy(np.bincount((ds.y == 1).astype(np.int64)))
    gains = []
    for j in range(ds.schema.d):
        cond = 0.0
        column = ds.X[:, j]
        for v in (-1, 0, 1):
            mask = column == v
            n_v = int(np.sum(mask))
            if n_v:
                cond += (n_v / n) * _entropy(
                    np.bincount((ds.y[mask] == 1).astype(np.int64))
                )
        gains.append(h_y - cond)
    return gains


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    out = 0.0
    for c in counts:
        if c:
            p = c / total
            out -= p * math.log(p)
    return out


def rank_by_information_gain(ds: LabeledDataset) -> list[int]:
    """Feature indices best-first; ties resolve toward the lower column index."""
    gains = information_gain(ds)
    return sorted(range(ds.schema.d), key=lambda j: (-gains[j], j))


def generate_builtin_sets(train: LabeledDataset) -> dict[str, FeatureSetConfig]:
    """Derive the six standard subsets from a training split (30-feature vocabulary)."""
    schema = train.schema
    if schema.d != 30:
        raise ConfigError(f"standard subsets need the 30-feature vocabulary, got d={schema.d}")
    if SSL_FEATURE not in schema.names:
        raise ConfigError(f"standard subsets need {SSL_FEATURE}")
    ranking = rank_by_information_gain(train)

    def in_column_order(indices) -> tuple[str, ...]:
        return tuple(schema.names[j] for j in sorted(indices))

    surface = [j for j in ranking if schema.features[j].group is FeatureGroup.SURFACE]
    hard = [
        j
        for j in ranking
        if schema.features[j].group in (FeatureGroup.SEMI_DOMAIN, FeatureGroup.INFRASTRUCTURE)
    ]
    if len(surface) < 8 or len(hard) < 7:
        raise ConfigError("group map too lopsided to derive the standard subsets")
    ssl_index = schema.index_of(SSL_FEATURE)
    ra8 = [j for j in hard if j != ssl_index][:7] + [ssl_index]
    sets = {
        "Full": FeatureSetConfig("Full", tuple(schema.names)),
        "AAS-12a": FeatureSetConfig("AAS-12a", in_column_order(ranking[:12])),
        "AAS-11b": FeatureSetConfig("AAS-11b", in_column_order(ranking[:11])),
        "RA-8": FeatureSetConfig("RA-8", in_column_order(ra8)),
        "VA-8a": FeatureSetConfig("VA-8a", in_column_order(surface[:8])),
        "VA-7b": FeatureSetConfig("VA-7b", in_column_order(surface[:7])),
    }
    return sets
