"""Synthetic stand-in data with the benchmark's shape.

Generates labeled instances over the standard 30-feature ternary
vocabulary with class-conditional value distributions: a few dominant
presentation-layer signals, a medium tier, and many near-noise binary
columns. Useful for end-to-end runs and the test suite when the real
benchmark CSV is not on disk. It is NOT the benchmark: numbers computed
on it are structural, not comparable to published ones.
"""

from __future__ import annotations

import csv

import numpy as np

from .dataset import LabeledDataset
from .featuresets import default_feature_config
from .rng import SplitMix64, derive_seed
from .schema import build_schema

# (values, phishing percentages, legitimate percentages); percentages sum to 100.
# Tier S dominates the label, A/B carry diminishing signal, C is weak and
# D/R are noise, mirroring how a couple of cheap presentation-layer signals
# dominate the benchmark while most columns barely matter.
_TIERS = {
    "S": ((-1, 0, 1), (72, 16, 12), (4, 8, 88)),
    "A": ((-1, 0, 1), (60, 22, 18), (10, 16, 74)),
    "B": ((-1, 0, 1), (45, 28, 27), (22, 26, 52)),
    "C": ((-1, 1), (62, 38), (22, 78)),
    "D": ((-1, 1), (50, 50), (50, 50)),
    "R": ((0, 1), (50, 50), (50, 50)),
}

_FEATURE_TIERS = {
    "having_IP_Address": "D",
    "URL_Length": "B",
    "Shortining_Service": "D",
    "having_At_Symbol": "D",
    "double_slash_redirecting": "D",
    "Prefix_Suffix": "C",
    "having_Sub_Domain": "B",
    "SSLfinal_State": "S",
    "Domain_registeration_length": "C",
    "Favicon": "D",
    "port": "D",
    "HTTPS_token": "D",
    "Request_URL": "C",
    "URL_of_Anchor": "S",
    "Links_in_tags": "B",
    "SFH": "A",
    "Submitting_to_email": "D",
    "Abnormal_URL": "D",
    "Redirect": "R",
    "on_mouseover": "D",
    "RightClick": "D",
    "popUpWidnow": "D",
    "Iframe": "D",
    "age_of_domain": "C",
    "DNSRecord": "C",
    "web_traffic": "A",
    "Page_Rank": "C",
    "Google_Index": "C",
    "Links_pointing_to_page": "B",
    "Statistical_report": "C",
}


def synthetic_dataset(n: int = 11055, n_phish: int = 4898, seed: int = 20240801) -> LabeledDataset:
    if not 0 < n_phish < n:
        raise ValueError("need both classes")
    config = default_feature_config()
    names = list(_FEATURE_TIERS)
    labels = [-1] * n_phish + [1] * (n - n_phish)
    SplitMix64(derive_seed(seed, "labels")).shuffle(labels)
    y = np.array(labels, dtype=np.int8)
    rng = SplitMix64(derive_seed(seed, "values"))
    X = np.empty((n, len(names)), dtype=np.int8)
    for j, name in enumerate(names):
        values, phish_pct, legit_pct = _TIERS[_FEATURE_TIERS[name]]
        for i in range(n):
            pct = phish_pct if y[i] == -1 else legit_pct
            u = rng.below(100)
            acc = 0
            for v, p in zip(values, pct):
                acc += p
                if u < acc:
                    X[i, j] = v
                    break
    admissible = [tuple(sorted(int(v) for v in np.unique(X[:, j]))) for j in range(len(names))]
    schema = build_schema(names, admissible, config.group_map)
    return LabeledDataset(X, y, schema)


def write_synthetic_csv(path: str, n: int = 11055, n_phish: int = 4898, seed: int = 20240801) -> None:
    ds = synthetic_dataset(n, n_phish, seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.schema.names) + ["Result"])
        for i in range(ds.n):
            writer.writerow([int(v) for v in ds.X[i]] + [int(ds.y[i])])
