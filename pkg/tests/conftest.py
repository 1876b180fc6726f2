from __future__ import annotations

import numpy as np
import pytest

from pcporder import dataset_from_text

NUMERIC_COLUMNS = [
    "bill_len",
    "bill_depth",
    "flipper_len",
    "body_mass",
    "swim_speed",
    "dive_depth",
]

#: rows that are complete in every numeric column
COMPLETE_ROWS = 2000
#: rows with a missing or non-numeric cell, interleaved into the file
JUNK_ROWS = 25


def _penguins_text() -> str:
    """Three-cluster synthetic colony measurements, 2000 complete rows.

    The species column is categorical (never selected for analysis), the six
    numeric columns carry per-cluster correlations and offsets so that
    grouping, correlation, and fan structure all genuinely occur. Junk rows
    with empty or textual cells are interleaved to exercise row dropping.
    """
    rng = np.random.default_rng(20260817)
    species = ["adelie", "chinstrap", "gentoo"]
    centers = np.array(
        [
            [38.8, 18.3, 190.0, 3700.0, 2.1, 45.0],
            [48.8, 18.4, 196.0, 3730.0, 2.6, 60.0],
            [47.5, 15.0, 217.0, 5070.0, 3.2, 90.0],
        ]
    )
    spread = np.array([2.7, 1.1, 6.5, 460.0, 0.35, 12.0])

    lines = ["species," + ",".join(NUMERIC_COLUMNS)]
    junk_period = COMPLETE_ROWS // JUNK_ROWS
    emitted = 0
    for i in range(COMPLETE_ROWS):
        c = i % 3
        base = rng.normal(0.0, 1.0, size=6)
        # bill length drags body mass and swim speed along within a cluster
        base[3] = 0.7 * base[0] + 0.3 * base[3]
        base[4] = 0.6 * base[0] + 0.4 * base[4]
        row = centers[c] + base * spread
        cells = [species[c]] + [f"{v:.4f}" for v in row]
        lines.append(",".join(cells))
        emitted += 1
        if emitted % junk_period == 0 and (emitted // junk_period) <= JUNK_ROWS:
            broken = list(cells)
            broken[1 + (emitted // junk_period) % 6] = "" if emitted % 2 else "n/a"
            lines.append(",".join(broken))
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def penguins_text() -> str:
    return _penguins_text()


@pytest.fixture(scope="session")
def penguins_path(tmp_path_factory, penguins_text):
    path = tmp_path_factory.mktemp("data") / "penguins.csv"
    path.write_text(penguins_text, encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def penguins(penguins_text):
    """(dataset, dropped_rows) for the six numeric columns."""
    loaded = dataset_from_text(penguins_text, NUMERIC_COLUMNS, name="penguins")
    return loaded


@pytest.fixture(scope="session")
def penguins_dataset(penguins):
    return penguins.dataset
