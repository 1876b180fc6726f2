"""Acceptance suite: one test per shipping criterion, one printed verdict each.

Run with ``pytest -s tests/test_acceptance.py -v`` to see the verdict lines.
Every expected value comes from the loop-based references in oracles.py or
from an exhaustive search; tolerances are stated per criterion and pinned.
"""

from __future__ import annotations

import json
import time

import numpy as np
import pytest

import oracles
from pcporder import (
    PropertyId,
    ScoringEngine,
    Weights,
    WindowSpec,
    dataset_from_text,
    order_tsp,
    parse_weights,
)
from pcporder.cli import main as cli_main
from pcporder.detectors import (
    clear_grouping,
    density_change,
    fan,
    kde_density,
    neighborhood_probabilities,
    outliers,
    parallelism,
    pearson,
    skewness,
    window_bandwidth,
)
from test_ordering import make_matrix

SKEW = {PropertyId.POS_SKEWNESS, PropertyId.NEG_SKEWNESS}


def _report(name: str, ok: bool, info: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {info}")
    assert ok, f"{name}: {info}"


def _random_dataset(rng, rows, cols, name):
    names = [f"c{k}" for k in range(cols)]
    lines = [",".join(names)]
    for _ in range(rows):
        lines.append(",".join(f"{v:.10f}" for v in rng.random(cols)))
    return dataset_from_text("\n".join(lines), name=name).dataset


def test_detector_oracle_suite():
    """Nine detection kernels against loop-based references, >= 100 instances.

    Tolerances: 1e-12 for algebraic kernels, 1e-9 for the KL-based pair.
    Budget: under 60 s.
    """
    rng = np.random.default_rng(101)
    started = time.perf_counter()
    max_alg = 0.0
    max_kl = 0.0
    instances = 110
    for _ in range(instances):
        n = int(rng.integers(5, 51))
        x = rng.random(n)
        y = rng.random(n)
        xs, ys = list(map(float, x)), list(map(float, y))

        got_r, got_num = pearson(x, y)
        want_r, want_num = oracles.pearson(xs, ys)
        max_alg = max(max_alg, abs(got_r - want_r), abs(got_num - want_num))

        max_alg = max(max_alg, abs(skewness(x) - oracles.skewness(xs)))
        assert outliers(x) == oracles.outlier_count(xs)

        h = window_bandwidth(x)
        got_kde = kde_density(x, x, h)
        want_kde = oracles.kde_probability_vector(xs, xs, h)
        max_alg = max(max_alg, float(np.max(np.abs(got_kde - np.asarray(want_kde)))))

        got_nb = neighborhood_probabilities(x, h)
        want_nb = np.asarray(oracles.neighborhood_matrix(xs, h))
        max_alg = max(max_alg, float(np.max(np.abs(got_nb - want_nb))))

        max_kl = max(max_kl, abs(density_change(x, y) - oracles.density_change(xs, ys)))
        max_kl = max(max_kl, abs(clear_grouping(x, y) - oracles.clear_grouping(xs, ys)))

        max_alg = max(max_alg, abs(parallelism(x, y) - oracles.parallelism(xs, ys)))
        assert fan(x, y) == oracles.fan(xs, ys)

    took = time.perf_counter() - started
    ok = max_alg <= 1e-12 and max_kl <= 1e-9 and took < 60.0
    _report(
        "detector kernels vs references",
        ok,
        f"{instances} instances, max algebraic err {max_alg:.2e} (tol 1e-12), "
        f"max KL err {max_kl:.2e} (tol 1e-9), {took:.1f}s (< 60s)",
    )


def test_kl_invariants():
    """density_change(x, x) = 0 and clear_grouping(x, ax+b) = 0 within 1e-9
    on 50 instances; KL outputs never dip below zero."""
    rng = np.random.default_rng(102)
    worst_self = 0.0
    worst_affine = 0.0
    negatives = 0
    for _ in range(50):
        n = int(rng.integers(5, 51))
        x = rng.random(n)
        a = float(rng.uniform(0.1, 3.0))
        b = float(rng.uniform(-1.0, 1.0))
        worst_self = max(worst_self, abs(density_change(x, x)))
        worst_affine = max(worst_affine, abs(clear_grouping(x, a * x + b)))
        for _ in range(3):
            y = rng.random(n)
            if density_change(x, y) < 0.0 or clear_grouping(x, y) < 0.0:
                negatives += 1
    ok = worst_self <= 1e-9 and worst_affine <= 1e-9 and negatives == 0
    _report(
        "KL self/affine invariants",
        ok,
        f"50 instances, |dc(x,x)| max {worst_self:.2e}, "
        f"|cg(x, ax+b)| max {worst_affine:.2e} (tol 1e-9), negative KLs: {negatives}",
    )


def test_split_up_complements_clear_grouping_exactly(penguins_dataset):
    """split_up == 1 - clear_grouping bitwise, every window of every pair,
    window fractions 0.1 / 0.25 / 0.5 / 1.0."""
    engine = ScoringEngine()
    checked = 0
    exact = True
    for wf in (0.1, 0.25, 0.5, 1.0):
        profs = engine.profiles(penguins_dataset, WindowSpec(wf), seed=11)
        for prof in profs.values():
            cg = prof.per_property[PropertyId.CLEAR_GROUPING]
            su = prof.per_property[PropertyId.SPLIT_UP]
            for c, s in zip(cg, su):
                if c is None or s is None:
                    exact = exact and (c is None and s is None)
                    continue
                checked += 1
                if s != 1.0 - c:
                    exact = False
    _report(
        "split-up complements clear-grouping",
        exact and checked > 0,
        f"{checked} windows across 4 window fractions, equality exact (bitwise)",
    )


def test_ordering_matches_exhaustive_search():
    """Branch-and-bound equals brute-force permutation optimum on 200 random
    directed matrices per axis count 3..7; zero mismatches; under 120 s."""
    rng = np.random.default_rng(103)
    started = time.perf_counter()
    mismatches = 0
    total = 0
    for dim in range(3, 8):
        for _ in range(200):
            cells = rng.random((dim, dim))
            np.fill_diagonal(cells, 0.0)
            listed = cells.tolist()
            got = order_tsp(make_matrix(listed))
            want_order, want_score = oracles.best_path(listed)
            total += 1
            if abs(got.total_score - want_score) > 1e-12 or got.order != want_order:
                mismatches += 1
    took = time.perf_counter() - started
    ok = mismatches == 0 and took < 120.0
    _report(
        "exact ordering vs exhaustive search",
        ok,
        f"{total} matrices (200 per axis count 3..7), {mismatches} mismatches, "
        f"{took:.1f}s (< 120s)",
    )


def test_interactive_scale_timing(penguins_dataset):
    """2000 rows x 6 axes, window 0.2 / stride 0.1, 200 permutations: cold
    matrix + all 30 profiles under 5 s; weight-only change under 200 ms."""
    assert penguins_dataset.row_count == 2000
    assert penguins_dataset.dim_count == 6
    engine = ScoringEngine()
    spec = WindowSpec(0.2, 0.1)
    weights = Weights.uniform()

    started = time.perf_counter()
    engine.matrix(penguins_dataset, weights, spec, seed=11, permutations=200)
    profs = engine.profiles(penguins_dataset, spec, seed=11, permutations=200)
    cold = time.perf_counter() - started

    reweighted = parse_weights("fan=1.0,pos_corr=0.5,clear_grouping=0.75")
    started = time.perf_counter()
    engine.matrix(penguins_dataset, reweighted, spec, seed=11, permutations=200)
    warm = time.perf_counter() - started

    ok = len(profs) == 30 and cold < 5.0 and warm < 0.2
    _report(
        "interactive-scale timing",
        ok,
        f"cold matrix + 30 profiles {cold * 1000:.0f}ms (< 5000ms), "
        f"weight-only rescore {warm * 1000:.0f}ms (< 200ms)",
    )


def test_range_discipline_fuzz(penguins_dataset):
    """Every profile score, breakdown value, and cell stays in [0, 1] over a
    fuzz corpus with constant columns, duplicated columns, and 5-row data;
    documents always serialize with allow_nan=False."""
    rng = np.random.default_rng(104)
    corpus = []

    plain = _random_dataset(rng, 60, 4, "plain")
    corpus.append((plain, WindowSpec(0.4, 0.2), 3))

    lines = ["a,b,c"]
    for _ in range(50):
        lines.append(f"{rng.random():.8f},0.7,{rng.random():.8f}")
    corpus.append((dataset_from_text("\n".join(lines), name="const").dataset, WindowSpec(0.5), 5))

    lines = ["a,b"]
    for _ in range(40):
        v = rng.random()
        lines.append(f"{v:.8f},{v:.8f}")
    corpus.append((dataset_from_text("\n".join(lines), name="dup").dataset, WindowSpec(0.25), 7))

    lines = ["a,b,c"]
    for _ in range(5):
        lines.append(",".join(f"{v:.8f}" for v in rng.random(3)))
    corpus.append((dataset_from_text("\n".join(lines), name="five").dataset, WindowSpec(0.3), 9))

    corpus.append((penguins_dataset, WindowSpec(0.25), 11))

    violations = 0
    scanned = 0
    engine = ScoringEngine()
    for dataset, spec, seed in corpus:
        weights = Weights.uniform()
        matrix = engine.matrix(dataset, weights, spec, seed=seed)
        profs = engine.profiles(dataset, spec, seed=seed)
        dim = dataset.dim_count
        for i in range(dim):
            for j in range(dim):
                cell = matrix.cells[i][j]
                if i == j:
                    continue
                scanned += 1
                if cell is None or not (0.0 <= cell <= 1.0):
                    violations += 1
                for v in matrix.per_cell_breakdown[(i, j)].values():
                    scanned += 1
                    if not (0.0 <= v <= 1.0):
                        violations += 1
        for prof in profs.values():
            for scores in prof.per_property.values():
                for v in scores:
                    scanned += 1
                    if v is not None and not (0.0 <= v <= 1.0):
                        violations += 1
        from pcporder import result_document

        doc = result_document(
            dataset,
            weights,
            spec,
            seed,
            matrix=matrix,
            profiles=list(profs.values()),
            dropped_rows=0,
        )
        json.dumps(doc, allow_nan=False)  # raises on any NaN/inf

    ok = violations == 0
    _report(
        "range discipline fuzz",
        ok,
        f"{scanned} values scanned across {len(corpus)} datasets, "
        f"{violations} out-of-range, all documents NaN-free",
    )


def test_cli_end_to_end_determinism(penguins_path, tmp_path):
    """Two CLI runs with identical inputs and seed emit byte-identical JSON."""
    outs = [tmp_path / "run1.json", tmp_path / "run2.json"]
    args = [
        "--input",
        str(penguins_path),
        "--columns",
        "bill_len,bill_depth,flipper_len,body_mass,swim_speed,dive_depth",
        "--weights",
        "pos_corr=1.0,neg_corr=1.0,clear_grouping=0.5,fan=0.25",
        "--seed",
        "17",
        "--window",
        "0.5",
    ]
    for out in outs:
        assert cli_main(["compute", *args, "--out", str(out)]) == 0
    a = outs[0].read_bytes()
    b = outs[1].read_bytes()
    ok = a == b and len(a) > 0
    _report(
        "CLI determinism",
        ok,
        f"two runs, {len(a)} bytes each, byte-identical: {a == b}",
    )


def test_wide_dataset_switches_to_greedy():
    """16 axes: automated ordering returns the greedy method in under 2 s."""
    rng = np.random.default_rng(105)
    dataset = _random_dataset(rng, 80, 16, "wide")
    engine = ScoringEngine()
    matrix = engine.matrix(dataset, Weights.uniform(), WindowSpec(0.5), seed=13)
    started = time.perf_counter()
    result = order_tsp(matrix)
    took = time.perf_counter() - started
    ok = (
        result.method == "greedy"
        and sorted(result.order) == list(range(16))
        and took < 2.0
    )
    _report(
        "wide-data greedy switch",
        ok,
        f"16 axes, method={result.method}, ordering took {took * 1000:.0f}ms (< 2000ms)",
    )
