"""Acceptance suite: one test per release criterion, tolerances pinned.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line
per criterion.
"""

import time
from contextlib import contextmanager

import numpy as np

from gridsort.features import (
    Descriptor,
    SEARCH_PROFILE,
    WeightProfile,
    color_histogram,
    combine_all,
    edge_histogram,
    evaluate_map,
    extract_descriptor,
    fit_projection,
    frequency_features,
)
from gridsort.imgscan import ScanRequest
from gridsort.search import QuerySet, rank
from gridsort.sortgrid import EMPTY, GridLayout, SortConfig, sortedness, ssm_sort
from gridsort.store import dequantize, open_store, quantize
from gridsort.service.pipeline import INDEX_FILENAME, index_corpus

from conftest import hue_sweep_images
from oracles import (
    brute_force_rank,
    exhaustive_min_sortedness,
    naive_color_histogram,
    naive_edge_histogram,
    naive_frequency_features,
    pca_eigen_oracle,
    scanline_adjacent_mean_distance,
)


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    print(f"ACCEPTANCE PASS: {name}")


def unit_rows(rng, count, dim):
    rows = rng.normal(size=(count, dim))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def test_layout_invariants_fig3_case():
    """K=28 on 5 columns: bijection, EMPTY only in the last 2 scanline cells."""
    with criterion("layout invariants (28 items on 5 x 6, 200 random feature sets)"):
        started = time.perf_counter()
        for run in range(200):
            feats = np.random.default_rng(run).normal(size=(28, 8))
            layout = ssm_sort(feats, 5, SortConfig(seed=run))
            assert (layout.columns, layout.rows, layout.count) == (5, 6, 28)
            occupied = layout.cells[:28]
            assert np.array_equal(np.sort(occupied), np.arange(28))  # bijection
            assert list(layout.cells[28:]) == [EMPTY, EMPTY]  # tail only
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"took {elapsed:.1f}s, budget 10s"


def test_sorting_quality():
    """Hue sweep beats shuffles by >= 40%; tiny rows near the exhaustive optimum."""
    with criterion("sorting quality (hue sweep ratio <= 0.6; single row within 1.2x)"):
        started = time.perf_counter()

        descriptors = [extract_descriptor(img) for img in hue_sweep_images(64)]
        matrix = combine_all(descriptors, SortConfig().profile)
        finals, shuffles = [], []
        for seed in range(20):
            layout = ssm_sort(matrix, 8, SortConfig(seed=seed))
            finals.append(sortedness(layout, matrix))
            shuffle_order = np.random.default_rng(10_000 + seed).permutation(64)
            cells = np.full(64, EMPTY, dtype=np.int64)
            cells[:64] = shuffle_order
            shuffles.append(sortedness(GridLayout(8, 8, 64, cells), matrix))
        ratio = np.mean(finals) / np.mean(shuffles)
        assert ratio <= 0.6, f"hue-sweep ratio {ratio:.3f} > 0.6"

        # single-row instances against the exhaustive optimum; restarts are
        # the tuned configuration for tiny grids where greedy passes stall
        rng = np.random.default_rng(42)
        for k in range(2, 8):
            for instance in range(5):
                feats = unit_rows(rng, k, 8)
                optimum = exhaustive_min_sortedness(feats, 7)
                layout = ssm_sort(feats, 7, SortConfig(seed=instance, restarts=8))
                achieved = sortedness(layout, feats)
                if optimum > 0:
                    assert achieved <= 1.2 * optimum, (
                        f"K={k} inst={instance}: {achieved:.4f} vs optimum {optimum:.4f}"
                    )
                else:
                    assert achieved == 0.0

        elapsed = time.perf_counter() - started
        assert elapsed < 60.0, f"took {elapsed:.1f}s, budget 60s"


def test_pass_level_monotonicity():
    """No applied swap ever raises the frozen-target objective; final <= initial."""
    with criterion("pass-level monotonicity (100 random instances, zero violations)"):
        rng = np.random.default_rng(77)
        total_events = 0
        for instance in range(100):
            count = int(rng.integers(2, 40))
            columns = int(rng.integers(1, 9))
            feats = unit_rows(rng, count, 6)
            trace = []
            layout = ssm_sort(
                feats, columns, SortConfig(seed=instance, shuffle=False), trace=trace
            )
            for pass_trace in trace:
                for event in pass_trace.events:
                    targets = pass_trace.targets[event.cell_indices]
                    before = ((feats[event.before] - targets) ** 2).sum()
                    after = ((feats[event.after] - targets) ** 2).sum()
                    assert after <= before, "applied permutation raised the objective"
                    total_events += 1
            initial = scanline_adjacent_mean_distance(range(count), feats, columns)
            assert sortedness(layout, feats) <= initial + 1e-12
        assert total_events > 0


def test_search_oracle_equivalence():
    """rank() == brute-force min-over-queries double loop, 300 descriptors."""
    with criterion("search oracle equivalence (300 descriptors, 1-4 queries)"):
        rng = np.random.default_rng(5)

        def unit(d):
            v = rng.normal(size=d)
            return v / np.linalg.norm(v)

        corpus = {
            f"id{i:04d}": Descriptor.from_parts(unit(54), unit(40), unit(21), unit(64))
            for i in range(300)
        }
        ids = list(corpus)
        matrix = combine_all((corpus[i] for i in ids), SEARCH_PROFILE)
        vectors = {image_id: matrix[i].tolist() for i, image_id in enumerate(ids)}

        for q_count in (1, 2, 3, 4):
            queries = tuple(ids[int(i)] for i in rng.choice(300, q_count, replace=False))
            ranked = rank(QuerySet(query_ids=queries, scope_ids=tuple(ids)), corpus)
            oracle = brute_force_rank(queries, ids, vectors)
            assert [i for i, _ in ranked] == [i for i, _ in oracle], "order differs"
            for (_, got), (_, want) in zip(ranked, oracle):
                assert abs(got - want) <= 1e-9


def test_caching_speedup(fixture_corpus, tmp_path):
    """Second indexing run >= 10x faster feature acquisition, zero decodes."""
    with criterion("caching speedup (300-image corpus, >= 10x, zero decodes)"):
        cache = tmp_path / "cache"
        cache.mkdir()
        request = ScanRequest(roots=(str(fixture_corpus),))

        store = open_store(cache / INDEX_FILENAME)
        first = index_corpus(request, store)
        store.close()
        assert first.stats.computed == 300 and first.stats.decodes == 300

        store = open_store(cache / INDEX_FILENAME)
        second = index_corpus(request, store)
        store.close()
        assert second.stats.decodes == 0, "cached run decoded pixels"
        assert second.stats.cache_hits == 300
        speedup = first.stats.feature_seconds / max(second.stats.feature_seconds, 1e-9)
        assert speedup >= 10.0, f"speedup {speedup:.1f}x < 10x"

        # coherence: both runs expose identical dequantized descriptors
        for image_id, desc in first.descriptors.items():
            assert desc.same_as(second.descriptors[image_id])


def test_quantization_fidelity():
    """int8 round-trip error small enough to preserve clear nearest neighbors."""
    with criterion("quantization fidelity (1000 unit vectors; top-1 gap rule)"):
        rng = np.random.default_rng(11)
        vectors = unit_rows(rng, 1000, 115)
        restored = np.empty_like(vectors)
        errors = []
        for i, vec in enumerate(vectors):
            scale, values = quantize(vec)
            restored[i] = dequantize(scale, values)
            errors.append(np.linalg.norm(restored[i] - vec))
        errors = np.asarray(errors)
        assert errors.mean() < 1e-2, f"mean round-trip error {errors.mean():.4f}"
        # per-vector bound that makes the 3e-2 gap rule a guarantee
        assert errors.max() < 1.5e-2, f"max round-trip error {errors.max():.4f}"

        queries, corpus = vectors[:200], vectors[200:]
        q_queries, q_corpus = restored[:200], restored[200:]
        checked = 0
        for i in range(200):
            full = np.linalg.norm(corpus - queries[i], axis=1)
            order = np.argsort(full)
            gap = full[order[1]] - full[order[0]]
            if gap <= 3e-2:
                continue
            quantized = np.linalg.norm(q_corpus - q_queries[i], axis=1)
            assert int(np.argmin(quantized)) == int(order[0]), (
                f"query {i}: top-1 changed despite gap {gap:.3f}"
            )
            checked += 1
        assert checked >= 25  # the gap rule was actually exercised


def test_pca_correctness():
    """Explained variance matches an independent eigensolver; basis orthonormal."""
    with criterion("PCA correctness (200 x 128 Gaussian, 1e-5 relative)"):
        rng = np.random.default_rng(23)
        rows = rng.normal(size=(200, 128))
        model = fit_projection(rows)
        eigenvalues, _ = pca_eigen_oracle(rows)
        np.testing.assert_allclose(
            model.explained_variance, eigenvalues[:64], rtol=1e-5, atol=1e-12
        )
        gram = model.basis @ model.basis.T
        np.testing.assert_allclose(gram, np.eye(64), atol=1e-6)
        assert np.all(np.diff(model.explained_variance) <= 1e-12)


def test_map_sanity():
    """Perfect clusters score 1.0; informative embeddings beat w_embed = 0."""
    with criterion("mAP sanity (clusters = 1.0; embed weight helps)"):
        rng = np.random.default_rng(31)

        def unit(v):
            v = np.asarray(v, dtype=float)
            return v / np.linalg.norm(v)

        clustered = []
        for label, axis in (("a", 0), ("b", 1), ("c", 2)):
            for _ in range(5):
                embed = np.zeros(16)
                embed[axis] = 1.0
                embed += rng.normal(scale=0.02, size=16)
                clustered.append(
                    (
                        label,
                        Descriptor.from_parts(
                            unit(np.ones(54)), unit(np.ones(40)), unit(np.ones(21)),
                            unit(embed),
                        ),
                    )
                )
        perfect = evaluate_map(clustered, WeightProfile(1.0, 0.0, 0.0, 0.0))
        assert abs(perfect - 1.0) <= 1e-9

        noisy = []
        for label, axis in (("a", 0), ("b", 1)):
            for _ in range(6):
                embed = np.zeros(16)
                embed[axis] = 1.0
                embed += rng.normal(scale=0.05, size=16)
                noisy.append(
                    (
                        label,
                        Descriptor.from_parts(
                            unit(rng.normal(size=54)),
                            unit(rng.normal(size=40)),
                            unit(rng.normal(size=21)),
                            unit(embed),
                        ),
                    )
                )
        with_embed = evaluate_map(noisy, WeightProfile(0.85, 0.07, 0.05, 0.03))
        without_embed = evaluate_map(noisy, WeightProfile(0.0, 0.5, 0.3, 0.2))
        assert with_embed > without_embed


def test_descriptor_oracles():
    """Each hand-crafted part matches its brute-force twin within 1e-6."""
    with criterion("descriptor oracles (50 random images each, 1e-6)"):
        rng = np.random.default_rng(47)
        for _ in range(50):
            h = int(rng.integers(4, 40))
            w = int(rng.integers(4, 40))
            img = rng.integers(0, 256, (h, w, 3)).astype(np.uint8)
            np.testing.assert_allclose(
                color_histogram(img), naive_color_histogram(img), atol=1e-6
            )
            np.testing.assert_allclose(
                edge_histogram(img), naive_edge_histogram(img), atol=1e-6
            )
        for _ in range(50):
            img = rng.integers(0, 256, (32, 32, 3)).astype(np.uint8)
            np.testing.assert_allclose(
                frequency_features(img), naive_frequency_features(img), atol=1e-6
            )
