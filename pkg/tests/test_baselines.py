import numpy as np
import pytest

import oracles
from odc.baselines import (
    BaselineConfig,
    Codebook,
    _som_sweeps,
    classify_codebook,
    fcm_memberships,
    fcm_train,
    kmeans_inertia,
    kmeans_train,
    som_train,
)
from odc.core import Dataset, initial_prototypes, presentation_order, spawn_rngs
from odc.synthetic import gaussian_blobs


def near_all(centroids, means, tol=0.05):
    return all(np.min(np.linalg.norm(centroids - m, axis=1)) < tol for m in means)


# ---------------------------------------------------------------- k-means

def test_kmeans_recovers_distinct_points():
    pts = np.array([[0.1, 0.2], [0.7, 0.7], [0.3, 0.9], [0.95, 0.05]])
    cb = kmeans_train(Dataset(pts), BaselineConfig(n_outputs=4, seed=3))
    assert sorted(map(tuple, cb.centroids)) == sorted(map(tuple, pts))


def test_kmeans_two_blobs():
    data, means = gaussian_blobs(1000, n_blobs=2, dim=2, seed=8)
    cb = kmeans_train(data, BaselineConfig(n_outputs=2, seed=1))
    assert near_all(cb.centroids, means)


def test_kmeans_single_output_is_mean():
    data, _ = gaussian_blobs(300, seed=2)
    cb = kmeans_train(data, BaselineConfig(n_outputs=1))
    assert np.allclose(cb.centroids[0], data.points.mean(axis=0), atol=1e-12)


def test_kmeans_inertia_non_increasing():
    data, _ = gaussian_blobs(900, n_blobs=3, seed=6)
    hist = []
    kmeans_train(data, BaselineConfig(n_outputs=8, seed=2), history=hist)
    assert len(hist) >= 2
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


def test_kmeans_too_many_outputs():
    with pytest.raises(ValueError):
        kmeans_train(Dataset(np.zeros((3, 2))), BaselineConfig(n_outputs=4))


def test_kmeans_deterministic():
    data, _ = gaussian_blobs(500, seed=1)
    a = kmeans_train(data, BaselineConfig(n_outputs=5, seed=4))
    b = kmeans_train(data, BaselineConfig(n_outputs=5, seed=4))
    assert np.array_equal(a.centroids, b.centroids)


def test_kmeans_empty_cluster_reseeded():
    # duplicates make k-means++ pick the same point twice, leaving one cluster empty
    pts = np.array([[0.0, 0.0]] * 50 + [[1.0, 1.0]] * 50 + [[0.0, 1.0]])
    cb = kmeans_train(Dataset(pts), BaselineConfig(n_outputs=3, seed=0))
    assert kmeans_inertia(Dataset(pts), cb.centroids) == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------- fuzzy c-means

def test_fcm_symmetric_pair_midpoint_memberships():
    u = fcm_memberships(np.array([[0.5]]), np.array([[0.2], [0.8]]), 2.0)
    assert u[0] == pytest.approx([0.5, 0.5], abs=1e-15)


@pytest.mark.parametrize("variant", ["classical", "max_entropy"])
def test_fcm_single_centroid_converges_to_mean(variant):
    data, _ = gaussian_blobs(300, seed=5)
    cfg = BaselineConfig(n_outputs=1, max_iters=200 if variant == "classical" else 60, eta0=0.5)
    cb = fcm_train(data, cfg, variant)
    tol = 1e-9 if variant == "classical" else 0.02
    assert np.allclose(cb.centroids[0], data.points.mean(axis=0), atol=tol)


def test_fcm_symmetric_pair_classical():
    cb = fcm_train(Dataset(np.array([[0.2], [0.8]])), BaselineConfig(n_outputs=2), "classical")
    assert sorted(cb.centroids[:, 0].tolist()) == pytest.approx([0.2, 0.8], abs=1e-9)


def test_fcm_membership_rows_sum_to_one():
    rng = np.random.default_rng(0)
    x = rng.random((200, 3))
    c = rng.random((6, 3))
    c[0] = x[0]
    u = fcm_memberships(x, c, 2.0)
    assert np.all(np.abs(u.sum(axis=1) - 1.0) <= 1e-12)
    assert u[0, 0] == 1.0


def test_maxent_one_sweep_matches_hand_loop():
    data, _ = gaussian_blobs(90, seed=9)
    cfg = BaselineConfig(n_outputs=4, max_iters=1, eta0=0.1, seed=12)
    cb = fcm_train(data, cfg, "max_entropy")
    init_rng, order_rng, _ = spawn_rngs(12, 3)
    w = initial_prototypes(data, 4, init_rng).tolist()
    order = presentation_order(len(data), order_rng)
    for t, i in enumerate(order):
        x = data.points[i].tolist()
        g = oracles.gibbs_memberships(x, w)
        k = oracles.argmax_first(g)
        eta = 0.1 * (1 - t / len(data))
        w[k] = [wk + eta * g[k] ** 2 * (xj - wk) for wk, xj in zip(w[k], x)]
    assert np.allclose(cb.centroids, w, rtol=0, atol=1e-12)


def test_fcm_unknown_variant():
    with pytest.raises(ValueError):
        fcm_train(Dataset(np.zeros((3, 1)) + [[0.0], [0.5], [1.0]]), BaselineConfig(n_outputs=2), "gk")


# ---------------------------------------------------------------- SOM

def test_som_collapsed_neighbourhood_is_online_kmeans():
    rng = np.random.default_rng(1)
    pts = rng.random((30, 2))
    w0 = rng.random((4, 2))
    order = rng.permutation(30).astype(np.int64)
    w = w0.copy()
    _som_sweeps(w, pts, order, 0.2, 1e-13, 2)
    ref = w0.tolist()
    total = 60
    for t in range(total):
        x = pts[order[t % 30]].tolist()
        k = oracles.argmin_first([oracles.distance(x, c) for c in ref])
        eta = 0.2 * (1 - t / total)
        ref[k] = [c + eta * (xj - c) for c, xj in zip(ref[k], x)]
    assert np.allclose(w, ref, atol=1e-12)


def test_som_covers_three_blobs():
    data, means = gaussian_blobs(1500, seed=3)
    cb = som_train(data, BaselineConfig(n_outputs=13, max_iters=30, seed=3))
    assert near_all(cb.centroids, means)
    assert np.all((cb.centroids >= 0) & (cb.centroids <= 1))


def test_som_deterministic():
    data, _ = gaussian_blobs(300, seed=3)
    cfg = BaselineConfig(n_outputs=5, max_iters=5, seed=7)
    assert np.array_equal(som_train(data, cfg).centroids, som_train(data, cfg).centroids)


def test_som_quantization_error_trend():
    data, _ = gaussian_blobs(600, seed=4)
    errs = [kmeans_inertia(data, som_train(data, BaselineConfig(n_outputs=6, max_iters=n, seed=1)).centroids)
            for n in (1, 4, 16)]
    assert errs[0] >= errs[1] >= errs[2]


# ---------------------------------------------------------------- nearest centroid

def test_classify_codebook_examples():
    cb = Codebook([[0.0, 0.0], [0.4, 0.4], [0.9, 0.1]], "KM")
    assert classify_codebook([0.9, 0.1], cb) == 2
    assert classify_codebook([0.2, 0.2], cb) == 0  # equidistant from 0 and 1
    with pytest.raises(ValueError):
        classify_codebook([0.1], cb)


def test_classify_codebook_matches_oracle():
    rng = np.random.default_rng(13)
    c = rng.random((9, 3))
    cb = Codebook(c, "KO")
    x = rng.random((1000, 3))
    expected = [oracles.argmin_first([oracles.distance(p, q) for q in c.tolist()]) for p in x.tolist()]
    assert cb.classify_many(x).tolist() == expected


def test_config_validation_names_field():
    with pytest.raises(ValueError, match="fcm_fuzzifier"):
        BaselineConfig(fcm_fuzzifier=1.0).validate()
    with pytest.raises(ValueError):
        Codebook([[0.0]], "XX")
