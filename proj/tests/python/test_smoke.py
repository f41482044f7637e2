from fractions import Fraction

import numpy as np
import pytest

import onionlab as ol


def square_with_center():
    return ol.PointCloud(np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]], dtype=float))


def test_peel_square_with_center():
    dg = ol.peel(square_with_center())
    assert dg.n_layers == 2
    assert dg.labels == [1, 1, 1, 1, 2]
    assert dg.layer_of(4) == 2
    assert dg.layers[0].face_counts()[0] == 4


def test_scores_sum_to_face_count():
    cloud = ol.sample_ball_poisson(2, 300.0, seed=4)
    dg = ol.peel(cloud, max_layers=2)
    total = sum((ol.score(i, dg, 1, 0) for i in cloud.ids), Fraction(0))
    assert total == dg.layers[0].face_counts()[0]


def test_sampler_is_deterministic():
    a = ol.sample_ball_poisson(3, 200.0, seed=1, replication=2)
    b = ol.sample_ball_poisson(3, 200.0, seed=1, replication=2)
    assert np.array_equal(a.coords, b.coords)
    assert np.all(np.linalg.norm(a.coords, axis=1) < 1.0)


def test_rescale_round_trip():
    x = [0.1, 0.2, 0.3]
    w = ol.rescale_point(x, 1000.0)
    assert np.allclose(ol.unrescale_point(w, 1000.0), x, atol=1e-12)


def test_parabolic_fixture_layers():
    tree = ol.tree_fixture(3, 8.0, 2)
    depths = ol.tree_fixture_depths(3, 2)
    dg = ol.parabolic_peel(tree, ol.Window(100.0, 100.0, 10.0))
    assert dg.labels == [3 - d for d in depths]


def test_errors_are_python_exceptions():
    with pytest.raises(ol.InvalidInput):
        ol.PointCloud(np.zeros((2, 2)))
    with pytest.raises(ol.Error):
        ol.peel(ol.PointCloud(np.zeros((0, 2))))


def test_small_sweep():
    plan = ol.ExperimentPlan()
    plan.d = 2
    plan.n_max = 1
    plan.lambda_grid = [50.0, 100.0, 200.0, 400.0]
    plan.replications = 20
    plan.threads = 1
    res = ol.run_ball_sweep(plan)
    fit = ol.fit_face_slope(res, 1)
    assert 0.1 < fit.slope < 0.6
    rows = res.rows()
    assert any(r["stat"] == "faces_mean" for r in rows)
    assert ol.estimate_constant_ball(res, 1, 0).value > 0
