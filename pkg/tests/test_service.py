"""HTTP API: the endpoints mirror the library and file formats."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from tropfit.linalg import plucker_from_matrix
from tropfit.serialize import plucker_to_json_dict
from tropfit.service import create_app

EXAMPLE_SPACE = plucker_to_json_dict(
    plucker_from_matrix(np.array([[0.0, 5.0, -5.0, 1.0], [0.0, -5.0, 5.0, -1.0]]))
)


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok"}


class TestProject:
    def test_worked_example(self, client):
        resp = client.post("/project", json={"space": EXAMPLE_SPACE, "points": [[0, 7, 0, 1]]})
        assert resp.status_code == 200, resp.text
        body = resp.json()
        assert body["projections"] == [[0.0, 5.0, 0.0, 1.0]]
        assert body["distances"] == [2.0]
        assert body["total_distance"] == 2.0
        assert body["residuals"][0] <= 1e-9

    def test_matrix_target(self, client):
        resp = client.post("/project", json={
            "matrix": {"rows": [[0, 5, -5, 1], [0, -5, 5, -1]]},
            "points": [[0, 7, 0, 1]],
        })
        assert resp.status_code == 200
        assert resp.json()["distances"] == [2.0]

    def test_curve_target(self, client):
        resp = client.post("/project", json={
            "curve": {"degree": 1, "wxx": "-inf", "wx": 0.0, "wy": 0.0},
            "points": [[0, 3, 1]],
        })
        assert resp.status_code == 200
        assert resp.json()["distances"] == [2.0]

    def test_exactly_one_target(self, client):
        resp = client.post("/project", json={"points": [[0, 1, 2]]})
        assert resp.status_code == 422

    def test_dimension_mismatch_is_client_error(self, client):
        resp = client.post("/project", json={"space": EXAMPLE_SPACE, "points": [[0, 1, 2]]})
        assert resp.status_code == 400
        assert "d=" in resp.json()["detail"]


class TestFit:
    def test_fermat_weber(self, client):
        resp = client.post("/fit/fermat_weber", json={"points": [[1, 2, 3]]})
        assert resp.status_code == 200
        body = resp.json()
        assert body["objective"] == 0.0
        assert body["point"] == [0.0, 1.0, 2.0]

    def test_hyperplane(self, client):
        resp = client.post("/fit/hyperplane", json={
            "points": [[0, 0, -1], [0, -2, 0], [0, 1, 1]],
            "grid": {"lo": -1, "hi": 1, "step": 0.5},
        })
        assert resp.status_code == 200
        body = resp.json()
        assert body["objective"] <= 1e-6
        assert body["omega"] is not None

    def test_stiefel(self, client):
        resp = client.post("/fit/stiefel", json={
            "points": [[0, 2, 5, -1], [0, -1, 1, 3], [0, 1, 2, 0]],
            "m": 2, "restarts": 2, "seed": 1,
        })
        assert resp.status_code == 200
        body = resp.json()
        assert body["plucker"]["d"] == 4 and body["plucker"]["m"] == 2

    def test_curve_infeasible(self, client):
        resp = client.post("/fit/curve", json={
            "points": [[0, 0, 1], [0, 1, 0], [0, 2, 4]], "degree": 2,
        })
        assert resp.status_code == 400
        assert "infeasible" in resp.json()["detail"].lower()

    def test_curve_interpolates(self, client):
        resp = client.post("/fit/curve", json={
            "points": [[0, 0, 0], [0, 1, 3]], "degree": 1,
        })
        assert resp.status_code == 200
        body = resp.json()
        assert body["curve"] == {"degree": 1, "wxx": "-inf", "wx": 0.0, "wy": -2.0}
        assert body["objective"] <= 1e-9


class TestMc:
    def test_h0_distance(self, client):
        resp = client.post("/mc", json={"experiment": "h0-distance", "k": 2, "n": 20000, "seed": 4})
        assert resp.status_code == 200
        body = resp.json()
        assert abs(body["estimate"] - 1.128379) < 0.05

    def test_projection_residual_carries_bound(self, client):
        resp = client.post("/mc", json={
            "experiment": "projection-residual", "space": "A1", "d": 4,
            "sigma": 0.1, "n": 5000, "seed": 1,
        })
        assert resp.status_code == 200
        body = resp.json()
        assert body["estimate"] <= body["extras"]["bound"]


class TestContour:
    def test_grid_shape(self, client):
        resp = client.post("/contour", json={
            "points": [[0, 0, 0]], "mode": "fw",
            "grid": {"lo": -1, "hi": 1, "step": 0.5},
        })
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["axis1"]) == 5 and len(body["values"]) == 5
        assert body["min_value"] == 0.0
        assert body["min_node"] == [0.0, 0.0, 0.0]

    def test_wrong_dim(self, client):
        resp = client.post("/contour", json={"points": [[0, 1, 2, 3]], "mode": "hyperplane"})
        assert resp.status_code == 400
