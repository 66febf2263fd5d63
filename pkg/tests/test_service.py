"""HTTP service: endpoint contracts, validation codes, map downsampling."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from novact.codec import decode_array
from novact.explorer import GridSpec, home_input, sweep
from novact.network import PBPoint, generate
from novact.service import build_app


@pytest.fixture(scope="module")
def sweep_cells(tiny_checkpoint):
    result = sweep(tiny_checkpoint, GridSpec(resolution=8), seed=0,
                   iterations=3, sample_size=4)
    return result.cells


@pytest.fixture(scope="module")
def client(tiny_checkpoint, sweep_cells):
    app = build_app(tiny_checkpoint, sweep_cells=sweep_cells, sweep_resolution=8,
                    max_steps=120)
    return TestClient(app)


@pytest.fixture(scope="module")
def bare_client(tiny_checkpoint):
    return TestClient(build_app(tiny_checkpoint, max_steps=120))


class TestInfo:
    def test_echoes_checkpoint(self, client, tiny_checkpoint):
        doc = client.get("/api/info").json()
        assert doc["gamma"] == tiny_checkpoint.config.gamma
        assert doc["joint_names"] == list(tiny_checkpoint.training_set.joint_names)
        assert doc["max_steps"] == 120
        labels = [p["label"] for p in doc["patterns"]]
        assert labels == list(tiny_checkpoint.params.pb_table.labels)
        expected = np.tanh(tiny_checkpoint.params.pb_table.rho)
        np.testing.assert_allclose(
            [p["pb"] for p in doc["patterns"]], expected, atol=1e-15
        )


class TestGenerate:
    def test_identical_bodies_for_identical_requests(self, client):
        a = client.post("/api/generate", json={"pb": [0.0, 0.0], "steps": 30})
        b = client.post("/api/generate", json={"pb": [0.0, 0.0], "steps": 30})
        assert a.status_code == b.status_code == 200
        assert a.content == b.content

    def test_values_match_library_generate(self, client, tiny_checkpoint):
        steps = 25
        pb = [0.31, -0.22]
        doc = client.post("/api/generate", json={"pb": pb, "steps": steps}).json()
        seq, _ = generate(
            tiny_checkpoint.params,
            PBPoint(p=np.array(pb)),
            steps=steps,
            gamma=1.0,
            initial_input=home_input(tiny_checkpoint),
        )
        expected = decode_array(seq.values, tiny_checkpoint.codec)
        assert np.array(doc["trajectory"]).shape == (steps, 8)
        np.testing.assert_array_equal(np.array(doc["trajectory"]), expected)

    def test_learned_pb_labels_its_pattern(self, client, tiny_checkpoint):
        table = tiny_checkpoint.params.pb_table
        pb = np.tanh(table.rho[0]).tolist()
        doc = client.post("/api/generate", json={"pb": pb}).json()
        assert doc["nearest"] == table.labels[0]
        assert doc["class"] in ("appropriate-learned", "appropriate-unlearned")

    def test_single_step(self, client):
        doc = client.post("/api/generate", json={"pb": [0.1, 0.1], "steps": 1}).json()
        assert len(doc["trajectory"]) == 1

    def test_pb_out_of_range(self, client):
        resp = client.post("/api/generate", json={"pb": [2.0, 0.0]})
        assert resp.status_code == 400
        assert resp.json()["error"] == "pb_out_of_range"

    def test_steps_out_of_range(self, client):
        resp = client.post("/api/generate", json={"pb": [0.0, 0.0], "steps": 0})
        assert resp.status_code == 400
        assert resp.json()["error"] == "steps_out_of_range"
        resp = client.post("/api/generate", json={"pb": [0.0, 0.0], "steps": 121})
        assert resp.json()["error"] == "steps_out_of_range"

    def test_malformed_json(self, client):
        resp = client.post(
            "/api/generate", content=b"{not json", headers={"content-type": "application/json"}
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "bad_request"

    def test_wrong_pb_arity(self, client):
        resp = client.post("/api/generate", json={"pb": [0.0]})
        assert resp.status_code == 400
        assert resp.json()["error"] == "bad_request"


class TestMap:
    def test_full_resolution_passthrough(self, client, sweep_cells):
        doc = client.get("/api/map").json()
        assert doc["resolution"] == 8
        assert len(doc["cells"]) == 64
        for cell, rec in zip(doc["cells"], sweep_cells):
            assert cell["class"] == rec.kind
            assert cell["nearest"] == rec.nearest

    def test_downsample_majority(self, client, sweep_cells):
        doc = client.get("/api/map", params={"resolution": 4}).json()
        assert doc["resolution"] == 4
        assert len(doc["cells"]) == 16
        # block (0,0) aggregates sweep cells (0,0), (1,0), (0,1), (1,1)
        block = [sweep_cells[iy * 8 + ix] for iy in (0, 1) for ix in (0, 1)]
        kinds = [c.kind for c in block]
        winner = doc["cells"][0]["class"]
        assert kinds.count(winner) == max(kinds.count(k) for k in set(kinds))

    def test_oversized_resolution_rejected(self, client):
        resp = client.get("/api/map", params={"resolution": 16})
        assert resp.status_code == 400

    def test_no_sweep_configured(self, bare_client):
        resp = bare_client.get("/api/map")
        assert resp.status_code == 404
        assert resp.json()["error"] == "no_sweep"


class TestStatelessness:
    def test_interleaved_requests_equal_fresh_requests(self, client):
        first = client.post("/api/generate", json={"pb": [0.5, 0.5], "steps": 10})
        client.get("/api/info")
        client.get("/api/map")
        second = client.post("/api/generate", json={"pb": [0.5, 0.5], "steps": 10})
        assert first.content == second.content
