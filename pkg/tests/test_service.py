from __future__ import annotations

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from pcporder.service import create_app


def _csv(rows: int = 60, cols: int = 4, seed: int = 61) -> str:
    rng = np.random.default_rng(seed)
    names = [f"c{k}" for k in range(cols)]
    lines = [",".join(names)]
    for _ in range(rows):
        lines.append(",".join(f"{v:.8f}" for v in rng.random(cols)))
    return "\n".join(lines) + "\n"


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def dataset_id(client):
    r = client.post("/datasets?name=unit", content=_csv())
    assert r.status_code == 201
    return r.json()["dataset_id"]


MATRIX_PARAMS = {"weights": "pos_corr=1.0,fan=0.5", "window": 0.5, "seed": 7}


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_upload_raw_csv(client):
    r = client.post("/datasets?name=demo", content=_csv(rows=30, cols=3))
    assert r.status_code == 201
    body = r.json()
    assert body["dims"] == ["c0", "c1", "c2"]
    assert body["row_count"] == 30
    assert body["dropped_rows"] == 0
    assert len(body["dataset_id"]) == 32


def test_upload_multipart_uses_filename(client):
    r = client.post(
        "/datasets", files={"file": ("colony.csv", _csv(rows=20, cols=2), "text/csv")}
    )
    assert r.status_code == 201
    assert r.json()["row_count"] == 20


def test_upload_multipart_without_file_field(client):
    r = client.post("/datasets", files={"other": ("x.csv", "a,b\n1,2\n", "text/csv")})
    assert r.status_code == 422
    assert r.json()["code"] == "invalid_upload"


def test_upload_with_column_selection(client):
    text = "species,a,b\nfoo,1,2\nbar,3,4\n"
    r = client.post("/datasets", params={"columns": "a,b"}, content=text)
    assert r.status_code == 201
    assert r.json()["dims"] == ["a", "b"]


def test_upload_rejects_textual_column(client):
    r = client.post("/datasets", content="a,b\n1,x\n2,y\n")
    assert r.status_code == 400
    body = r.json()
    assert body["code"] == "non_numeric_column"
    assert body["detail"]["column"] == "b"


def test_upload_rejects_too_small(client):
    r = client.post("/datasets", content="a,b\n1,2\n")
    assert r.status_code == 400
    assert r.json()["code"] == "empty_dataset"


def test_rows_endpoint(client, dataset_id):
    r = client.get(f"/datasets/{dataset_id}/rows", params={"indices": "0,2"})
    assert r.status_code == 200
    body = r.json()
    assert body["indices"] == [0, 2]
    assert len(body["rows"]) == 2
    assert len(body["rows"][0]) == 4
    assert all(0.0 <= v <= 1.0 for row in body["rows"] for v in row)


def test_rows_rejects_bad_indices(client, dataset_id):
    assert (
        client.get(f"/datasets/{dataset_id}/rows", params={"indices": "0,x"}).json()["code"]
        == "invalid_indices"
    )
    r = client.get(f"/datasets/{dataset_id}/rows", params={"indices": "99999"})
    assert r.status_code == 422
    assert r.json()["code"] == "invalid_indices"


def test_matrix_document_shape(client, dataset_id):
    r = client.get(f"/datasets/{dataset_id}/matrix", params=MATRIX_PARAMS)
    assert r.status_code == 200
    body = r.json()
    assert list(body) == ["dims", "window_spec", "weights", "seed", "matrix", "dropped_rows"]
    cells = body["matrix"]["cells"]
    assert len(cells) == 4 and all(len(row) == 4 for row in cells)
    for i in range(4):
        assert cells[i][i] is None
        for j in range(4):
            if i != j:
                assert 0.0 <= cells[i][j] <= 1.0
    assert body["matrix"]["breakdown"][0][1]["pos_corr"] >= 0.0
    assert body["weights"]["pos_corr"] == 1.0
    assert body["weights"]["neg_corr"] == 0.0


def test_matrix_deterministic(client, dataset_id):
    a = client.get(f"/datasets/{dataset_id}/matrix", params=MATRIX_PARAMS)
    b = client.get(f"/datasets/{dataset_id}/matrix", params=MATRIX_PARAMS)
    assert a.content == b.content


def test_matrix_unknown_dataset(client):
    r = client.get("/datasets/missing/matrix", params=MATRIX_PARAMS)
    assert r.status_code == 404
    assert r.json()["code"] == "unknown_dataset"


@pytest.mark.parametrize(
    "overrides,code",
    [
        ({"weights": "bogus=1"}, "invalid_weights"),
        ({"weights": "pos_corr=0.0"}, "no_active_properties"),
        ({"window": 0.0}, "invalid_window"),
        ({"window": 1.5}, "invalid_window"),
        ({"seed": -3}, "invalid_seed"),
    ],
)
def test_matrix_parameter_errors(client, dataset_id, overrides, code):
    params = dict(MATRIX_PARAMS)
    params.update(overrides)
    r = client.get(f"/datasets/{dataset_id}/matrix", params=params)
    assert r.status_code == 422
    assert r.json()["code"] == code


def test_matrix_missing_seed_rejected(client, dataset_id):
    r = client.get(
        f"/datasets/{dataset_id}/matrix",
        params={"weights": "pos_corr=1.0", "window": 0.5},
    )
    assert r.status_code == 422


def test_profile_endpoint(client, dataset_id):
    r = client.get(
        f"/datasets/{dataset_id}/profile",
        params={"i": 0, "j": 1, "window": 0.5, "seed": 7},
    )
    assert r.status_code == 200
    prof = r.json()["profile"]
    assert prof["pair"] == [0, 1]
    n_windows = len(prof["window_bounds"])
    assert len(prof["member_rows"]) == n_windows
    assert prof["window_bounds"][-1][1] == 1.0
    for key, scores in prof["per_property"].items():
        assert len(scores) == n_windows
        for v in scores:
            assert v is None or 0.0 <= v <= 1.0
    # member rows index the uploaded dataset
    flat = [r_ for rows in prof["member_rows"] for r_ in rows]
    assert flat and all(0 <= r_ < 60 for r_ in flat)


def test_profile_pair_errors(client, dataset_id):
    r = client.get(
        f"/datasets/{dataset_id}/profile",
        params={"i": 0, "j": 9, "window": 0.5, "seed": 7},
    )
    assert r.status_code == 400
    assert r.json()["code"] == "unknown_axis"
    r = client.get(
        f"/datasets/{dataset_id}/profile",
        params={"i": 1, "j": 1, "window": 0.5, "seed": 7},
    )
    assert r.status_code == 400
    assert r.json()["code"] == "invalid_pair"


def test_order_endpoint(client, dataset_id):
    r = client.post(f"/datasets/{dataset_id}/order", params=MATRIX_PARAMS)
    assert r.status_code == 200
    body = r.json()
    ordering = body["ordering"]
    assert sorted(ordering["order"]) == [0, 1, 2, 3]
    assert ordering["method"] == "branch_and_bound"
    assert len(body["profiles"]) == 3
    for k, prof in enumerate(body["profiles"]):
        assert prof["pair"] == [ordering["order"][k], ordering["order"][k + 1]]
    donut = body["donut"]
    assert set(donut) == set(body["weights"])
    assert sum(donut.values()) == pytest.approx(1.0, abs=1e-9)
    # inactive properties cannot claim donut share
    assert donut["neg_corr"] == 0.0


def test_order_greedy_mode(client, dataset_id):
    r = client.post(
        f"/datasets/{dataset_id}/order", params={**MATRIX_PARAMS, "mode": "greedy"}
    )
    assert r.status_code == 200
    assert r.json()["ordering"]["method"] == "greedy"


def test_order_invalid_mode(client, dataset_id):
    r = client.post(
        f"/datasets/{dataset_id}/order", params={**MATRIX_PARAMS, "mode": "magic"}
    )
    assert r.status_code == 422
    assert r.json()["code"] == "invalid_mode"


# ---------------------------------------------------------------- async jobs


def _poll_job(client, job_id, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        r = client.get(f"/jobs/{job_id}")
        assert r.status_code == 200
        body = r.json()
        if body["status"] != "running":
            return body
        time.sleep(0.05)
    raise AssertionError("job did not finish in time")


def test_matrix_offloads_when_work_exceeds_threshold(dataset_id):
    sync_client = TestClient(create_app())
    async_client = TestClient(create_app(max_sync_work=1))
    r = sync_client.post("/datasets?name=unit", content=_csv())
    ds_sync = r.json()["dataset_id"]
    r = async_client.post("/datasets?name=unit", content=_csv())
    ds_async = r.json()["dataset_id"]

    direct = sync_client.get(f"/datasets/{ds_sync}/matrix", params=MATRIX_PARAMS)
    assert direct.status_code == 200

    accepted = async_client.get(f"/datasets/{ds_async}/matrix", params=MATRIX_PARAMS)
    assert accepted.status_code == 202
    job = _poll_job(async_client, accepted.json()["job_id"])
    assert job["status"] == "done"
    assert job["result"] == direct.json()


def test_order_offloads_and_matches_sync(dataset_id):
    sync_client = TestClient(create_app())
    async_client = TestClient(create_app(max_sync_work=1))
    text = _csv(rows=40, cols=3)
    ds_sync = sync_client.post("/datasets", content=text).json()["dataset_id"]
    ds_async = async_client.post("/datasets", content=text).json()["dataset_id"]

    direct = sync_client.post(f"/datasets/{ds_sync}/order", params=MATRIX_PARAMS)
    accepted = async_client.post(f"/datasets/{ds_async}/order", params=MATRIX_PARAMS)
    assert accepted.status_code == 202
    job = _poll_job(async_client, accepted.json()["job_id"])
    assert job["status"] == "done"
    assert job["result"] == direct.json()


def test_unknown_job(client):
    r = client.get("/jobs/nope")
    assert r.status_code == 404
    assert r.json()["code"] == "unknown_job"


def test_parameter_errors_stay_synchronous_on_async_app():
    async_client = TestClient(create_app(max_sync_work=1))
    ds = async_client.post("/datasets", content=_csv(rows=30, cols=3)).json()["dataset_id"]
    r = async_client.get(
        f"/datasets/{ds}/matrix", params={**MATRIX_PARAMS, "weights": "bogus=1"}
    )
    assert r.status_code == 422


# ---------------------------------------------------------------- sessions


def _session_body(dataset_id, **overrides):
    body = {
        "dataset_id": dataset_id,
        "seed": 7,
        "weights": "pos_corr=1.0,fan=0.5",
        "window": 0.5,
    }
    body.update(overrides)
    return body


def test_session_flow(client, dataset_id):
    r = client.post("/sessions", json=_session_body(dataset_id))
    assert r.status_code == 201
    payload = r.json()
    sid = payload["session"]["id"]
    assert payload["session"]["prefix"] == []
    assert payload["session"]["dataset_id"] == dataset_id
    assert len(payload["matrix"]["cells"]) == 4

    r = client.post(f"/sessions/{sid}/choose", json={"i": 1, "j": 3})
    assert r.status_code == 200
    assert r.json()["session"]["prefix"] == [1, 3]
    open_cells = [
        (i, j)
        for i, row in enumerate(r.json()["matrix"]["cells"])
        for j, c in enumerate(row)
        if c is not None
    ]
    assert open_cells == [(3, 0), (3, 2)]

    r = client.post(f"/sessions/{sid}/weights", json={"weights": {"fan": 1.0}})
    assert r.status_code == 200
    assert r.json()["session"]["prefix"] == [1, 3]
    assert r.json()["session"]["weights"]["fan"] == 1.0

    r = client.post(f"/sessions/{sid}/undo")
    assert r.status_code == 200
    assert r.json()["session"]["prefix"] == []

    r = client.post(f"/sessions/{sid}/choose", json={"i": 0, "j": 2})
    assert r.status_code == 200

    r = client.post(f"/sessions/{sid}/finalize")
    assert r.status_code == 200
    body = r.json()
    assert body["ordering"]["order"][:2] == [0, 2]
    assert sorted(body["ordering"]["order"]) == [0, 1, 2, 3]
    assert body["ordering"]["method"] == "greedy"
    assert len(body["profiles"]) == 3
    assert sum(body["donut"].values()) == pytest.approx(1.0, abs=1e-9)


def test_session_weights_accepts_object_and_string(client, dataset_id):
    a = client.post("/sessions", json=_session_body(dataset_id, weights={"pos_corr": 1.0}))
    b = client.post("/sessions", json=_session_body(dataset_id, weights="pos_corr=1.0"))
    assert a.status_code == b.status_code == 201
    assert a.json()["matrix"]["cells"] == b.json()["matrix"]["cells"]


def test_session_validation_errors(client, dataset_id):
    assert client.post("/sessions", json={"seed": 1}).status_code == 422
    r = client.post("/sessions", json=_session_body(dataset_id, seed=None))
    assert r.status_code == 422
    r = client.post("/sessions", json={"dataset_id": dataset_id, "weights": "pos_corr=1"})
    assert r.status_code == 422
    assert r.json()["code"] == "invalid_seed"
    r = client.post("/sessions", json=_session_body(dataset_id, window="wide"))
    assert r.status_code == 422
    assert r.json()["code"] == "invalid_body"
    r = client.post("/sessions", json=_session_body("missing-ds"))
    assert r.status_code == 404


def test_session_choose_errors(client, dataset_id):
    sid = client.post("/sessions", json=_session_body(dataset_id)).json()["session"]["id"]
    r = client.post(f"/sessions/{sid}/choose", json={"i": 0, "j": "x"})
    assert r.status_code == 422
    assert r.json()["code"] == "invalid_indices"
    client.post(f"/sessions/{sid}/choose", json={"i": 0, "j": 1})
    r = client.post(f"/sessions/{sid}/choose", json={"i": 0, "j": 2})
    assert r.status_code == 400
    assert r.json()["code"] == "broken_chain"
    r = client.post(f"/sessions/{sid}/choose", json={"i": 1, "j": 0})
    assert r.status_code == 400
    assert r.json()["code"] == "axis_already_used"
    r = client.post(f"/sessions/{sid}/undo")
    assert r.status_code == 200
    r = client.post(f"/sessions/{sid}/undo")
    assert r.status_code == 400
    assert r.json()["code"] == "nothing_to_undo"


def test_unknown_session(client):
    for path in ["choose", "weights", "undo", "finalize"]:
        r = client.post(f"/sessions/ghost/{path}", json={"i": 0, "j": 1, "weights": "fan=1"})
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_session"


def test_matrix_cells_match_session_initial_matrix(client, dataset_id):
    direct = client.get(f"/datasets/{dataset_id}/matrix", params=MATRIX_PARAMS)
    sess = client.post("/sessions", json=_session_body(dataset_id))
    assert direct.json()["matrix"]["cells"] == sess.json()["matrix"]["cells"]
