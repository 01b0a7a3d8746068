import pytest
from fastapi.testclient import TestClient

import api.endpoints as endpoints
import celery_worker
from core.exceptions import CountTimeout
from main import app


@pytest.fixture
def client():
    return TestClient(app)


def _upload(text, name="example.cnf"):
    return {"file": (name, text, "text/plain")}


class _FakeResult:

    def __init__(self, state, info=None, result=None):
        self.state = state
        self.info = info
        self.result = result


class TestEndpoints:

    @staticmethod
    def test_root(client):
        assert client.get("/").json() == {"service": "ProjCount", "modes": ["off", "pre", "dyn"]}

    @staticmethod
    @pytest.mark.parametrize("mode", ["off", "pre", "dyn"])
    def test_sync_count(client, example_text, mode):
        response = client.post("/count", files=_upload(example_text), params={"mode": mode})
        assert response.status_code == 200
        body = response.json()
        assert body["count"] == "4"
        assert body["mode"] == mode

    @staticmethod
    def test_sync_count_rejects_bad_input(client):
        response = client.post("/count", files=_upload("p cnf 1 1\n3 0\n"))
        assert response.status_code == 400
        assert "line 2" in response.json()["detail"]

    @staticmethod
    def test_sync_count_timeout(client, example_text, monkeypatch):
        def slow(*args, **kwargs):
            raise CountTimeout(endpoints.SYNC_COUNT_TIMEOUT)

        monkeypatch.setattr(endpoints, "count", slow)
        response = client.post("/count", files=_upload(example_text))
        assert response.status_code == 408

    @staticmethod
    def test_unknown_mode(client, example_text):
        response = client.post("/count", files=_upload(example_text), params={"mode": "fast"})
        assert response.status_code == 422

    @staticmethod
    def test_upload_starts_a_task(client, example_text, monkeypatch):
        calls = []

        class _Task:
            id = "task-1"

        def delay(*args):
            calls.append(args)
            return _Task()

        monkeypatch.setattr(endpoints.count_dimacs_task, "delay", delay)
        response = client.post("/upload", files=_upload(example_text), params={"mode": "off"})
        assert response.json()["task_id"] == "task-1"
        assert calls == [(example_text.encode(), "example.cnf", "off")]

    @staticmethod
    def test_status_of_unknown_task_is_pending(client):
        assert client.get("/status/no-such-task").json()["state"] == "PENDING"

    @staticmethod
    @pytest.mark.parametrize("fake, expected", [
        (_FakeResult("PROGRESS", info={"current": 20, "total": 100, "status": "Counting..."}),
         {"state": "PROGRESS", "current": 20, "total": 100, "status": "Counting..."}),
        (_FakeResult("SUCCESS", result={"result": {"count": "4"}}),
         {"state": "SUCCESS", "current": 100, "total": 100, "status": "Complete",
          "result": {"result": {"count": "4"}}}),
        (_FakeResult("FAILURE", info=RuntimeError("boom")),
         {"state": "FAILURE", "current": 100, "total": 100, "status": "Failed", "error": "boom"}),
    ])
    def test_status_states(client, monkeypatch, fake, expected):
        monkeypatch.setattr(endpoints, "AsyncResult", lambda task_id, app=None: fake)
        assert client.get("/status/some-task").json() == expected


class TestWorker:

    @staticmethod
    def test_counts_in_process(example_text):
        payload = celery_worker.count_dimacs_task.apply(
            args=(example_text.encode(), "example.cnf", "pre")).get()
        assert payload["result"]["count"] == "4"
        assert payload["result"]["mode"] == "pre"
        assert payload["summary"]["variables"] == 6
        assert payload["summary"]["clauses"] == 11
        assert payload["summary"]["projected"] == 3

    @staticmethod
    def test_parse_error_is_reported():
        payload = celery_worker.count_dimacs_task.apply(args=(b"p cnf 2 2\n1 0\n", "bad.cnf")).get()
        assert "error" in payload and "result" not in payload
        assert "line 1" in payload["error"]

    @staticmethod
    def test_timeout_is_reported(example_text, monkeypatch):
        def slow(*args, **kwargs):
            raise CountTimeout(1.0)

        monkeypatch.setattr(celery_worker, "count", slow)
        payload = celery_worker.count_dimacs_task.apply(args=(example_text.encode(), "example.cnf")).get()
        assert payload["error"] == "TIMEOUT"
