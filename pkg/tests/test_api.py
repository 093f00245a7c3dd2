import json
import urllib.error
import urllib.request

import pytest

from repairbot.botd.api import ApiServer, PortInUse, serve_api
from repairbot.botd.config import BotConfig
from repairbot.botd.pipeline import Pipeline
from repairbot.forge import seed_corpus


def get(base, path):
    try:
        with urllib.request.urlopen(base + path) as response:
            return response.status, json.loads(response.read().decode())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode())


def post(base, path, payload):
    data = json.dumps(payload).encode()
    request = urllib.request.Request(base + path, data=data, method="POST",
                                     headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, json.loads(response.read().decode())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read().decode())


@pytest.fixture(scope="module")
def served(tmp_path_factory):
    """A human-mode run: patches wait in the queue for API decisions."""
    root = tmp_path_factory.mktemp("forge")
    seed_corpus(root, 8, 0.5, 0.0, seed=41, human_delay_range=(500, 500))
    pipeline = Pipeline(BotConfig(forge_dir=str(root), review_mode="human"))
    pipeline.run()
    server = ApiServer(pipeline.curator, port=0).start()
    yield server.address, pipeline
    server.stop()


def test_queue_lists_pending_patches(served):
    base, pipeline = served
    status, queue = get(base, "/api/queue")
    assert status == 200
    assert len(queue) == len(pipeline.curator.review_queue())
    assert all(p["status"] == "pending_review" for p in queue)


def test_patch_detail_includes_diff_and_report(served):
    base, pipeline = served
    patch_id = pipeline.curator.review_queue()[0].patch_id
    status, payload = get(base, f"/api/patches/{patch_id}")
    assert status == 200
    assert payload["diff"].startswith("--- a/")
    assert payload["report"]["verdicts"]
    assert payload["failing_tests"]
    assert payload["human_fix_at"] is not None


def test_unknown_patch_404(served):
    base, _ = served
    status, payload = get(base, "/api/patches/nope")
    assert status == 404
    assert "error" in payload


def test_decision_roundtrip_and_conflict(served):
    base, pipeline = served
    queue_before = pipeline.curator.review_queue()
    target = queue_before[0].patch_id

    status, payload = post(base, f"/api/patches/{target}/decision",
                           {"decision": "approve", "reviewer": "tester"})
    assert status == 200
    assert payload["pr_id"] is not None
    assert payload["status"] == "merged"
    assert payload["pr_id"] in pipeline.curator.forge.pull_requests

    status, payload = post(base, f"/api/patches/{target}/decision",
                           {"decision": "approve"})
    assert status == 409

    status, queue_after = get(base, "/api/queue")
    assert len(queue_after) == len(queue_before) - 1


def test_reject_creates_no_pr(served):
    base, pipeline = served
    target = pipeline.curator.review_queue()[0].patch_id
    prs_before = set(pipeline.curator.forge.pull_requests)
    status, payload = post(base, f"/api/patches/{target}/decision",
                           {"decision": "reject"})
    assert status == 200
    assert payload["pr_id"] is None
    assert set(pipeline.curator.forge.pull_requests) == prs_before


def test_bad_decision_400(served):
    base, pipeline = served
    target = pipeline.curator.review_queue()[0].patch_id
    status, _ = post(base, f"/api/patches/{target}/decision", {"decision": "maybe"})
    assert status == 400


def test_stats_matches_curator(served):
    base, pipeline = served
    status, stats = get(base, "/api/stats")
    assert status == 200
    assert stats == pipeline.curator.stats()


def test_races_reflect_live_decisions(served):
    base, pipeline = served
    status, races = get(base, "/api/races")
    assert status == 200
    merged = [r for r in races if r["decision"] == "merged"]
    assert merged, "the approved patch must appear merged"
    for race in races:
        assert race["human_competitive"] == (
            race["decision"] == "merged"
            and race["patch_found_at"] < race["human_fix_at"])


def test_attempts_feed_with_after_cursor(served):
    base, pipeline = served
    status, all_attempts = get(base, "/api/attempts")
    assert status == 200
    assert len(all_attempts) == len(pipeline.curator.attempts())
    if len(all_attempts) >= 2:
        first_id = all_attempts[0]["attempt_id"]
        status, rest = get(base, f"/api/attempts?after={first_id}")
        assert [a["attempt_id"] for a in rest] == \
               [a["attempt_id"] for a in all_attempts[1:]]


def test_empty_queue_returns_empty_list(tmp_path):
    seed_corpus(tmp_path, 2, 0.0, 0.0, seed=1)
    pipeline = Pipeline(BotConfig(forge_dir=str(tmp_path)))
    pipeline.run()
    server = ApiServer(pipeline.curator, port=0).start()
    try:
        status, queue = get(server.address, "/api/queue")
        assert status == 200
        assert queue == []
    finally:
        server.stop()


def test_static_ui_served_from_dir(tmp_path, served):
    _, pipeline = served
    ui = tmp_path / "dist"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>review</title>")
    (ui / "app.js").write_text("console.log('ok')")
    server = ApiServer(pipeline.curator, port=0, ui_dir=str(ui)).start()
    try:
        with urllib.request.urlopen(server.address + "/ui/") as response:
            assert response.status == 200
            assert b"review" in response.read()
        with urllib.request.urlopen(server.address + "/ui/app.js") as response:
            assert "javascript" in response.headers["Content-Type"]
        status, _ = get(server.address, "/ui/../secrets")
        assert status == 404
    finally:
        server.stop()


def test_port_in_use_detected(served):
    _, pipeline = served
    busy = ApiServer(pipeline.curator, port=0).start()
    try:
        with pytest.raises(PortInUse):
            ApiServer(pipeline.curator, port=busy.port)
    finally:
        busy.stop()


def test_serve_api_parses_address(served):
    _, pipeline = served
    server = serve_api(pipeline.curator, "127.0.0.1:0")
    try:
        status, _ = get(server.address, "/api/stats")
        assert status == 200
    finally:
        server.stop()
    with pytest.raises(PortInUse):
        serve_api(pipeline.curator, "localhost")
