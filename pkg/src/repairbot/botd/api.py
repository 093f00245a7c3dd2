"""HTTP API for the review dashboard.

Plain request/response JSON over stdlib http.server; reads return
snapshots of curator state and never block the pipeline. Decisions are
atomic check-then-set: a second decision on the same patch gets 409.
Static dashboard assets are served under /ui/ when a directory is
configured.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from ..curator import AlreadyDecided, Curator, UnknownPatch
from ..udiff import DiffApplyError


class PortInUse(Exception):
    pass


def _patch_summary(patch, now: int) -> dict:
    return {
        "patch_id": patch.patch_id,
        "project_id": patch.project_id,
        "build_id": patch.build_id,
        "operator": patch.operator,
        "suspiciousness": patch.suspiciousness,
        "candidate_index": patch.candidate_index,
        "found_at": patch.found_at,
        "status": patch.status,
        "overfitting": patch.overfitting,
        "now": now,
    }


class _Handler(BaseHTTPRequestHandler):
    server_version = "repairbot"
    curator: Curator = None  # set by server factory
    ui_dir: Optional[Path] = None

    def log_message(self, fmt, *args):  # quiet by default
        pass

    # ------------------------------------------------------------- plumbing

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, message: str) -> None:
        self._send_json({"error": message}, status)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0") or "0")
        if length == 0:
            return {}
        return json.loads(self.rfile.read(length).decode())

    # ------------------------------------------------------------- routing

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if parts == ["api", "queue"]:
                now = self.curator.forge.clock.now
                self._send_json([_patch_summary(p, now)
                                 for p in self.curator.review_queue()])
            elif len(parts) == 3 and parts[:2] == ["api", "patches"]:
                self._get_patch(parts[2])
            elif parts == ["api", "attempts"]:
                query = parse_qs(url.query)
                after = query.get("after", [None])[0]
                self._get_attempts(after)
            elif parts == ["api", "stats"]:
                self._send_json(self.curator.stats())
            elif parts == ["api", "races"]:
                self._send_json([r.to_dict() for r in self.curator.races()])
            elif not parts or parts[0] == "ui":
                self._serve_static(parts[1:] if parts else [])
            else:
                self._send_error_json(404, f"no such resource: {url.path}")
        except BrokenPipeError:
            pass
        except Exception as exc:  # defensive: API must not take down the bot
            self._send_error_json(500, f"{type(exc).__name__}: {exc}")

    def do_POST(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if (len(parts) == 4 and parts[:2] == ["api", "patches"]
                    and parts[3] == "decision"):
                self._post_decision(parts[2])
            else:
                self._send_error_json(404, f"no such resource: {url.path}")
        except BrokenPipeError:
            pass
        except Exception as exc:
            self._send_error_json(500, f"{type(exc).__name__}: {exc}")

    # ------------------------------------------------------------- handlers

    def _get_patch(self, patch_id: str) -> None:
        try:
            patch = self.curator.patch(patch_id)
        except UnknownPatch:
            self._send_error_json(404, f"unknown patch {patch_id}")
            return
        payload = patch.to_dict()
        payload["diff"] = patch.diff
        attempt = self.curator.attempt_for_build(patch.build_id)
        payload["failing_tests"] = attempt.failing_tests if attempt else []
        payload["human_fix_at"] = self.curator.forge.human_fix_at(patch.build_id)
        payload["now"] = self.curator.forge.clock.now
        payload["pr_id"] = (attempt.pr_id if attempt and attempt.pr_id
                            else patch.pr_id)
        self._send_json(payload)

    def _get_attempts(self, after: Optional[str]) -> None:
        attempts = self.curator.attempts()
        if after is not None:
            index = {a.attempt_id: i for i, a in enumerate(attempts)}
            start = index.get(after)
            attempts = attempts[start + 1:] if start is not None else attempts
        self._send_json([a.to_dict() for a in attempts])

    def _post_decision(self, patch_id: str) -> None:
        try:
            body = self._read_body()
        except json.JSONDecodeError:
            self._send_error_json(400, "request body is not valid JSON")
            return
        decision = body.get("decision")
        if decision not in ("approve", "reject"):
            self._send_error_json(400, "decision must be 'approve' or 'reject'")
            return
        reviewer = body.get("reviewer", "dashboard")
        try:
            patch, pr = self.curator.decide(patch_id, decision, reviewer,
                                            eager_merge=True)
        except UnknownPatch:
            self._send_error_json(404, f"unknown patch {patch_id}")
            return
        except AlreadyDecided as exc:
            self._send_error_json(409, str(exc))
            return
        except DiffApplyError as exc:
            self._send_error_json(422, f"diff no longer applies: {exc}")
            return
        self._send_json({
            "patch_id": patch.patch_id,
            "status": patch.status,
            "pr_id": pr.pr_id if pr else None,
        })

    def _serve_static(self, parts) -> None:
        if self.ui_dir is None:
            self._send_error_json(
                404, "no dashboard built; run with --ui-dir pointing at frontend/dist")
            return
        rel = "/".join(parts) or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send_error_json(404, f"no such asset: {rel}")
            return
        body = target.read_bytes()
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class ApiServer:
    """Threaded HTTP server wrapper; serve_api entry point for the bot."""

    def __init__(self, curator: Curator, host: str = "127.0.0.1", port: int = 0,
                 ui_dir: Optional[str] = None):
        handler = type("BoundHandler", (_Handler,), {
            "curator": curator,
            "ui_dir": Path(ui_dir) if ui_dir else None,
        })
        try:
            self._server = ThreadingHTTPServer((host, port), handler)
        except OSError as exc:
            raise PortInUse(f"cannot bind {host}:{port}: {exc}") from None
        self._thread: Optional[threading.Thread] = None

    @property
    def address(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def start(self) -> "ApiServer":
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        name="repairbot-api", daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread:
            self._thread.join(timeout=5)


def serve_api(curator: Curator, address: str, ui_dir: Optional[str] = None) -> ApiServer:
    """Start the API on ``host:port``; raises PortInUse when taken."""
    host, _, port_text = address.rpartition(":")
    host = host or "127.0.0.1"
    try:
        port = int(port_text)
    except ValueError:
        raise PortInUse(f"bad address {address!r}; expected host:port") from None
    return ApiServer(curator, host, port, ui_dir).start()
