"""Reward evaluation as a long-running service.

Two transports share one evaluator, so the same request object yields the
same response bytes whether it arrives on stdin or over HTTP:

  stdio  one JSON request (or {"batch": [...]}) per input line, one JSON
         response per request per output line; a malformed line produces an
         error response with a null id, never a crash or exit.
  HTTP   POST /v1/reward (one request object), POST /v1/reward/batch
         (array of request objects), GET /healthz.

Request:  {"id": any, "ref": str, "gen": str, "mode": "ast" | "seq"}
          mode is optional and defaults to "ast".
Response: {"id", "status", "sim", "reward", "error"} with status one of
          parsed / parse_fail / not_code / reference_error.  Invalid
          requests, unparsable references, internal faults, and timeouts
          all report reference_error with sim and reward null.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as _FutureTimeout
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import IO

from vsr.reward import ReferenceParseError, reward
from vsr.similarity import DEFAULT_DEPTH_LIMIT

STATUS_REFERENCE_ERROR = "reference_error"


@dataclass(frozen=True)
class ServiceConfig:
    timeout_ms: int = 5000
    max_body_bytes: int = 8 * 1024 * 1024
    depth_limit: int = DEFAULT_DEPTH_LIMIT


def _encode(payload) -> str:
    # Single encoder for both transports; bit-for-bit equality depends on it.
    return json.dumps(payload)


def _error_response(req_id, message: str) -> dict:
    return {
        "id": req_id,
        "status": STATUS_REFERENCE_ERROR,
        "sim": None,
        "reward": None,
        "error": message,
    }


def evaluate(request, *, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> dict:
    """Score one request object and build its response object."""
    if not isinstance(request, dict):
        return _error_response(None, "request must be a JSON object")
    req_id = request.get("id")
    ref = request.get("ref")
    gen = request.get("gen")
    mode = request.get("mode", "ast")
    if not isinstance(ref, str):
        return _error_response(req_id, "missing or non-string field 'ref'")
    if not isinstance(gen, str):
        return _error_response(req_id, "missing or non-string field 'gen'")
    if mode not in ("ast", "seq"):
        return _error_response(req_id, "mode must be 'ast' or 'seq'")
    try:
        outcome = reward(gen, ref, mode=mode, depth_limit=depth_limit)
    except ReferenceParseError as exc:
        return _error_response(req_id, f"reference does not parse: {exc}")
    return {
        "id": req_id,
        "status": outcome.status.value,
        "sim": outcome.sim,
        "reward": outcome.reward,
        "error": None,
    }


def _request_id(request) -> object:
    return request.get("id") if isinstance(request, dict) else None


def _evaluate_guarded(request, depth_limit: int) -> dict:
    try:
        return evaluate(request, depth_limit=depth_limit)
    except Exception as exc:  # a service answers; it does not die
        return _error_response(_request_id(request), f"internal error: {exc}")


def _evaluate_with_timeout(request, config: ServiceConfig) -> dict:
    if config.timeout_ms <= 0:
        return _evaluate_guarded(request, config.depth_limit)
    pool = ThreadPoolExecutor(max_workers=1)
    future = pool.submit(_evaluate_guarded, request, config.depth_limit)
    try:
        return future.result(timeout=config.timeout_ms / 1000.0)
    except _FutureTimeout:
        # The worker thread is abandoned, not killed; it finishes in the
        # background while the caller gets a timely error.
        return _error_response(
            _request_id(request), f"evaluation exceeded {config.timeout_ms} ms"
        )
    finally:
        pool.shutdown(wait=False)


def handle_line(line: str, config: ServiceConfig = ServiceConfig()) -> list[dict]:
    """Responses for one stdio input line, in request order."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        return [_error_response(None, f"invalid JSON: {exc}")]
    if isinstance(obj, dict) and "batch" in obj:
        batch = obj["batch"]
        if not isinstance(batch, list):
            return [_error_response(None, "'batch' must be an array")]
        return [_evaluate_with_timeout(item, config) for item in batch]
    return [_evaluate_with_timeout(obj, config)]


def serve_stdio(
    stdin: IO[str] | None = None,
    stdout: IO[str] | None = None,
    *,
    config: ServiceConfig = ServiceConfig(),
) -> None:
    """Run the JSON-lines loop until EOF on the input stream."""
    inp = stdin if stdin is not None else sys.stdin
    out = stdout if stdout is not None else sys.stdout
    for raw in inp:
        line = raw.strip()
        if not line:
            continue
        for response in handle_line(line, config):
            out.write(_encode(response) + "\n")
        out.flush()


class _RewardHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt: str, *args) -> None:
        pass  # keep stderr clean under test and batch use

    def _send_json(self, status_code: int, payload) -> None:
        body = _encode(payload).encode("utf-8")
        self.send_response(status_code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self) -> None:
        if self.path == "/healthz":
            from vsr import __version__

            self._send_json(200, {"status": "ok", "version": __version__})
        else:
            self._send_json(404, {"error": f"unknown path {self.path}"})

    def do_POST(self) -> None:
        config: ServiceConfig = self.server.config  # type: ignore[attr-defined]
        if self.path not in ("/v1/reward", "/v1/reward/batch"):
            self._send_json(404, {"error": f"unknown path {self.path}"})
            return
        try:
            length = int(self.headers.get("Content-Length", ""))
        except ValueError:
            self._send_json(400, {"error": "missing or invalid Content-Length"})
            return
        if length > config.max_body_bytes:
            self._send_json(
                413, {"error": f"body exceeds {config.max_body_bytes} bytes"}
            )
            return
        try:
            obj = json.loads(self.rfile.read(length))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            self._send_json(400, {"error": f"invalid JSON: {exc}"})
            return
        if self.path == "/v1/reward":
            self._send_json(200, _evaluate_with_timeout(obj, config))
        else:
            if not isinstance(obj, list):
                self._send_json(400, {"error": "batch body must be a JSON array"})
                return
            self._send_json(
                200, [_evaluate_with_timeout(item, config) for item in obj]
            )


def create_http_server(
    host: str, port: int, config: ServiceConfig = ServiceConfig()
) -> ThreadingHTTPServer:
    """Bound but not yet serving; callers drive serve_forever themselves."""
    server = ThreadingHTTPServer((host, port), _RewardHandler)
    server.daemon_threads = True
    server.config = config  # type: ignore[attr-defined]
    return server


def serve_http(
    host: str, port: int, config: ServiceConfig = ServiceConfig()
) -> None:
    server = create_http_server(host, port, config)
    try:
        server.serve_forever()
    finally:
        server.server_close()
