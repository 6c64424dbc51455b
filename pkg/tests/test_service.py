import io
import json
import threading
import urllib.error
import urllib.request

import pytest

from helpers import wide_module
from vsr.reward import reward
from vsr.service import (
    ServiceConfig,
    create_http_server,
    evaluate,
    handle_line,
    serve_stdio,
)

REF = "module m(input a, output y);\n  assign y = ~a;\nendmodule"
GEN = "module m(input b, output z);\n  assign z = ~b;\nendmodule"


class TestEvaluate:
    def test_parsed(self):
        resp = evaluate({"id": 7, "ref": REF, "gen": GEN})
        assert resp == {
            "id": 7,
            "status": "parsed",
            "sim": 1.0,
            "reward": 10.0,
            "error": None,
        }

    def test_sim_matches_library(self):
        gen = "module m(input a, output y);\n  wire t;\n  assign t = a;\n  assign y = t;\nendmodule"
        resp = evaluate({"id": None, "ref": REF, "gen": gen})
        lib = reward(gen, REF)
        assert resp["sim"] == lib.sim
        assert resp["reward"] == lib.reward

    def test_tiers(self):
        fail = evaluate({"id": 1, "ref": REF, "gen": "module m(input a endmodule"})
        assert (fail["status"], fail["sim"], fail["reward"]) == ("parse_fail", None, -5.0)
        prose = evaluate({"id": 2, "ref": REF, "gen": "write me a module"})
        assert (prose["status"], prose["reward"]) == ("not_code", -10.0)

    def test_reference_error(self):
        resp = evaluate({"id": 3, "ref": "garbage", "gen": GEN})
        assert resp["status"] == "reference_error"
        assert resp["sim"] is None and resp["reward"] is None
        assert "reference" in resp["error"]

    @pytest.mark.parametrize(
        "request_obj,id_out",
        [
            (42, None),
            ([], None),
            ({"ref": REF}, None),
            ({"id": "x", "gen": GEN}, "x"),
            ({"id": "y", "ref": 5, "gen": GEN}, "y"),
            ({"id": "z", "ref": REF, "gen": GEN, "mode": "bogus"}, "z"),
        ],
    )
    def test_invalid_requests(self, request_obj, id_out):
        resp = evaluate(request_obj)
        assert resp["status"] == "reference_error"
        assert resp["id"] == id_out
        assert resp["error"]

    def test_seq_mode(self):
        shuffled = (
            "module m(input a, output y);\n"
            "  wire t;\n  assign y = t;\n  assign t = a & a;\nendmodule"
        )
        straight = (
            "module m(input a, output y);\n"
            "  wire t;\n  assign t = a & a;\n  assign y = t;\nendmodule"
        )
        ast = evaluate({"id": 1, "ref": straight, "gen": shuffled, "mode": "ast"})
        seq = evaluate({"id": 1, "ref": straight, "gen": shuffled, "mode": "seq"})
        assert ast["sim"] == 1.0
        assert seq["sim"] < 1.0


class TestStdio:
    def run_lines(self, *lines, config=ServiceConfig()):
        stdin = io.StringIO("".join(line + "\n" for line in lines))
        stdout = io.StringIO()
        serve_stdio(stdin, stdout, config=config)
        return stdout.getvalue().splitlines()

    def test_one_response_per_request(self):
        req = json.dumps({"id": 1, "ref": REF, "gen": GEN})
        out = self.run_lines(req, req)
        assert len(out) == 2
        assert json.loads(out[0])["reward"] == 10.0

    def test_batch_expands(self):
        line = json.dumps(
            {"batch": [{"id": i, "ref": REF, "gen": GEN} for i in range(3)]}
        )
        out = self.run_lines(line)
        assert [json.loads(o)["id"] for o in out] == [0, 1, 2]

    def test_malformed_line_yields_error_response(self):
        out = self.run_lines("{nope", json.dumps({"id": 1, "ref": REF, "gen": GEN}))
        first = json.loads(out[0])
        assert first["id"] is None
        assert first["status"] == "reference_error"
        assert "invalid JSON" in first["error"]
        # the loop survived and served the next request
        assert json.loads(out[1])["status"] == "parsed"

    def test_bad_batch_field(self):
        out = self.run_lines(json.dumps({"batch": "nope"}))
        assert "'batch' must be an array" in json.loads(out[0])["error"]

    def test_blank_lines_ignored(self):
        out = self.run_lines("", json.dumps({"id": 1, "ref": REF, "gen": GEN}), "")
        assert len(out) == 1

    def test_handle_line_matches_serve_stdio(self):
        line = json.dumps({"id": 5, "ref": REF, "gen": "prose"})
        direct = handle_line(line)
        looped = self.run_lines(line)
        assert [json.dumps(r) for r in direct] == looped


@pytest.fixture()
def http_server():
    server = create_http_server("127.0.0.1", 0, ServiceConfig())
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


def http_post(base, path, body: bytes):
    req = urllib.request.Request(base + path, data=body, method="POST")
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as err:
        return err.code, err.read()


class TestHttp:
    def test_reward_endpoint(self, http_server):
        body = json.dumps({"id": 1, "ref": REF, "gen": GEN}).encode()
        status, payload = http_post(http_server, "/v1/reward", body)
        assert status == 200
        assert json.loads(payload)["reward"] == 10.0

    def test_batch_endpoint(self, http_server):
        body = json.dumps(
            [
                {"id": 1, "ref": REF, "gen": GEN},
                {"id": 2, "ref": REF, "gen": "prose"},
            ]
        ).encode()
        status, payload = http_post(http_server, "/v1/reward/batch", body)
        assert status == 200
        rewards = [r["reward"] for r in json.loads(payload)]
        assert rewards == [10.0, -10.0]

    def test_healthz(self, http_server):
        with urllib.request.urlopen(http_server + "/healthz", timeout=10) as resp:
            assert resp.status == 200
            body = json.loads(resp.read())
        from vsr import __version__

        assert body == {"status": "ok", "version": __version__}

    def test_malformed_json_is_400(self, http_server):
        status, payload = http_post(http_server, "/v1/reward", b"{oops")
        assert status == 400
        assert "invalid JSON" in json.loads(payload)["error"]

    def test_batch_must_be_array(self, http_server):
        status, payload = http_post(http_server, "/v1/reward/batch", b"{}")
        assert status == 400

    def test_unknown_path_is_404(self, http_server):
        status, _ = http_post(http_server, "/v1/unknown", b"{}")
        assert status == 404
        req = urllib.request.Request(http_server + "/nope")
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(req, timeout=10)
        assert err.value.code == 404

    def test_oversized_body_is_413(self):
        server = create_http_server(
            "127.0.0.1", 0, ServiceConfig(max_body_bytes=100)
        )
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            base = f"http://127.0.0.1:{server.server_address[1]}"
            body = json.dumps({"ref": "x" * 500, "gen": "y"}).encode()
            status, payload = http_post(base, "/v1/reward", body)
            assert status == 413
            assert "exceeds" in json.loads(payload)["error"]
        finally:
            server.shutdown()
            server.server_close()

    def test_response_bytes_match_stdio(self, http_server):
        requests = [
            {"id": 1, "ref": REF, "gen": GEN},
            {"id": 2, "ref": REF, "gen": "module broken(endmodule"},
            {"id": 3, "ref": "bad ref", "gen": GEN},
            {"id": None, "ref": REF, "gen": "prose", "mode": "seq"},
        ]
        for request in requests:
            line = json.dumps(request)
            stdio_out = io.StringIO()
            serve_stdio(io.StringIO(line + "\n"), stdio_out)
            _, http_body = http_post(
                http_server, "/v1/reward", line.encode("utf-8")
            )
            assert stdio_out.getvalue().strip().encode("utf-8") == http_body


class TestTimeout:
    def test_slow_evaluation_reports_reference_error(self):
        # a very fat module cannot lex+parse+score within 1 ms
        fat = wide_module(3000)
        config = ServiceConfig(timeout_ms=1)
        (resp,) = handle_line(
            json.dumps({"id": "slow", "ref": fat, "gen": fat}), config
        )
        assert resp["status"] == "reference_error"
        assert "exceeded" in resp["error"]
        assert resp["id"] == "slow"

    def test_zero_timeout_disables_the_clock(self):
        config = ServiceConfig(timeout_ms=0)
        (resp,) = handle_line(
            json.dumps({"id": 1, "ref": REF, "gen": GEN}), config
        )
        assert resp["status"] == "parsed"
