"""Server loop over in-memory streams, stdio subprocess, unix socket."""

import io
import os
import socket
import struct
import subprocess
import sys
import threading
import time
import zlib
from pathlib import Path

import pytest

from vlfbridge import (
    OP_DECODE_IMAGE,
    OP_DECODE_TEXT,
    OP_ENCODE_IMAGE,
    OP_SCORE,
    STATUS_ERROR,
    STATUS_OK,
    Frame,
    IdentityBackend,
    encode_frame,
    handle_request,
    serve_stream,
    serve_unix,
)

SRC_DIR = Path(__file__).resolve().parents[1] / "src"


def request(op: int, body: bytes) -> bytes:
    return struct.pack("<BI", op, len(body)) + body


def score_body(name: bytes, a: bytes, b: bytes) -> bytes:
    return b"".join(struct.pack("<I", len(p)) + p for p in (name, a, b))


def read_responses(blob: bytes) -> list:
    out = []
    pos = 0
    while pos < len(blob):
        status, length = struct.unpack_from("<BI", blob, pos)
        pos += 5
        out.append((status, blob[pos : pos + length]))
        pos += length
    assert pos == len(blob)
    return out


def run_stream(backend, wire: bytes) -> tuple:
    reader, writer = io.BytesIO(wire), io.BytesIO()
    served = serve_stream(reader, writer, backend)
    return served, read_responses(writer.getvalue())


class TestHandleRequest:
    def test_unknown_op(self):
        status, body = handle_request(IdentityBackend(), 99, b"")
        assert (status, body) == (STATUS_ERROR, b"unsupported operation 99")

    def test_malformed_frame_body(self):
        status, body = handle_request(IdentityBackend(), OP_DECODE_TEXT, b"garbage")
        assert status == STATUS_ERROR
        assert b"header needs 14" in body

    def test_empty_encode_body(self):
        status, body = handle_request(IdentityBackend(), OP_ENCODE_IMAGE, b"")
        assert (status, body) == (STATUS_ERROR, b"ENCODE_IMAGE body is empty")

    def test_score_response_is_little_endian_f64(self):
        status, body = handle_request(
            IdentityBackend(), OP_SCORE, score_body(b"m", b"x", b"x")
        )
        assert status == STATUS_OK
        assert body == struct.pack("<d", 1.0)

    def test_backend_exception_becomes_error_response(self):
        class Exploding(IdentityBackend):
            def decode_text(self, frame):
                raise RuntimeError("boom")

        frame = Frame.from_values(1, 2, [0.0, 0.0])
        status, body = handle_request(Exploding(), OP_DECODE_TEXT, encode_frame(frame))
        assert (status, body) == (STATUS_ERROR, b"RuntimeError: boom")


class TestServeStream:
    def test_error_then_connection_still_serves(self):
        frame = Frame.from_values(1, 2, [1.0, -2.5])
        wire = request(99, b"") + request(OP_DECODE_IMAGE, encode_frame(frame))
        served, responses = run_stream(IdentityBackend(), wire)
        assert served == 2
        assert responses[0] == (STATUS_ERROR, b"unsupported operation 99")
        assert responses[1] == (STATUS_OK, encode_frame(frame))

    def test_truncated_request_closes_without_response(self):
        wire = request(OP_DECODE_TEXT, b"ok" * 4)[:-3]
        served, responses = run_stream(IdentityBackend(), wire)
        assert served == 0
        assert responses == []

    def test_full_session_all_four_ops(self):
        backend = IdentityBackend(n_queries=2, dim=2)
        raster = bytes([10, 20, 30, 40])
        frame = backend.encode_image(raster)
        wire = (
            request(OP_ENCODE_IMAGE, raster)
            + request(OP_DECODE_TEXT, encode_frame(frame))
            + request(OP_DECODE_IMAGE, encode_frame(frame))
            + request(OP_SCORE, score_body(b"m", b"a", b"b"))
        )
        served, responses = run_stream(backend, wire)
        assert served == 4
        assert responses[0] == (STATUS_OK, encode_frame(frame))
        text = f"identity frame 2x2 crc {zlib.crc32(frame.payload):08x}"
        assert responses[1] == (STATUS_OK, text.encode())
        assert responses[2] == (STATUS_OK, encode_frame(frame))
        assert responses[3] == (STATUS_OK, struct.pack("<d", 0.0))

    def test_oversized_length_closes_connection(self):
        wire = struct.pack("<BI", OP_DECODE_TEXT, 0xFFFFFFFF)
        served, responses = run_stream(IdentityBackend(), wire)
        assert served == 0
        assert responses == []


class TestStdioProcess:
    def _spawn(self, *args):
        env = dict(os.environ)
        env["PYTHONPATH"] = str(SRC_DIR) + os.pathsep + env.get("PYTHONPATH", "")
        return subprocess.Popen(
            [sys.executable, "-m", "vlfbridge", "--stdio", *args],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            env=env,
        )

    def test_echo_over_stdio(self):
        frame = Frame.from_values(1, 2, [1.0, -2.5])
        proc = self._spawn()
        try:
            out, _ = proc.communicate(request(OP_DECODE_IMAGE, encode_frame(frame)), timeout=30)
        finally:
            proc.kill()
        assert read_responses(out) == [(STATUS_OK, encode_frame(frame))]
        assert proc.returncode == 0

    def test_configured_geometry_over_stdio(self):
        proc = self._spawn("--queries", "3", "--dim", "5")
        try:
            out, _ = proc.communicate(request(OP_ENCODE_IMAGE, b"\xff"), timeout=30)
        finally:
            proc.kill()
        (response,) = read_responses(out)
        assert response[0] == STATUS_OK
        head = struct.unpack_from("<4sHII", response[1])
        assert head == (b"VLF1", 1, 3, 5)


class TestUnixSocket:
    def test_one_connection_roundtrip(self, tmp_path):
        path = tmp_path / "bridge.sock"
        backend = IdentityBackend(n_queries=1, dim=2)
        thread = threading.Thread(
            target=serve_unix, args=(path, backend), kwargs={"max_connections": 1}
        )
        thread.start()
        try:
            deadline = time.monotonic() + 10
            while not path.exists():
                assert time.monotonic() < deadline, "socket never appeared"
                time.sleep(0.01)
            frame = Frame.from_values(1, 2, [0.5, -0.5])
            with socket.socket(socket.AF_UNIX, socket.SOCK_STREAM) as sock:
                sock.connect(str(path))
                sock.sendall(request(OP_DECODE_IMAGE, encode_frame(frame)))
                sock.shutdown(socket.SHUT_WR)
                blob = b""
                while chunk := sock.recv(4096):
                    blob += chunk
            assert read_responses(blob) == [(STATUS_OK, encode_frame(frame))]
        finally:
            thread.join(timeout=10)
        assert not thread.is_alive()


class TestCli:
    def test_unknown_backend_rejected(self):
        env = dict(os.environ)
        env["PYTHONPATH"] = str(SRC_DIR) + os.pathsep + env.get("PYTHONPATH", "")
        proc = subprocess.run(
            [sys.executable, "-m", "vlfbridge", "--backend", "diffusion"],
            capture_output=True,
            env=env,
        )
        assert proc.returncode == 2
        assert b"diffusion" in proc.stderr

    def test_stdio_and_socket_mutually_exclusive(self):
        env = dict(os.environ)
        env["PYTHONPATH"] = str(SRC_DIR) + os.pathsep + env.get("PYTHONPATH", "")
        proc = subprocess.run(
            [sys.executable, "-m", "vlfbridge", "--stdio", "--socket", "/tmp/x.sock"],
            capture_output=True,
            env=env,
        )
        assert proc.returncode == 2
