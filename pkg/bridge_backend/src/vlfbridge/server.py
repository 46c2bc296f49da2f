"""Request loop: one backend served over a local byte stream.

Strictly one in-flight request per connection. A malformed body gets
an ERROR response and the connection keeps serving; a stream that ends
mid-request is closed with the cause logged to stderr.
"""

import logging
import os
import socket
import sys

from .wire import (
    OP_DECODE_IMAGE,
    OP_DECODE_TEXT,
    OP_ENCODE_IMAGE,
    OP_SCORE,
    STATUS_ERROR,
    STATUS_OK,
    F64,
    TruncatedStreamError,
    WireError,
    decode_frame,
    decode_score_body,
    encode_frame,
    encode_response,
    read_request,
)

log = logging.getLogger("vlfbridge")


def handle_request(backend, op: int, body: bytes) -> tuple:
    """Dispatch one request; always returns (status, response_body)."""
    try:
        if op == OP_ENCODE_IMAGE:
            return STATUS_OK, encode_frame(backend.encode_image(body))
        if op == OP_DECODE_TEXT:
            return STATUS_OK, backend.decode_text(decode_frame(body)).encode("utf-8")
        if op == OP_DECODE_IMAGE:
            return STATUS_OK, backend.decode_image(decode_frame(body))
        if op == OP_SCORE:
            name, a, b = decode_score_body(body)
            return STATUS_OK, F64.pack(float(backend.score(name, a, b)))
        return STATUS_ERROR, f"unsupported operation {op}".encode()
    except WireError as exc:
        return STATUS_ERROR, str(exc).encode()
    except Exception as exc:
        log.exception("backend raised on op %d", op)
        return STATUS_ERROR, f"{type(exc).__name__}: {exc}".encode()


def serve_stream(reader, writer, backend) -> int:
    """Answer requests from reader until end of stream.

    Returns the number of requests served. A truncated request closes
    the connection without a response, matching the framing contract.
    """
    served = 0
    while True:
        try:
            request = read_request(reader)
        except TruncatedStreamError as exc:
            log.warning("closing connection: %s", exc)
            return served
        except WireError as exc:
            log.warning("closing connection on unreadable request: %s", exc)
            return served
        if request is None:
            return served
        status, body = handle_request(backend, *request)
        writer.write(encode_response(status, body))
        writer.flush()
        served += 1


def serve_stdio(backend) -> int:
    """Serve the process's own standard streams until stdin closes."""
    return serve_stream(sys.stdin.buffer, sys.stdout.buffer, backend)


def serve_unix(path, backend, max_connections=None) -> int:
    """Serve connections on a unix socket, one at a time.

    max_connections bounds how many connections are accepted (None
    means serve until interrupted); returns the number served.
    """
    path = os.fspath(path)
    try:
        os.unlink(path)
    except FileNotFoundError:
        pass
    with socket.socket(socket.AF_UNIX, socket.SOCK_STREAM) as listener:
        listener.bind(path)
        listener.listen(1)
        accepted = 0
        while max_connections is None or accepted < max_connections:
            conn, _ = listener.accept()
            with conn, conn.makefile("rb") as reader, conn.makefile("wb") as writer:
                serve_stream(reader, writer, backend)
            accepted += 1
    return accepted
