"""Out-of-process codec server speaking the feature-frame bridge protocol."""

from .backends import BACKENDS, IdentityBackend, make_backend
from .server import handle_request, serve_stdio, serve_stream, serve_unix
from .wire import (
    MAGIC,
    MAX_BODY_BYTES,
    OP_DECODE_IMAGE,
    OP_DECODE_TEXT,
    OP_ENCODE_IMAGE,
    OP_SCORE,
    PROTOCOL_VERSION,
    STATUS_ERROR,
    STATUS_OK,
    Frame,
    TruncatedStreamError,
    WireError,
    decode_frame,
    decode_score_body,
    encode_frame,
    encode_response,
    read_request,
)

__version__ = "0.1.0"

__all__ = [
    "BACKENDS",
    "Frame",
    "IdentityBackend",
    "MAGIC",
    "MAX_BODY_BYTES",
    "OP_DECODE_IMAGE",
    "OP_DECODE_TEXT",
    "OP_ENCODE_IMAGE",
    "OP_SCORE",
    "PROTOCOL_VERSION",
    "STATUS_ERROR",
    "STATUS_OK",
    "TruncatedStreamError",
    "WireError",
    "decode_frame",
    "decode_score_body",
    "encode_frame",
    "encode_response",
    "handle_request",
    "make_backend",
    "read_request",
    "serve_stdio",
    "serve_stream",
    "serve_unix",
]
