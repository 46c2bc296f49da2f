"""Byte-level codec for the bridge protocol.

Everything on the wire is little-endian. A feature frame is a 14-byte
header (magic ``VLF1``, u16 version, u32 n_queries, u32 dim) followed
by ``4 * n_queries * dim`` bytes of IEEE 754 binary32 payload, row
major. Requests are ``op:u8 body_len:u32 body``; responses are
``status:u8 body_len:u32 body``. The payload is carried as raw bytes
end to end so an echo is bit-exact by construction, negative zero and
subnormals included.
"""

import struct
from dataclasses import dataclass

MAGIC = b"VLF1"
PROTOCOL_VERSION = 1

OP_ENCODE_IMAGE = 1
OP_DECODE_TEXT = 2
OP_DECODE_IMAGE = 3
OP_SCORE = 4

STATUS_OK = 0
STATUS_ERROR = 1

FRAME_HEAD = struct.Struct("<4sHII")
REQUEST_HEAD = struct.Struct("<BI")
U32 = struct.Struct("<I")
F64 = struct.Struct("<d")

# requests come from a local peer, but a garbled length must not turn
# into a multi-gigabyte allocation
MAX_BODY_BYTES = 1 << 30


class WireError(ValueError):
    """A byte sequence that does not parse as protocol traffic."""


class TruncatedStreamError(WireError):
    """The peer went away in the middle of a request."""


@dataclass(frozen=True)
class Frame:
    """A feature frame with its payload kept as raw binary32 bytes."""

    n_queries: int
    dim: int
    payload: bytes

    def __post_init__(self):
        expected = 4 * self.n_queries * self.dim
        if self.n_queries <= 0 or self.dim <= 0:
            raise WireError(
                f"frame geometry must be positive, got ({self.n_queries}, {self.dim})"
            )
        if len(self.payload) != expected:
            raise WireError(
                f"frame payload is {len(self.payload)} bytes, "
                f"geometry ({self.n_queries}, {self.dim}) needs {expected}"
            )

    def values(self) -> list:
        """Decode the payload to Python floats, row major."""
        count = self.n_queries * self.dim
        return list(struct.unpack(f"<{count}f", self.payload))

    @classmethod
    def from_values(cls, n_queries: int, dim: int, values) -> "Frame":
        values = list(values)
        if len(values) != n_queries * dim:
            raise WireError(
                f"expected {n_queries * dim} values for a "
                f"({n_queries}, {dim}) frame, got {len(values)}"
            )
        return cls(n_queries, dim, struct.pack(f"<{len(values)}f", *values))


def encode_frame(frame: Frame) -> bytes:
    head = FRAME_HEAD.pack(MAGIC, PROTOCOL_VERSION, frame.n_queries, frame.dim)
    return head + frame.payload


def decode_frame(blob: bytes) -> Frame:
    if len(blob) < FRAME_HEAD.size:
        raise WireError(f"frame blob is {len(blob)} bytes, header needs {FRAME_HEAD.size}")
    magic, version, n_queries, dim = FRAME_HEAD.unpack_from(blob)
    if magic != MAGIC:
        raise WireError(f"bad frame magic {magic!r}")
    if version != PROTOCOL_VERSION:
        raise WireError(f"unsupported frame version {version}")
    payload = blob[FRAME_HEAD.size :]
    expected = 4 * n_queries * dim
    if len(payload) != expected:
        raise WireError(
            f"frame payload is {len(payload)} bytes, header promises {expected}"
        )
    return Frame(n_queries, dim, payload)


def encode_response(status: int, body: bytes) -> bytes:
    return REQUEST_HEAD.pack(status, len(body)) + body


def decode_score_body(body: bytes) -> tuple:
    """Unpack a SCORE body: three length-prefixed byte strings
    (metric name, artifact A, artifact B)."""
    parts = []
    pos = 0
    for what in ("metric name", "artifact a", "artifact b"):
        if len(body) - pos < U32.size:
            raise WireError(f"SCORE body truncated before {what} length")
        (length,) = U32.unpack_from(body, pos)
        pos += U32.size
        if len(body) - pos < length:
            raise WireError(f"SCORE body truncated inside {what}")
        parts.append(body[pos : pos + length])
        pos += length
    if pos != len(body):
        raise WireError(f"SCORE body has {len(body) - pos} trailing bytes")
    try:
        name = parts[0].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise WireError(f"SCORE metric name is not UTF-8: {exc}") from None
    return name, parts[1], parts[2]


def _read_exact(stream, n: int, context: str) -> bytes:
    chunks = []
    remaining = n
    while remaining:
        chunk = stream.read(remaining)
        if not chunk:
            got = n - remaining
            raise TruncatedStreamError(f"stream ended {context} ({got}/{n} bytes)")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_request(stream):
    """Read one request from a binary stream.

    Returns (op, body), or None on a clean end of stream at a request
    boundary. Raises TruncatedStreamError if the stream ends partway
    through a request.
    """
    first = stream.read(1)
    if not first:
        return None
    rest = _read_exact(stream, REQUEST_HEAD.size - 1, "inside a request header")
    op, body_len = REQUEST_HEAD.unpack(first + rest)
    if body_len > MAX_BODY_BYTES:
        raise WireError(f"request body of {body_len} bytes exceeds the {MAX_BODY_BYTES} cap")
    body = _read_exact(stream, body_len, "inside a request body") if body_len else b""
    return op, body
