"""Client side of the external-codec wire protocol.

Lets an out-of-process server (a real vision-language encoder, a
diffusion decoder, neural metrics) serve the SemanticCodec interface
over a local byte stream. The full byte-level contract lives in
PROTOCOL.md; in short:

- Feature frames travel as: magic "VLF1", version u16, n_queries u32,
  dim u32 (all little-endian), then n_queries*dim float32 values,
  little-endian, row-major. Frame bytes roundtrip bit-exactly.
- A request is op u8 + body_len u32 + body; the response is
  status u8 + body_len u32 + body. Exactly one response per request,
  in order. An ERROR response carries a UTF-8 message and leaves the
  connection usable.

Feature frames are float64 in memory; the wire narrows to float32, the
one lossy step of the bridge. DECODE_IMAGE servers may answer with a
raster file (P6/P5/farbfeld) or, for loopback backends, with a frame,
which the client unpacks into the configured image shape.

Transports are local only: a spawned subprocess on its stdio, a unix
domain socket, or any in-memory file pair (tests).
"""

from __future__ import annotations

import socket
import struct
import subprocess
from typing import Optional

import numpy as np

from .codec import DEFAULT_IMAGE_SHAPE, SemanticCodec
from .errors import BridgeError, FramingError, GeometryError, VersionError
from .frames import DEFAULT_DIM, DEFAULT_N_QUERIES, FeatureFrame
from .images import ppm_bytes, read_farbfeld, read_ppm
from .validation import check_image_array

__all__ = [
    "MAGIC",
    "PROTOCOL_VERSION",
    "OP_ENCODE_IMAGE",
    "OP_DECODE_TEXT",
    "OP_DECODE_IMAGE",
    "OP_SCORE",
    "STATUS_OK",
    "STATUS_ERROR",
    "encode_frame",
    "decode_frame",
    "encode_request",
    "encode_score_body",
    "BridgeCodec",
]

MAGIC = b"VLF1"
PROTOCOL_VERSION = 1
_HEADER = struct.Struct("<4sHII")  # magic, version, n_queries, dim

OP_ENCODE_IMAGE = 1
OP_DECODE_TEXT = 2
OP_DECODE_IMAGE = 3
OP_SCORE = 4

STATUS_OK = 0
STATUS_ERROR = 1

_REQ_HEAD = struct.Struct("<BI")
_U32 = struct.Struct("<I")


def encode_frame(frame: FeatureFrame) -> bytes:
    """Frame -> wire bytes. float64 payloads narrow to float32 here."""
    payload = frame.data.astype("<f4").tobytes()
    return _HEADER.pack(MAGIC, PROTOCOL_VERSION, frame.n_queries, frame.dim) + payload


def decode_frame(blob: bytes) -> FeatureFrame:
    """Wire bytes -> frame. Exact: float32 widens to float64 losslessly."""
    if len(blob) < _HEADER.size:
        raise FramingError(f"frame blob too short: {len(blob)} bytes")
    magic, version, n_queries, dim = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FramingError(f"bad frame magic {magic!r}")
    if version != PROTOCOL_VERSION:
        raise VersionError(f"unsupported frame version {version}")
    expected = _HEADER.size + 4 * n_queries * dim
    if len(blob) != expected:
        raise FramingError(f"frame blob is {len(blob)} bytes, header implies {expected}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).astype(np.float64)
    return FeatureFrame.from_array(data.reshape(n_queries, dim))


def encode_request(op: int, body: bytes) -> bytes:
    return _REQ_HEAD.pack(op, len(body)) + body


def encode_score_body(name: str, a: bytes, b: bytes) -> bytes:
    name_b = name.encode("utf-8")
    return b"".join(
        [_U32.pack(len(name_b)), name_b, _U32.pack(len(a)), a, _U32.pack(len(b)), b]
    )


class _StreamTransport:
    """Blocking read/write over paired binary file objects."""

    def __init__(self, reader, writer, proc: Optional[subprocess.Popen] = None):
        self._reader = reader
        self._writer = writer
        self._proc = proc

    def send(self, blob: bytes) -> None:
        try:
            self._writer.write(blob)
            self._writer.flush()
        except OSError as exc:
            raise BridgeError(f"bridge connection lost while sending: {exc}") from exc

    def recv_exact(self, n: int) -> bytes:
        chunks = []
        remaining = n
        while remaining:
            try:
                chunk = self._reader.read(remaining)
            except OSError as exc:
                raise BridgeError(f"bridge connection lost while receiving: {exc}") from exc
            if not chunk:
                raise BridgeError(f"bridge connection closed mid-response ({remaining} bytes short)")
            chunks.append(chunk)
            remaining -= len(chunk)
        return b"".join(chunks)

    def close(self) -> None:
        for stream in (self._writer, self._reader):
            try:
                stream.close()
            except OSError:
                pass
        if self._proc is not None:
            try:
                self._proc.terminate()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()


class BridgeCodec(SemanticCodec):
    """SemanticCodec backed by a protocol server on a local stream.

    One in-flight request per connection; not thread-safe. Use one
    instance (and one server connection) per worker.
    """

    def __init__(
        self,
        transport: _StreamTransport,
        n_queries: int = DEFAULT_N_QUERIES,
        dim: int = DEFAULT_DIM,
        image_shape: tuple[int, int, int] = DEFAULT_IMAGE_SHAPE,
    ):
        self.n_queries = int(n_queries)
        self.dim = int(dim)
        self.image_shape = tuple(int(v) for v in image_shape)
        self._transport = transport

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_streams(cls, reader, writer, **kwargs) -> "BridgeCodec":
        return cls(_StreamTransport(reader, writer), **kwargs)

    @classmethod
    def spawn(cls, command: list[str], **kwargs) -> "BridgeCodec":
        """Start a server subprocess and talk over its stdio."""
        proc = subprocess.Popen(command, stdin=subprocess.PIPE, stdout=subprocess.PIPE)
        return cls(_StreamTransport(proc.stdout, proc.stdin, proc=proc), **kwargs)

    @classmethod
    def connect_unix(cls, path, **kwargs) -> "BridgeCodec":
        sock = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
        sock.connect(str(path))
        return cls(_StreamTransport(sock.makefile("rb"), sock.makefile("wb")), **kwargs)

    def close(self) -> None:
        self._transport.close()

    def __enter__(self) -> "BridgeCodec":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- protocol -------------------------------------------------------

    def call(self, op: int, body: bytes) -> bytes:
        """One request/response exchange; ERROR responses raise BridgeError."""
        self._transport.send(encode_request(op, body))
        head = self._transport.recv_exact(_REQ_HEAD.size)
        status, body_len = _REQ_HEAD.unpack(head)
        response = self._transport.recv_exact(body_len) if body_len else b""
        if status == STATUS_OK:
            return response
        if status == STATUS_ERROR:
            raise BridgeError(response.decode("utf-8", errors="replace") or "unspecified bridge error")
        raise FramingError(f"unknown response status {status}")

    # -- SemanticCodec --------------------------------------------------

    def encode(self, image) -> FeatureFrame:
        image = check_image_array(image)
        frame = decode_frame(self.call(OP_ENCODE_IMAGE, ppm_bytes(image)))
        if frame.n_queries != self.n_queries or frame.dim != self.dim:
            raise GeometryError(
                f"server returned a ({frame.n_queries}, {frame.dim}) frame, "
                f"configured for ({self.n_queries}, {self.dim})"
            )
        return frame

    def decode_text(self, frame: FeatureFrame) -> tuple[str, float]:
        body = self.call(OP_DECODE_TEXT, encode_frame(frame))
        # The wire carries no confidence; report certainty.
        return body.decode("utf-8"), 1.0

    def decode_image_raw(self, frame: FeatureFrame) -> bytes:
        """The server's raw DECODE_IMAGE response body."""
        return self.call(OP_DECODE_IMAGE, encode_frame(frame))

    def decode_image(self, frame: FeatureFrame, image_shape=None) -> np.ndarray:
        shape = tuple(int(v) for v in (image_shape if image_shape is not None else self.image_shape))
        body = self.decode_image_raw(frame)
        if body[:2] in (b"P6", b"P5") or body[:8] == b"farbfeld":
            import tempfile
            from pathlib import Path

            with tempfile.TemporaryDirectory() as tmp:
                raster = Path(tmp) / "decoded.raster"
                raster.write_bytes(body)
                return read_farbfeld(raster) if body[:8] == b"farbfeld" else read_ppm(raster)
        # Loopback servers answer with a frame; unpack its payload into
        # the requested image shape (truncate or zero-pad).
        echoed = decode_frame(body)
        total = int(np.prod(shape))
        flat = np.zeros(total)
        values = echoed.flat()[:total]
        flat[: values.size] = values
        return flat.reshape(shape)

    def score(self, name: str, a: bytes, b: bytes) -> float:
        body = self.call(OP_SCORE, encode_score_body(name, a, b))
        if len(body) != 8:
            raise FramingError(f"SCORE response must be 8 bytes, got {len(body)}")
        return struct.unpack("<d", body)[0]
