"""Codec backends served over the bridge protocol.

A backend implements the four operations behind the wire format. The
shipped IdentityBackend exists for conformance testing: it is fully
deterministic, needs no model weights, and echoes frames bit-exactly.

A real-model backend (vision encoder in, generative decoders out)
plugs in by implementing the same four methods and registering under a
new name in BACKENDS; the server and wire layers need no changes.
"""

import zlib

from .wire import Frame, WireError, encode_frame


class IdentityBackend:
    """Deterministic reference backend.

    encode_image derives a frame from the raster bytes themselves,
    decode_image echoes the frame back bit-exactly, decode_text names
    the frame by geometry and payload checksum, and score reports
    whether the two artifacts are identical.
    """

    def __init__(self, n_queries: int = 32, dim: int = 768):
        if n_queries <= 0 or dim <= 0:
            raise WireError(f"backend geometry must be positive, got ({n_queries}, {dim})")
        self.n_queries = int(n_queries)
        self.dim = int(dim)

    def encode_image(self, raster: bytes) -> Frame:
        if not raster:
            raise WireError("ENCODE_IMAGE body is empty")
        count = self.n_queries * self.dim
        values = [raster[i % len(raster)] / 255.0 for i in range(count)]
        return Frame.from_values(self.n_queries, self.dim, values)

    def decode_text(self, frame: Frame) -> str:
        checksum = zlib.crc32(frame.payload)
        return f"identity frame {frame.n_queries}x{frame.dim} crc {checksum:08x}"

    def decode_image(self, frame: Frame) -> bytes:
        return encode_frame(frame)

    def score(self, name: str, a: bytes, b: bytes) -> float:
        return 1.0 if a == b else 0.0


BACKENDS = {"identity": IdentityBackend}


def make_backend(name: str, n_queries: int, dim: int):
    try:
        factory = BACKENDS[name]
    except KeyError:
        known = ", ".join(sorted(BACKENDS))
        raise WireError(f"unknown backend {name!r} (known: {known})") from None
    return factory(n_queries=n_queries, dim=dim)
