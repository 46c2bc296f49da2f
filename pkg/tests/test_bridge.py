import contextlib
import socket
import struct
import threading

import numpy as np
import pytest

from semlink import FeatureFrame
from semlink.bridge import (
    MAGIC,
    OP_DECODE_IMAGE,
    OP_DECODE_TEXT,
    OP_ENCODE_IMAGE,
    OP_SCORE,
    PROTOCOL_VERSION,
    STATUS_ERROR,
    STATUS_OK,
    BridgeCodec,
    decode_frame,
    encode_frame,
    encode_request,
    encode_score_body,
)
from semlink.errors import BridgeError, FramingError, GeometryError, VersionError
from semlink.images import ppm_bytes

_REQ_HEAD = struct.Struct("<BI")


def _serve(sock, script):
    """Answer one scripted handler per request, then close the stream.

    A handler returns (status, body) for a well-formed response or
    ("raw", blob) to write arbitrary bytes and hang up.
    """
    reader = sock.makefile("rb")
    writer = sock.makefile("wb")
    try:
        for handler in script:
            head = reader.read(_REQ_HEAD.size)
            if len(head) < _REQ_HEAD.size:
                return
            op, body_len = _REQ_HEAD.unpack(head)
            body = reader.read(body_len) if body_len else b""
            status, payload = handler(op, body)
            if status == "raw":
                writer.write(payload)
                writer.flush()
                return
            writer.write(_REQ_HEAD.pack(status, len(payload)) + payload)
            writer.flush()
    finally:
        with contextlib.suppress(OSError):
            writer.close()
            reader.close()
            sock.close()


@contextlib.contextmanager
def bridge_pair(script, **kwargs):
    server_sock, client_sock = socket.socketpair()
    thread = threading.Thread(target=_serve, args=(server_sock, script), daemon=True)
    thread.start()
    codec = BridgeCodec.from_streams(
        client_sock.makefile("rb"), client_sock.makefile("wb"), **kwargs
    )
    try:
        yield codec
    finally:
        codec.close()
        with contextlib.suppress(OSError):
            client_sock.close()
        thread.join(timeout=5)


class TestFrameWire:
    def test_pinned_bytes_for_tiny_frame(self):
        frame = FeatureFrame.from_array(np.array([[1.0, -2.5]]))
        blob = encode_frame(frame)
        expected = bytes.fromhex(
            "564c4631" "0100" "01000000" "02000000" "0000803f" "000020c0"
        )
        assert blob == expected
        assert len(blob) == 22

    def test_roundtrip_bit_exact_after_first_narrowing(self):
        # values already representable in float32, including negative
        # zero, the smallest subnormal, and the extremes of the range:
        # encode -> decode -> encode must be byte-identical
        values = np.array(
            [
                [-0.0, 0.15625, -2.5],
                [1.401298464324817e-45, -1.1754943508222875e-38, 3.4028234663852886e38],
            ]
        )
        frame = FeatureFrame.from_array(values)
        first = encode_frame(frame)
        again = encode_frame(decode_frame(first))
        assert first == again
        back = decode_frame(first)
        assert np.signbit(back.data[0, 0])
        np.testing.assert_array_equal(back.data, values)

    def test_header_fields(self):
        blob = encode_frame(FeatureFrame.from_array(np.zeros((3, 6))))
        magic, version, n_queries, dim = struct.unpack_from("<4sHII", blob)
        assert magic == MAGIC
        assert version == PROTOCOL_VERSION
        assert (n_queries, dim) == (3, 6)
        assert len(blob) == 14 + 4 * 18

    def test_decode_rejects_short_blob(self):
        with pytest.raises(FramingError):
            decode_frame(b"VLF1")

    def test_decode_rejects_bad_magic(self):
        blob = bytearray(encode_frame(FeatureFrame.from_array(np.zeros((1, 2)))))
        blob[:4] = b"XXXX"
        with pytest.raises(FramingError):
            decode_frame(bytes(blob))

    def test_decode_rejects_unknown_version(self):
        blob = bytearray(encode_frame(FeatureFrame.from_array(np.zeros((1, 2)))))
        blob[4:6] = struct.pack("<H", 9)
        with pytest.raises(VersionError):
            decode_frame(bytes(blob))

    def test_decode_rejects_length_mismatch(self):
        blob = encode_frame(FeatureFrame.from_array(np.zeros((1, 2))))
        with pytest.raises(FramingError):
            decode_frame(blob + b"\x00")
        with pytest.raises(FramingError):
            decode_frame(blob[:-1])


class TestRequestWire:
    def test_request_layout(self):
        assert encode_request(2, b"xyz") == bytes.fromhex("02" "03000000" "78797a")

    def test_score_body_layout(self):
        body = encode_score_body("m", b"A", b"BC")
        assert body == bytes.fromhex("01000000" "6d" "01000000" "41" "02000000" "4243")


class TestBridgeCodec:
    def test_decode_text(self):
        def handler(op, body):
            assert op == OP_DECODE_TEXT
            frame = decode_frame(body)
            assert frame.n_queries == 2
            return STATUS_OK, "a field of sunflowers under scattered clouds".encode()

        with bridge_pair([handler], n_queries=2, dim=3, image_shape=(1, 2, 3)) as codec:
            frame = FeatureFrame.from_array(np.arange(6.0).reshape(2, 3))
            text, confidence = codec.decode_text(frame)
        assert text == "a field of sunflowers under scattered clouds"
        assert confidence == 1.0

    def test_encode_checks_geometry(self, rng):
        good = FeatureFrame.from_array(rng.normal(size=(2, 3)).astype(np.float32).astype(float))

        def handler(op, body):
            assert op == OP_ENCODE_IMAGE
            assert body[:2] == b"P6"
            return STATUS_OK, encode_frame(good)

        with bridge_pair([handler], n_queries=2, dim=3, image_shape=(3, 2, 2)) as codec:
            frame = codec.encode(rng.random((3, 2, 2)))
        np.testing.assert_array_equal(frame.data, good.data)

    def test_encode_rejects_wrong_server_geometry(self, rng):
        def handler(op, body):
            return STATUS_OK, encode_frame(FeatureFrame.from_array(np.zeros((4, 4))))

        with bridge_pair([handler], n_queries=2, dim=3, image_shape=(3, 2, 2)) as codec:
            with pytest.raises(GeometryError):
                codec.encode(rng.random((3, 2, 2)))

    def test_error_response_raises_and_connection_survives(self):
        def fail(op, body):
            return STATUS_ERROR, "unsupported operation 9".encode()

        def ok(op, body):
            return STATUS_OK, b"recovered"

        with bridge_pair([fail, ok], n_queries=1, dim=2) as codec:
            with pytest.raises(BridgeError, match="unsupported operation 9"):
                codec.call(9, b"")
            assert codec.call(OP_DECODE_TEXT, b"") == b"recovered"

    def test_empty_error_message_still_raises(self):
        with bridge_pair([lambda op, body: (STATUS_ERROR, b"")]) as codec:
            with pytest.raises(BridgeError, match="unspecified"):
                codec.call(OP_DECODE_TEXT, b"")

    def test_unknown_status_is_framing_error(self):
        with bridge_pair([lambda op, body: (7, b"")]) as codec:
            with pytest.raises(FramingError):
                codec.call(OP_DECODE_TEXT, b"")

    def test_truncated_response_raises_bridge_error(self):
        def handler(op, body):
            return "raw", _REQ_HEAD.pack(STATUS_OK, 10) + b"abc"

        with bridge_pair([handler]) as codec:
            with pytest.raises(BridgeError, match="closed mid-response"):
                codec.call(OP_DECODE_TEXT, b"")

    def test_closed_server_raises_bridge_error(self):
        with bridge_pair([]) as codec:
            with pytest.raises(BridgeError):
                codec.call(OP_DECODE_TEXT, b"")

    def test_score_roundtrip(self):
        def handler(op, body):
            assert op == OP_SCORE
            assert body == encode_score_body("clipscore", b"abc", b"de")
            return STATUS_OK, struct.pack("<d", 0.25)

        with bridge_pair([handler]) as codec:
            assert codec.score("clipscore", b"abc", b"de") == 0.25

    def test_score_response_must_be_eight_bytes(self):
        with bridge_pair([lambda op, body: (STATUS_OK, b"\x00" * 7)]) as codec:
            with pytest.raises(FramingError):
                codec.score("m", b"", b"")

    def test_decode_image_raster_response(self, rng):
        image = rng.integers(0, 256, size=(3, 2, 2)).astype(float) / 255.0

        def handler(op, body):
            assert op == OP_DECODE_IMAGE
            return STATUS_OK, ppm_bytes(image)

        with bridge_pair([handler], n_queries=1, dim=4, image_shape=(3, 2, 2)) as codec:
            out = codec.decode_image(FeatureFrame.from_array(np.zeros((1, 4))))
        np.testing.assert_allclose(out, image, atol=1e-12)

    def test_decode_image_frame_response_pads_and_truncates(self):
        sent = FeatureFrame.from_array(np.array([[1.0, 2.0, 3.0, 4.0]]))

        def echo(op, body):
            return STATUS_OK, body

        with bridge_pair([echo, echo], n_queries=1, dim=4) as codec:
            padded = codec.decode_image(sent, image_shape=(1, 2, 3))
            np.testing.assert_array_equal(
                padded, np.array([1.0, 2.0, 3.0, 4.0, 0.0, 0.0]).reshape(1, 2, 3)
            )
            truncated = codec.decode_image(sent, image_shape=(1, 1, 3))
            np.testing.assert_array_equal(truncated, np.array([[[1.0, 2.0, 3.0]]]))
