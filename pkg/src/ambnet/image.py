"""Adjacency-matrix binary images and their portable graymap encoding.

Pixel (i, j) is white (1) iff vertices i and j are adjacent, so images of
undirected graphs are symmetric with a black diagonal. Files use binary PGM
(P5), one byte per pixel, white stored as 255 and black as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph


class PgmDecodeError(ValueError):
    """Malformed or truncated portable graymap data."""


@dataclass(frozen=True, eq=False)
class AmbImage:
    """Square binary image; pixels are uint8 values in {0, 1}."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] != px.shape[1]:
            raise ValueError(f"image must be square, got shape {px.shape}")
        if not np.isin(px, (0, 1)).all():
            raise ValueError("pixels must be binary (0 or 1)")
        px = px.astype(np.uint8)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def side(self) -> int:
        return self.pixels.shape[0]

    @property
    def white_count(self) -> int:
        return int(np.count_nonzero(self.pixels))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AmbImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


def render(g: Graph) -> AmbImage:
    """Map a graph to its n-by-n binary image (white = edge present)."""
    return AmbImage(g.adj.astype(np.uint8))


def to_graph(img: AmbImage) -> Graph:
    """Inverse of :func:`render` for symmetric zero-diagonal images."""
    return Graph(img.pixels.astype(bool))


def pad_center(img: AmbImage, target_side: int) -> AmbImage:
    """Center *img* on a black canvas of the given side.

    The offset is floor((target - side) / 2) on both axes. White-pixel count
    is preserved exactly.
    """
    if target_side < img.side:
        raise ValueError(f"target side {target_side} is smaller than image side {img.side}")
    if target_side == img.side:
        return img
    offset = (target_side - img.side) // 2
    canvas = np.zeros((target_side, target_side), dtype=np.uint8)
    canvas[offset : offset + img.side, offset : offset + img.side] = img.pixels
    return AmbImage(canvas)


def encode_pgm(img: AmbImage) -> bytes:
    """Binary PGM (P5) bytes: header with dimensions, then 0/255 payload."""
    header = f"P5\n{img.side} {img.side}\n255\n".encode("ascii")
    return header + (img.pixels * np.uint8(255)).tobytes()


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comments, then collect one token.
    while pos < len(data):
        ch = data[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    if pos >= len(data):
        raise PgmDecodeError("truncated header")
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def decode_pgm(data: bytes) -> AmbImage:
    """Parse P5 bytes back into an image; strict inverse of :func:`encode_pgm`.

    Requires a square image, maxval 255 and a payload of only 0/255 bytes.
    """
    magic, pos = _read_header_token(data, 0)
    if magic != b"P5":
        raise PgmDecodeError(f"expected P5 magic, got {magic!r}")
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _read_header_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise PgmDecodeError(f"non-integer {name}: {token!r}") from None
    width, height, maxval = fields
    if width != height:
        raise PgmDecodeError(f"image must be square, got {width}x{height}")
    if width <= 0:
        raise PgmDecodeError(f"dimensions must be positive, got {width}x{height}")
    if maxval != 255:
        raise PgmDecodeError(f"expected maxval 255, got {maxval}")
    pos += 1  # single whitespace byte separates header from payload
    payload = data[pos:]
    if len(payload) != width * height:
        raise PgmDecodeError(
            f"payload must be exactly {width * height} bytes, got {len(payload)}"
        )
    raw = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    if not np.isin(raw, (0, 255)).all():
        raise PgmDecodeError("payload bytes must be 0 or 255")
    return AmbImage((raw == 255).astype(np.uint8))
