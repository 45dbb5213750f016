"""Minimal PGM (portable graymap) reader and writer, 8-bit only.

Reads both P2 (ASCII) and P5 (binary) variants with `#` comments in the
header; writes P2. Values are returned raw together with the file's
maxval so the caller controls normalization.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import InputError

_WHITESPACE = b" \t\r\n\x0b\x0c"


def _header_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    """First `count` whitespace-separated tokens, skipping # comments.

    Returns the tokens and the offset one byte past the final token's
    single trailing whitespace byte (where P5 raster data begins).
    """
    tokens: list[bytes] = []
    i = 0
    while len(tokens) < count:
        while i < len(buf):
            if buf[i] in _WHITESPACE:
                i += 1
            elif buf[i] == ord("#"):
                nl = buf.find(b"\n", i)
                if nl < 0:
                    raise InputError("unterminated comment in PGM header")
                i = nl + 1
            else:
                break
        if i >= len(buf):
            raise InputError("truncated PGM header")
        start = i
        while i < len(buf) and buf[i] not in _WHITESPACE:
            i += 1
        tokens.append(buf[start:i])
        if len(tokens) == count and i < len(buf):
            i += 1
    return tokens, i


def read_pgm(path: str | os.PathLike) -> tuple[np.ndarray, int]:
    """Read an 8-bit PGM file.

    Returns:
        (raw, maxval): raw is a (height, width) float array of pixel
        values in [0, maxval].

    Raises:
        InputError: on malformed content or unsupported variants.
    """
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read image file {path}: {exc}") from exc
    if buf[:2] not in (b"P2", b"P5"):
        raise InputError(f"{path}: not a PGM file (P2/P5), magic {buf[:2]!r}")
    magic = buf[:2].decode()
    tokens, offset = _header_tokens(buf, 4)
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric PGM header fields {tokens[1:]}") from exc
    if width < 1 or height < 1:
        raise InputError(f"{path}: invalid dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise InputError(f"{path}: only 8-bit PGM supported, maxval {maxval}")
    n = width * height
    if magic == "P2":
        fields = buf[offset:].split()
        if len(fields) != n:
            raise InputError(f"{path}: expected {n} pixels, found {len(fields)}")
        try:
            flat = np.array([int(v) for v in fields], dtype=np.int64)
        except ValueError as exc:
            raise InputError(f"{path}: non-numeric pixel data") from exc
    else:
        raster = buf[offset:offset + n]
        if len(raster) < n:
            raise InputError(f"{path}: expected {n} raster bytes, found {len(raster)}")
        flat = np.frombuffer(raster, dtype=np.uint8).astype(np.int64)
    if flat.min() < 0 or flat.max() > maxval:
        raise InputError(f"{path}: pixel value outside [0, {maxval}]")
    return flat.reshape(height, width).astype(np.float64), maxval


def write_pgm(path: str | os.PathLike, raw: np.ndarray, maxval: int = 255) -> None:
    """Write a (height, width) array of integers in [0, maxval] as ASCII PGM."""
    raw = np.asarray(raw)
    if raw.ndim != 2:
        raise InputError(f"PGM data must be 2-D, got shape {raw.shape}")
    if not 1 <= maxval <= 255:
        raise InputError(f"only 8-bit PGM supported, maxval {maxval}")
    pixels = np.rint(raw).astype(np.int64)
    if pixels.min() < 0 or pixels.max() > maxval:
        raise InputError(f"pixel values outside [0, {maxval}]")
    lines = ["P2", f"{raw.shape[1]} {raw.shape[0]}", f"{maxval}"]
    lines += [" ".join(str(v) for v in row) for row in pixels]
    Path(path).write_text("\n".join(lines) + "\n")
