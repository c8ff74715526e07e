"""PGM image and CSV signal codecs.

PGM follows the Netpbm convention: magic P2 (ASCII) or P5 (binary),
whitespace-separated header with optional # comments, maxval (only 255 is
supported), then M*N samples in row-major order. Import maps {0..255} to
[0,1] by v/255; export clamps to [0,1] and quantizes with
round-half-away-from-zero. Nothing inside the pipeline ever clamps --
export is the only place.

CSV signals are single-row fields, one value per line (a single
comma-separated line is also accepted), written with 17 significant
digits so round trips are exact.
"""
from __future__ import annotations

import warnings

import numpy as np

from .errors import ParseError
from .grid import ScalarField

__all__ = ["read_pgm", "write_pgm", "read_csv_signal", "write_csv_signal"]

_WS = b" \t\r\n\x0b\x0c"


def _next_token(buf: bytes, pos: int, what: str) -> tuple[bytes, int, int]:
    n = len(buf)
    while pos < n:
        ch = buf[pos : pos + 1]
        if ch in _WS:
            pos += 1
        elif ch == b"#":
            nl = buf.find(b"\n", pos)
            pos = n if nl < 0 else nl + 1
        else:
            break
    if pos >= n:
        raise ParseError(f"unexpected end of data while reading {what}", offset=n)
    start = pos
    while pos < n and buf[pos : pos + 1] not in _WS and buf[pos : pos + 1] != b"#":
        pos += 1
    return buf[start:pos], start, pos


def _int_token(buf: bytes, pos: int, what: str) -> tuple[int, int, int]:
    tok, start, end = _next_token(buf, pos, what)
    try:
        return int(tok), start, end
    except ValueError:
        raise ParseError(f"invalid {what} {tok!r}", offset=start) from None


def read_pgm(data: bytes) -> ScalarField:
    """Decode P2/P5 bytes to a field with values in [0,1].

    Malformed input raises ParseError carrying the byte offset. The
    parser never reads past the declared payload; trailing bytes produce
    a warning and are left alone.
    """
    buf = bytes(data)
    magic, start, pos = _next_token(buf, 0, "magic number")
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"unsupported magic {magic!r}, expected P2 or P5", offset=start)
    width, start, pos = _int_token(buf, pos, "width")
    if width <= 0:
        raise ParseError(f"width must be positive, got {width}", offset=start)
    height, start, pos = _int_token(buf, pos, "height")
    if height <= 0:
        raise ParseError(f"height must be positive, got {height}", offset=start)
    maxval, start, pos = _int_token(buf, pos, "maxval")
    if maxval != 255:
        raise ParseError(f"unsupported maxval {maxval}, only 255", offset=start)
    count = width * height

    if magic == b"P5":
        if pos >= len(buf) or buf[pos : pos + 1] not in _WS:
            raise ParseError("expected single whitespace byte after maxval", offset=pos)
        payload_start = pos + 1
        payload = buf[payload_start : payload_start + count]
        if len(payload) < count:
            raise ParseError(
                f"payload truncated: expected {count} bytes, got {len(payload)}", offset=len(buf)
            )
        trailing = len(buf) - (payload_start + count)
        if trailing > 0:
            warnings.warn(f"{trailing} trailing bytes after PGM payload ignored")
        samples = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    else:
        values = np.empty(count, dtype=np.float64)
        for k in range(count):
            v, start, pos = _int_token(buf, pos, f"sample {k}")
            if not (0 <= v <= maxval):
                raise ParseError(f"sample {v} outside 0..{maxval}", offset=start)
            values[k] = v
        try:
            _, start, _ = _next_token(buf, pos, "")
        except ParseError:
            pass  # clean end of data
        else:
            warnings.warn(f"{len(buf) - start} trailing bytes after PGM payload ignored")
        samples = values

    return ScalarField((samples / 255.0).reshape(height, width))


def write_pgm(field: ScalarField, format: str = "P5") -> bytes:
    """Encode a field as PGM bytes; deterministic output.

    Values are clamped to [0,1] here (and only here) and quantized with
    round-half-away-from-zero, so 0.5 exports as 128.
    """
    if format not in ("P2", "P5"):
        raise ValueError(f"format must be 'P2' or 'P5', got {format!r}")
    clamped = np.clip(field.values, 0.0, 1.0)
    quantized = np.floor(clamped * 255.0 + 0.5).astype(np.uint8)
    header = f"{format}\n{field.width} {field.height}\n255\n".encode("ascii")
    if format == "P5":
        return header + quantized.tobytes()
    chunks = []
    flat = quantized.ravel()
    for k in range(0, flat.size, 17):  # keeps lines under 70 chars
        chunks.append(" ".join(str(v) for v in flat[k : k + 17]))
    return header + ("\n".join(chunks) + "\n").encode("ascii")


def read_csv_signal(text: str) -> ScalarField:
    """Parse a 1D signal: one value per line or one comma-separated line."""
    values = []
    for ln, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        for tok in stripped.split(","):
            tok = tok.strip()
            try:
                v = float(tok)
            except ValueError:
                raise ParseError(f"non-numeric token {tok!r}", line=ln) from None
            if not np.isfinite(v):
                raise ParseError(f"non-finite value {tok!r}", line=ln)
            values.append(v)
    if not values:
        raise ParseError("empty signal", line=1)
    return ScalarField(np.array(values).reshape(1, -1))


def write_csv_signal(field: ScalarField) -> str:
    """One value per line, 17 significant digits (exact round trip)."""
    if field.height != 1:
        raise ValueError(f"CSV signals are single-row fields, got {field.height} rows")
    return "\n".join(f"{v:.17g}" for v in field.values[0]) + "\n"
