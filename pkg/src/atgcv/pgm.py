"""Binary PGM (P5, 8-bit) images mapped to floats in ``[0, 1]``."""

import numpy as np

__all__ = ["PgmError", "read_pgm", "write_pgm", "to_gray", "from_gray"]


class PgmError(ValueError):
    """Malformed or unsupported PGM file."""


def _tokens(data):
    # header fields separated by whitespace; '#' starts a comment to end of line
    pos = 0
    fields = []
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise PgmError("truncated PGM header")
        fields.append(data[start:pos])
    return fields, pos + 1  # exactly one whitespace byte before the raster


def read_pgm(path):
    """Read a P5 file; returns an ``(rows, cols)`` float array in ``[0, 1]``."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields, offset = _tokens(data)
    if fields[0] != b"P5":
        raise PgmError(f"unsupported PGM magic {fields[0]!r}; only binary P5 is handled")
    try:
        cols, rows, maxval = (int(f) for f in fields[1:])
    except ValueError as exc:
        raise PgmError("non-integer PGM header field") from exc
    if not 0 < maxval < 256:
        raise PgmError(f"only 8-bit PGM is supported (maxval {maxval})")
    if len(data) - offset < rows * cols:
        raise PgmError("truncated PGM raster")
    raster = np.frombuffer(data, dtype=np.uint8, count=rows * cols, offset=offset)
    return raster.reshape(rows, cols).astype(float) / maxval


def from_gray(img):
    """Clamp to ``[0, 1]`` and quantize to ``uint8``."""
    return np.rint(np.clip(np.asarray(img, dtype=float), 0.0, 1.0) * 255.0).astype(np.uint8)


def to_gray(raster):
    return np.asarray(raster, dtype=float) / 255.0


def write_pgm(path, img):
    """Write a float image (clamped to ``[0, 1]``) as P5 with maxval 255."""
    q = from_gray(img)
    rows, cols = q.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (cols, rows))
        fh.write(q.tobytes())
