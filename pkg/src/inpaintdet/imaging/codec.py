"""Lossless image decoding and encoding: PNG and NetPBM (P2, P3, P5, P6).

Images are returned as float64 arrays in [0, 1] with shape ``(H, W)`` for
grayscale or ``(H, W, 3)`` for RGB.  Alpha channels are dropped on decode.

Only the standard library (``zlib``, ``struct``) and numpy are used, so
16-bit RGB PNGs keep their full precision.
"""

import struct
import zlib
from pathlib import Path

import numpy as np

from ..errors import DecodeError

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# colour type -> samples per pixel
_PNG_CHANNELS = {0: 1, 2: 3, 3: 1, 4: 2, 6: 4}
_PNG_DEPTHS = {
    0: (1, 2, 4, 8, 16),
    2: (8, 16),
    3: (1, 2, 4, 8),
    4: (8, 16),
    6: (8, 16),
}


def decode_image(data):
    """Decode a PNG or NetPBM byte stream into a float image in [0, 1].

    8-bit samples are scaled by 1/255 and 16-bit samples by 1/65535 (NetPBM
    streams are scaled by 1/maxval, which coincides for the usual maxvals).

    Raises
    ------
    DecodeError
        If the stream is truncated, corrupt or uses an unsupported feature.
        The message names the byte offset where decoding failed, when known.
    """
    data = bytes(data)
    if data.startswith(PNG_SIGNATURE):
        return _decode_png(data)
    if len(data) >= 2 and data[:1] == b"P" and data[1:2] in b"2356":
        return _decode_netpbm(data)
    raise DecodeError("unrecognised image signature (expected PNG or NetPBM P2/P3/P5/P6)", 0)


def read_image(path):
    """Read and decode an image file."""
    path = Path(path)
    return decode_image(path.read_bytes())


def decode_raw(data):
    """Decode to integer samples, returning ``(samples, maxval)``.

    Used where the caller needs the stored integer values (label maps,
    masks) rather than normalized floats.
    """
    data = bytes(data)
    if data.startswith(PNG_SIGNATURE):
        samples, depth = _decode_png_samples(data)
        if depth is None:
            return samples, 255
        return samples, (1 << depth) - 1
    if len(data) >= 2 and data[:1] == b"P" and data[1:2] in b"2356":
        return _decode_netpbm_samples(data)
    raise DecodeError("unrecognised image signature (expected PNG or NetPBM P2/P3/P5/P6)", 0)


# ---------------------------------------------------------------- PNG ---


def _decode_png(data):
    samples, depth = _decode_png_samples(data)
    if depth is None:  # palette, already expanded to 8-bit RGB
        return samples.astype(np.float64) / 255.0
    return samples.astype(np.float64) / float((1 << depth) - 1)


def _decode_png_samples(data):
    pos = len(PNG_SIGNATURE)
    header = None
    palette = None
    idat = []
    seen_end = False
    while pos < len(data):
        if pos + 8 > len(data):
            raise DecodeError("truncated chunk header", pos)
        length, ctype = struct.unpack(">I4s", data[pos:pos + 8])
        body_start = pos + 8
        body_end = body_start + length
        if body_end + 4 > len(data):
            raise DecodeError(f"truncated {ctype!r} chunk (declared length {length})", pos)
        body = data[body_start:body_end]
        (crc,) = struct.unpack(">I", data[body_end:body_end + 4])
        if zlib.crc32(ctype + body) & 0xFFFFFFFF != crc:
            raise DecodeError(f"CRC mismatch in {ctype!r} chunk", pos)
        if ctype == b"IHDR":
            if length != 13:
                raise DecodeError("IHDR chunk must be 13 bytes", pos)
            header = struct.unpack(">IIBBBBB", body)
        elif ctype == b"PLTE":
            if length % 3:
                raise DecodeError("PLTE length not a multiple of 3", pos)
            palette = np.frombuffer(body, dtype=np.uint8).reshape(-1, 3)
        elif ctype == b"IDAT":
            idat.append(body)
        elif ctype == b"IEND":
            seen_end = True
            break
        elif header is None:
            raise DecodeError(f"{ctype!r} chunk before IHDR", pos)
        pos = body_end + 4

    if header is None:
        raise DecodeError("missing IHDR chunk", len(PNG_SIGNATURE))
    if not seen_end:
        raise DecodeError("missing IEND chunk", len(data))
    width, height, depth, ctype, compression, filt, interlace = header
    if width == 0 or height == 0:
        raise DecodeError("zero image dimension", len(PNG_SIGNATURE) + 8)
    if ctype not in _PNG_CHANNELS or depth not in _PNG_DEPTHS[ctype]:
        raise DecodeError(f"unsupported colour type {ctype} with bit depth {depth}",
                          len(PNG_SIGNATURE) + 8)
    if compression != 0 or filt != 0:
        raise DecodeError("unknown compression or filter method", len(PNG_SIGNATURE) + 8)
    if interlace != 0:
        raise DecodeError("interlaced (Adam7) PNG is not supported", len(PNG_SIGNATURE) + 8)
    if ctype == 3 and palette is None:
        raise DecodeError("palette image without PLTE chunk", len(PNG_SIGNATURE))
    if not idat:
        raise DecodeError("no IDAT chunk", len(PNG_SIGNATURE))

    try:
        raw = zlib.decompress(b"".join(idat))
    except zlib.error as exc:
        raise DecodeError(f"corrupt zlib stream in IDAT: {exc}") from None

    channels = _PNG_CHANNELS[ctype]
    bits_per_pixel = channels * depth
    stride = (width * bits_per_pixel + 7) // 8
    bpp = max(1, bits_per_pixel // 8)
    if len(raw) < height * (stride + 1):
        raise DecodeError(
            f"decompressed image data too short ({len(raw)} < {height * (stride + 1)} bytes)")
    rows = _unfilter(raw, height, stride, bpp)

    if depth == 16:
        samples = rows.view(">u2").reshape(height, width * channels).astype(np.uint16)
    elif depth == 8:
        samples = rows[:, :width * channels]
    else:
        bits = np.unpackbits(rows, axis=1)
        bits = bits[:, :width * depth].reshape(height, width, depth)
        weights = (1 << np.arange(depth - 1, -1, -1)).astype(np.uint8)
        samples = (bits * weights).sum(axis=2).astype(np.uint8)
    samples = samples.reshape(height, width, channels)

    if ctype == 3:
        index = samples[..., 0]
        if index.max() >= len(palette):
            raise DecodeError("palette index out of range")
        return palette[index], None
    if ctype == 0:
        return samples[..., 0], depth
    if ctype == 4:
        return samples[..., 0], depth
    return samples[..., :3], depth


def _unfilter(raw, height, stride, bpp):
    buf = np.frombuffer(raw, dtype=np.uint8, count=height * (stride + 1)).reshape(height, stride + 1)
    out = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.int32)
    for y in range(height):
        ftype = buf[y, 0]
        line = buf[y, 1:].astype(np.int32)
        if ftype == 0:
            cur = line
        elif ftype == 1:
            cur = _unfilter_sub(line, bpp)
        elif ftype == 2:
            cur = (line + prev) & 0xFF
        elif ftype == 3:
            cur = line.tolist()
            up = prev.tolist()
            for i in range(stride):
                left = cur[i - bpp] if i >= bpp else 0
                cur[i] = (cur[i] + ((left + up[i]) >> 1)) & 0xFF
            cur = np.array(cur, dtype=np.int32)
        elif ftype == 4:
            cur = line.tolist()
            up = prev.tolist()
            for i in range(stride):
                a = cur[i - bpp] if i >= bpp else 0
                b = up[i]
                c = up[i - bpp] if i >= bpp else 0
                p = a + b - c
                pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                if pa <= pb and pa <= pc:
                    pred = a
                elif pb <= pc:
                    pred = b
                else:
                    pred = c
                cur[i] = (cur[i] + pred) & 0xFF
            cur = np.array(cur, dtype=np.int32)
        else:
            raise DecodeError(f"invalid filter type {ftype} on row {y}")
        out[y] = cur
        prev = cur.astype(np.int32)
    return out


def _unfilter_sub(line, bpp):
    n = len(line)
    pad = (-n) % bpp
    lanes = np.concatenate([line, np.zeros(pad, dtype=line.dtype)]).reshape(-1, bpp)
    return (np.cumsum(lanes, axis=0) & 0xFF).reshape(-1)[:n]


def _png_chunk(ctype, body):
    crc = zlib.crc32(ctype + body) & 0xFFFFFFFF
    return struct.pack(">I", len(body)) + ctype + body + struct.pack(">I", crc)


def encode_png(img, bit_depth=8):
    """Encode a float image in [0, 1] (or an integer array) as PNG bytes."""
    samples = _quantize(img, bit_depth)
    if samples.ndim == 2:
        ctype, channels = 0, 1
    elif samples.ndim == 3 and samples.shape[2] == 3:
        ctype, channels = 2, 3
    else:
        raise ValueError(f"cannot encode array of shape {samples.shape} as PNG")
    height, width = samples.shape[:2]
    if bit_depth == 16:
        rowbytes = samples.astype(">u2").reshape(height, width * channels).view(np.uint8)
    else:
        rowbytes = samples.astype(np.uint8).reshape(height, width * channels)
    filtered = np.concatenate([np.zeros((height, 1), dtype=np.uint8), rowbytes], axis=1)
    ihdr = struct.pack(">IIBBBBB", width, height, bit_depth, ctype, 0, 0, 0)
    return (PNG_SIGNATURE + _png_chunk(b"IHDR", ihdr)
            + _png_chunk(b"IDAT", zlib.compress(filtered.tobytes(), 6))
            + _png_chunk(b"IEND", b""))


# ------------------------------------------------------------- NetPBM ---


def _decode_netpbm(data):
    samples, maxval = _decode_netpbm_samples(data)
    return samples.astype(np.float64) / float(maxval)


def _netpbm_tokens(data, count, pos):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if pos >= n:
            raise DecodeError("truncated NetPBM header", pos)
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tok = data[start:pos]
        if not tok.isdigit():
            raise DecodeError(f"expected a decimal integer, found {tok[:16]!r}", start)
        tokens.append((int(tok), start))
    return tokens, pos


def _decode_netpbm_samples(data):
    magic = data[:2]
    channels = 3 if magic in (b"P3", b"P6") else 1
    tokens, pos = _netpbm_tokens(data, 3, 2)
    (width, w_off), (height, h_off), (maxval, m_off) = tokens
    if width == 0 or height == 0:
        raise DecodeError("zero image dimension", w_off if width == 0 else h_off)
    if not 1 <= maxval <= 65535:
        raise DecodeError(f"maxval {maxval} outside 1..65535", m_off)
    count = width * height * channels

    if magic in (b"P5", b"P6"):
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise DecodeError("missing whitespace after maxval", pos)
        pos += 1
        nbytes = 1 if maxval < 256 else 2
        need = count * nbytes
        if len(data) - pos < need:
            raise DecodeError(
                f"raster truncated: need {need} bytes, have {len(data) - pos}", pos)
        dtype = np.uint8 if nbytes == 1 else ">u2"
        flat = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.uint16)
        if flat.max(initial=0) > maxval:
            bad = int(np.argmax(flat > maxval))
            raise DecodeError(f"sample exceeds maxval {maxval}", pos + bad * nbytes)
    else:
        values, _ = _netpbm_tokens(data, count, pos) if count else ([], pos)
        for value, offset in values:
            if value > maxval:
                raise DecodeError(f"sample {value} exceeds maxval {maxval}", offset)
        flat = np.array([v for v, _ in values], dtype=np.uint16)
    if channels == 3:
        return flat.reshape(height, width, 3), maxval
    return flat.reshape(height, width), maxval


def encode_netpbm(img, bit_depth=8):
    """Encode as binary PGM (grayscale) or PPM (RGB)."""
    samples = _quantize(img, bit_depth)
    if samples.ndim == 2:
        magic = b"P5"
    elif samples.ndim == 3 and samples.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"cannot encode array of shape {samples.shape} as NetPBM")
    height, width = samples.shape[:2]
    maxval = (1 << bit_depth) - 1
    header = b"%s\n%d %d\n%d\n" % (magic, width, height, maxval)
    if bit_depth == 16:
        body = samples.astype(">u2").tobytes()
    else:
        body = samples.astype(np.uint8).tobytes()
    return header + body


# ------------------------------------------------------------- common ---


def _quantize(img, bit_depth):
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    arr = np.asarray(img)
    maxval = (1 << bit_depth) - 1
    if arr.dtype == np.bool_:
        return arr.astype(np.uint16) * maxval
    if np.issubdtype(arr.dtype, np.integer):
        if arr.min(initial=0) < 0 or arr.max(initial=0) > maxval:
            raise ValueError(f"integer samples outside 0..{maxval}")
        return arr.astype(np.uint16)
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite samples")
    return np.rint(np.clip(arr, 0.0, 1.0) * maxval).astype(np.uint16)


def encode_image(img, fmt="png", bit_depth=8):
    """Encode ``img`` as ``fmt`` ('png', 'pgm', 'ppm' or 'pnm')."""
    fmt = fmt.lower().lstrip(".")
    if fmt == "png":
        return encode_png(img, bit_depth)
    if fmt in ("pgm", "ppm", "pnm"):
        return encode_netpbm(img, bit_depth)
    raise ValueError(f"unsupported output format {fmt!r}")


def write_image(path, img, bit_depth=8):
    """Encode ``img`` according to the file suffix of ``path`` and write it."""
    path = Path(path)
    path.write_bytes(encode_image(img, path.suffix or "png", bit_depth))
    return path
