"""Deterministic single-file container: JSON header line + raw array bytes.

Layout: one UTF-8 JSON line describing the payload (format tag, version,
user metadata, array names/dtypes/shapes), then the arrays' C-order
little-endian bytes concatenated in listed order.  Writing the same
content twice yields byte-identical files (no timestamps, sorted keys),
and float arrays round-trip bit-exactly.
"""

import json

import numpy as np

from .exceptions import DataFormatError

FORMAT_TAG = "lstcn-container"
FORMAT_VERSION = 1


def write_container(path, meta, arrays):
    """Write `meta` (JSON-serializable dict) and named float64 arrays."""
    descriptors = []
    blobs = []
    for name, arr in arrays.items():
        a = np.ascontiguousarray(arr, dtype="<f8")
        descriptors.append({"name": name, "dtype": "<f8", "shape": list(a.shape)})
        blobs.append(a.tobytes())
    header = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "meta": meta,
        "arrays": descriptors,
    }
    line = json.dumps(header, sort_keys=True, separators=(",", ":"))
    with open(path, "wb") as fh:
        fh.write(line.encode("utf-8"))
        fh.write(b"\n")
        for blob in blobs:
            fh.write(blob)


def read_container(path):
    """Read a container written by `write_container` -> (meta, arrays)."""
    with open(path, "rb") as fh:
        line = fh.readline()
        try:
            header = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DataFormatError(f"{path}: not a recognized container file") from exc
        if header.get("format") != FORMAT_TAG:
            raise DataFormatError(
                f"{path}: unexpected format tag {header.get('format')!r}"
            )
        if header.get("version") != FORMAT_VERSION:
            raise DataFormatError(
                f"{path}: unsupported container version {header.get('version')!r}"
            )
        arrays = {}
        for desc in header["arrays"]:
            shape = tuple(desc["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * 8)
            if len(raw) != count * 8:
                raise DataFormatError(f"{path}: truncated array {desc['name']!r}")
            arrays[desc["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    return header["meta"], arrays
