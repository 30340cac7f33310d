"""File formats: diagnostics CSV, field snapshots, run manifests.

Numbers are written with 17 significant digits so every float64 reads
back bit-for-bit; identical runs therefore give byte-identical files.
"""

import hashlib
import math
import os
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import FIELDS, Series

FLOAT_FMT = "%.17g"
MANIFEST_CONFIG_MARK = "# --- config ---"


def fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FMT % x


def write_series(path, series):
    """Write a :class:`Series` with a header naming every record field."""
    cols = [series[name] for name in FIELDS]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(FIELDS) + "\n")
        for row in zip(*cols):
            fh.write(",".join(fmt(x) for x in row) + "\n")


def read_series(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != list(FIELDS):
            raise ValueError(f"{path}: unexpected header {header[:3]}...")
        data = np.loadtxt(fh, delimiter=",", ndmin=2) if os.path.getsize(path) else None
    if data is None or data.size == 0:
        return Series()
    return Series.from_columns({name: data[:, i] for i, name in enumerate(FIELDS)})


def snapshot_name(t):
    return f"snap_{float(t)!r}.csv"


def write_snapshot(path, t, z, u, v, psi, nu):
    """CSV with columns z,u,v,psi and a comment line carrying t, N and nu."""
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# t = {fmt(t)}, N = {len(z)}, nu = {fmt(nu)}\n")
        fh.write("z,u,v,psi\n")
        for row in zip(z, u, v, psi):
            fh.write(",".join(fmt(x) for x in row) + "\n")


def read_snapshot(path):
    """Return (meta, columns) where meta has t, N, nu and columns maps name -> array."""
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: missing snapshot header")
        meta = {}
        for part in first[1:].split(","):
            k, _, v = part.partition("=")
            meta[k.strip()] = float(v)
        meta["N"] = int(meta["N"])
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return meta, {name: data[:, i] for i, name in enumerate(names)}


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, entries, files, config_text):
    """Key/value header, checksums of ``files`` and the full config echo.

    Written last, so the checksums cover the final content of every file.
    """
    out_dir = Path(path).parent
    lines = ["# run manifest", f"version = {__version__}"]
    for k, v in entries.items():
        lines.append(f"{k} = {fmt(v) if isinstance(v, float) else v}")
    for name in sorted(files):
        lines.append(f"sha256 {name} = {sha256(out_dir / name)}")
    lines.append(MANIFEST_CONFIG_MARK)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n" + config_text)


def read_manifest(path):
    """Return (entries, checksums, config_text)."""
    entries, sums = {}, {}
    text = Path(path).read_text()
    head, _, config_text = text.partition(MANIFEST_CONFIG_MARK + "\n")
    for line in head.splitlines():
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" = ")
        if key.startswith("sha256 "):
            sums[key[len("sha256 "):]] = value
        else:
            entries[key] = value
    return entries, sums, config_text


def write_table(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) if isinstance(x, (float, np.floating)) else str(x)
                              for x in row) + "\n")
