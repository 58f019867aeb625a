"""Bundle manifests and matrix files.

A bundle on disk is one headerless comma-separated matrix file per
machine (T rows by d columns, row t = draw t) plus a small JSON manifest
naming the dimensions and the machine files.  Machine files are
referenced relative to the manifest so shard outputs produced on
separate machines can be collected into one directory later.

Values are serialized with 17 significant digits, which round-trips
float64 exactly.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import SubposteriorBundle
from .errors import DimensionMismatch, FileMissing, ParseError

FLOAT_FORMAT = "%.17g"


@dataclass
class BundleManifest:
    """Description of an on-disk bundle."""

    d: int
    T: int
    M: int
    machine_files: list = field(default_factory=list)
    created_by: str = ""
    seed: int | None = None

    def to_dict(self):
        out = {
            "d": self.d,
            "T": self.T,
            "M": self.M,
            "machine_files": list(self.machine_files),
            "created_by": self.created_by,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, raw):
        try:
            manifest = cls(
                d=int(raw["d"]),
                T=int(raw["T"]),
                M=int(raw["M"]),
                machine_files=list(raw["machine_files"]),
                created_by=str(raw.get("created_by", "")),
                seed=raw.get("seed"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed manifest: {exc}") from exc
        if len(manifest.machine_files) != manifest.M:
            raise DimensionMismatch(
                f"manifest lists {len(manifest.machine_files)} machine files "
                f"but M={manifest.M}"
            )
        return manifest


def write_matrix(path, matrix):
    """Write a (T, d) matrix as headerless CSV with full float precision."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    np.savetxt(path, matrix, fmt=FLOAT_FORMAT, delimiter=",")


def read_matrix(path):
    """Read a headerless comma-separated matrix as a (T, d) float array.

    Raises :class:`FileMissing` if the file does not exist and
    :class:`ParseError` (naming file, line and column) when a field is
    not a number or a row has the wrong width.
    """
    path = Path(path)
    if not path.exists():
        raise FileMissing(f"matrix file not found: {path}")
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError:
        _diagnose_matrix(path)
        raise  # unreachable unless the file changed under us


def _diagnose_matrix(path):
    """Re-parse a bad matrix file to pin down the offending field."""
    width = None
    with open(path, "r") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(
                    f"{path}: line {line_no} has {len(fields)} fields, "
                    f"expected {width}"
                )
            for col_no, token in enumerate(fields, start=1):
                try:
                    float(token)
                except ValueError:
                    raise ParseError(
                        f"{path}: line {line_no}, column {col_no}: "
                        f"not a number: {token!r}"
                    ) from None
    raise ParseError(f"{path}: file could not be parsed as a numeric matrix")


def write_bundle(bundle, manifest_path, seed=None, stem="machine"):
    """Write a bundle as one matrix file per machine plus a manifest.

    Machine files land next to the manifest as ``<stem>_<m>.csv`` and
    are recorded in the manifest by relative name.  Returns the
    :class:`BundleManifest` written.
    """
    manifest_path = Path(manifest_path)
    directory = manifest_path.parent
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    pad = len(str(bundle.M))
    for m in range(bundle.M):
        name = f"{stem}_{m + 1:0{pad}d}.csv"
        write_matrix(directory / name, bundle.values[:, :, m].T)
        names.append(name)
    manifest = BundleManifest(
        d=bundle.d,
        T=bundle.T,
        M=bundle.M,
        machine_files=names,
        created_by=f"chaincombine {__version__}",
        seed=seed,
    )
    with open(manifest_path, "w") as handle:
        json.dump(manifest.to_dict(), handle, indent=2)
        handle.write("\n")
    return manifest


def read_bundle(manifest_path):
    """Load a bundle from its manifest.

    Every machine file must parse to a (T, d) matrix matching the
    manifest dimensions; mismatches name the offending file.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise FileMissing(f"manifest not found: {manifest_path}")
    try:
        with open(manifest_path, "r") as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{manifest_path}: invalid JSON: {exc}") from exc
    manifest = BundleManifest.from_dict(raw)
    directory = manifest_path.parent
    values = np.empty((manifest.d, manifest.T, manifest.M))
    for m, name in enumerate(manifest.machine_files):
        matrix = read_matrix(directory / name)
        if matrix.shape != (manifest.T, manifest.d):
            raise DimensionMismatch(
                f"{name}: expected {manifest.T} rows x {manifest.d} columns, "
                f"got {matrix.shape[0]} x {matrix.shape[1]}"
            )
        values[:, :, m] = matrix.T
    return SubposteriorBundle(values)


def write_samples(path, combined):
    """Write combined samples as a (T, d) matrix file."""
    write_matrix(path, combined.values.T)


def read_samples(path):
    """Read a combined-samples file back as a (d, T) array."""
    return read_matrix(path).T
