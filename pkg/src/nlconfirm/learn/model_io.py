"""Trained-model bundle and its on-disk format.

Binary layout: magic ``NLCM``, u32 format version, u32 section count, then
tagged sections (u16 name length, utf-8 name, u64 payload length, payload).
All integers and floats are little-endian; floats are 64-bit. A JSON
export mirrors the same content for debugging.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import CorruptModel, DimensionMismatch, VersionMismatch
from ..featset import FeatureSetConfig
from .normalize import NormalizerStats
from .pca import PcaTransform
from .svm import SvmHyperParams, SvmModel, decision_value, decision_values

MAGIC = b"NLCM"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelBundle:
    """Everything needed to classify: feature set, normalizer, optional PCA, SVM."""

    feature_config: FeatureSetConfig
    hyperparams: SvmHyperParams
    normalizer: NormalizerStats
    pca: PcaTransform | None
    svm: SvmModel
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        raw = self.feature_config.raw_dimension
        if self.feature_config.uses_pca != (self.pca is not None):
            raise DimensionMismatch(
                f"{self.feature_config.kind.value}: PCA presence must match the feature set"
            )
        if self.normalizer.dimension != raw:
            raise DimensionMismatch(
                f"normalizer dim {self.normalizer.dimension} != raw dim {raw}"
            )
        if self.pca is not None and self.pca.input_dimension != raw:
            raise DimensionMismatch(f"PCA input dim {self.pca.input_dimension} != raw dim {raw}")
        expected = self.pca.output_dimension if self.pca is not None else raw
        if self.svm.dimension != expected:
            raise DimensionMismatch(f"SVM dim {self.svm.dimension} != projected dim {expected}")

    def project(self, x: np.ndarray) -> np.ndarray:
        """Normalize (and PCA-project) raw feature vectors."""
        z = self.normalizer.transform(x)
        return z if self.pca is None else self.pca.transform(z)

    def decide(self, x: np.ndarray) -> float:
        """Decision value for one raw feature vector."""
        return decision_value(self.svm, self.project(x))

    def decide_many(self, x: np.ndarray) -> np.ndarray:
        """Decision values for an (n, raw_dim) matrix of raw feature vectors."""
        return decision_values(self.svm, self.project(np.atleast_2d(x)))

    def to_debug_dict(self) -> dict:
        out = {
            "format_version": self.format_version,
            "feature_config": self.feature_config.to_dict(),
            "hyperparams": self.hyperparams.to_dict(),
            "normalizer": {
                "mean": self.normalizer.mean.tolist(),
                "std": self.normalizer.std.tolist(),
            },
            "pca": None,
            "svm": {
                "gamma": self.svm.gamma,
                "bias": self.svm.bias,
                "alphas_signed": self.svm.alphas_signed.tolist(),
                "support_vectors": self.svm.support_vectors.tolist(),
            },
        }
        if self.pca is not None:
            out["pca"] = {
                "epsilon": self.pca.epsilon,
                "mean": self.pca.mean.tolist(),
                "basis": self.pca.basis.tolist(),
                "eigenvalues": self.pca.eigenvalues.tolist(),
            }
        return out


def _pack_array(a: np.ndarray) -> bytes:
    a = np.asarray(a, dtype=np.float64)
    return struct.pack("<I", a.ndim) + struct.pack(f"<{a.ndim}I", *a.shape) + a.astype("<f8").tobytes()


class _Reader:
    def __init__(self, data: bytes, offset: int = 0):
        self.data = data
        self.offset = offset

    def take(self, n: int) -> bytes:
        if self.offset + n > len(self.data):
            raise CorruptModel("unexpected end of model file")
        chunk = self.data[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def array(self) -> np.ndarray:
        ndim = self.u32()
        if ndim > 4:
            raise CorruptModel(f"implausible array rank {ndim}")
        shape = tuple(self.u32() for _ in range(ndim))
        count = int(np.prod(shape)) if shape else 1
        raw = self.take(8 * count)
        return np.frombuffer(raw, dtype="<f8").reshape(shape).copy()


def save_model(bundle: ModelBundle, path: str | Path) -> None:
    """Serialize a bundle; numeric round-trips are bit-exact."""
    sections: list[tuple[str, bytes]] = [
        ("feature_config", json.dumps(bundle.feature_config.to_dict()).encode()),
        ("hyperparams", json.dumps(bundle.hyperparams.to_dict()).encode()),
        ("normalizer", _pack_array(bundle.normalizer.mean) + _pack_array(bundle.normalizer.std)),
        (
            "svm",
            struct.pack("<dd", bundle.svm.gamma, bundle.svm.bias)
            + _pack_array(bundle.svm.alphas_signed)
            + _pack_array(bundle.svm.support_vectors),
        ),
    ]
    if bundle.pca is not None:
        sections.append((
            "pca",
            struct.pack("<d", bundle.pca.epsilon)
            + _pack_array(bundle.pca.mean)
            + _pack_array(bundle.pca.basis)
            + _pack_array(bundle.pca.eigenvalues),
        ))
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<I", bundle.format_version)
    blob += struct.pack("<I", len(sections))
    for name, payload in sections:
        encoded = name.encode()
        blob += struct.pack("<H", len(encoded)) + encoded
        blob += struct.pack("<Q", len(payload)) + payload
    Path(path).write_bytes(bytes(blob))


def load_model(path: str | Path) -> ModelBundle:
    """Load a bundle written by save_model.

    Raises VersionMismatch for a wrong magic/version and CorruptModel for
    truncated or inconsistent content.
    """
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise VersionMismatch(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    reader = _Reader(data, 4)
    version = reader.u32()
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported format version {version}")
    n_sections = reader.u32()
    if n_sections > 64:
        raise CorruptModel(f"implausible section count {n_sections}")
    sections: dict[str, bytes] = {}
    for _ in range(n_sections):
        name = reader.take(reader.u16()).decode()
        sections[name] = reader.take(reader.u64())

    missing = {"feature_config", "hyperparams", "normalizer", "svm"} - sections.keys()
    if missing:
        raise CorruptModel(f"missing sections: {sorted(missing)}")
    try:
        feature_config = FeatureSetConfig.from_dict(json.loads(sections["feature_config"]))
        hyperparams = SvmHyperParams.from_dict(json.loads(sections["hyperparams"]))
    except (ValueError, KeyError) as exc:
        raise CorruptModel(f"bad JSON section: {exc}") from exc

    r = _Reader(sections["normalizer"])
    normalizer = NormalizerStats(mean=r.array(), std=r.array())
    r = _Reader(sections["svm"])
    gamma, bias = struct.unpack("<dd", r.take(16))
    alphas = r.array()
    vectors = r.array()
    svm = SvmModel(support_vectors=vectors, alphas_signed=alphas, bias=bias, gamma=gamma)
    pca = None
    if "pca" in sections:
        r = _Reader(sections["pca"])
        (epsilon,) = struct.unpack("<d", r.take(8))
        pca = PcaTransform(epsilon=epsilon, mean=r.array(), basis=r.array(), eigenvalues=r.array())
    try:
        return ModelBundle(
            feature_config=feature_config,
            hyperparams=hyperparams,
            normalizer=normalizer,
            pca=pca,
            svm=svm,
            format_version=version,
        )
    except DimensionMismatch as exc:
        raise CorruptModel(f"inconsistent model content: {exc}") from exc


def save_model_json(bundle: ModelBundle, path: str | Path) -> None:
    """Human-readable mirror of the binary model file."""
    Path(path).write_text(json.dumps(bundle.to_debug_dict(), indent=2))
