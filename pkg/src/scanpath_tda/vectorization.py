"""Persistence images, feature assembly and the PCA reduction.

A diagram is sheared by (birth, death) -> (birth, death - birth), a weighted
Gaussian is placed at every sheared point, and each pixel of the image
receives the exact integral of that surface over the pixel box (a product
of normal CDF differences per axis, since the Gaussian is separable).
Images are flattened, min-max scaled per image, concatenated, and reduced
with PCA into the topological feature vector.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import (
    EmptyGroupError,
    InsufficientDataError,
    ResolutionMismatchError,
    UnresolvedDomainError,
)

logger = logging.getLogger(__name__)

Domain = tuple[tuple[float, float], tuple[float, float]]

WEIGHT_CONSTANT = "constant-one"
WEIGHT_PERSISTENCE = "persistence"

# Fitted domains extend this many bandwidths beyond the sheared point cloud.
DOMAIN_MARGIN_SIGMAS = 3.0


@dataclass(frozen=True)
class ImageSpec:
    """Bandwidth, resolution, weighting and domain box of a persistence image.

    ``domain`` is ((birth_lo, birth_hi), (pers_lo, pers_hi)) in sheared
    coordinates, or None for fit-from-data (resolve with fit_image_domain
    before rendering). ``resolution`` is (n, m): n rows along the
    persistence axis, m columns along the birth axis.
    """

    bandwidth_sigma: float
    resolution: tuple[int, int] = (50, 50)
    weight: str = WEIGHT_PERSISTENCE
    domain: Domain | None = None

    def __post_init__(self) -> None:
        if self.bandwidth_sigma <= 0:
            raise ValueError(f"bandwidth_sigma must be > 0, got {self.bandwidth_sigma}")
        n, m = self.resolution
        if n < 1 or m < 1:
            raise ValueError(f"resolution must be >= 1 per axis, got {self.resolution}")
        object.__setattr__(self, "resolution", (int(n), int(m)))
        if self.weight not in (WEIGHT_CONSTANT, WEIGHT_PERSISTENCE):
            raise ValueError(f"unknown weight {self.weight!r}")
        if self.domain is not None:
            (x0, x1), (y0, y1) = self.domain
            if not (x1 > x0 and y1 > y0):
                raise ValueError(f"degenerate image domain {self.domain}")
            object.__setattr__(
                self, "domain", ((float(x0), float(x1)), (float(y0), float(y1)))
            )

    def to_dict(self) -> dict:
        return {
            "bandwidth_sigma": self.bandwidth_sigma,
            "resolution": list(self.resolution),
            "weight": self.weight,
            "domain": None if self.domain is None else [list(d) for d in self.domain],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ImageSpec":
        domain = data.get("domain")
        return cls(
            bandwidth_sigma=float(data["bandwidth_sigma"]),
            resolution=tuple(data["resolution"]),
            weight=data.get("weight", WEIGHT_PERSISTENCE),
            domain=None if domain is None else tuple(tuple(d) for d in domain),
        )


@dataclass(frozen=True, eq=False)
class PersistenceImage:
    """A rendered n x m pixel matrix plus the frozen spec that produced it."""

    pixels: np.ndarray
    spec: ImageSpec

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels, dtype=float)
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Mean, orthonormal components and explained variance of a PCA fit."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    def __post_init__(self) -> None:
        for name in ("mean", "components", "explained_variance"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_components(self) -> int:
        return int(self.components.shape[0])

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PcaModel":
        return cls(
            mean=np.array(data["mean"], dtype=float),
            components=np.array(data["components"], dtype=float),
            explained_variance=np.array(data["explained_variance"], dtype=float),
        )


def shear(points) -> np.ndarray:
    """Map (birth, death) pairs to (birth, death - birth)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    out = pts.copy()
    out[:, 1] = pts[:, 1] - pts[:, 0]
    return out


def point_weights(sheared: np.ndarray, weight: str) -> np.ndarray:
    """Per-point weights on sheared coordinates.

    The persistence weight is max(death - birth, 0): points of relative
    diagrams carry negative persistence and contribute nothing under it.
    """
    if weight == WEIGHT_CONSTANT:
        return np.ones(len(sheared))
    return np.maximum(sheared[:, 1], 0.0)


def render_image(diagram, spec: ImageSpec) -> PersistenceImage:
    """Render a diagram of finite (birth, death) pairs into a persistence image.

    Each pixel receives the exact integral of the weighted Gaussian surface
    over the pixel box; contributions are accumulated point by point, so an
    image of a concatenated diagram equals the running sum of its parts.
    """
    if spec.domain is None:
        raise UnresolvedDomainError("image domain is fit-from-data and has not been fitted")
    pts = np.asarray(diagram, dtype=float).reshape(-1, 2)
    if pts.size and not np.isfinite(pts).all():
        raise ValueError("diagram for rendering must be finite; drop infinite points first")
    n, m = spec.resolution
    (x_lo, x_hi), (y_lo, y_hi) = spec.domain
    x_edges = np.linspace(x_lo, x_hi, m + 1)
    y_edges = np.linspace(y_lo, y_hi, n + 1)
    sigma = spec.bandwidth_sigma

    pixels = np.zeros((n, m))
    sheared = shear(pts)
    weights = point_weights(sheared, spec.weight)
    for (px, py), w in zip(sheared, weights):
        if w == 0.0:
            continue
        column_mass = np.diff(ndtr((x_edges - px) / sigma))
        row_mass = np.diff(ndtr((y_edges - py) / sigma))
        pixels += w * np.outer(row_mass, column_mass)
    return PersistenceImage(pixels, spec)


def fit_image_domain(diagrams: Iterable, spec: ImageSpec) -> ImageSpec:
    """Resolve the image domain from training diagrams.

    The domain is the bounding box of all sheared training points, expanded
    by DOMAIN_MARGIN_SIGMAS bandwidths on every side. If every diagram is
    empty the unit box is used and a warning is logged.
    """
    sheared = [shear(d) for d in diagrams]
    nonempty = [s for s in sheared if len(s) > 0]
    if not nonempty:
        logger.warning("all training diagrams empty; image domain falls back to the unit box")
        return replace(spec, domain=((0.0, 1.0), (0.0, 1.0)))
    cloud = np.concatenate(nonempty, axis=0)
    margin = DOMAIN_MARGIN_SIGMAS * spec.bandwidth_sigma
    domain = (
        (float(cloud[:, 0].min() - margin), float(cloud[:, 0].max() + margin)),
        (float(cloud[:, 1].min() - margin), float(cloud[:, 1].max() + margin)),
    )
    return replace(spec, domain=domain)


def assemble_tsh_vector(images: Sequence[PersistenceImage]) -> np.ndarray:
    """Flatten row-major, min-max scale per image, concatenate."""
    if not images:
        raise ValueError("need at least one image")
    resolution = images[0].spec.resolution
    for image in images[1:]:
        if image.spec.resolution != resolution:
            raise ResolutionMismatchError(
                f"resolutions differ: {image.spec.resolution} vs {resolution}"
            )
    parts = []
    for image in images:
        flat = image.pixels.ravel(order="C")
        lo = flat.min()
        hi = flat.max()
        if hi > lo:
            parts.append((flat - lo) / (hi - lo))
        else:
            parts.append(np.zeros_like(flat))
    return np.concatenate(parts)


def fit_pca(rows, n_components: int) -> PcaModel:
    """Fit PCA via SVD of the row-centered matrix.

    The requested component count is clamped to the numerical rank of the
    centered matrix. Component signs are fixed by making the largest
    magnitude coordinate of each component positive.
    """
    matrix = np.asarray(rows, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("rows must be a 2-d matrix")
    if n_components < 1:
        raise ValueError(f"n_components must be >= 1, got {n_components}")
    n_rows = matrix.shape[0]
    if n_rows < 2:
        raise InsufficientDataError(f"PCA needs at least 2 rows, got {n_rows}")
    mean = matrix.mean(axis=0)
    centered = matrix - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    tol = max(centered.shape) * np.finfo(float).eps * (singular[0] if singular.size else 0.0)
    rank = int((singular > tol).sum())
    k = min(n_components, rank)
    components = vt[:k].copy()
    for row in components:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    explained = (singular[:k] ** 2) / (n_rows - 1)
    return PcaModel(mean=mean, components=components, explained_variance=explained)


def apply_pca(model: PcaModel, vector) -> np.ndarray:
    """Center by the training mean and project onto the components."""
    data = np.asarray(vector, dtype=float)
    return (data - model.mean) @ model.components.T


def reader_aggregate(vectors: Sequence) -> np.ndarray:
    """Arithmetic mean of equal-length vectors (reader-level aggregation)."""
    if len(vectors) == 0:
        raise EmptyGroupError("cannot aggregate an empty group of vectors")
    matrix = np.asarray(vectors, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("vectors must share one length")
    return matrix.mean(axis=0)


# ---------------------------------------------------------------------------
# serialization


def save_image(image: PersistenceImage, pixels_path, meta_path) -> None:
    """Flat CSV matrix (row-major rows) plus a JSON sidecar with the spec."""
    with open(pixels_path, "w", encoding="utf-8") as handle:
        for row in image.pixels:
            handle.write(",".join(repr(float(v)) for v in row) + "\n")
    with open(meta_path, "w", encoding="utf-8") as handle:
        json.dump(image.spec.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_image(pixels_path, meta_path) -> PersistenceImage:
    with open(meta_path, "r", encoding="utf-8") as handle:
        spec = ImageSpec.from_dict(json.load(handle))
    rows = []
    with open(pixels_path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                rows.append([float(cell) for cell in line.split(",")])
    pixels = np.array(rows, dtype=float)
    if pixels.shape != spec.resolution:
        raise ResolutionMismatchError(
            f"pixel matrix {pixels.shape} does not match spec resolution {spec.resolution}"
        )
    return PersistenceImage(pixels, spec)


def save_pca(model: PcaModel, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model.to_dict(), handle, sort_keys=True)
        handle.write("\n")


def load_pca(path) -> PcaModel:
    with open(path, "r", encoding="utf-8") as handle:
        return PcaModel.from_dict(json.load(handle))
