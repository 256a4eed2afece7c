"""The transfer operator R_{B,L} and its harmonic and subharmonic functions.

``(R f)(x) = sum_l |chi_B(tau_l x)|^2 f(tau_l x)`` with ``tau_l x = (R^T)^{-1}(x + l)``.
Functions are plain callables on arrays of shape ``(S, d)``; for iteration
they are sampled on a box grid and read back by multilinear interpolation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import BoxNotInvariantError
from .ifs import chi_B
from .triple import HadamardTriple

Evaluable = Callable[[np.ndarray], np.ndarray]
DEFAULT_RESOLUTION = 257


def children(triple: HadamardTriple, x) -> np.ndarray:
    """tau_l(x) for every l; shape (..., N, d)."""
    x = np.asarray(x, dtype=float)
    return (x[..., None, :] + triple.L_f) @ triple.RT_inv_f.T


def transfer_weights(triple: HadamardTriple, x) -> np.ndarray:
    """|chi_B(tau_l x)|^2 for every l; shape (..., N)."""
    return np.abs(chi_B(triple, children(triple, x))) ** 2


def apply_transfer(triple: HadamardTriple, f: Evaluable, x) -> np.ndarray:
    """(R f)(x) for a batch of points of shape (S, d)."""
    x = np.asarray(x, dtype=float).reshape(-1, triple.d)
    ys = children(triple, x)
    vals = np.asarray(f(ys.reshape(-1, triple.d)), dtype=float).reshape(ys.shape[:-1])
    return (transfer_weights(triple, x) * vals).sum(axis=-1)


def apply_transfer_point(triple: HadamardTriple, f: Evaluable, x) -> float:
    return float(apply_transfer(triple, f, x)[0])


def constant(c: float) -> Evaluable:
    return lambda t: np.full(np.asarray(t).shape[:-1], float(c))


@dataclass
class GridFunction:
    """Samples of a function on the box [-r, r]^d, ``resolution`` points per axis."""

    half_width: float
    resolution: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        self.values = np.asarray(self.values, dtype=float).reshape((self.resolution,) * self.d)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.resolution)

    def points(self) -> np.ndarray:
        """All grid nodes, row-major, shape (resolution**d, d)."""
        mesh = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.d)

    @classmethod
    def sample(cls, f: Evaluable, half_width: float, resolution: int, d: int) -> "GridFunction":
        g = cls(half_width, resolution, d, np.zeros((resolution,) * d))
        g.values = np.asarray(f(g.points()), dtype=float).reshape((resolution,) * d)
        return g

    def __call__(self, x) -> np.ndarray:
        """Multilinear interpolation; arguments are clipped into the box."""
        x = np.clip(np.asarray(x, dtype=float), -self.half_width, self.half_width)
        interp = RegularGridInterpolator([self.axis] * self.d, self.values, method="linear")
        return interp(x.reshape(-1, self.d)).reshape(x.shape[:-1])

    def write(self, csv_path) -> None:
        """CSV rows ``x1..xd, value`` plus a ``.json`` sidecar with the box."""
        csv_path = Path(csv_path)
        pts = self.points()
        vals = self.values.reshape(-1)
        header = ",".join([f"x{i + 1}" for i in range(self.d)] + ["value"])
        lines = [header] + [",".join(f"{c:.17g}" for c in (*p, v)) for p, v in zip(pts, vals)]
        csv_path.write_text("\n".join(lines) + "\n")
        sidecar = {"box": {"center": [0.0] * self.d, "half_width": self.half_width},
                   "resolution": self.resolution, "d": self.d}
        csv_path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, csv_path) -> "GridFunction":
        csv_path = Path(csv_path)
        meta = json.loads(csv_path.with_suffix(".json").read_text())
        data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
        return cls(meta["box"]["half_width"], meta["resolution"], meta["d"], data[:, -1])


def box_is_invariant(triple: HadamardTriple, half_width: float) -> bool:
    """Every tau_l maps the box into itself; checking the vertices suffices (affine maps, convex box)."""
    corners = np.array(np.meshgrid(*([[-half_width, half_width]] * triple.d), indexing="ij"))
    corners = corners.reshape(triple.d, -1).T
    return bool(np.all(np.abs(children(triple, corners)) <= half_width * (1 + 1e-12)))


@dataclass
class TransferIteration:
    final: GridFunction
    sup_deltas: list[float]


def iterate_transfer(triple: HadamardTriple, f0: GridFunction, n: int) -> TransferIteration:
    """n applications of R on the grid; ``sup_deltas[k] = max(f_{k+1} - f_k)`` in absolute value."""
    if f0.d != triple.d:
        raise ValueError("grid dimension does not match the triple")
    if not box_is_invariant(triple, f0.half_width):
        raise BoxNotInvariantError(f"box of half-width {f0.half_width} is not mapped into itself")
    pts = f0.points()
    ys = children(triple, pts)
    w = transfer_weights(triple, pts)
    f = f0
    deltas = []
    for _ in range(n):
        vals = (w * f(ys)).sum(axis=-1)
        new = GridFunction(f.half_width, f.resolution, f.d, vals)
        deltas.append(float(np.max(np.abs(new.values - f.values))))
        f = new
    return TransferIteration(f, deltas)


@dataclass
class HarmonicReport:
    max_defect: float
    sign: str
    samples: int
    min_delta: float
    max_delta: float

    def to_json(self) -> dict:
        return {"max_defect": self.max_defect, "sign": self.sign, "samples": self.samples,
                "min_delta": self.min_delta, "max_delta": self.max_delta}


def harmonic_defect(triple: HadamardTriple, f: Evaluable, samples, tol: float = 1e-9,
                    sub_tol: float = 1e-12) -> HarmonicReport:
    """Classify R f - f on the samples.

    harmonic: |Rf - f| <= tol everywhere; subharmonic: Rf - f >= -sub_tol
    everywhere and larger than tol somewhere; otherwise neither.
    """
    samples = np.asarray(samples, dtype=float).reshape(-1, triple.d)
    delta = apply_transfer(triple, f, samples) - np.asarray(f(samples), dtype=float)
    lo, hi = float(delta.min()), float(delta.max())
    max_defect = float(np.abs(delta).max())
    if max_defect <= tol:
        sign = "harmonic"
    elif lo >= -sub_tol:
        sign = "subharmonic"
    else:
        sign = "neither"
    return HarmonicReport(max_defect, sign, len(samples), lo, hi)
