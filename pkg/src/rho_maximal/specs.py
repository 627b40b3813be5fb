"""Resolution-independent test-function and weight specifications.

Experiments resample the same analytic spec on refined grids, so batteries
are stored as specs, never as raw samples.  Builtin families:

* functions: ``gaussian`` (truncated below 1e-14 of the amplitude so the
  support is genuinely compact), ``indicator`` (axis box), ``spike``
  (|x - c|^-alpha truncated to a support ball; a grid point exactly at the
  singularity is valued at half-cell distance), ``step`` (one-sided jump
  limited to a support box), ``constant``.
* weights: ``constant``, ``power`` w(x) = (1 + |x|)^delta, ``custom`` (raw
  values from a value file).

A raw value file is a text file whose first line is a JSON header
``{"d": ..., "L": ..., "N": ...}`` and whose remaining tokens are the N^d
values in row-major (C) order, last axis fastest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .grids import Domain, SampledFunction

__all__ = [
    "FunctionSpec",
    "WeightSpec",
    "load_value_file",
    "save_value_file",
]


@dataclass(frozen=True)
class FunctionSpec:
    family: str
    amplitude: float = 1.0
    center: tuple = (0.0,)
    width: float = 1.0
    alpha: float = 0.5
    support_radius: float = 1.0
    threshold: float = 0.0
    label: str = ""
    values: tuple | None = field(default=None, repr=False)

    _FAMILIES = ("gaussian", "indicator", "spike", "step", "constant", "raw")

    def __post_init__(self):
        if self.family not in self._FAMILIES:
            raise ValueError(f"unknown function family {self.family!r}")
        object.__setattr__(self, "center",
                           tuple(float(c) for c in np.atleast_1d(self.center)))

    @property
    def case_id(self) -> str:
        return self.label or f"{self.family}"

    def sample(self, domain: Domain) -> SampledFunction:
        pts = domain.points
        c = np.asarray(self.center, dtype=float)
        if c.size < domain.d:
            c = np.pad(c, (0, domain.d - c.size))
        c = c[: domain.d]
        dist = np.linalg.norm(pts - c, axis=1)
        if self.family == "gaussian":
            vals = self.amplitude * np.exp(-((dist / self.width) ** 2))
            vals[vals < 1e-14 * abs(self.amplitude)] = 0.0
        elif self.family == "indicator":
            inside = np.all(np.abs(pts - c) < self.width, axis=1)
            vals = self.amplitude * inside.astype(float)
        elif self.family == "spike":
            r = np.maximum(dist, domain.h / 2.0)
            vals = np.where(dist < self.support_radius,
                            self.amplitude * r ** (-self.alpha), 0.0)
        elif self.family == "step":
            box = np.all(np.abs(pts - c) < self.support_radius, axis=1)
            vals = np.where(box & (pts[:, 0] >= self.threshold),
                            self.amplitude, 0.0)
        elif self.family == "constant":
            vals = np.full(pts.shape[0], self.amplitude)
        else:
            vals = np.asarray(self.values, dtype=float)
            if vals.size != pts.shape[0]:
                raise ValueError("raw values do not match the grid size")
        return SampledFunction(domain, vals.reshape(domain.shape))

    def to_dict(self) -> dict:
        out = {"family": self.family, "amplitude": self.amplitude,
               "center": list(self.center), "label": self.label}
        if self.family == "gaussian":
            out["width"] = self.width
        elif self.family == "indicator":
            out["width"] = self.width
        elif self.family == "spike":
            out.update(alpha=self.alpha, support_radius=self.support_radius)
        elif self.family == "step":
            out.update(threshold=self.threshold,
                       support_radius=self.support_radius)
        elif self.family == "raw":
            out["values"] = list(self.values)
        return out

    @staticmethod
    def from_dict(spec: dict) -> "FunctionSpec":
        kw = dict(spec)
        fam = kw.pop("family")
        if "values" in kw:
            kw["values"] = tuple(kw["values"])
        if "center" in kw:
            kw["center"] = tuple(kw["center"])
        return FunctionSpec(fam, **kw)


@dataclass(frozen=True)
class WeightSpec:
    family: str
    value: float = 1.0
    delta: float = 0.0
    label: str = ""
    values: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in ("constant", "power", "custom"):
            raise ValueError(f"unknown weight family {self.family!r}")

    @property
    def case_id(self) -> str:
        return self.label or self.family

    def sample(self, domain: Domain) -> SampledFunction:
        pts = domain.points
        if self.family == "constant":
            vals = np.full(pts.shape[0], self.value)
        elif self.family == "power":
            vals = (1.0 + np.linalg.norm(pts, axis=1)) ** self.delta
        else:
            vals = np.asarray(self.values, dtype=float)
            if vals.size != pts.shape[0]:
                raise ValueError("custom weight values do not match the grid")
        return SampledFunction(domain, vals.reshape(domain.shape))

    def to_dict(self) -> dict:
        out = {"family": self.family, "label": self.label}
        if self.family == "constant":
            out["value"] = self.value
        elif self.family == "power":
            out["delta"] = self.delta
        else:
            out["values"] = list(self.values)
        return out

    @staticmethod
    def from_dict(spec: dict) -> "WeightSpec":
        kw = dict(spec)
        fam = kw.pop("family")
        if "values" in kw:
            kw["values"] = tuple(kw["values"])
        return WeightSpec(fam, **kw)


def save_value_file(path, domain: Domain, values: np.ndarray) -> None:
    vals = np.asarray(values, dtype=float).reshape(domain.shape)
    with open(path, "w") as fh:
        fh.write(json.dumps(domain.to_dict()) + "\n")
        flat = vals.ravel(order="C")
        fh.write("\n".join(repr(float(v)) for v in flat))
        fh.write("\n")


def load_value_file(path) -> tuple:
    """Returns (Domain, SampledFunction) from a raw value file."""
    with open(path) as fh:
        header = json.loads(fh.readline())
        domain = Domain.from_dict(header)
        tokens = fh.read().split()
    vals = np.array([float(t) for t in tokens])
    if vals.size != domain.N ** domain.d:
        raise ValueError(f"value file holds {vals.size} entries, expected "
                         f"{domain.N ** domain.d}")
    return domain, SampledFunction(domain, vals.reshape(domain.shape))
