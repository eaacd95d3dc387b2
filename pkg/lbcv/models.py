"""Data models for LBCV geometry and soliton verification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np

from lbcv import __version__
from lbcv.errors import ConfigError, DomainError
from lbcv.jets import Jet2, ScalarField

SolitonKind = Literal["shrinking", "steady", "expanding", "none", "flat-any-gamma"]
OutputFormat = Literal["json", "csv", "text"]

OUTPUT_FORMATS = ("json", "csv", "text")

# |lambda|, |mu| bound; keeps every curvature polynomial (degree <= 6) inside float range
PARAM_LIMIT = 1e50


@dataclass(frozen=True)
class SpaceParams:
    """The pair (lambda, mu) selecting a member of the LBCV family."""

    lam: float
    mu: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lam) and math.isfinite(self.mu)):
            raise DomainError(f"Space parameters must be finite: lambda={self.lam}, mu={self.mu}")
        if max(abs(self.lam), abs(self.mu)) > PARAM_LIMIT:
            raise DomainError(
                f"Space parameters must satisfy |lambda|, |mu| <= {PARAM_LIMIT:g}: lambda={self.lam}, mu={self.mu}"
            )

    def delta(self, x: Any, y: Any) -> Any:
        return 1.0 + self.mu * (x * x + y * y)

    def point(self, x: float, y: float, z: float) -> "FramePoint":
        """Build a point, rejecting it unless it lies in D."""
        p = FramePoint(x, y, z)
        d = self.delta(p.x, p.y)
        if not d > 0.0:
            raise DomainError(f"Point ({x}, {y}, {z}) is outside D: delta = {d}")
        return p

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "mu": self.mu}


@dataclass(frozen=True)
class FramePoint:
    """A single point (x, y, z) of the domain D."""

    x: float
    y: float
    z: float

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.asarray(self.x, dtype=float), np.asarray(self.y, dtype=float), np.asarray(self.z, dtype=float)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (float(self.x), float(self.y), float(self.z))


@dataclass(frozen=True, eq=False)
class FrameGrid:
    """A batch of N points, stored as an (N, 3) array."""

    xyz: np.ndarray

    def __post_init__(self) -> None:
        xyz = np.asarray(self.xyz, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "xyz", xyz)

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.xyz[:, 0], self.xyz[:, 1], self.xyz[:, 2]

    def __len__(self) -> int:
        return self.xyz.shape[0]

    def point(self, index: int) -> FramePoint:
        row = self.xyz[index]
        return FramePoint(float(row[0]), float(row[1]), float(row[2]))


Points = Union[FramePoint, FrameGrid]


@dataclass(frozen=True, eq=False)
class FrameVector:
    """Components with respect to the orthonormal frame (E1, E2, E3)."""

    c: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))


@dataclass(frozen=True)
class VectorField:
    """X = X1 E1 + X2 E2 + X3 E3 with scalar-field frame components."""

    X1: ScalarField
    X2: ScalarField
    X3: ScalarField

    def components(self, points: Points) -> Tuple[Jet2, Jet2, Jet2]:
        return self.X1(points), self.X2(points), self.X3(points)

    @classmethod
    def zero(cls) -> "VectorField":
        return cls(ScalarField.zero(), ScalarField.zero(), ScalarField.zero())


@dataclass(frozen=True)
class SolitonCandidate:
    """A vector field together with the soliton constant gamma."""

    field: VectorField
    gamma: float
    family: str = "custom"
    coefficients: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma):
            raise DomainError(f"Soliton constant must be finite, got {self.gamma}")


@dataclass(frozen=True)
class CoefficientSet:
    """Family coefficients a1..a6 (Case 1a uses a1..a4, Case 2 only a1)."""

    a: Tuple[float, ...]

    def __post_init__(self) -> None:
        a = tuple(float(v) for v in self.a)
        if not all(math.isfinite(v) for v in a):
            raise DomainError(f"Coefficients must be finite: {a}")
        if len(a) > 6:
            raise ConfigError(f"At most six coefficients are used, got {len(a)}")
        object.__setattr__(self, "a", a)

    def padded(self, count: int) -> Tuple[float, ...]:
        if len(self.a) > count:
            raise ConfigError(f"Expected at most {count} coefficients, got {len(self.a)}")
        return self.a + (0.0,) * (count - len(self.a))


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Worst-case residual of one formulation over a set of points."""

    max_abs: float
    per_equation: np.ndarray
    points_evaluated: int
    worst_point: Optional[FramePoint]
    formulation: str = ""

    def passed(self, tolerance: float) -> bool:
        return self.max_abs <= tolerance


@dataclass(frozen=True)
class SolitonClass:
    """Classification of an LBCV space with respect to homogeneous Ricci solitons."""

    kind: SolitonKind
    gamma: Optional[float]
    theorem_case: str
    caveat: Optional[str] = None
    family: Optional[str] = None

    def __post_init__(self) -> None:
        g = self.gamma
        ok = {
            "shrinking": g is not None and g > 0,
            "steady": g is not None and g == 0,
            "expanding": g is not None and g < 0,
            "none": g is None,
            "flat-any-gamma": g is None,
        }.get(self.kind)
        if not ok:
            raise ValueError(f"Soliton kind {self.kind!r} is inconsistent with gamma={g}")


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of the least-squares nonexistence probe."""

    max_residual: float
    rms_residual: float
    gamma_fit: float
    unknowns: int
    points_evaluated: int
    note: str = "sanity probe, not a proof"


GridBounds = Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]]


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the verification commands."""

    lam: float = 0.0
    mu: float = 0.0
    bounds: GridBounds = ((-0.9, 0.9), (-0.9, 0.9), (-0.9, 0.9))
    resolution: Tuple[int, int, int] = (5, 5, 5)
    random_points: int = 100
    delta_floor: float = 0.05
    seed: int = 0
    tolerance: float = 1e-9
    output_format: OutputFormat = "json"
    coefficient_count: int = 6

    def __post_init__(self) -> None:
        if len(self.bounds) != 3 or len(self.resolution) != 3:
            raise ConfigError("Grid needs bounds and a resolution for each of x, y, z")
        for (lo, hi), n in zip(self.bounds, self.resolution):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ConfigError(f"Invalid grid bounds: {lo}:{hi}")
            if n < 2:
                raise ConfigError(f"Grid resolution must be at least 2 per axis, got {n}")
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise ConfigError(f"Tolerance must be positive, got {self.tolerance}")
        if self.random_points < 0:
            raise ConfigError(f"random_points must be non-negative, got {self.random_points}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"Unknown output format: {self.output_format}")
        if not 0 <= self.coefficient_count <= 6:
            raise ConfigError(f"coefficient_count must be in 0..6, got {self.coefficient_count}")

    @property
    def params(self) -> SpaceParams:
        return SpaceParams(self.lam, self.mu)

    def grid_spec(self) -> str:
        """The grid in --grid syntax, e.g. "-0.9:0.9:5,-0.9:0.9:5,-0.9:0.9:5"."""
        return ",".join(f"{lo:g}:{hi:g}:{n}" for (lo, hi), n in zip(self.bounds, self.resolution))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Build from the "run" object of a JSON config file."""
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known - {"grid"}
        if unknown:
            raise ConfigError(f"Unknown run settings: {', '.join(sorted(unknown))}")
        kwargs: Dict[str, Any] = {k: v for k, v in data.items() if k in known}
        if "grid" in data:
            bounds, resolution = parse_grid(data["grid"])
            kwargs["bounds"], kwargs["resolution"] = bounds, resolution
        if "bounds" in kwargs:
            kwargs["bounds"] = tuple(tuple(float(v) for v in b) for b in kwargs["bounds"])
        if "resolution" in kwargs:
            kwargs["resolution"] = tuple(int(n) for n in kwargs["resolution"])
        return cls(**kwargs)


def parse_grid(spec: str) -> Tuple[GridBounds, Tuple[int, int, int]]:
    """Parse "xmin:xmax:n,ymin:ymax:n,zmin:zmax:n" (one triple applies to all axes)."""
    parts = [p.strip() for p in str(spec).split(",") if p.strip()]
    if len(parts) == 1:
        parts = parts * 3
    if len(parts) != 3:
        raise ConfigError(f"Grid spec needs one or three lo:hi:n triples, got {spec!r}")
    bounds = []
    resolution = []
    for part in parts:
        lo, hi, n = parse_range(part)
        bounds.append((lo, hi))
        resolution.append(n)
    return tuple(bounds), tuple(resolution)  # type: ignore[return-value]


def parse_range(text: str) -> Tuple[float, float, int]:
    """Parse "lo:hi:n"."""
    pieces = text.split(":")
    if len(pieces) != 3:
        raise ConfigError(f"Range must look like lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(pieces[0]), float(pieces[1]), int(pieces[2])
    except ValueError as e:
        raise ConfigError(f"Invalid range {text!r}: {e}") from e
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(f"Range bounds must be finite, got {text!r}")
    if n < 0:
        raise ConfigError(f"Range count must be non-negative, got {text!r}")
    return lo, hi, n


@dataclass
class SolitonRow:
    """A flattened classify/sweep result."""

    lam: float
    mu: float
    kind: str
    gamma: Optional[float]
    case: str
    caveat: Optional[str]
    max_residual: Optional[float] = None
    worst_point: Optional[Tuple[float, float, float]] = None
    grid: Optional[str] = None
    seed: Optional[int] = None
    tool_version: str = __version__

    def to_dict(self) -> dict:
        """Convert to dictionary for report writing."""
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "kind": self.kind,
            "gamma": self.gamma,
            "case": self.case,
            "caveat": self.caveat,
            "max_residual": self.max_residual,
            "worst_point": list(self.worst_point) if self.worst_point is not None else None,
            "grid": self.grid,
            "seed": self.seed,
            "tool_version": self.tool_version,
        }

    @classmethod
    def fieldnames(cls) -> List[str]:
        """Return report field names."""
        return [
            "lambda",
            "mu",
            "kind",
            "gamma",
            "case",
            "caveat",
            "max_residual",
            "worst_point",
            "grid",
            "seed",
            "tool_version",
        ]


@dataclass
class VerifyRow(SolitonRow):
    """A verification result: the flat soliton row plus per-formulation detail."""

    system36_max: Optional[float] = None
    frame_max: Optional[float] = None
    per_equation: List[float] = field(default_factory=list)
    points_evaluated: int = 0
    tolerance: Optional[float] = None
    passed: bool = False

    def to_dict(self) -> dict:
        row = super().to_dict()
        row.update(
            {
                "system36_max": self.system36_max,
                "frame_max": self.frame_max,
                "per_equation": list(self.per_equation),
                "points_evaluated": self.points_evaluated,
                "tolerance": self.tolerance,
                "passed": self.passed,
            }
        )
        return row

    @classmethod
    def fieldnames(cls) -> List[str]:
        return SolitonRow.fieldnames() + [
            "system36_max",
            "frame_max",
            "per_equation",
            "points_evaluated",
            "tolerance",
            "passed",
        ]


@dataclass
class GeometryRow:
    """Point-independent invariants of one LBCV space, plus brackets at a reference point."""

    lam: float
    mu: float
    reference_point: Tuple[float, float, float]
    delta: float
    ricci: List[float]
    ricci_contracted: List[float]
    ricci_shift: float
    R1212: float
    R1313: float
    R2323: float
    sectional: List[float]
    bracket_12: List[float]
    bracket_13: List[float]
    bracket_23: List[float]
    tool_version: str = __version__

    def to_dict(self) -> dict:
        """Convert to dictionary for report writing."""
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "reference_point": list(self.reference_point),
            "delta": self.delta,
            "ricci": list(self.ricci),
            "ricci_contracted": list(self.ricci_contracted),
            "ricci_shift": self.ricci_shift,
            "R1212": self.R1212,
            "R1313": self.R1313,
            "R2323": self.R2323,
            "sectional": list(self.sectional),
            "bracket_12": list(self.bracket_12),
            "bracket_13": list(self.bracket_13),
            "bracket_23": list(self.bracket_23),
            "tool_version": self.tool_version,
        }

    @classmethod
    def fieldnames(cls) -> List[str]:
        """Return report field names."""
        return [
            "lambda",
            "mu",
            "reference_point",
            "delta",
            "ricci",
            "ricci_contracted",
            "ricci_shift",
            "R1212",
            "R1313",
            "R2323",
            "sectional",
            "bracket_12",
            "bracket_13",
            "bracket_23",
            "tool_version",
        ]
