"""Direction-dependent boundary weights for the planar constructions.

A weight assigns a non-negative density to unit normal directions.  Two
problem classes exist:

* ``minimizing`` -- full-circle weights for the surface-energy problem;
  they must be positive and even.
* ``maximizing`` -- quarter-arc weights for the monotone-surface problem;
  they must be non-negative and decay to zero toward both axes.

Angles are the canonical parametrization; unit-vector components are
derived.  All evaluators accept scalars or numpy arrays.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import (
    BOUNDARY_DECAY_CEILING,
    BOUNDARY_PROBE,
    EVENNESS_TOL,
    FD_STEP,
    POSITIVITY_FLOOR,
    VALIDATION_SAMPLES,
)
from .errors import DomainError, WeightSpecError, WeightValidationError

HALF_PI = math.pi / 2.0
TWO_PI = 2.0 * math.pi

MINIMIZING = "minimizing"
MAXIMIZING = "maximizing"

_CLOSED_FORM_KINDS = ("constant", "l1", "entropy", "sqrt_product")
_ALL_KINDS = _CLOSED_FORM_KINDS + ("tabulated", "reflected_dual")


def _xlogx(v: np.ndarray) -> np.ndarray:
    """x*log(x) extended by 0 at x = 0 (and for tiny negative noise)."""
    v = np.asarray(v, dtype=float)
    safe = np.where(v > 0.0, v, 1.0)
    return np.where(v > 0.0, safe * np.log(safe), 0.0)


@dataclass(frozen=True)
class Direction:
    """Unit direction stored by its angle; components are derived."""

    theta: float

    @property
    def n1(self) -> float:
        return math.cos(self.theta)

    @property
    def n2(self) -> float:
        return math.sin(self.theta)

    @property
    def components(self) -> tuple[float, float]:
        return (self.n1, self.n2)

    @classmethod
    def from_components(cls, n1: float, n2: float) -> "Direction":
        norm_sq = n1 * n1 + n2 * n2
        if abs(norm_sq - 1.0) > 1e-12:
            raise DomainError(
                f"direction components are not unit length: |n|^2 = {norm_sq!r}"
            )
        return cls(math.atan2(n2, n1))


def _as_theta(d) -> float:
    return d.theta if isinstance(d, Direction) else float(d)


class DirectionWeight:
    """A weight on unit directions, evaluable in vectorized form.

    Instances are immutable after construction and safe to share between
    threads.  Construct through the factory functions below rather than
    calling ``__init__`` directly.
    """

    def __init__(
        self,
        kind: str,
        problem_class: str,
        *,
        c: float | None = None,
        grid: np.ndarray | None = None,
        grid_values: np.ndarray | None = None,
        box_size: float | None = None,
        base: "DirectionWeight | None" = None,
        label: str | None = None,
    ):
        if kind not in _ALL_KINDS:
            raise WeightSpecError(f"unknown weight kind {kind!r}")
        if problem_class not in (MINIMIZING, MAXIMIZING):
            raise WeightSpecError(f"unknown problem class {problem_class!r}")
        self.kind = kind
        self.problem_class = problem_class
        self.c = c
        self.box_size = box_size
        self.base = base
        self.label = label or kind
        self._grid = None
        self._grid_values = None
        self._interp = None
        if kind == "tabulated":
            grid = np.asarray(grid, dtype=float)
            grid_values = np.asarray(grid_values, dtype=float)
            if grid.ndim != 1 or grid.shape != grid_values.shape or grid.size < 2:
                raise WeightSpecError("tabulated weight needs matching 1-d grids")
            if not np.all(np.diff(grid) > 0):
                raise WeightSpecError("tabulated angle grid must strictly increase")
            if np.any(grid_values < 0):
                raise WeightSpecError("tabulated weight values must be non-negative")
            self._grid = grid
            self._grid_values = grid_values
            if grid.size >= 4:
                self._interp = PchipInterpolator(grid, grid_values, extrapolate=False)
            else:
                self._interp = None  # linear fallback for tiny grids

    # -- domain ----------------------------------------------------------

    def domain(self) -> tuple[float, float]:
        """Angle interval on which the weight is evaluable."""
        if self.kind == "tabulated":
            return (float(self._grid[0]), float(self._grid[-1]))
        if self.problem_class == MAXIMIZING:
            return (0.0, HALF_PI)
        return (-math.inf, math.inf)

    def _check_domain(self, theta: np.ndarray) -> None:
        lo, hi = self.domain()
        if lo == -math.inf:
            return
        tol = 1e-9
        if np.any(theta < lo - tol) or np.any(theta > hi + tol):
            bad = theta[(theta < lo - tol) | (theta > hi + tol)]
            raise DomainError(
                f"angle {float(np.ravel(bad)[0])!r} outside weight domain "
                f"[{lo!r}, {hi!r}] of {self.label}"
            )

    # -- evaluation ------------------------------------------------------

    def value(self, theta) -> np.ndarray | float:
        """Weight value at angle(s) ``theta``; raises DomainError outside."""
        scalar = np.isscalar(theta)
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        if self.kind == "tabulated" and self.problem_class == MINIMIZING:
            lo, hi = self.domain()
            if hi - lo >= TWO_PI - 1e-9:
                # wrap into a window centered in the grid so overhanging
                # grids keep queries away from the interpolant's end cells
                base = lo + 0.5 * (hi - lo - TWO_PI)
                th = base + np.mod(th - base, TWO_PI)
        self._check_domain(th)
        if self.kind == "tabulated":
            th = np.clip(th, self._grid[0], self._grid[-1])
            if self._interp is not None:
                out = self._interp(th)
            else:
                out = np.interp(th, self._grid, self._grid_values)
        else:
            out = self.value_components(np.cos(th), np.sin(th))
        out = np.asarray(out, dtype=float)
        return float(out[0]) if scalar else out

    def value_components(self, n1, n2) -> np.ndarray | float:
        """Evaluate from unit-vector components.

        This path is numerically stable arbitrarily close to the axes and
        is the workhorse for curve functionals.  Components may carry tiny
        negative noise; they are clipped at zero for the maximizing forms.
        The closed forms are positively 1-homogeneous in (n1, n2), which
        the segment-functional evaluation relies on.
        """
        n1 = np.asarray(n1, dtype=float)
        n2 = np.asarray(n2, dtype=float)
        if self.kind == "constant":
            return np.full(np.broadcast(n1, n2).shape, float(self.c))
        if self.kind == "l1":
            return np.abs(n1) + np.abs(n2)
        if self.kind == "entropy":
            a = np.clip(n1, 0.0, None)
            b = np.clip(n2, 0.0, None)
            return _xlogx(a + b) - _xlogx(a) - _xlogx(b)
        if self.kind == "sqrt_product":
            prod = np.clip(n1, 0.0, None) * np.clip(n2, 0.0, None)
            return 2.0 * np.sqrt(prod)
        if self.kind == "reflected_dual":
            a = np.abs(n1)
            b = np.abs(n2)
            return self.box_size * (a + b) - self.base.value_components(a, b)
        # tabulated: no component closed form; go through the angle chart
        return self.value(np.arctan2(n2, n1))

    def boundary_extended_components(self, n1, n2) -> np.ndarray:
        """Like value_components, but tabulated weights extend by zero
        outside their grid; valid maximizing weights decay there, so the
        continuous extension is the class-consistent completion."""
        if self.kind != "tabulated":
            return self.value_components(n1, n2)
        n1 = np.atleast_1d(np.asarray(n1, dtype=float))
        n2 = np.atleast_1d(np.asarray(n2, dtype=float))
        theta = np.arctan2(n2, n1)
        lo, hi = self.domain()
        inside = (theta >= lo) & (theta <= hi)
        out = np.zeros(theta.shape)
        if inside.any():
            out[inside] = np.asarray(self.value(theta[inside]), dtype=float)
        return out

    def derivative(self, theta) -> float:
        """d(weight)/d(theta); analytic for closed forms, central finite
        difference for tabulated and reflected kinds."""
        th = float(_as_theta(theta))
        n1, n2 = math.cos(th), math.sin(th)
        if self.kind == "constant":
            return 0.0
        if self.kind == "l1":
            if min(abs(n1), abs(n2)) < 1e-9:
                raise DomainError("l1 weight is not differentiable on the axes")
            return -math.copysign(1.0, n1) * n2 + math.copysign(1.0, n2) * n1
        if self.kind == "entropy":
            if min(n1, n2) <= 1e-300:
                raise DomainError("entropy weight derivative needs an interior angle")
            s = n1 + n2
            return n2 * math.log(n1) - n1 * math.log(n2) - (n2 - n1) * math.log(s)
        if self.kind == "sqrt_product":
            if min(n1, n2) <= 1e-300:
                raise DomainError("sqrt_product derivative needs an interior angle")
            return (n1 * n1 - n2 * n2) / math.sqrt(n1 * n2)
        # finite differences, step pinned in constants
        h = FD_STEP
        lo, hi = self.domain()
        if self.kind == "tabulated" and (th - h < lo or th + h > hi):
            raise DomainError("finite difference hits the tabulated grid boundary")
        return float(self.value(th + h) - self.value(th - h)) / (2.0 * h)

    def derivative_components(self, n1, n2) -> np.ndarray:
        """Vectorized d/d(theta) from components (interior angles only)."""
        n1 = np.asarray(n1, dtype=float)
        n2 = np.asarray(n2, dtype=float)
        if self.kind == "constant":
            return np.zeros(np.broadcast(n1, n2).shape)
        if self.kind == "entropy":
            s = n1 + n2
            return n2 * np.log(n1) - n1 * np.log(n2) - (n2 - n1) * np.log(s)
        if self.kind == "sqrt_product":
            return (n1 * n1 - n2 * n2) / np.sqrt(n1 * n2)
        th = np.arctan2(n2, n1)
        return np.asarray([self.derivative(t) for t in np.atleast_1d(th)])

    # -- misc -------------------------------------------------------------

    def max_value(self, samples: int = VALIDATION_SAMPLES) -> float:
        lo, hi = self.domain()
        if lo == -math.inf:
            lo, hi = 0.0, TWO_PI
        th = lo + (np.arange(samples) + 0.5) * (hi - lo) / samples
        return float(np.max(self.value(th)))

    def __repr__(self) -> str:  # pragma: no cover - debug helper
        return f"DirectionWeight({self.label}, {self.problem_class})"


# -- factories -------------------------------------------------------------


def constant(c: float = 1.0, problem_class: str = MINIMIZING) -> DirectionWeight:
    return DirectionWeight("constant", problem_class, c=float(c),
                           label=f"constant:{c:g}")


def l1_norm() -> DirectionWeight:
    return DirectionWeight("l1", MINIMIZING)


def entropy() -> DirectionWeight:
    """Lattice-staircase entropy weight (n1+n2)*H(n1/(n1+n2)), in nats."""
    return DirectionWeight("entropy", MAXIMIZING)


def sqrt_product() -> DirectionWeight:
    """The weight 2*sqrt(n1*n2); its maximizing curve is the hyperbola."""
    return DirectionWeight("sqrt_product", MAXIMIZING)


def tabulated(grid, values, problem_class: str,
              label: str | None = None) -> DirectionWeight:
    return DirectionWeight("tabulated", problem_class, grid=grid,
                           grid_values=values, label=label or "tabulated")


def tabulate(w: DirectionWeight, count: int,
             margin: float = 1e-4) -> DirectionWeight:
    """Tabulated copy of ``w`` on a uniform angle grid inside its domain."""
    lo, hi = w.domain()
    if lo == -math.inf:
        lo, hi = 0.0, TWO_PI
    grid = np.linspace(lo + margin, hi - margin, count)
    return tabulated(grid, w.value(grid), w.problem_class,
                     label=f"tabulated[{w.label}]")


def bare_entropy(count: int = 4097) -> DirectionWeight:
    """Tabulated comparison weight H(n1/(n1+n2)) without the (n1+n2) factor."""
    grid = np.linspace(1e-6, HALF_PI - 1e-6, count)
    n1, n2 = np.cos(grid), np.sin(grid)
    alpha = n1 / (n1 + n2)
    values = -(_xlogx(alpha) + _xlogx(1.0 - alpha))
    return tabulated(grid, values, MAXIMIZING, label="bare_entropy")


def load_tabulated_csv(path, problem_class: str) -> DirectionWeight:
    """Load a two-column CSV (theta_radians, value); header row required."""
    path = Path(path)
    if not path.exists():
        raise WeightSpecError(f"weight file not found: {path}")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise WeightSpecError(f"empty weight file: {path}") from None
        try:
            float(header[0])
        except (ValueError, IndexError):
            pass  # good: a non-numeric header row
        else:
            raise WeightSpecError(f"weight CSV {path} is missing its header row")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 2:
                raise WeightSpecError(f"{path}:{lineno}: expected two columns")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError as exc:
                raise WeightSpecError(f"{path}:{lineno}: {exc}") from None
    if len(rows) < 2:
        raise WeightSpecError(f"weight CSV {path} needs at least two rows")
    grid = np.array([r[0] for r in rows])
    values = np.array([r[1] for r in rows])
    if not np.all(np.diff(grid) > 0):
        raise WeightSpecError(f"weight CSV {path}: theta must strictly increase")
    return tabulated(grid, values, problem_class, label=str(path))


def from_spec(spec: str, problem_class: str) -> DirectionWeight:
    """Parse the small weight grammar.

    Accepted forms: ``constant:<c>``, ``l1``, ``entropy``, ``sqrt_product``,
    or a path to a tabulated CSV file.
    """
    spec = spec.strip()
    if spec.startswith("constant:"):
        try:
            c = float(spec.split(":", 1)[1])
        except ValueError:
            raise WeightSpecError(f"bad constant weight spec {spec!r}") from None
        return constant(c, problem_class)
    if spec == "l1":
        return l1_norm()
    if spec == "entropy":
        return entropy()
    if spec == "sqrt_product":
        return sqrt_product()
    if spec.endswith(".csv") or "/" in spec or "\\" in spec:
        return load_tabulated_csv(spec, problem_class)
    raise WeightSpecError(f"unknown weight spec {spec!r}")


# -- spec-level operations ---------------------------------------------------


def evaluate(w: DirectionWeight, d) -> float:
    """Evaluate ``w`` at a Direction (or bare angle)."""
    return float(w.value(_as_theta(d)))


_ENTROPY = entropy()


def entropy_weight(d) -> float:
    """Entropy weight at a direction; extends continuously by 0 on the axes."""
    th = _as_theta(d)
    return float(_ENTROPY.value_components(math.cos(th), math.sin(th)))


def derivative(w: DirectionWeight, d) -> float:
    return w.derivative(_as_theta(d))


# -- validation ---------------------------------------------------------------


@dataclass
class ValidationReport:
    """Outcome of weight validation; never raised, always returned."""

    label: str
    problem_class: str
    valid: bool
    violations: list[str] = field(default_factory=list)
    metrics: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "problem_class": self.problem_class,
            "valid": self.valid,
            "violations": list(self.violations),
            "metrics": dict(self.metrics),
        }


def validate(w: DirectionWeight) -> ValidationReport:
    """Check the class requirements of a weight; returns a report."""
    violations: list[str] = []
    metrics: dict[str, float] = {}
    lo, hi = w.domain()
    if w.problem_class == MINIMIZING:
        if lo == -math.inf:
            lo, hi = 0.0, TWO_PI
        th = lo + (np.arange(VALIDATION_SAMPLES) + 0.5) * (hi - lo) / VALIDATION_SAMPLES
        vals = np.asarray(w.value(th))
        metrics["min_value"] = float(vals.min())
        if vals.min() < POSITIVITY_FLOOR:
            violations.append(
                f"positivity: min sampled value {vals.min():.3e} below "
                f"{POSITIVITY_FLOOR:.0e}"
            )
        if hi - lo >= TWO_PI - 1e-9:
            half = th[: VALIDATION_SAMPLES // 2]
            gap = np.abs(np.asarray(w.value(half)) - np.asarray(w.value(half + math.pi)))
            metrics["evenness_gap"] = float(gap.max())
            if gap.max() > EVENNESS_TOL + 1e-12 * max(1.0, float(vals.max())):
                violations.append(f"evenness: max |w(t)-w(t+pi)| = {gap.max():.3e}")
        else:
            violations.append("domain does not cover the full circle")
    else:
        span = hi - lo
        th = lo + (np.arange(VALIDATION_SAMPLES) + 0.5) * span / VALIDATION_SAMPLES
        vals = np.asarray(w.value(th))
        metrics["min_value"] = float(vals.min())
        if vals.min() < -1e-12:
            violations.append(f"negativity: min sampled value {vals.min():.3e}")
        probe_lo = max(BOUNDARY_PROBE, lo + 1e-12)
        probe_hi = min(HALF_PI - BOUNDARY_PROBE, hi - 1e-12)
        v_lo = float(w.value(probe_lo))
        v_hi = float(w.value(probe_hi))
        metrics["boundary_value_low"] = v_lo
        metrics["boundary_value_high"] = v_hi
        if v_lo > BOUNDARY_DECAY_CEILING:
            violations.append(
                f"boundary decay: value {v_lo:.4f} at theta={probe_lo:.1e} "
                f"exceeds {BOUNDARY_DECAY_CEILING}"
            )
        if v_hi > BOUNDARY_DECAY_CEILING:
            violations.append(
                f"boundary decay: value {v_hi:.4f} near pi/2 exceeds "
                f"{BOUNDARY_DECAY_CEILING}"
            )
        # last 1% of the arc on each side must head monotonically to zero
        edge = 0.01 * span
        down = np.linspace(lo + edge, lo + 1e-12, 64)
        if np.any(np.diff(np.asarray(w.value(down))) > 1e-9):
            violations.append("boundary decay: not monotone over the low edge")
        up = np.linspace(hi - edge, hi - 1e-12, 64)
        if np.any(np.diff(np.asarray(w.value(up))) > 1e-9):
            violations.append("boundary decay: not monotone over the high edge")
    return ValidationReport(w.label, w.problem_class, not violations,
                            violations, metrics)


def require_valid(w: DirectionWeight, problem_class: str) -> None:
    """Raise WeightValidationError unless ``w`` validates in the class."""
    if w.problem_class != problem_class:
        raise WeightValidationError(
            f"{w.label} is {w.problem_class}-class, expected {problem_class}"
        )
    report = validate(w)
    if not report.valid:
        raise WeightValidationError(
            f"{w.label} failed validation: " + "; ".join(report.violations)
        )
