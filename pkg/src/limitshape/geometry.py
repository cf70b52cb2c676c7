"""Planar convex-geometry kernel.

Half-plane intersection, polygon and monotone-curve measures, weighted
boundary functionals, and distances.  All operations are pure functions on
immutable inputs.

Monotone curves are polylines with non-decreasing x and non-increasing y
(vertical and horizontal steps are allowed, so partition staircases are
admissible).  Unbounded supports are represented by analytic tail
descriptors instead of huge polylines; volume and functional evaluation
account for the tails.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .constants import (
    EDGE_SAMPLES,
    GEOM_EPS,
    NEAR_PARALLEL,
    SUP_GRID,
)
from .errors import AdmissibilityError, DomainError
from .weights import MAXIMIZING, DirectionWeight

# -- half planes and polygons -------------------------------------------------


@dataclass(frozen=True)
class HalfPlane:
    """Half plane {x : (x, n) <= offset} (sense "le") or >= (sense "ge").

    The unit normal is stored by its angle.
    """

    theta: float
    offset: float
    sense: str = "le"

    def __post_init__(self):
        if self.sense not in ("le", "ge"):
            raise DomainError(f"half-plane sense must be 'le' or 'ge', got {self.sense!r}")

    @property
    def normal(self) -> tuple[float, float]:
        return (math.cos(self.theta), math.sin(self.theta))

    def canonical(self) -> tuple[float, float]:
        """(theta, offset) of the equivalent 'le' half plane."""
        if self.sense == "le":
            return (self.theta % (2.0 * math.pi), self.offset)
        return ((self.theta + math.pi) % (2.0 * math.pi), -self.offset)


class ConvexPolygon:
    """Closed convex polygon; vertices counterclockwise, implicitly closed.

    The empty polygon (no vertices) is a valid value and represents an
    empty intersection.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices, validate: bool = True):
        verts = np.asarray(vertices, dtype=float).reshape(-1, 2)
        if validate and len(verts) >= 3:
            verts = _dedupe_ring(verts)
            d = np.diff(np.vstack([verts, verts[:1]]), axis=0)
            cross = d[:, 0] * np.roll(d[:, 1], -1) - d[:, 1] * np.roll(d[:, 0], -1)
            if np.any(cross < -1e-12):
                scale = float(np.max(np.abs(d))) or 1.0
                if np.any(cross / (scale * scale) < -1e-9):
                    raise DomainError("vertex ring is not convex/counterclockwise")
        object.__setattr__(self, "vertices", verts)

    def __setattr__(self, *_):  # immutability
        raise AttributeError("ConvexPolygon is immutable")

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) < 3

    def __len__(self) -> int:
        return len(self.vertices)

    def to_json_dict(self) -> dict:
        return {"kind": "convex_polygon",
                "vertices": [[float(x), float(y)] for x, y in self.vertices]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "ConvexPolygon":
        if data.get("kind") != "convex_polygon":
            raise DomainError("not a convex_polygon JSON object")
        return cls(np.asarray(data["vertices"], dtype=float))


def _dedupe_ring(verts: np.ndarray, eps: float = GEOM_EPS) -> np.ndarray:
    if len(verts) == 0:
        return verts
    keep = [0]
    for i in range(1, len(verts)):
        if np.max(np.abs(verts[i] - verts[keep[-1]])) > eps:
            keep.append(i)
    while len(keep) > 1 and np.max(np.abs(verts[keep[-1]] - verts[keep[0]])) <= eps:
        keep.pop()
    return verts[keep]


def _shoelace(verts: np.ndarray) -> float:
    if len(verts) < 3:
        return 0.0
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_area(p: ConvexPolygon | np.ndarray) -> float:
    """Enclosed area by the shoelace sum; 0 for the empty polygon."""
    verts = p.vertices if isinstance(p, ConvexPolygon) else np.asarray(p, float)
    return abs(_shoelace(verts))


_EMPTY = object()


def _clip_halfplane(verts: np.ndarray, n: np.ndarray, c: float):
    """Clip a convex CCW ring against {x : x.n <= c}; None means unchanged."""
    d = verts @ n - c
    inside = d <= GEOM_EPS * max(1.0, abs(c))
    if inside.all():
        return None
    if not inside.any():
        return _EMPTY
    nxt = np.roll(inside, -1)
    entries = np.nonzero(~inside & nxt)[0]
    exits = np.nonzero(inside & ~nxt)[0]
    if len(entries) != 1 or len(exits) != 1:
        return _clip_scalar(verts, n, c)
    i, j = int(entries[0]), int(exits[0])
    d_next = np.roll(d, -1)

    def crossing(k: int) -> np.ndarray:
        a, b = verts[k], verts[(k + 1) % len(verts)]
        t = d[k] / (d[k] - d_next[k])
        return a + t * (b - a)

    entry_pt, exit_pt = crossing(i), crossing(j)
    if i < j:
        run = verts[i + 1: j + 1]
    else:
        run = np.vstack([verts[i + 1:], verts[: j + 1]])
    return np.vstack([entry_pt[None, :], run, exit_pt[None, :]])


def _clip_scalar(verts: np.ndarray, n: np.ndarray, c: float):
    """Sutherland-Hodgman fallback for numerically degenerate rings."""
    out: list[np.ndarray] = []
    k = len(verts)
    d = verts @ n - c
    tol = GEOM_EPS * max(1.0, abs(c))
    for i in range(k):
        a, da = verts[i], d[i]
        b, db = verts[(i + 1) % k], d[(i + 1) % k]
        if da <= tol:
            out.append(a)
            if db > tol and da < db:
                out.append(a + (da / (da - db)) * (b - a))
        elif db <= tol and da != db:
            out.append(a + (da / (da - db)) * (b - a))
    if len(out) < 3:
        return _EMPTY
    return np.asarray(out)


def intersect_halfplanes(planes: Sequence[HalfPlane],
                         bounding_box: tuple[float, float, float, float]
                         ) -> ConvexPolygon:
    """Intersection of half planes clipped to an axis-aligned box.

    Planes are canonicalized to 'le' form, sorted by normal angle, and
    near-parallel normals (within 1e-9 rad) are merged keeping the tighter
    offset.  An infeasible system yields the empty polygon, not an error.
    """
    x0, y0, x1, y1 = (float(v) for v in bounding_box)
    if not (x1 > x0 and y1 > y0):
        raise DomainError("bounding box is degenerate")
    canon = sorted(p.canonical() for p in planes)
    merged: list[tuple[float, float]] = []
    for theta, off in canon:
        if merged and theta - merged[-1][0] < NEAR_PARALLEL:
            if off < merged[-1][1]:
                merged[-1] = (merged[-1][0], off)
        else:
            merged.append((theta, off))
    if len(merged) >= 2 and (merged[0][0] + 2 * math.pi) - merged[-1][0] < NEAR_PARALLEL:
        if merged[-1][1] < merged[0][1]:
            merged[0] = (merged[0][0], merged[-1][1])
        merged.pop()
    verts = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)
    for theta, off in merged:
        n = np.array([math.cos(theta), math.sin(theta)])
        clipped = _clip_halfplane(verts, n, off)
        if clipped is _EMPTY:
            return ConvexPolygon(np.empty((0, 2)))
        if clipped is not None:
            verts = clipped
        if len(verts) < 3:
            return ConvexPolygon(np.empty((0, 2)))
    return ConvexPolygon(verts)


# -- tails ---------------------------------------------------------------------


@dataclass(frozen=True)
class TailFit:
    """Analytic decay model for one unbounded end of a monotone curve.

    For a right tail the graph continues as ``y = coef * exp(-rate*x)``
    (kind "exp") or ``y = coef * x**-rate`` (kind "power") for x >= start.
    A left tail uses the same models for the transposed graph x = g(y),
    y >= start.  ``log_stop`` caps the tail at coordinate exp(log_stop)
    (stored in logs so caps beyond float range stay representable);
    None means the tail runs to infinity.
    """

    kind: str
    coef: float
    rate: float
    start: float
    log_stop: float | None = None

    def __post_init__(self):
        if self.kind not in ("exp", "power"):
            raise DomainError(f"unknown tail kind {self.kind!r}")
        if self.coef < 0 or self.rate <= 0 or self.start < 0:
            raise DomainError("tail fit needs coef >= 0, rate > 0, start >= 0")

    def value(self, t) -> np.ndarray:
        """Tail ordinate at abscissa t (t >= start)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "exp":
            return self.coef * np.exp(-self.rate * t)
        return self.coef * np.power(t, -self.rate)

    def inverse(self, v) -> np.ndarray:
        """Abscissa at which the tail ordinate equals v."""
        v = np.asarray(v, dtype=float)
        if self.kind == "exp":
            return np.log(self.coef / v) / self.rate
        return np.power(self.coef / v, 1.0 / self.rate)

    def integral(self) -> float:
        """Integral of the tail ordinate from start to the (log!) stop."""
        a, s = self.coef, self.start
        if self.kind == "exp":
            val = a / self.rate * math.exp(-self.rate * s)
            if self.log_stop is not None and self.log_stop < 700:
                val -= a / self.rate * math.exp(-self.rate * math.exp(self.log_stop))
            return val
        p = self.rate
        if self.log_stop is None:
            if p <= 1.0:
                return math.inf
            return a * s ** (1.0 - p) / (p - 1.0)
        ls = math.log(s)
        if abs(p - 1.0) < 1e-12:
            return a * (self.log_stop - ls)
        # a * (stop^(1-p) - s^(1-p)) / (1-p), in logs where needed
        e_hi = (1.0 - p) * self.log_stop
        e_lo = (1.0 - p) * ls
        if max(e_hi, e_lo) > 700.0:
            return math.inf
        return a * (math.exp(e_hi) - math.exp(e_lo)) / (1.0 - p)

    def fan_area(self) -> float:
        """Integral of (y dx - x dy)/2 along the tail piece of the curve."""
        a, b, s = self.coef, self.rate, self.start
        if self.kind == "exp":
            # y = a e^{-bx}: (y dx - x dy)/2 = a(1+bx)/2 e^{-bx} dx
            def prim(x):  # -d/dx antiderivative evaluated from s upward
                return (a / (2.0 * b)) * (2.0 + b * x) * math.exp(-b * x)
            hi = 0.0
            if self.log_stop is not None and self.log_stop < 700:
                hi = prim(math.exp(self.log_stop))
            return prim(s) - hi
        p = self.rate
        if abs(p - 1.0) < 1e-12:
            if self.log_stop is None:
                return math.inf
            return a * (self.log_stop - math.log(s))
        c = a * (1.0 + p) / (2.0 * (1.0 - p))
        e_lo = (1.0 - p) * math.log(s)
        if self.log_stop is None:
            if p < 1.0:
                return math.inf
            return -c * math.exp(e_lo)
        e_hi = (1.0 - p) * self.log_stop
        if max(e_hi, e_lo) > 700.0:
            return math.inf
        return c * (math.exp(e_hi) - math.exp(e_lo))

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "coef": self.coef, "rate": self.rate,
                "start": self.start, "log_stop": self.log_stop}

    @classmethod
    def from_json_dict(cls, d: dict) -> "TailFit":
        return cls(d["kind"], d["coef"], d["rate"], d["start"], d.get("log_stop"))


# -- monotone curves -----------------------------------------------------------


class MonotoneCurve:
    """Polyline graph of a non-increasing function in the closed quadrant.

    x is non-decreasing, y non-increasing, repeated points are forbidden;
    axis contact is allowed at the endpoints only.  ``left_tail`` describes
    the transposed graph x = g(y) above the first point, ``right_tail`` the
    graph y = f(x) beyond the last point.
    """

    __slots__ = ("points", "left_tail", "right_tail")

    def __init__(self, points, left_tail: TailFit | None = None,
                 right_tail: TailFit | None = None, validate: bool = True):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if validate:
            problems = monotone_violations(pts)
            if problems:
                raise DomainError("invalid monotone curve: " + problems[0])
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "left_tail", left_tail)
        object.__setattr__(self, "right_tail", right_tail)

    def __setattr__(self, *_):
        raise AttributeError("MonotoneCurve is immutable")

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def with_tails(self, left_tail=None, right_tail=None) -> "MonotoneCurve":
        return MonotoneCurve(self.points, left_tail, right_tail, validate=False)

    def scaled(self, s: float) -> "MonotoneCurve":
        """Homothety by s > 0; tails transform covariantly."""
        if s <= 0:
            raise DomainError("homothety factor must be positive")
        return MonotoneCurve(self.points * s, _scale_tail(self.left_tail, s),
                             _scale_tail(self.right_tail, s), validate=False)

    def to_json_dict(self) -> dict:
        tail = None
        if self.left_tail is not None or self.right_tail is not None:
            tail = {
                "left": self.left_tail.to_json_dict() if self.left_tail else None,
                "right": self.right_tail.to_json_dict() if self.right_tail else None,
            }
        return {"kind": "monotone_curve",
                "points": [[float(x), float(y)] for x, y in self.points],
                "tail": tail}

    @classmethod
    def from_json_dict(cls, data: dict) -> "MonotoneCurve":
        if data.get("kind") != "monotone_curve":
            raise DomainError("not a monotone_curve JSON object")
        tail = data.get("tail") or {}
        lt = TailFit.from_json_dict(tail["left"]) if tail.get("left") else None
        rt = TailFit.from_json_dict(tail["right"]) if tail.get("right") else None
        return cls(np.asarray(data["points"], dtype=float), lt, rt)


def _scale_tail(tail: TailFit | None, s: float) -> TailFit | None:
    if tail is None:
        return None
    if tail.kind == "exp":
        coef, rate = tail.coef * s, tail.rate / s
    else:
        coef, rate = tail.coef * s ** (1.0 + tail.rate), tail.rate
    stop = None if tail.log_stop is None else tail.log_stop + math.log(s)
    return TailFit(tail.kind, coef, rate, tail.start * s, stop)


def monotone_violations(points: np.ndarray) -> list[str]:
    """List of reasons a polyline fails monotone-curve admissibility."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    problems = []
    if len(pts) < 2:
        problems.append("fewer than two points")
        return problems
    if np.any(pts < -GEOM_EPS):
        problems.append("negative coordinates")
    dx = np.diff(pts[:, 0])
    dy = np.diff(pts[:, 1])
    if np.any(dx < -GEOM_EPS):
        problems.append("x must be non-decreasing")
    if np.any(dy > GEOM_EPS):
        i = int(np.nonzero(dy > GEOM_EPS)[0][0])
        problems.append(f"y increases on segment {i}")
    if np.any((np.abs(dx) <= GEOM_EPS) & (np.abs(dy) <= GEOM_EPS)):
        problems.append("zero-length segment")
    return problems


def curve_volume(c: MonotoneCurve, include_tails: bool = True) -> float:
    """Area between the curve's monotone completion and the axes.

    The completion runs horizontally from (0, y_first) to the first point
    (or along the left tail when present) and drops to zero after the last
    point (or decays along the right tail).  Returns ``inf`` when a tail
    integral diverges.
    """
    pts = c.points
    x1, y1 = float(pts[0, 0]), float(pts[0, 1])
    vol = x1 * y1 + float(np.trapezoid(pts[:, 1], pts[:, 0]))
    if include_tails:
        if c.left_tail is not None:
            vol += c.left_tail.integral()
        if c.right_tail is not None:
            vol += c.right_tail.integral()
    return vol


def curve_fan_area(c: MonotoneCurve, include_tails: bool = True) -> float:
    """Area swept by segments from the origin to the curve."""
    pts = c.points
    cross = pts[:-1, 0] * pts[1:, 1] - pts[1:, 0] * pts[:-1, 1]
    fan = 0.5 * float(np.abs(cross).sum())
    if include_tails:
        if c.left_tail is not None:
            fan += c.left_tail.fan_area()
        if c.right_tail is not None:
            fan += c.right_tail.fan_area()
    return fan


def _segment_normals(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    d = np.diff(pts, axis=0)
    lengths = np.hypot(d[:, 0], d[:, 1])
    if np.any(lengths <= 0):
        raise DomainError("curve contains a zero-length segment")
    n1 = -d[:, 1] / lengths  # outward normal of a monotone graph
    n2 = d[:, 0] / lengths
    return n1, n2, lengths


def _tail_functional(w: DirectionWeight, tail: TailFit, swap: bool) -> float:
    """Weighted length along a tail, by quadrature in log-abscissa.

    ``swap`` evaluates the weight with components exchanged (left tails are
    transposed graphs).  Beyond the float-representable range the integrand
    is continued by a local exponential fit; for a kind="power" rate-1 tail
    this continuation is exact.
    """
    a, b, s = tail.coef, tail.rate, tail.start
    if s <= 0:
        s = 1e-300

    def integrand(t):
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        x = np.exp(tt)
        if tail.kind == "exp":
            slope = a * b * np.exp(-b * x)
        else:
            slope = a * b * np.power(x, -b - 1.0)
        norm = np.hypot(1.0, slope)
        c1, c2 = slope / norm, 1.0 / norm
        if swap:
            c1, c2 = c2, c1
        vals = np.asarray(w.boundary_extended_components(c1, c2), dtype=float)
        out = vals * norm * x  # ds = norm dx, dx = x dt
        return out if np.ndim(t) else float(out.reshape(-1)[0])

    t_lo = math.log(s)
    t_stop = math.inf if tail.log_stop is None else tail.log_stop
    if tail.kind == "exp":
        # integrand dies like exp(-b e^t); cut where the exponent is huge
        t_hi = min(t_stop, math.log((50.0 + abs(math.log(max(a, 1e-300)))) / b)
                   if b > 0 else t_stop)
        t_hi = max(t_hi, t_lo)
        if t_hi <= t_lo:
            return 0.0
        val, _ = quad(integrand, t_lo, t_hi, limit=200)
        return float(val)
    # power tail: integrate the representable range, then continue with a
    # local exponential model fitted on the last representable decade
    t_rep = min(t_stop, 300.0)
    val = 0.0
    if t_rep > t_lo:
        val, _ = quad(integrand, t_lo, t_rep, limit=200)
    if t_stop > t_rep:
        g1 = float(integrand(t_rep - 1.0))
        g2 = float(integrand(t_rep))
        if g2 <= 0.0 or g1 <= 0.0:
            return float(val)
        q = math.log(g2 / g1)
        if q >= 1e-9:
            return math.inf
        if abs(q) < 1e-9:
            extra = g2 * (t_stop - t_rep) if math.isfinite(t_stop) else math.inf
        else:
            extra = g2 / -q
            if math.isfinite(t_stop):
                extra *= 1.0 - math.exp(q * (t_stop - t_rep))
        val += extra
    return float(val)


def functional_on_curve(w: DirectionWeight, c: MonotoneCurve,
                        include_tails: bool = True) -> float:
    """Weighted length: sum over segments of w(segment normal) * length.

    Segment normals are the outward unit normals (pointing away from the
    origin).  When the curve carries tail descriptors their contribution is
    added by quadrature along the analytic tails.
    """
    n1, n2, lengths = _segment_normals(c.points)
    lo, hi = w.domain()
    if w.kind == "tabulated":
        theta = np.arctan2(n2, n1)
        bad = np.nonzero((theta < lo - 1e-9) | (theta > hi + 1e-9))[0]
        if len(bad):
            raise AdmissibilityError(
                f"segment {int(bad[0])} normal at angle {float(theta[bad[0]]):.6f}"
                f" is outside the tabulated domain [{lo:.6f}, {hi:.6f}]",
                segment_index=int(bad[0]),
            )
        vals = np.asarray(w.value(np.clip(theta, lo, hi)), dtype=float)
    else:
        if w.problem_class == MAXIMIZING:
            bad = np.nonzero((n1 < -1e-12) | (n2 < -1e-12))[0]
            if len(bad):
                raise AdmissibilityError(
                    f"segment {int(bad[0])} normal leaves the first quadrant",
                    segment_index=int(bad[0]),
                )
        vals = np.asarray(w.value_components(n1, n2), dtype=float)
    total = float(np.dot(vals, lengths))
    if include_tails:
        if c.left_tail is not None:
            total += _tail_functional(w, c.left_tail, swap=True)
        if c.right_tail is not None:
            total += _tail_functional(w, c.right_tail, swap=False)
    return total


def functional_on_polygon(w: DirectionWeight, p: ConvexPolygon | np.ndarray) -> float:
    """Weighted perimeter of a closed polygon with outward edge normals.

    Accepts raw vertex rings as well, so the optimality harnesses can
    evaluate mildly non-convex competitors.
    """
    verts = p.vertices if isinstance(p, ConvexPolygon) else np.asarray(p, float)
    if len(verts) < 3:
        raise DomainError("functional_on_polygon needs a non-empty polygon")
    d = np.diff(np.vstack([verts, verts[:1]]), axis=0)
    lengths = np.hypot(d[:, 0], d[:, 1])
    mask = lengths > 0
    n1 = d[:, 1][mask] / lengths[mask]
    n2 = -d[:, 0][mask] / lengths[mask]
    vals = np.asarray(w.value_components(n1, n2), dtype=float)
    return float(np.dot(vals, lengths[mask]))


# -- evaluation and distances ---------------------------------------------------


def curve_eval(c: MonotoneCurve, xq) -> np.ndarray:
    """Ordinates of the curve's monotone completion at query abscissas."""
    xq = np.atleast_1d(np.asarray(xq, dtype=float))
    pts = c.points
    out = np.interp(xq, pts[:, 0], pts[:, 1])
    if c.left_tail is not None:
        left = xq < pts[0, 0]
        if left.any():
            xs = np.clip(xq[left], 1e-300, None)
            out[left] = c.left_tail.inverse(xs)
    else:
        out[xq < pts[0, 0]] = pts[0, 1]
    if c.right_tail is not None:
        right = xq > pts[-1, 0]
        if right.any():
            out[right] = c.right_tail.value(xq[right])
    else:
        out[xq > pts[-1, 0]] = pts[-1, 1]
    return out


def _coverage(c: MonotoneCurve) -> tuple[float, float]:
    lo = 0.0 if (c.left_tail is not None or c.points[0, 0] <= GEOM_EPS) else c.points[0, 0]
    hi = math.inf if c.right_tail is not None else c.points[-1, 0]
    return lo, hi


def sup_distance(c1: MonotoneCurve, c2: MonotoneCurve,
                 window: tuple[float, float], grid: int = SUP_GRID) -> float:
    """Max vertical gap between two curves over a window, on a sample grid."""
    x_lo, x_hi = float(window[0]), float(window[1])
    if not x_hi > x_lo:
        raise DomainError("sup_distance window is degenerate")
    for c in (c1, c2):
        lo, hi = _coverage(c)
        if x_lo < lo - 1e-12 or x_hi > hi + 1e-12:
            raise DomainError(
                f"window [{x_lo}, {x_hi}] outside curve x-range [{lo}, {hi}]"
            )
    xs = np.linspace(x_lo, x_hi, grid)
    return float(np.max(np.abs(curve_eval(c1, xs) - curve_eval(c2, xs))))


def _sample_boundary(p: ConvexPolygon, per_edge: int) -> np.ndarray:
    verts = p.vertices
    nxt = np.roll(verts, -1, axis=0)
    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    pts = verts[:, None, :] * (1.0 - t)[None, :, None] + nxt[:, None, :] * t[None, :, None]
    return pts.reshape(-1, 2)


def hausdorff_distance(p1: ConvexPolygon, p2: ConvexPolygon,
                       per_edge: int = EDGE_SAMPLES) -> float:
    """Symmetric Hausdorff distance between vertex-sampled boundaries."""
    if p1.is_empty or p2.is_empty:
        raise DomainError("hausdorff_distance needs non-empty polygons")
    a = _sample_boundary(p1, per_edge + 1)
    b = _sample_boundary(p2, per_edge + 1)

    def one_sided(src: np.ndarray, dst: np.ndarray) -> float:
        worst = 0.0
        for i in range(0, len(src), 1024):
            chunk = src[i: i + 1024]
            d2 = ((chunk[:, None, :] - dst[None, :, :]) ** 2).sum(axis=2)
            worst = max(worst, float(np.sqrt(d2.min(axis=1)).max()))
        return worst

    return max(one_sided(a, b), one_sided(b, a))


def slice_curve(c: MonotoneCurve, x_lo: float, x_hi: float) -> MonotoneCurve:
    """Sub-curve over [x_lo, x_hi] with interpolated endpoints (tailless)."""
    pts = c.points
    if x_lo < pts[0, 0] - 1e-9 or x_hi > pts[-1, 0] + 1e-9 or x_lo >= x_hi:
        raise DomainError("slice range must lie within the polyline x-range")
    xs = pts[:, 0]
    inner = pts[(xs > x_lo) & (xs < x_hi)]
    y_lo = curve_eval(c, x_lo)[0]
    y_hi = curve_eval(c, x_hi)[0]
    stacked = np.vstack([[x_lo, y_lo], inner, [x_hi, y_hi]])
    return MonotoneCurve(_dedupe_path(stacked))


def _dedupe_path(pts: np.ndarray, eps: float = GEOM_EPS) -> np.ndarray:
    keep = [0]
    for i in range(1, len(pts)):
        if np.max(np.abs(pts[i] - pts[keep[-1]])) > eps:
            keep.append(i)
    return pts[keep]


def concatenate_curves(c1: MonotoneCurve, c2: MonotoneCurve) -> MonotoneCurve:
    """Join two curves where c2 starts at c1's endpoint."""
    if np.max(np.abs(c1.points[-1] - c2.points[0])) > 1e-9:
        raise DomainError("curves do not share an endpoint")
    return MonotoneCurve(np.vstack([c1.points, c2.points[1:]]),
                         c1.left_tail, c2.right_tail)


# -- serialization helpers -------------------------------------------------------


def points_to_csv(points: np.ndarray) -> str:
    """x,y rows at 17 significant digits, header included."""
    lines = ["x,y"]
    for x, y in np.asarray(points, dtype=float).reshape(-1, 2):
        lines.append(f"{x:.17g},{y:.17g}")
    return "\n".join(lines) + "\n"


def curve_to_csv(c: MonotoneCurve) -> str:
    return points_to_csv(c.points)


def polygon_to_csv(p: ConvexPolygon) -> str:
    return points_to_csv(p.vertices)


def curve_to_json(c: MonotoneCurve) -> str:
    return json.dumps(c.to_json_dict(), sort_keys=True)


def curve_from_json(text: str) -> MonotoneCurve:
    return MonotoneCurve.from_json_dict(json.loads(text))
