"""The maximizing construction: entropy-weighted monotone curves.

The body at scale lambda is the intersection of reversed half planes
{x : (x, n) >= lambda * w(n)} over first-quadrant normals; its boundary is
the graph of a convex non-increasing function.  At the unit-volume scale
that graph maximizes the weighted length among admissible monotone curves,
and for the staircase-entropy weight it reproduces the known limit shape of
uniform random Young diagrams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT_RESOLUTION, MIN_RESOLUTION, WINDOW_FACTOR
from .errors import (
    ConstructionError,
    DivergenceError,
    DomainError,
    WindowTooSmallError,
)
from .geometry import (
    HalfPlane,
    MonotoneCurve,
    TailFit,
    curve_fan_area,
    curve_volume,
    functional_on_curve,
    intersect_halfplanes,
    slice_curve,
    sup_distance,
)
from .weights import MAXIMIZING, DirectionWeight, entropy, require_valid

HALF_PI = math.pi / 2.0

# Closed-form constants of the entropy case.
LIMIT_RATE = math.pi / math.sqrt(6.0)          # decay rate of the limit curve
LAMBDA1_ENTROPY = math.sqrt(6.0) / math.pi     # unit-volume scale
V_MAX_ENTROPY = math.pi * math.sqrt(2.0 / 3.0)  # maximal weighted length


def limit_curve(x) -> np.ndarray:
    """The limit shape y(x) = -(1/c) * log(1 - exp(-c x)), c = pi/sqrt(6).

    Uniformly random Young diagrams of area N, scaled by 1/sqrt(N),
    concentrate around this curve; it encloses unit area.
    """
    x = np.asarray(x, dtype=float)
    u = np.exp(-LIMIT_RATE * x)
    return -np.log1p(-u) / LIMIT_RATE


def limit_curve_polyline(x_lo: float = 0.02, x_hi: float = 8.0,
                         count: int = 8192) -> MonotoneCurve:
    """Geometric-grid polyline sampling of the limit curve."""
    xs = np.geomspace(x_lo, x_hi, count)
    return MonotoneCurve(np.column_stack([xs, limit_curve(xs)]))


# -- envelope ------------------------------------------------------------------


def envelope_point(eta: DirectionWeight, theta: float, lam: float
                   ) -> tuple[float, float]:
    """Point of the constructed curve touched by the support line at theta.

    (x, y) = lam * (w cos t - w' sin t, w sin t + w' cos t); requires a
    differentiable weight at an interior angle.
    """
    if not 0.0 < theta < HALF_PI:
        raise DomainError("envelope angle must be interior to (0, pi/2)")
    w = float(eta.value(theta))
    wp = eta.derivative(theta)
    c, s = math.cos(theta), math.sin(theta)
    return (lam * (w * c - wp * s), lam * (w * s + wp * c))


def _envelope_arrays(eta: DirectionWeight, n1: np.ndarray, n2: np.ndarray,
                     lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized envelope from stable unit components."""
    w = np.asarray(eta.value_components(n1, n2), dtype=float)
    wp = np.asarray(eta.derivative_components(n1, n2), dtype=float)
    return lam * (w * n1 - wp * n2), lam * (w * n2 + wp * n1)


def _interior_domain(eta: DirectionWeight, margin: float) -> tuple[float, float]:
    lo, hi = eta.domain()
    lo = max(lo, 0.0) + (0.0 if lo > 0.0 else margin)
    hi = min(hi, HALF_PI) - (0.0 if hi < HALF_PI else margin)
    if eta.kind == "tabulated":
        lo, hi = eta.domain()
        lo += 2e-6
        hi -= 2e-6
    return lo, hi


def _components(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.cos(theta), np.sin(theta)


def _theta_where_x(eta: DirectionWeight, lam: float, x_target: float,
                   lo: float, hi: float) -> float:
    """Bisect for x(theta) = x_target; x is increasing along the envelope."""
    f = lambda t: _envelope_arrays(eta, *_components(np.asarray([t])), lam)[0][0]
    a, b = lo, hi
    fa, fb = f(a) - x_target, f(b) - x_target
    if fa > 0:
        return a
    if fb < 0:
        return b
    for _ in range(200):
        mid = 0.5 * (a + b)
        if f(mid) - x_target <= 0:
            a = mid
        else:
            b = mid
        if b - a < 1e-15 * max(1.0, b):
            break
    return 0.5 * (a + b)


def _theta_where_y(eta: DirectionWeight, lam: float, y_target: float,
                   lo: float, hi: float) -> float:
    """Bisect for y(theta) = y_target; y is decreasing along the envelope."""
    f = lambda t: _envelope_arrays(eta, *_components(np.asarray([t])), lam)[1][0]
    a, b = lo, hi
    if f(a) - y_target < 0:
        return a
    if f(b) - y_target > 0:
        return b
    for _ in range(200):
        mid = 0.5 * (a + b)
        if f(mid) - y_target >= 0:
            a = mid
        else:
            b = mid
        if b - a < 1e-15 * max(1.0, b):
            break
    return 0.5 * (a + b)


def _log_symmetric_grid(lo: float, hi: float, samples: int) -> np.ndarray:
    """Angle grid refined geometrically toward both ends of (lo, hi)."""
    pivot = min(max(HALF_PI / 2.0, lo), hi)
    low = np.geomspace(lo, pivot, samples // 2) if pivot > lo else np.asarray([lo])
    high = HALF_PI - np.geomspace(HALF_PI - hi, HALF_PI - pivot,
                                  samples // 2)[::-1] if pivot < hi else np.asarray([hi])
    return np.unique(np.concatenate([low, high]))


def windowed_volume(eta: DirectionWeight, lam: float, window: float,
                    samples: int = 4096) -> float:
    """Volume under the exact (envelope) curve inside the [0, window]^2 box.

    Where the weight's angular domain ends before the box does, the body
    boundary continues along the terminal support line; the closures below
    account for those straight pieces (they matter for tabulated weights,
    whose admissible normals stop short of the axes).
    """
    lo, hi = _interior_domain(eta, 1e-15)
    t_top = _theta_where_y(eta, lam, window, lo, hi)
    t_right = _theta_where_x(eta, lam, window, lo, hi)
    if t_right <= t_top:
        return window * window  # box entirely under the curve
    grid = _log_symmetric_grid(lo, hi, samples)
    ts = grid[(grid > t_top) & (grid < t_right)]
    ts = np.concatenate([[t_top], ts, [t_right]])
    xs, ys = _envelope_arrays(eta, *_components(ts), lam)
    xs = np.maximum.accumulate(xs)
    ys = np.minimum(np.clip(ys, 0.0, None), window)
    vol = float(np.trapezoid(ys, xs))

    x_e, y_e = float(xs[0]), float(ys[0])
    if t_top > lo * (1.0 + 1e-12) + 1e-300:
        vol += x_e * window  # curve crosses the box top; full strip below
    else:
        # curve ends at the domain edge: continue along the support line
        n1, n2 = math.cos(lo), math.sin(lo)
        h = lam * float(eta.value(lo))
        y_icept = h / n2 if n2 > 0 else math.inf
        if y_icept <= window:
            vol += 0.5 * x_e * (y_icept + y_e)
        else:
            x_w = max((h - window * n2) / n1, 0.0)
            vol += x_w * window + 0.5 * (x_e - x_w) * (window + y_e)
    x_e, y_e = float(xs[-1]), float(ys[-1])
    if t_right >= hi * (1.0 - 1e-12):
        n1, n2 = math.cos(hi), math.sin(hi)
        h = lam * float(eta.value(hi))
        x_icept = h / n1 if n1 > 0 else math.inf
        if x_icept <= window:
            vol += 0.5 * (x_icept - x_e) * y_e
        else:
            y_w = max((h - window * n1) / n2, 0.0)
            vol += 0.5 * (window - x_e) * (y_e + y_w)
    return vol


# -- divergence ----------------------------------------------------------------


@dataclass
class DivergenceVerdict:
    """Windowed-volume diagnostics for the finite/divergent dichotomy."""

    verdict: str                      # "finite" | "divergent"
    window_volumes: list[float]
    increments: list[float]
    ratios: list[float]
    extrapolated_volume: float | None

    @property
    def is_divergent(self) -> bool:
        return self.verdict == "divergent"

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "window_volumes": list(self.window_volumes),
            "increments": list(self.increments),
            "ratios": list(self.ratios),
            "extrapolated_volume": self.extrapolated_volume,
        }


def detect_divergence(eta: DirectionWeight, max_doublings: int = 24
                      ) -> DivergenceVerdict:
    """Integrate the lambda = 1 curve over windows [0, 2^k] and classify.

    Finite verdict: the window increments settle into a summable geometric
    pattern (ratio <= 0.9) or vanish outright.  Divergent: increments fail
    to decay through the final window.  The diagnostic carries the whole
    window-volume sequence and a geometric tail extrapolation.
    """
    require_valid(eta, MAXIMIZING)
    volumes = [windowed_volume(eta, 1.0, float(2 ** k))
               for k in range(max_doublings + 1)]
    increments = [volumes[k + 1] - volumes[k] for k in range(max_doublings)]
    ratios: list[float] = []
    for prev, cur in zip(increments, increments[1:]):
        if prev <= 1e-300:
            ratios.append(0.0)
        else:
            ratios.append(max(cur, 0.0) / prev)
    peak = max(max(increments), 1e-300)
    tail = ratios[-3:]
    vanished = increments[-1] <= 1e-7 * peak
    finite = vanished or (bool(tail) and max(tail) <= 0.9)
    extrapolated = None
    if finite:
        r = tail[-1] if tail else 0.0
        extrapolated = volumes[-1]
        if 0.0 < r < 1.0:
            extrapolated += increments[-1] * r / (1.0 - r)
    return DivergenceVerdict("finite" if finite else "divergent",
                             volumes, increments, ratios, extrapolated)


# -- body construction -----------------------------------------------------------


def _extract_curve(poly_vertices: np.ndarray, window: float) -> np.ndarray:
    """Boundary piece of the clipped body that is not box boundary."""
    n = len(poly_vertices)
    if n < 3:
        raise WindowTooSmallError("clipped body is empty")
    eps = 1e-9 * max(1.0, window)

    def on_side(p, q) -> bool:
        for coord, val in ((0, 0.0), (0, window), (1, 0.0), (1, window)):
            if abs(p[coord] - val) <= eps and abs(q[coord] - val) <= eps:
                return True
        return False

    keep = np.zeros(n, dtype=bool)
    for i in range(n):
        j = (i + 1) % n
        if not on_side(poly_vertices[i], poly_vertices[j]):
            keep[i] = keep[j] = True
    pts = poly_vertices[keep]
    if len(pts) < 2:
        raise WindowTooSmallError("no curve piece inside the window")
    order = np.lexsort((-pts[:, 1], pts[:, 0]))
    pts = pts[order]
    # enforce weak monotonicity against rounding noise
    pts[:, 1] = np.minimum.accumulate(pts[:, 1])
    keep_idx = [0]
    for i in range(1, len(pts)):
        if (pts[i, 0] - pts[keep_idx[-1], 0] > 1e-15 * max(1.0, window)
                or pts[keep_idx[-1], 1] - pts[i, 1] > 1e-15):
            keep_idx.append(i)
    return np.clip(pts[keep_idx], 0.0, None)


_TAIL_FIT_POINTS = 8
_TAIL_CUT_REL = 1e-4


def _fit_tail_window(xs: np.ndarray, ys: np.ndarray,
                     cut_rel: float | None) -> tuple[int, TailFit | None]:
    """Decay fit near the high-x end of a decreasing graph.

    Returns (cut_index, fit).  With ``cut_rel`` set, the fit window ends
    where y drops below cut_rel * max(y); on the discrete bodies this is
    where support-line contacts are still dense, and the polyline beyond
    the cut is handed over to the analytic tail.  The model (exponential
    versus power) is chosen by least-squares residual in the respective
    log coordinates, and the tail is anchored at the cut point so volume
    and functional stay continuous across the junction.
    """
    n = len(xs)
    cut = n - 1
    while cut > 0 and ys[cut] <= 0:
        cut -= 1
    if cut_rel is not None:
        floor = float(ys.max()) * cut_rel
        dense = np.nonzero(ys >= floor)[0]
        if len(dense):
            cut = min(cut, int(dense[-1]))
    first = max(0, cut - _TAIL_FIT_POINTS + 1)
    sel = slice(first, cut + 1)
    fx, fy = xs[sel], ys[sel]
    good = fy > 0
    fx, fy = fx[good], fy[good]
    if len(fx) < 3 or fx[-1] <= fx[0]:
        return cut, None
    ly = np.log(fy)
    exp_coeffs = np.polyfit(fx, ly, 1)
    slope = float(exp_coeffs[0])
    res_exp = float(np.sqrt(np.mean((np.polyval(exp_coeffs, fx) - ly) ** 2)))
    res_pow = math.inf
    p_slope = 0.0
    if np.all(fx > 0):
        lx = np.log(fx)
        if lx[-1] > lx[0]:
            coeffs = np.polyfit(lx, ly, 1)
            p_slope = float(coeffs[0])
            res_pow = float(np.sqrt(np.mean((np.polyval(coeffs, lx) - ly) ** 2)))
    x_cut, y_cut = float(xs[cut]), float(ys[cut])
    if y_cut <= 0:
        return cut, None
    if slope < 0 and res_exp <= max(res_pow, 1e-12):
        rate = -slope
        log_a = math.log(y_cut) + rate * x_cut
        if math.isfinite(log_a) and log_a < 700.0:
            return cut, TailFit("exp", math.exp(log_a), rate, x_cut)
        return cut, None
    if p_slope < 0 and x_cut > 0:
        rate = -p_slope
        log_a = math.log(y_cut) + rate * math.log(x_cut)
        if math.isfinite(log_a) and abs(log_a) < 700.0:
            return cut, TailFit("power", math.exp(log_a), rate, x_cut)
    return cut, None


def _attach_tails(pts: np.ndarray, cut_rel: float | None = _TAIL_CUT_REL
                  ) -> tuple[np.ndarray, TailFit | None, TailFit | None]:
    """Fit decay tails on both ends, truncating the polyline at the cuts."""
    cut_r, right = _fit_tail_window(pts[:, 0], pts[:, 1], cut_rel)
    if right is None:
        cut_r = len(pts) - 1
    flipped = pts[::-1]
    cut_l_t, left = _fit_tail_window(flipped[:, 1], flipped[:, 0], cut_rel)
    start = len(pts) - 1 - cut_l_t if left is not None else 0
    if start >= cut_r:  # degenerate window; keep the full polyline
        return pts, left, right
    return pts[start:cut_r + 1], left, right


def _rate_from_contacts(xs: np.ndarray, ys: np.ndarray, x_hi: float
                        ) -> tuple[str, float] | None:
    """Decay model fitted on exact curve points with abscissa <= x_hi."""
    mask = (ys > 0) & (xs <= x_hi)
    fx, fy = xs[mask][-_TAIL_FIT_POINTS:], ys[mask][-_TAIL_FIT_POINTS:]
    if len(fx) < 3 or fx[-1] <= fx[0]:
        return None
    ly = np.log(fy)
    exp_coeffs = np.polyfit(fx, ly, 1)
    res_exp = float(np.sqrt(np.mean((np.polyval(exp_coeffs, fx) - ly) ** 2)))
    res_pow = math.inf
    pow_slope = 0.0
    if np.all(fx > 0):
        lx = np.log(fx)
        if lx[-1] > lx[0]:
            pow_coeffs = np.polyfit(lx, ly, 1)
            pow_slope = float(pow_coeffs[0])
            res_pow = float(np.sqrt(np.mean((np.polyval(pow_coeffs, lx) - ly) ** 2)))
    if exp_coeffs[0] < 0 and res_exp <= max(res_pow, 1e-12):
        return ("exp", -float(exp_coeffs[0]))
    if pow_slope < 0:
        return ("power", -pow_slope)
    return None


def _attach_tails_from_contacts(pts: np.ndarray, cx: np.ndarray, cy: np.ndarray
                                ) -> tuple[np.ndarray, TailFit | None, TailFit | None]:
    """Tails with decay rates fitted on support-line contact points.

    Contacts lie exactly on the ideal curve, so the fitted rates avoid the
    sagitta bias of intersection vertices; the tails stay anchored at the
    truncated polyline's endpoints for continuity.
    """
    xs, ys = pts[:, 0], pts[:, 1]
    y_floor = float(ys.max()) * _TAIL_CUT_REL
    x_floor = float(xs.max()) * _TAIL_CUT_REL

    right = None
    cut_r = len(pts) - 1
    dense = np.nonzero(ys >= y_floor)[0]
    if len(dense):
        cut_r = int(dense[-1])
    model = _rate_from_contacts(cx, cy, float(xs[cut_r]) * (1.0 + 1e-12))
    x_cut, y_cut = float(xs[cut_r]), float(ys[cut_r])
    if model is not None and y_cut > 0:
        kind, rate = model
        log_a = (math.log(y_cut) + rate * x_cut if kind == "exp"
                 else math.log(y_cut) + rate * math.log(max(x_cut, 1e-300)))
        if math.isfinite(log_a) and abs(log_a) < 700.0 and (kind == "exp" or x_cut > 0):
            right = TailFit(kind, math.exp(log_a), rate, x_cut)
    if right is None:
        cut_r = len(pts) - 1

    left = None
    start = 0
    dense = np.nonzero(xs >= x_floor)[0]
    if len(dense):
        start = int(dense[0])
    model = _rate_from_contacts(cy[::-1], cx[::-1], float(ys[start]) * (1.0 + 1e-12))
    x_cut, y_cut = float(xs[start]), float(ys[start])
    if model is not None and x_cut > 0:
        kind, rate = model
        log_a = (math.log(x_cut) + rate * y_cut if kind == "exp"
                 else math.log(x_cut) + rate * math.log(max(y_cut, 1e-300)))
        if math.isfinite(log_a) and abs(log_a) < 700.0 and (kind == "exp" or y_cut > 0):
            left = TailFit(kind, math.exp(log_a), rate, y_cut)
    if left is None:
        start = 0
    if start >= cut_r:
        return pts, None, None
    return pts[start:cut_r + 1], left, right


def max_body(eta: DirectionWeight, lam: float, m: int = DEFAULT_RESOLUTION,
             window: float | None = None) -> MonotoneCurve:
    """Construct the maximizing curve at scale lambda.

    Midpoint normals theta_k = (k + 1/2) * (pi/2) / m avoid the boundary
    where the weight vanishes and the half planes degenerate.  The reversed
    half planes are intersected inside the [0, window]^2 box (the default
    window is 16 * lambda * max weight, doubled on failure) and the
    non-box boundary piece is extracted as a graph with decay-fitted tails.
    """
    if m < MIN_RESOLUTION:
        raise DomainError(f"resolution {m} below the minimum {MIN_RESOLUTION}")
    if lam <= 0:
        raise DomainError("lambda must be positive")
    require_valid(eta, MAXIMIZING)
    thetas = (np.arange(m) + 0.5) * HALF_PI / m
    lo, hi = eta.domain()
    if eta.kind == "tabulated":
        thetas = thetas[(thetas >= lo) & (thetas <= hi)]
        if len(thetas) < MIN_RESOLUTION:
            raise DomainError("tabulated grid too narrow for this resolution")
    offsets = lam * np.asarray(eta.value(thetas), dtype=float)
    planes = [HalfPlane(float(t), float(o), "ge")
              for t, o in zip(thetas, offsets)]
    auto = window is None
    w = float(window) if window is not None else (
        WINDOW_FACTOR * lam * max(eta.max_value(), 1e-12))
    attempts = 8 if auto else 1
    last_exc: Exception | None = None
    for _ in range(attempts):
        poly = intersect_halfplanes(planes, (0.0, 0.0, w, w))
        try:
            pts = _extract_curve(poly.vertices, w)
        except WindowTooSmallError as exc:
            last_exc = exc
            w *= 2.0
            continue
        try:
            margin = 2.0 * 1e-6 if eta.kind == "tabulated" else 0.0
            usable = (thetas >= lo + margin) & (thetas <= hi - margin) \
                if eta.kind == "tabulated" else np.ones(len(thetas), bool)
            cx, cy = _envelope_arrays(eta, np.cos(thetas[usable]),
                                      np.sin(thetas[usable]), lam)
            pts, left, right = _attach_tails_from_contacts(pts, cx, cy)
        except DomainError:
            pts, left, right = _attach_tails(pts)
        return MonotoneCurve(pts, left, right, validate=False)
    raise WindowTooSmallError(
        f"no curve inside window {w:g}: {last_exc}")


@dataclass(frozen=True)
class MaxShapeResult:
    """Construction output bundle for the maximizing problem."""

    curve: MonotoneCurve
    lam: float
    volume: float
    functional_value: float
    resolution: int

    def to_json_dict(self) -> dict:
        curve_json = self.curve.to_json_dict()
        return {
            "lambda": self.lam,
            "volume": self.volume,
            "functional_value": self.functional_value,
            "resolution": self.resolution,
            "curve": {"kind": curve_json["kind"], "points": curve_json["points"]},
            "tail": curve_json["tail"],
        }


def build_result(eta: DirectionWeight, lam: float, m: int,
                 window: float | None = None) -> MaxShapeResult:
    curve = max_body(eta, lam, m, window)
    return MaxShapeResult(curve, lam, curve_volume(curve),
                          functional_on_curve(eta, curve), m)


def normalize_lambda_max(eta: DirectionWeight, target_volume: float = 1.0,
                         m: int = DEFAULT_RESOLUTION
                         ) -> tuple[float, MaxShapeResult]:
    """Scale lambda so the enclosed volume hits the target.

    Volume scales exactly as lambda^2, so one rescale from the lambda = 1
    body lands on target; the result is re-integrated as a cross-check.
    Divergent weights raise DivergenceError carrying the verdict.
    """
    if target_volume <= 0:
        raise DomainError("target volume must be positive")
    verdict = detect_divergence(eta)
    if verdict.is_divergent:
        raise DivergenceError(
            f"{eta.label} has divergent volumes; no normalization exists",
            verdict=verdict,
        )
    base = build_result(eta, 1.0, m)
    if not math.isfinite(base.volume) or base.volume <= 0:
        raise DivergenceError(
            f"{eta.label}: volume at lambda = 1 is {base.volume!r}",
            verdict=verdict,
        )
    lam = math.sqrt(target_volume / base.volume)
    result = build_result(eta, lam, m)
    if abs(result.volume - target_volume) > 1e-6 * target_volume:
        lam *= math.sqrt(target_volume / result.volume)
        result = build_result(eta, lam, m)
        if abs(result.volume - target_volume) > 1e-6 * target_volume:
            raise ConstructionError(
                f"volume normalization did not converge: {result.volume!r}")
    return lam, result


# -- verification ----------------------------------------------------------------


@dataclass
class CorollaryReport:
    """Comparison of the constructed entropy maximizer to the limit curve."""

    sup_distance: float
    lambda1: float
    volume: float
    v_eta: float
    resolution: int
    window: tuple[float, float]

    def to_json_dict(self) -> dict:
        return {
            "sup_distance": self.sup_distance,
            "lambda1": self.lambda1,
            "volume": self.volume,
            "v_eta": self.v_eta,
            "resolution": self.resolution,
            "window": list(self.window),
        }


def verify_corollary(m: int = DEFAULT_RESOLUTION,
                     window: tuple[float, float] = (0.05, 5.0)
                     ) -> CorollaryReport:
    """Build the entropy maximizer and compare it to the limit curve."""
    lam1, result = normalize_lambda_max(entropy(), 1.0, m)
    reference = limit_curve_polyline(min(0.4 * window[0], 0.02),
                                     2.0 * window[1])
    dist = sup_distance(result.curve, reference, window)
    return CorollaryReport(dist, lam1, result.volume,
                           result.functional_value, m, window)


@dataclass
class TriangleReport:
    """Fan-area versus weighted-length identity over an arc."""

    lhs: float                 # fan area of the discrete arc
    rhs: float                 # (lambda/2) * reference weighted length
    deviation: float           # |lhs - rhs| / rhs
    rhs_discrete: float        # (lambda/2) * weighted length of the same arc
    discrete_deviation: float  # |lhs - rhs_discrete| / rhs_discrete

    def to_json_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "deviation": self.deviation,
                "rhs_discrete": self.rhs_discrete,
                "discrete_deviation": self.discrete_deviation}


def _reference_arc(eta: DirectionWeight, lam: float, x_lo: float, x_hi: float,
                   samples: int = 1 << 17) -> MonotoneCurve:
    """Dense envelope polyline of the exact curve over [x_lo, x_hi]."""
    lo, hi = _interior_domain(eta, 1e-13)
    t_a = _theta_where_x(eta, lam, x_lo, lo, hi)
    t_b = _theta_where_x(eta, lam, x_hi, lo, hi)
    ts = np.linspace(t_a, t_b, samples)
    xs, ys = _envelope_arrays(eta, *_components(ts), lam)
    xs = np.maximum.accumulate(xs)
    ys = np.minimum.accumulate(ys)
    keep = np.concatenate([[True], np.diff(xs) > 0])
    return MonotoneCurve(np.column_stack([xs[keep], ys[keep]]), validate=False)


def triangle_identity_check(eta: DirectionWeight, lam: float,
                            arc: tuple[float, float],
                            m: int = DEFAULT_RESOLUTION,
                            curve: MonotoneCurve | None = None
                            ) -> TriangleReport:
    """Check fan area = (lambda/2) * weighted length on an arc.

    ``lhs`` is the fan area of the resolution-m arc.  ``rhs`` evaluates the
    weighted length on a dense envelope sampling of the exact curve, so the
    reported deviation measures the O(m^-2) discretization error.  The same
    identity evaluated on the discrete arc itself (``rhs_discrete``) holds
    to rounding because every discrete segment lies on a support line.
    """
    x_lo, x_hi = float(arc[0]), float(arc[1])
    if curve is None:
        curve = max_body(eta, lam, m)
    if x_lo < curve.points[0, 0] - 1e-9 or x_hi > curve.points[-1, 0] + 1e-9:
        raise DomainError("arc range is not on the constructed curve")
    piece = slice_curve(curve, x_lo, x_hi)
    lhs = curve_fan_area(piece, include_tails=False)
    rhs_discrete = 0.5 * lam * functional_on_curve(eta, piece,
                                                   include_tails=False)
    ref = _reference_arc(eta, lam, x_lo, x_hi)
    rhs = 0.5 * lam * functional_on_curve(eta, ref, include_tails=False)
    return TriangleReport(
        lhs, rhs, abs(lhs - rhs) / abs(rhs),
        rhs_discrete, abs(lhs - rhs_discrete) / abs(rhs_discrete),
    )


# -- divergence witness -----------------------------------------------------------


@dataclass
class WitnessResult:
    """Unit-volume truncated curve certifying an infinite supremum."""

    curve: MonotoneCurve
    value: float               # weighted length of the arc part
    bound: float               # 2 / (3 gamma)
    volume: float
    gamma: float
    log_box_size: float
    box_size: float            # inf when the box exceeds float range

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "bound": self.bound,
            "volume": self.volume,
            "gamma": self.gamma,
            "log_box_size": self.log_box_size,
            "box_size": self.box_size,
            "curve": self.curve.to_json_dict(),
        }


def _witness_core(eta: DirectionWeight, gamma: float, half_units: float,
                  samples: int = 1 << 16) -> np.ndarray:
    """Envelope polyline covering x in gamma * e^[-half_units, half_units].

    Sampled with axis-offset angle parametrization so components stay
    accurate arbitrarily close to both boundary normals.
    """
    lo, hi = _interior_domain(eta, 1e-300)

    def x_of_logphi(lp: np.ndarray, near_high: bool) -> np.ndarray:
        phi = np.exp(lp)
        if near_high:
            n1, n2 = np.sin(phi), np.cos(phi)
        else:
            n1, n2 = np.cos(phi), np.sin(phi)
        return _envelope_arrays(eta, n1, n2, gamma)[0]

    # bisect log-phi at both ends to cover the requested x-range
    def solve(target_logx: float, near_high: bool) -> float:
        a, b = math.log(1e-300), math.log(HALF_PI / 2.0)
        for _ in range(200):
            mid = 0.5 * (a + b)
            x = float(x_of_logphi(np.asarray([mid]), near_high)[0])
            lx = math.log(x) if x > 0 else -math.inf
            ascending = not near_high
            if (lx < target_logx) == ascending:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    lg = math.log(gamma)
    lp_lo = solve(lg - half_units, near_high=False)
    lp_hi = solve(lg + half_units, near_high=True)
    half = samples // 2
    lphis_low = np.linspace(lp_lo, math.log(HALF_PI / 2.0), half)
    # second branch: theta = pi/2 - phi, so ascending x means descending phi
    lphis_high = np.linspace(math.log(HALF_PI / 2.0), lp_hi, half)
    x1, y1 = _envelope_arrays(eta, np.cos(np.exp(lphis_low)),
                              np.sin(np.exp(lphis_low)), gamma)
    x2, y2 = _envelope_arrays(eta, np.sin(np.exp(lphis_high)),
                              np.cos(np.exp(lphis_high)), gamma)
    xs = np.concatenate([x1, x2[1:]])
    ys = np.concatenate([y1, y2[1:]])
    xs = np.maximum.accumulate(xs)
    ys = np.minimum.accumulate(ys)
    keep = np.concatenate([[True], (np.diff(xs) > 0) & (np.diff(ys) < 0)])
    return np.column_stack([xs[keep], ys[keep]])


def divergence_witness(eta: DirectionWeight, gamma: float) -> WitnessResult:
    """Truncate the lambda = gamma curve to a unit-volume box.

    The box size N solves vol(region under the curve inside [0, N]^2) = 1;
    the curve is closed to the axes by one horizontal and one vertical
    segment which carry zero weight.  The weighted length of the arc part
    exceeds 2/(3*gamma).  For harmonic tails N grows like e^(1/(2 gamma^2))
    and leaves float range, so the cap is carried in logs and the polyline
    covers the representable core while analytic tails carry the rest.
    """
    if not 0.0 < gamma <= 1.0:
        raise DomainError("gamma must lie in (0, 1]")
    verdict = detect_divergence(eta)
    if not verdict.is_divergent:
        raise DomainError(
            f"{eta.label} has finite volumes; no divergence witness exists")

    core = _witness_core(eta, gamma, half_units=300.0, samples=1 << 17)
    core, left, right = _attach_tails(core, cut_rel=None)
    if left is None or right is None:
        raise ConstructionError("could not fit decay tails to the core curve")
    xs, ys = core[:, 0], core[:, 1]
    core_vol = curve_volume(MonotoneCurve(core, validate=False),
                            include_tails=False)
    log_core_end = math.log(xs[-1])

    def boxed_polyline(n_box: float) -> np.ndarray:
        """Core truncated to the box, with interpolated crossing points."""
        j = int(np.searchsorted(-ys, -n_box))          # first y < n_box
        k = int(np.searchsorted(xs, n_box))            # first x > n_box
        x_top = float(np.interp(-n_box, -ys[max(j - 1, 0): j + 1],
                                xs[max(j - 1, 0): j + 1])) if j > 0 else xs[0]
        y_right = float(np.interp(n_box, xs[k - 1: k + 1],
                                  ys[k - 1: k + 1])) if k < len(xs) else ys[-1]
        mid = core[j:k]
        return np.vstack([[x_top, n_box], mid, [n_box, y_right]])

    def vol_at(log_n: float) -> float:
        if log_n <= log_core_end:
            arc = boxed_polyline(math.exp(log_n))
            n_box = math.exp(log_n)
            return arc[0, 0] * n_box + float(np.trapezoid(arc[:, 1], arc[:, 0]))
        lt = TailFit(left.kind, left.coef, left.rate, left.start, log_n)
        rt = TailFit(right.kind, right.coef, right.rate, right.start, log_n)
        return core_vol + lt.integral() + rt.integral()

    a = math.log(max(xs[0], 1e-300))
    b = 40000.0
    if vol_at(b) < 1.0:
        raise DomainError("windowed volumes saturate; weight is not divergent")
    for _ in range(500):
        mid = 0.5 * (a + b)
        if vol_at(mid) < 1.0:
            a = mid
        else:
            b = mid
    log_n = 0.5 * (a + b)
    bound = 2.0 / (3.0 * gamma)

    if log_n <= log_core_end:
        n_box = math.exp(log_n)
        arc = boxed_polyline(n_box)
        pts = np.vstack([[0.0, n_box], arc])
        witness = MonotoneCurve(pts, validate=False)
        volume = curve_volume(witness)
        arc_fan = curve_fan_area(MonotoneCurve(arc, validate=False))
    else:
        lt = TailFit(left.kind, left.coef, left.rate, left.start, log_n)
        rt = TailFit(right.kind, right.coef, right.rate, right.start, log_n)
        witness = MonotoneCurve(core, lt, rt, validate=False)
        volume = curve_volume(witness)
        arc_fan = curve_fan_area(witness)
    value = 2.0 * arc_fan / gamma
    if not value > bound:
        raise ConstructionError(
            f"witness value {value:g} does not exceed the bound {bound:g}")
    if abs(volume - 1.0) > 1e-6:
        raise ConstructionError(f"witness volume {volume!r} missed 1")
    box = math.exp(log_n) if log_n < 700 else math.inf
    return WitnessResult(witness, value, bound, volume, gamma, log_n, box)


# -- maximality harness ------------------------------------------------------------


@dataclass
class MaxHarnessReport:
    """Outcome of the maximality stress test."""

    trials: int
    reference_value: float
    worst_excess: float
    tolerance: float
    passed: bool
    failures: list[int]
    seed: int
    far_trial_best: float      # best value among far-away perturbations
    far_trials: int

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "reference_value": self.reference_value,
            "worst_excess": self.worst_excess,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "failures": list(self.failures),
            "seed": self.seed,
            "far_trial_best": self.far_trial_best,
            "far_trials": self.far_trials,
        }


def max_discretization_tolerance(m: int) -> float:
    return 10.0 * (math.pi / m) ** 2 + 1e-9


def _smooth_bump(xs: np.ndarray, center: float, width: float) -> np.ndarray:
    u = (xs - center) / width
    out = np.zeros_like(xs)
    mask = np.abs(u) < 1.0
    out[mask] = np.exp(1.0 - 1.0 / (1.0 - u[mask] ** 2))
    return out


def maximality_harness(eta: DirectionWeight, trials: int = 1000, seed: int = 0,
                       m: int = DEFAULT_RESOLUTION) -> MaxHarnessReport:
    """Stress the maximality of the constructed curve.

    Perturbations act on the polyline interior (the analytic tails ride
    along and rescale exactly): (a) area exchange between two x-intervals
    by opposite vertical shifts, (b) smooth multiplicative bumps; both are
    projected back to monotonicity and rescaled homothetically to unit
    volume before the weighted length is compared to the maximizer's.
    """
    _, ref = normalize_lambda_max(eta, 1.0, m)
    base = ref.curve
    xs = base.points[:, 0]
    ys = base.points[:, 1]
    v_poly = functional_on_curve(eta, base, include_tails=False)
    vol_poly = curve_volume(base, include_tails=False)
    v_tail = ref.functional_value - v_poly
    vol_tail = ref.volume - vol_poly
    v_ref = ref.functional_value
    span = xs[-1] - xs[0]
    # Perturbations must leave both end regions untouched: the analytic
    # tails are reattached as-is, which is only consistent when the
    # polyline still meets them.  The monotone projection propagates dips
    # rightward, so the bulk zone additionally keeps clear of the right
    # margin and vertical shifts stay below the local curve height.
    x_lo_in = xs[0] + 0.05 * span
    x_hi_in = xs[-1] - 0.15 * span
    y_mid_floor = 0.02 * float(ys.max())
    x_bulk_hi = float(np.interp(-y_mid_floor, -ys, xs))
    tol = max_discretization_tolerance(m)
    worst = -math.inf
    failures: list[int] = []
    far_best = -math.inf
    far_trials = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        y_new = ys.copy()
        mode = trial % 3
        if mode == 0 and trial > 0:
            # opposite vertical shifts on two bulk windows (area exchange)
            for sign in (+1.0, -1.0):
                wdt = rng.uniform(0.05, 0.2) * span
                c = rng.uniform(x_lo_in + wdt, max(x_bulk_hi - wdt,
                                                   x_lo_in + wdt))
                bump = _smooth_bump(xs, c, wdt)
                local = ys[bump > 0]
                amp = sign * rng.uniform(0.0, 0.2) * float(local.min())
                y_new = y_new + amp * bump
        elif mode == 1 and trial > 0:
            # smooth multiplicative bump, log-bounded so y stays positive
            wdt = rng.uniform(0.05, 0.25) * span
            c = rng.uniform(x_lo_in + wdt, max(x_hi_in - wdt, x_lo_in + wdt))
            eps_amp = rng.uniform(-0.25, 0.25)
            y_new = y_new * np.exp(eps_amp * _smooth_bump(xs, c, wdt))
        elif trial > 0:
            # staircase-style redistribution: quantize a bulk stretch
            wdt = rng.uniform(0.1, 0.3) * span
            c = rng.uniform(x_lo_in + wdt, max(x_bulk_hi - wdt,
                                               x_lo_in + wdt))
            mask = np.abs(xs - c) < wdt
            if mask.any():
                step = rng.uniform(0.05, 0.3) * float(ys[mask].min())
                if step > 0:
                    y_new[mask] = np.ceil(y_new[mask] / step) * step
        y_new = np.minimum.accumulate(np.clip(y_new, 0.0, None))
        cand = np.column_stack([xs, y_new])
        seg = np.diff(cand, axis=0)
        good = (np.abs(seg[:, 0]) > 1e-15) | (np.abs(seg[:, 1]) > 1e-15)
        cand = cand[np.concatenate([[True], good])]
        cand_curve = MonotoneCurve(cand, validate=False)
        vol = curve_volume(cand_curve, include_tails=False) + vol_tail
        if vol <= 0:
            continue
        s = math.sqrt(1.0 / vol)
        value = s * (functional_on_curve(eta, cand_curve, include_tails=False)
                     + v_tail)
        excess = value - v_ref
        if excess > worst:
            worst = excess
        if excess > tol:
            failures.append(trial)
        # uniqueness surrogate: far perturbations must stay well below
        scaled_y = np.interp(xs, s * cand[:, 0], s * cand[:, 1])
        dist = float(np.max(np.abs(scaled_y - ys)))
        if dist >= 0.05:
            far_trials += 1
            far_best = max(far_best, value)
    return MaxHarnessReport(trials, v_ref, worst, tol, not failures, failures,
                            seed, far_best, far_trials)
