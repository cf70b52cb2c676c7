"""Reflected-weight duality: the exact identity linking the two problems.

For a box corner (N, N) and a quarter-arc weight w, the reflected weight
T(n) = N (|n1| + |n2|) - w(|n1|, |n2|) is a valid full-circle weight, and
for every monotone curve H between fixed endpoints

    weighted_length_w(H) + weighted_length_T(H) = N * L1(P2 - P1),

because the two weights cancel segment-by-segment against the constant
N (n1 + n2).  The identity converts minimality of the reflected problem
into maximality of the original one, and makes the two orderings of any
competitor family coincide exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT_RESOLUTION, VALIDATION_SAMPLES
from .errors import BoxTooSmallError, DomainError
from .geometry import (
    MonotoneCurve,
    curve_eval,
    functional_on_curve,
    slice_curve,
)
from .maxshape import normalize_lambda_max
from .weights import MAXIMIZING, MINIMIZING, DirectionWeight, require_valid


@dataclass(frozen=True)
class DualityInstance:
    """Quarter-arc weight with a reflection box and monotone endpoints."""

    eta: DirectionWeight
    box_size: float
    p1: tuple[float, float]
    p2: tuple[float, float]

    def __post_init__(self):
        n = self.box_size
        for pt in (self.p1, self.p2):
            if not (0.0 < pt[0] < n and 0.0 < pt[1] < n):
                raise DomainError(f"endpoint {pt} is not strictly inside the box")
        if not (self.p1[0] < self.p2[0] and self.p1[1] > self.p2[1]):
            raise DomainError("endpoints must satisfy x1 < x2 and y1 > y2")

    @property
    def l1_gap(self) -> float:
        return (self.p2[0] - self.p1[0]) + (self.p1[1] - self.p2[1])


def t_n_weight(inst: DualityInstance) -> DirectionWeight:
    """Reflected full-circle weight N (|n1|+|n2|) - eta(|n1|, |n2|).

    Values are reflection-symmetric in both coordinates by construction,
    hence even.  Positivity over the sampled circle is required and fails
    when the box is too small relative to the weight.
    """
    require_valid(inst.eta, MAXIMIZING)
    w = DirectionWeight("reflected_dual", MINIMIZING, box_size=inst.box_size,
                        base=inst.eta,
                        label=f"dual[{inst.eta.label}, N={inst.box_size:g}]")
    thetas = (np.arange(VALIDATION_SAMPLES) + 0.5) * 2.0 * math.pi / VALIDATION_SAMPLES
    vals = np.asarray(w.value(thetas))
    if vals.min() <= 0.0:
        raise BoxTooSmallError(
            f"reflected weight not positive (min {vals.min():.3e}); "
            f"box {inst.box_size:g} too small for {inst.eta.label}")
    return w


def corner_energy(inst: DualityInstance, curve: MonotoneCurve) -> float:
    """Weighted length of a monotone curve under the reflected weight.

    Segment normals are reversed (pointing toward the box corner); the
    reflected weight is even, so this equals its plain weighted length.
    """
    return functional_on_curve(t_n_weight(inst), curve, include_tails=False)


@dataclass
class DualityReport:
    """Exactness statistics of the two-functional sum over a curve family."""

    constant: float
    box_size: float
    endpoints: tuple[tuple[float, float], tuple[float, float]]
    sums: list[float]
    max_relative_deviation: float
    trials: int
    disagreements: int
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "N": self.box_size,
            "endpoints": [list(self.endpoints[0]), list(self.endpoints[1])],
            "constant": self.constant,
            "max_relative_deviation": self.max_relative_deviation,
            "trials": self.trials,
            "disagreements": self.disagreements,
            "passed": self.passed,
        }


def _check_endpoints(inst: DualityInstance, curve: MonotoneCurve) -> None:
    pts = curve.points
    if (np.max(np.abs(pts[0] - np.asarray(inst.p1))) > 1e-9
            or np.max(np.abs(pts[-1] - np.asarray(inst.p2))) > 1e-9):
        raise DomainError("curve endpoints do not match the instance")


def duality_identity_check(inst: DualityInstance,
                           curves: list[MonotoneCurve]) -> DualityReport:
    """Verify that V + W is the same constant N * L1 on every curve."""
    dual = t_n_weight(inst)
    constant = inst.box_size * inst.l1_gap
    sums = []
    v_values = []
    w_values = []
    for curve in curves:
        _check_endpoints(inst, curve)
        v = functional_on_curve(inst.eta, curve, include_tails=False)
        wv = functional_on_curve(dual, curve, include_tails=False)
        v_values.append(v)
        w_values.append(wv)
        sums.append(v + wv)
    devs = [abs(s - constant) / constant for s in sums]
    disagreements = _ordering_disagreements(v_values, w_values)
    max_dev = max(devs) if devs else 0.0
    return DualityReport(constant, inst.box_size, (inst.p1, inst.p2),
                         sums, max_dev, len(curves), disagreements,
                         max_dev <= 1e-9 and disagreements == 0)


def _ordering_disagreements(v_values: list[float], w_values: list[float],
                            tol: float = 1e-9) -> int:
    """Count pairs ordered differently by V and by -W (tolerance-tied)."""
    bad = 0
    k = len(v_values)
    for i in range(k):
        for j in range(i + 1, k):
            dv = v_values[i] - v_values[j]
            dw = w_values[j] - w_values[i]
            scale = max(abs(v_values[i]), abs(v_values[j]), 1.0)
            if abs(dv) <= tol * scale or abs(dw) <= tol * scale:
                continue
            if (dv > 0) != (dw > 0):
                bad += 1
    return bad


# -- random monotone competitors -------------------------------------------------


def random_monotone_curves(p1: tuple[float, float], p2: tuple[float, float],
                           count: int, seed: int) -> list[MonotoneCurve]:
    """Random monotone staircases and polylines between fixed endpoints."""
    out: list[MonotoneCurve] = []
    dx = p2[0] - p1[0]
    dy = p1[1] - p2[1]
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        if i % 2 == 0:
            # lattice-style staircase: shuffled right/down unit steps
            steps = rng.integers(4, 24)
            moves = np.concatenate([np.zeros(steps), np.ones(steps)])
            rng.shuffle(moves)
            x, y = p1
            pts = [(x, y)]
            for mv in moves:
                if mv == 0:
                    x += dx / steps
                else:
                    y -= dy / steps
                pts.append((x, y))
        else:
            # sorted random abscissas paired with sorted-descending ordinates
            k = int(rng.integers(2, 30))
            xs = np.sort(rng.uniform(p1[0], p2[0], k))
            ys = np.sort(rng.uniform(p2[1], p1[1], k))[::-1]
            pts = [p1] + list(zip(xs, ys)) + [p2]
        arr = np.asarray(pts, dtype=float)
        keep = np.concatenate([[True],
                               (np.abs(np.diff(arr, axis=0)).max(axis=1) > 1e-12)])
        out.append(MonotoneCurve(arr[keep]))
    return out


def _area_under(curve: MonotoneCurve) -> float:
    pts = curve.points
    return float(np.trapezoid(pts[:, 1], pts[:, 0]))


def _blend_to_area(curve: MonotoneCurve, target: float,
                   p1: tuple[float, float], p2: tuple[float, float]
                   ) -> MonotoneCurve:
    """Convex-blend a curve with an extreme staircase to hit a target area.

    Blending two monotone functions with common endpoints stays monotone
    with the endpoints pinned, and the enclosed area is linear in the
    blend weight, so the matching weight solves exactly.  The extreme
    staircases are evaluated as step functions on the union grid so their
    vertical pieces cannot disturb the endpoint values.
    """
    xs = np.unique(np.concatenate([curve.points[:, 0],
                                   np.linspace(p1[0], p2[0], 257)]))
    y1 = curve_eval(curve, xs)
    # duplicated abscissas (vertical steps) make interp ambiguous at the
    # endpoints; pin them so the blend family shares the exact endpoints
    y1[0] = p1[1]
    y1[-1] = p2[1]
    area = float(np.trapezoid(y1, xs))
    if abs(area - target) < 1e-15:
        return curve
    if area < target:
        # largest-area monotone graph: stay at y1 until the far corner
        y2 = np.where(xs < p2[0], p1[1], p2[1])
    else:
        # smallest-area: drop immediately after the first corner
        y2 = np.where(xs > p1[0], p2[1], p1[1])
    area_ext = float(np.trapezoid(y2, xs))
    if abs(area_ext - area) < 1e-15:
        return curve
    t = (target - area) / (area_ext - area)
    t = min(max(t, 0.0), 1.0)
    blend = (1.0 - t) * y1 + t * y2
    pts = np.column_stack([xs, blend])
    keep = np.concatenate([[True],
                           (np.abs(np.diff(pts, axis=0)).max(axis=1) > 1e-12)])
    return MonotoneCurve(pts[keep])


@dataclass
class TransferReport:
    """Cross-check that the identity transfers optimality both ways."""

    arc_value: float
    arc_dual_value: float
    trials: int
    max_value_excess: float      # max over competitors of V - V(arc)
    max_dual_shortfall: float    # max over competitors of W(arc) - W
    disagreements: int
    chord_margin: float          # V(arc) - V(equal-area chord blend)
    tolerance: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "arc_value": self.arc_value,
            "arc_dual_value": self.arc_dual_value,
            "trials": self.trials,
            "max_value_excess": self.max_value_excess,
            "max_dual_shortfall": self.max_dual_shortfall,
            "disagreements": self.disagreements,
            "chord_margin": self.chord_margin,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def minimax_transfer_check(eta: DirectionWeight, trials: int = 500,
                           seed: int = 0, m: int = DEFAULT_RESOLUTION,
                           box_size: float = 10.0,
                           x_range: tuple[float, float] = (0.5, 1.5)
                           ) -> TransferReport:
    """Stress both sides of the identity on an arc of the maximizer.

    Competitors share the arc endpoints and are blended to the arc's
    enclosed area; the arc must then maximize the quarter-arc functional
    and minimize the reflected one simultaneously, and the two orderings
    of the whole family must agree pair-by-pair.
    """
    _, result = normalize_lambda_max(eta, 1.0, m)
    arc = slice_curve(result.curve, x_range[0], x_range[1])
    p1 = (float(arc.points[0, 0]), float(arc.points[0, 1]))
    p2 = (float(arc.points[-1, 0]), float(arc.points[-1, 1]))
    inst = DualityInstance(eta, box_size, p1, p2)
    dual = t_n_weight(inst)
    target = _area_under(arc)
    v_arc = functional_on_curve(eta, arc, include_tails=False)
    w_arc = functional_on_curve(dual, arc, include_tails=False)
    competitors = [
        _blend_to_area(c, target, p1, p2)
        for c in random_monotone_curves(p1, p2, trials, seed)
    ]
    v_vals = [functional_on_curve(eta, c, include_tails=False)
              for c in competitors]
    w_vals = [functional_on_curve(dual, c, include_tails=False)
              for c in competitors]
    tol = 10.0 * (math.pi / m) ** 2 + 1e-9
    max_excess = max((v - v_arc) for v in v_vals) if v_vals else 0.0
    max_shortfall = max((w_arc - w) for w in w_vals) if w_vals else 0.0
    disagreements = _ordering_disagreements([v_arc] + v_vals,
                                            [w_arc] + w_vals)
    chord = _blend_to_area(MonotoneCurve(np.asarray([p1, p2])), target, p1, p2)
    chord_margin = v_arc - functional_on_curve(eta, chord, include_tails=False)
    passed = (max_excess <= tol and max_shortfall <= tol
              and disagreements == 0 and chord_margin > tol)
    return TransferReport(v_arc, w_arc, trials, max_excess, max_shortfall,
                          disagreements, chord_margin, tol, passed)
