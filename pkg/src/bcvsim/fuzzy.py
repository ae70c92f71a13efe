"""Mamdani fuzzy lane-keeping controller.

Maps lateral deviation and its rate onto a corrective steering-wheel angle
through a 7-label max-min inference engine with centroid defuzzification.
Controllers and lookup tables are immutable after construction and safe for
concurrent reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Linguistic labels, totally ordered negative-big .. positive-big.
LABELS = ("NB", "NM", "NS", "ZO", "PS", "PM", "PB")

_LABEL_INDEX = {name: i for i, name in enumerate(LABELS)}

# Half width at half maximum of a unit gaussian: a gaussian whose sigma is
# delta / HWHM_FACTOR passes through 0.5 exactly delta/2 away from its center.
_HWHM_FACTOR = 2.0 * math.sqrt(2.0 * math.log(2.0))


def label_index(label: str) -> int:
    try:
        return _LABEL_INDEX[label]
    except KeyError:
        raise ValueError(f"unknown linguistic label {label!r}") from None


def negate_label(label: str) -> str:
    """NB<->PB, NM<->PM, NS<->PS, ZO->ZO."""
    return LABELS[6 - label_index(label)]


@dataclass(frozen=True)
class Triangle:
    """Triangular membership with feet at `left`/`right` and peak at `peak`."""

    left: float
    peak: float
    right: float

    def mu(self, x: float) -> float:
        if x <= self.left or x >= self.right:
            # The peak may coincide with a foot only for degenerate shapes,
            # which construction rejects; equality at a foot is membership 0.
            return 1.0 if x == self.peak else 0.0
        if x == self.peak:
            return 1.0
        if x < self.peak:
            return (x - self.left) / (self.peak - self.left)
        return (self.right - x) / (self.right - self.peak)


@dataclass(frozen=True)
class Gaussian:
    """Gaussian membership; each flank may use its own spread so that the
    0.5 level always falls halfway to that side's neighbor."""

    center: float
    sigma_left: float
    sigma_right: float

    def mu(self, x: float) -> float:
        d = x - self.center
        sigma = self.sigma_left if d < 0 else self.sigma_right
        z = d / sigma
        return math.exp(-0.5 * z * z)


@dataclass(frozen=True)
class Shoulder:
    """Gaussian flank that saturates to 1 at and beyond its center.

    side=+1 saturates toward the positive universe edge, side=-1 toward the
    negative edge.
    """

    center: float
    sigma: float
    side: int

    def mu(self, x: float) -> float:
        d = x - self.center
        if self.side > 0:
            if d >= 0:
                return 1.0
        elif d <= 0:
            return 1.0
        z = d / self.sigma
        return math.exp(-0.5 * z * z)


MembershipFunction = Triangle | Gaussian | Shoulder

# Default partition of the normalized universe [-1, 1]: narrow near zero,
# wide toward the edges. The inner centers sit on 1/50 grid multiples so the
# control surface's triangle-peak creases coincide with lookup-table nodes.
DEFAULT_CENTERS = (-1.0, -0.6, -0.26, 0.0, 0.26, 0.6, 1.0)

# Steep triangles near zero, smooth gaussians further out, saturating
# shoulders at the edges; the rate input is smooth everywhere.
DEVIATION_SHAPES = ("shoulder", "gaussian", "triangle", "triangle", "triangle", "gaussian", "shoulder")
RATE_SHAPES = ("shoulder", "gaussian", "gaussian", "gaussian", "gaussian", "gaussian", "shoulder")
OUTPUT_SHAPES = DEVIATION_SHAPES


def _sigma_for_reach(reach: float) -> float:
    # reach is the half-maximum distance: mu(center +/- reach) == 0.5 exactly.
    return reach / math.sqrt(2.0 * math.log(2.0))


def _gap_reaches(
    centers: tuple[float, ...],
    zo_reach_fraction: float,
    edge_reach_fraction: float,
) -> list[tuple[float, float]]:
    """Split each inter-center gap into the two flanking half-maximum reaches.

    Adjacent functions then cross at exactly 0.5 where their reaches meet.
    Two gap families may be split unevenly: the zero-adjacent gaps, where the
    small sets own `zo_reach_fraction` of the gap (a wider zero set keeps a
    resting input from leaking membership into its neighbors), and the edge
    gaps, where the shoulders own `edge_reach_fraction` (shorter shoulder
    tails keep the extreme-label rules out of mid-universe inference).
    """
    splits = []
    for g in range(6):
        if g == 0:  # NB -> NM gap: (left set's share, right set's share)
            splits.append((edge_reach_fraction, 1.0 - edge_reach_fraction))
        elif g == 5:  # PM -> PB gap
            splits.append((1.0 - edge_reach_fraction, edge_reach_fraction))
        elif g == 2:  # NS -> ZO gap
            splits.append((zo_reach_fraction, 1.0 - zo_reach_fraction))
        elif g == 3:  # ZO -> PS gap
            splits.append((1.0 - zo_reach_fraction, zo_reach_fraction))
        else:
            splits.append((0.5, 0.5))
    reaches = []
    for i in range(7):
        gap_l = centers[i] - centers[i - 1] if i > 0 else 0.0
        gap_r = centers[i + 1] - centers[i] if i < 6 else 0.0
        left = gap_l * splits[i - 1][1] if i > 0 else 0.0
        right = gap_r * splits[i][0] if i < 6 else 0.0
        reaches.append((left, right))
    return reaches


def _build_mf(
    shapes: tuple[str, ...],
    centers: tuple[float, ...],
    reaches: list[tuple[float, float]],
    i: int,
) -> MembershipFunction:
    shape = shapes[i]
    c = centers[i]
    if shape == "triangle":
        if i == 0 or i == 6:
            raise ValueError("triangle membership needs neighbors on both sides")
        return Triangle(centers[i - 1], c, centers[i + 1])
    if shape == "gaussian":
        if i == 0 or i == 6:
            raise ValueError("gaussian membership needs neighbors on both sides")
        return Gaussian(
            center=c,
            sigma_left=_sigma_for_reach(reaches[i][0]),
            sigma_right=_sigma_for_reach(reaches[i][1]),
        )
    if shape == "shoulder":
        if i == 0:
            return Shoulder(center=c, sigma=_sigma_for_reach(reaches[i][1]), side=-1)
        if i == 6:
            return Shoulder(center=c, sigma=_sigma_for_reach(reaches[i][0]), side=+1)
        raise ValueError("shoulder membership is only valid at the universe edges")
    raise ValueError(f"unknown membership shape {shape!r}")


@dataclass(frozen=True)
class FuzzyVariable:
    """A named variable with a physical scaling gain and seven membership
    functions over the normalized universe [-1, 1].

    `gain` is physical units per normalized unit; inputs are clamped to the
    scaled universe before fuzzification.
    """

    name: str
    gain: float
    mfs: tuple[MembershipFunction, ...]

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError(f"{self.name}: scaling gain must be positive")
        if len(self.mfs) != 7:
            raise ValueError(f"{self.name}: exactly seven membership functions required")

    def normalize(self, x: float) -> float:
        z = x / self.gain
        return -1.0 if z < -1.0 else (1.0 if z > 1.0 else z)

    def fuzzify(self, x: float) -> np.ndarray:
        """Membership degrees of a physical value, ordered as LABELS."""
        z = self.normalize(x)
        return np.array([mf.mu(z) for mf in self.mfs])

    def mu(self, label: str, z: float) -> float:
        return self.mfs[label_index(label)].mu(z)


# Reach fractions for the rate variable: a wider zero set keeps a resting
# rate input essentially a pure ZO reading, and short shoulders keep the
# extreme-rate rules from bleeding into mid-universe inference.
RATE_ZO_REACH_FRACTION = 0.35
RATE_EDGE_REACH_FRACTION = 0.4


def make_variable(
    name: str,
    gain: float,
    shapes: tuple[str, ...] = DEVIATION_SHAPES,
    centers: tuple[float, ...] = DEFAULT_CENTERS,
    zo_reach_fraction: float = 0.5,
    edge_reach_fraction: float = 0.5,
) -> FuzzyVariable:
    """Build a FuzzyVariable from per-label shape names over shared centers.

    Centers must be strictly increasing, span the normalized universe
    symmetrically (centers[i] == -centers[6-i], centers[3] == 0), and the
    shape list must mirror likewise so negative/positive labels stay
    reflections of each other.
    """
    if len(centers) != 7 or len(shapes) != 7:
        raise ValueError("seven centers and seven shapes required")
    for i in range(6):
        if centers[i] >= centers[i + 1]:
            raise ValueError("centers must be strictly increasing")
    for i in range(7):
        if centers[i] != -centers[6 - i]:
            raise ValueError("centers must be symmetric about zero")
        if shapes[i] != shapes[6 - i]:
            raise ValueError("shapes must be mirror-symmetric")
    if centers[0] < -1.0 or centers[6] > 1.0:
        raise ValueError("centers must lie within the normalized universe")
    if not 0.0 < zo_reach_fraction < 1.0:
        raise ValueError("zo_reach_fraction must lie in (0, 1)")
    if not 0.0 < edge_reach_fraction < 1.0:
        raise ValueError("edge_reach_fraction must lie in (0, 1)")
    reaches = _gap_reaches(tuple(centers), zo_reach_fraction, edge_reach_fraction)
    mfs = tuple(_build_mf(tuple(shapes), tuple(centers), reaches, i) for i in range(7))
    var = FuzzyVariable(name=name, gain=gain, mfs=mfs)
    check_partition(var)
    return var


def check_partition(var: FuzzyVariable, samples: int = 2001) -> None:
    """Reject membership layouts that leave gaps or cross badly.

    Adjacent functions must cross between 0.4 and 0.6, and every point of
    the universe must carry at least 0.4 of membership somewhere.
    """
    zs = np.linspace(-1.0, 1.0, samples)
    mu = np.array([[mf.mu(z) for z in zs] for mf in var.mfs])
    for i in range(6):
        crossing = float(np.max(np.minimum(mu[i], mu[i + 1])))
        if not (0.4 - 1e-9 <= crossing <= 0.6 + 1e-9):
            raise ValueError(
                f"{var.name}: {LABELS[i]}/{LABELS[i + 1]} cross at {crossing:.3f}, "
                "outside [0.4, 0.6]"
            )
    lowest_cover = float(np.min(np.max(mu, axis=0)))
    if lowest_cover < 0.4 - 1e-9:
        raise ValueError(f"{var.name}: membership coverage dips to {lowest_cover:.3f}")


# Default rule grid: rows indexed by the deviation label, columns by the
# rate label. Odd-symmetric and monotone along both axes.
DEFAULT_RULES = (
    ("NB", "NB", "NM", "NM", "NS", "NS", "ZO"),
    ("NB", "NM", "NM", "NS", "NS", "ZO", "PS"),
    ("NM", "NM", "NS", "NS", "ZO", "PS", "PS"),
    ("NM", "NS", "NS", "ZO", "PS", "PS", "PM"),
    ("NS", "NS", "ZO", "PS", "PS", "PM", "PM"),
    ("NS", "ZO", "PS", "PS", "PM", "PM", "PB"),
    ("ZO", "PS", "PS", "PM", "PM", "PB", "PB"),
)


@dataclass(frozen=True)
class RuleTable:
    """Total 7x7 grid mapping (deviation label, rate label) to an output label."""

    rows: tuple[tuple[str, ...], ...] = DEFAULT_RULES

    def __post_init__(self):
        if len(self.rows) != 7 or any(len(r) != 7 for r in self.rows):
            raise ValueError("rule table must be 7x7")
        for row in self.rows:
            for cell in row:
                label_index(cell)  # raises on unknown labels
        for i in range(7):
            for j in range(7):
                mirrored = self.rows[6 - i][6 - j]
                if mirrored != negate_label(self.rows[i][j]):
                    raise ValueError(
                        f"rule table is not odd-symmetric at ({LABELS[i]}, {LABELS[j]})"
                    )
        for i in range(7):
            for j in range(6):
                if label_index(self.rows[i][j + 1]) < label_index(self.rows[i][j]):
                    raise ValueError(f"rule row {LABELS[i]} is not monotone")
                if label_index(self.rows[j + 1][i]) < label_index(self.rows[j][i]):
                    raise ValueError(f"rule column {LABELS[i]} is not monotone")

    def output(self, e_label: str, de_label: str) -> str:
        return self.rows[label_index(e_label)][label_index(de_label)]

    def output_index(self, i: int, j: int) -> int:
        return _LABEL_INDEX[self.rows[i][j]]


def _symmetric_samples(resolution: int) -> np.ndarray:
    # Built from one non-negative half so z and -z are exact negations,
    # which makes mirrored curves cancel bitwise in the centroid.
    mid = resolution // 2
    half = np.linspace(0.0, 1.0, mid + 1)
    return np.concatenate([-half[:0:-1], half])


class MamdaniController:
    """Max-min inference over two inputs with centroid defuzzification.

    Immutable after construction; all evaluation methods are pure.
    """

    def __init__(
        self,
        deviation: FuzzyVariable | None = None,
        rate: FuzzyVariable | None = None,
        output: FuzzyVariable | None = None,
        rules: RuleTable | None = None,
        resolution: int = 201,
        deviation_gain: float = 0.1,
        rate_gain: float = 0.5,
        output_gain: float = 70.0,
    ):
        if resolution < 51 or resolution % 2 == 0:
            raise ValueError("resolution must be odd and at least 51")
        self.deviation = deviation or make_variable("e", deviation_gain, DEVIATION_SHAPES)
        self.rate = rate or make_variable(
            "de",
            rate_gain,
            RATE_SHAPES,
            zo_reach_fraction=RATE_ZO_REACH_FRACTION,
            edge_reach_fraction=RATE_EDGE_REACH_FRACTION,
        )
        self.output = output or make_variable("u", output_gain, OUTPUT_SHAPES)
        self.rules = rules or RuleTable()
        self.resolution = resolution
        self._samples = _symmetric_samples(resolution)
        self._consequents = np.array(
            [[mf.mu(z) for z in self._samples] for mf in self.output.mfs]
        )

    @property
    def output_samples(self) -> np.ndarray:
        """Normalized output universe sample points (read-only view)."""
        view = self._samples.view()
        view.flags.writeable = False
        return view

    def infer(self, deg_e: np.ndarray, deg_de: np.ndarray) -> np.ndarray:
        """Aggregated output membership curve over the sampled universe.

        Each sample is the max over the 49 rules of
        min(deg_e[i], deg_de[j], mu_out[rule(i,j)](z)).
        """
        strengths = np.zeros(7)
        for i in range(7):
            di = deg_e[i]
            if di == 0.0:
                continue
            for j in range(7):
                w = di if di < deg_de[j] else deg_de[j]
                k = self.rules.output_index(i, j)
                if w > strengths[k]:
                    strengths[k] = w
        return np.max(np.minimum(strengths[:, None], self._consequents), axis=0)

    def defuzz(self, curve: np.ndarray) -> float:
        """Center of gravity of an aggregated curve, in physical output units.

        Pairs mirrored samples before summing so symmetric curves defuzzify
        to exactly zero.
        """
        total = float(np.sum(curve))
        if total == 0.0:
            raise ValueError("empty aggregate: no rule produced any output membership")
        mid = self.resolution // 2
        folded = curve[:mid] - curve[:mid:-1]
        num = float(np.dot(self._samples[:mid], folded))
        return (num / total) * self.output.gain

    def evaluate(self, e: float, de: float) -> float:
        """Corrective steering-wheel angle for a deviation and its rate."""
        curve = self.infer(self.deviation.fuzzify(e), self.rate.fuzzify(de))
        return self.defuzz(curve)


class LookupTable:
    """Precomputed control surface with bilinear interpolation between nodes."""

    def __init__(self, e_axis: np.ndarray, de_axis: np.ndarray, grid: np.ndarray, output_gain: float):
        self.e_axis = e_axis
        self.de_axis = de_axis
        self.grid = grid
        self.output_gain = output_gain
        if np.any(np.abs(grid) > output_gain + 1e-12):
            raise ValueError("lookup grid contains values outside the output universe")

    @classmethod
    def build(cls, controller: MamdaniController, n_e: int = 101, n_de: int = 101) -> "LookupTable":
        """Tabulate the controller on an equally spaced grid of scaled-universe points."""
        if n_e < 2 or n_de < 2:
            raise ValueError("lookup table needs at least 2 nodes per axis")
        e_axis = np.linspace(-controller.deviation.gain, controller.deviation.gain, n_e)
        de_axis = np.linspace(-controller.rate.gain, controller.rate.gain, n_de)
        grid = np.empty((n_e, n_de))
        for i, e in enumerate(e_axis):
            for j, de in enumerate(de_axis):
                grid[i, j] = controller.evaluate(float(e), float(de))
        return cls(e_axis, de_axis, grid, controller.output.gain)

    def _cell(self, axis: np.ndarray, x: float) -> tuple[int, float]:
        lo, hi = axis[0], axis[-1]
        x = lo if x < lo else (hi if x > hi else x)
        step = (hi - lo) / (len(axis) - 1)
        i = int((x - lo) / step)
        if i >= len(axis) - 1:
            i = len(axis) - 2
        t = (x - axis[i]) / (axis[i + 1] - axis[i])
        return i, t

    def lookup(self, e: float, de: float) -> float:
        """Bilinear interpolation over the four surrounding grid nodes."""
        i, s = self._cell(self.e_axis, e)
        j, t = self._cell(self.de_axis, de)
        g = self.grid
        top = g[i, j] * (1.0 - t) + g[i, j + 1] * t
        bot = g[i + 1, j] * (1.0 - t) + g[i + 1, j + 1] * t
        return float(top * (1.0 - s) + bot * s)
