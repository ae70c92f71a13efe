"""Stadium road geometry: two straights joined by two semicircular arcs.

The lap runs counterclockwise starting at the beginning of the first
straight. Signed lateral deviation is positive to the left of the travel
direction, so a vehicle inside the stadium on an arc has positive
deviation. Geometry is immutable; all queries are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class StadiumTrack:
    straight_length: float = 200.0  # m
    arc_length: float = 157.0       # m per semicircle
    width: float = 8.2              # m

    def __post_init__(self):
        if self.straight_length <= 0 or self.arc_length <= 0 or self.width <= 0:
            raise ValueError("track dimensions must be positive")
        if self.radius <= self.width / 2.0:
            raise ValueError("arc radius must exceed half the road width")

    @property
    def radius(self) -> float:
        """Arc radius: each arc is a semicircle of the given length."""
        return self.arc_length / math.pi

    @property
    def length(self) -> float:
        """Total centerline length of one lap."""
        return 2.0 * self.straight_length + 2.0 * self.arc_length

    # Segment starts along the lap: straight, arc, straight, arc.
    def _bounds(self) -> tuple[float, float, float, float]:
        s1 = self.straight_length
        s2 = s1 + self.arc_length
        s3 = s2 + self.straight_length
        return 0.0, s1, s2, s3

    def centerline_point(self, s: float) -> tuple[float, float, float]:
        """Position and heading of the centerline at arc-length s.

        s wraps modulo the lap length; the origin is the start of the first
        straight, heading along +x.
        """
        s = s % self.length
        _, s1, s2, s3 = self._bounds()
        r = self.radius
        if s < s1:
            return s, 0.0, 0.0
        if s < s2:
            phi = (s - s1) / r  # 0..pi around the first arc, center (s1, r)
            ang = phi - math.pi / 2.0
            return s1 + r * math.cos(ang), r + r * math.sin(ang), phi
        if s < s3:
            d = s - s2
            return s1 - d, 2.0 * r, math.pi
        phi = (s - s3) / r  # second arc, center (0, r)
        ang = math.pi / 2.0 + phi
        return r * math.cos(ang), r + r * math.sin(ang), math.pi + phi

    def project(self, x: float, y: float) -> "TrackPose":
        """Nearest-centerline pose of a world point.

        Raises if the point is far outside the course ("off-world"). Ties
        between segments resolve to the one with the smaller offset, then to
        the earlier segment along the lap.
        """
        r = self.radius
        if math.hypot(x - self.straight_length / 2.0, y - r) > 10.0 * self.width + r + self.straight_length:
            raise ValueError(f"off-world point ({x:.1f}, {y:.1f})")
        _, s1, s2, s3 = self._bounds()
        candidates = [
            # First straight: y = 0, heading +x, left normal +y.
            self._straight_candidate(x, y, 0.0, 0.0, +1.0, 0.0, s1, 0.0),
            # Second straight: y = 2r, heading -x, left normal -y.
            self._straight_candidate(x, y, s1, 2.0 * r, -1.0, 2.0 * r, s1, s2),
            # First arc: center (s1, r), start angle -pi/2.
            self._arc_candidate(x, y, s1, -math.pi / 2.0, s1),
            # Second arc: center (0, r), start angle +pi/2.
            self._arc_candidate(x, y, 0.0, math.pi / 2.0, s3),
        ]
        _, _, s, e = min(candidates, key=lambda c: (round(c[0], 12), abs(c[1]), c[2]))
        _, _, heading = self.centerline_point(s)
        return TrackPose(s=s % self.length, lateral=e, heading=heading)

    def _straight_candidate(
        self, x: float, y: float, x0: float, y0: float,
        direction: float, ny: float, length: float, s0: float,
    ) -> tuple[float, float, float, float]:
        # Segment from (x0, y0) along (direction, 0); left normal is
        # (0, direction). ny is the segment's y level.
        along = (x - x0) * direction
        along = min(max(along, 0.0), length)
        px = x0 + along * direction
        dist = math.hypot(x - px, y - ny)
        e = (y - ny) * direction
        return dist, e, s0 + along, e

    def _arc_candidate(
        self, x: float, y: float, cx: float, ang0: float, s0: float
    ) -> tuple[float, float, float, float]:
        r = self.radius
        dx, dy = x - cx, y - r
        rho = math.hypot(dx, dy)
        if rho == 0.0:
            # Arc center: every arc point is equidistant; report the start.
            return r, r, s0, r
        ang = math.atan2(dy, dx)
        phi = (ang - ang0) % (2.0 * math.pi)
        if phi <= math.pi:
            # Counterclockwise travel: the left normal points to the center.
            return abs(rho - r), r - rho, s0 + phi * r, r - rho
        # Behind the semicircle: nearest arc point is an endpoint.
        phi = 0.0 if phi > 1.5 * math.pi else math.pi
        ex = cx + r * math.cos(ang0 + phi)
        ey = r + r * math.sin(ang0 + phi)
        return math.hypot(x - ex, y - ey), r - rho, s0 + phi * r, r - rho

    def on_road(self, lateral: float) -> bool:
        return abs(lateral) <= self.width / 2.0

    def polyline(self, spacing: float = 1.0) -> list[tuple[float, float]]:
        """Closed centerline polyline sampled every `spacing` meters."""
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        n = max(8, int(math.ceil(self.length / spacing)))
        pts = []
        for i in range(n + 1):
            x, y, _ = self.centerline_point(self.length * i / n)
            pts.append((x, y))
        return pts

    def edge_polyline(self, offset: float, spacing: float = 1.0) -> list[tuple[float, float]]:
        """Polyline parallel to the centerline, offset along the left normal."""
        pts = []
        base = self.polyline(spacing)
        n = len(base) - 1
        for i in range(n + 1):
            s = self.length * i / n
            x, y, heading = self.centerline_point(s)
            pts.append((x - offset * math.sin(heading), y + offset * math.cos(heading)))
        return pts


@dataclass(frozen=True)
class TrackPose:
    """Projection of a vehicle position onto the track centerline."""

    s: float        # arc-length progress, m, in [0, lap length)
    lateral: float  # signed offset, m, positive left of travel
    heading: float  # centerline heading at the projection, rad


def deviation_rate(prev: TrackPose, cur: TrackPose, dt: float) -> float:
    """Backward-difference rate of the signed lateral deviation."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return (cur.lateral - prev.lateral) / dt
