// World-to-canvas mapping. Screen y grows downward, so world y is flipped;
// a counterclockwise lap in world coordinates therefore reads clockwise on
// screen, and a positive ("right") steering step visibly turns the vehicle
// to the screen's right.

export interface Box {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export interface Transform {
  scale: number;
  ox: number; // world x at the left edge
  oy: number; // world y at the TOP edge (screen y = 0)
}

export function boundsOf(points: [number, number][], pad: number): Box {
  let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
  for (const [x, y] of points) {
    if (x < xMin) xMin = x;
    if (x > xMax) xMax = x;
    if (y < yMin) yMin = y;
    if (y > yMax) yMax = y;
  }
  return { xMin: xMin - pad, xMax: xMax + pad, yMin: yMin - pad, yMax: yMax + pad };
}

export function fitTransform(box: Box, width: number, height: number): Transform {
  const sx = width / (box.xMax - box.xMin);
  const sy = height / (box.yMax - box.yMin);
  const scale = Math.min(sx, sy);
  // center the slack axis
  const slackX = (width - scale * (box.xMax - box.xMin)) / 2;
  const slackY = (height - scale * (box.yMax - box.yMin)) / 2;
  return {
    scale,
    ox: box.xMin - slackX / scale,
    oy: box.yMax + slackY / scale,
  };
}

export function toScreen(tf: Transform, x: number, y: number): [number, number] {
  return [(x - tf.ox) * tf.scale, (tf.oy - y) * tf.scale];
}

/** Offset a polyline along its left normals (for road edges). */
export function offsetPolyline(
  points: [number, number][], offset: number,
): [number, number][] {
  const out: [number, number][] = [];
  const n = points.length;
  for (let i = 0; i < n; i++) {
    const [x0, y0] = points[(i + n - 1) % n];
    const [x1, y1] = points[(i + 1) % n];
    const dx = x1 - x0, dy = y1 - y0;
    const len = Math.hypot(dx, dy) || 1;
    out.push([points[i][0] - (dy / len) * offset, points[i][1] + (dx / len) * offset]);
  }
  return out;
}
