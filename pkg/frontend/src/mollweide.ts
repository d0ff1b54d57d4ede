/** Mollweide equal-area projection (unit sphere; x in [-2sqrt2, 2sqrt2]). */

const SQRT2 = Math.SQRT2

/** Solve 2a + sin 2a = pi sin(lat) for the auxiliary angle a (Newton). */
export function auxiliaryAngle(lat: number): number {
  if (Math.abs(lat) >= Math.PI / 2 - 1e-12) return Math.sign(lat) * (Math.PI / 2)
  let a = lat
  for (let i = 0; i < 25; i++) {
    const f = 2 * a + Math.sin(2 * a) - Math.PI * Math.sin(lat)
    const fp = 2 + 2 * Math.cos(2 * a)
    const step = f / fp
    a -= step
    if (Math.abs(step) < 1e-13) break
  }
  return a
}

export function project(lat: number, lon: number): [number, number] {
  const a = auxiliaryAngle(lat)
  return [(2 * SQRT2 / Math.PI) * lon * Math.cos(a), SQRT2 * Math.sin(a)]
}

/** Inverse projection; returns null outside the ellipse. */
export function invert(x: number, y: number): [number, number] | null {
  const sy = y / SQRT2
  if (Math.abs(sy) > 1) return null
  const a = Math.asin(sy)
  const sinLat = (2 * a + Math.sin(2 * a)) / Math.PI
  if (Math.abs(sinLat) > 1) return null
  const cosA = Math.cos(a)
  if (cosA < 1e-12) {
    return Math.abs(x) < 1e-9 ? [Math.asin(sinLat), 0] : null
  }
  const lon = (Math.PI * x) / (2 * SQRT2 * cosA)
  if (Math.abs(lon) > Math.PI) return null
  return [Math.asin(sinLat), lon]
}
