/** Excursion maps: one two-tone Mollweide panel per snapshot time.
 * Each panel is rasterized by inverting the projection per pixel and looking
 * up the nearest grid node; runs of equal color are merged into rects. */

import { parseCsv, requireColumns, toNumber } from './csv'
import { el, svgDocument, text } from './svg'
import { invert } from './mollweide'

export interface SnapshotGrid {
  times: number[]
  thetas: number[]               // ring colatitudes, ascending
  nPhi: number
  indicator: Map<number, Uint8Array>   // time -> ring-major node indicators
}

export function readSnapshots(excursionText: string): SnapshotGrid {
  const table = parseCsv(excursionText)
  const cols = requireColumns(table, ['t', 'theta', 'phi', 'indicator'], 'excursion.csv')
  const byTime = new Map<number, Array<{ theta: number, phi: number, flag: number }>>()
  for (const row of table.rows) {
    const t = toNumber(row[cols.get('t')!], 'excursion.csv t')
    const theta = toNumber(row[cols.get('theta')!], 'excursion.csv theta')
    const phi = toNumber(row[cols.get('phi')!], 'excursion.csv phi')
    if (theta < 0 || theta > Math.PI) throw new Error(`excursion.csv: theta ${theta} outside [0, pi]`)
    if (phi < 0 || phi >= 2 * Math.PI + 1e-9) throw new Error(`excursion.csv: phi ${phi} outside [0, 2 pi)`)
    const flag = toNumber(row[cols.get('indicator')!], 'excursion.csv indicator')
    if (!byTime.has(t)) byTime.set(t, [])
    byTime.get(t)!.push({ theta, phi, flag })
  }
  if (byTime.size === 0) throw new Error('excursion.csv: no rows')
  const times = [...byTime.keys()].sort((a, b) => a - b)
  const first = byTime.get(times[0])!
  const thetaSet = [...new Set(first.map((r) => r.theta))].sort((a, b) => a - b)
  const nPhi = first.length / thetaSet.length
  if (!Number.isInteger(nPhi)) throw new Error('excursion.csv: nodes do not form a ring grid')
  const indicator = new Map<number, Uint8Array>()
  for (const t of times) {
    const rows = byTime.get(t)!
    if (rows.length !== first.length) throw new Error('excursion.csv: unequal node counts per time')
    const flags = new Uint8Array(rows.length)
    rows.forEach((r, i) => { flags[i] = r.flag ? 1 : 0 })
    indicator.set(t, flags)
  }
  return { times, thetas: thetaSet, nPhi, indicator }
}

function nearestRing(thetas: number[], theta: number): number {
  let lo = 0
  let hi = thetas.length - 1
  while (hi - lo > 1) {
    const mid = (lo + hi) >> 1
    if (thetas[mid] < theta) lo = mid
    else hi = mid
  }
  return theta - thetas[lo] <= thetas[hi] - theta ? lo : hi
}

const ABOVE = '#1a1a1a'
const BELOW = '#b9b9b9'

export function renderExcursion(excursionText: string, pixelsAcross = 288): string {
  const snap = readSnapshots(excursionText)
  const panelW = pixelsAcross
  const panelH = Math.round(pixelsAcross / 2)
  const margin = 18
  const cols = snap.times.length <= 2 ? snap.times.length : 2
  const rowsCount = Math.ceil(snap.times.length / cols)
  const width = cols * (panelW + margin) + margin
  const height = rowsCount * (panelH + 30) + margin
  const body: string[] = []

  snap.times.forEach((t, k) => {
    const ox = margin + (k % cols) * (panelW + margin)
    const oy = margin + Math.floor(k / cols) * (panelH + 30)
    const flags = snap.indicator.get(t)!
    body.push(el('ellipse', {
      cx: ox + panelW / 2, cy: oy + panelH / 2, rx: panelW / 2, ry: panelH / 2,
      fill: 'none', stroke: '#555555', 'stroke-width': 1,
    }))
    for (let py = 0; py < panelH; py++) {
      const yProj = ((panelH / 2 - (py + 0.5)) / (panelH / 2)) * Math.SQRT2
      let runStart = -1
      let runColor = ''
      for (let px = 0; px <= panelW; px++) {
        let color = ''
        if (px < panelW) {
          const xProj = (((px + 0.5) - panelW / 2) / (panelW / 2)) * 2 * Math.SQRT2
          const inv = invert(xProj, yProj)
          if (inv) {
            const [lat, lon] = inv
            const theta = Math.PI / 2 - lat
            const phi = ((lon + 2 * Math.PI) % (2 * Math.PI))
            const ring = nearestRing(snap.thetas, theta)
            const j = Math.round((phi / (2 * Math.PI)) * snap.nPhi) % snap.nPhi
            color = flags[ring * snap.nPhi + j] ? ABOVE : BELOW
          }
        }
        if (color !== runColor) {
          if (runColor !== '') {
            body.push(el('rect', {
              x: ox + runStart, y: oy + py, width: px - runStart, height: 1,
              fill: runColor, 'shape-rendering': 'crispEdges',
            }))
          }
          runColor = color
          runStart = px
        }
      }
    }
    body.push(text(ox + panelW / 2, oy + panelH + 16, `t = ${t}`))
  })
  return svgDocument(width, height, body)
}
