/** Paths figure: centered functional series of one replication over time. */

import { parseCsv, requireColumns, toNumber } from './csv'
import { PALETTE, axisBox, el, linearScale, polyline, svgDocument, text } from './svg'

export interface PathSeries {
  name: string
  t: number[]
  values: number[]
}

export function pathSeries(pathsText: string): PathSeries[] {
  const table = parseCsv(pathsText)
  requireColumns(table, ['t'], 'paths.csv')
  if (table.header.length < 2) throw new Error('paths.csv: no series columns')
  if (table.rows.length === 0) throw new Error('paths.csv: no data rows')
  const names = table.header.slice(1)
  const out = names.map((name) => ({ name, t: [] as number[], values: [] as number[] }))
  for (const row of table.rows) {
    const t = toNumber(row[0], 'paths.csv t')
    row.slice(1).forEach((cell, k) => {
      out[k].t.push(t)
      out[k].values.push(toNumber(cell, `paths.csv ${names[k]}`))
    })
  }
  return out
}

export function renderPaths(pathsText: string): string {
  const series = pathSeries(pathsText)
  const width = 720
  const height = 420
  const box = { x0: 60, y0: height - 50, x1: width - 150, y1: 24 }

  const allT = series[0].t
  const allV = series.flatMap((s) => s.values)
  const xs = linearScale(Math.min(...allT), Math.max(...allT), box.x0, box.x1, 6)
  const pad = (Math.max(...allV) - Math.min(...allV)) * 0.05 || 1
  const ys = linearScale(Math.min(...allV) - pad, Math.max(...allV) + pad, box.y0, box.y1, 6)

  const body: string[] = [axisBox(box.x0, box.y0, box.x1, box.y1)]
  for (const t of xs.ticks) {
    body.push(el('line', { x1: xs(t), y1: box.y0, x2: xs(t), y2: box.y0 + 4, stroke: '#333333' }))
    body.push(text(xs(t), box.y0 + 16, xs.label(t)))
  }
  for (const t of ys.ticks) {
    body.push(el('line', { x1: box.x0 - 4, y1: ys(t), x2: box.x0, y2: ys(t), stroke: '#333333' }))
    body.push(text(box.x0 - 8, ys(t) + 4, ys.label(t), 'end'))
  }
  if (ys(0) >= ys(Math.max(...allV)) && ys(0) <= ys(Math.min(...allV))) {
    body.push(el('line', { x1: box.x0, y1: ys(0), x2: box.x1, y2: ys(0), stroke: '#bbbbbb', 'stroke-dasharray': '4 3' }))
  }
  body.push(text((box.x0 + box.x1) / 2, height - 18, 't'))

  series.forEach((s, k) => {
    const color = PALETTE[k % PALETTE.length]
    const pts = s.t.map((tv, i) => [xs(tv), ys(s.values[i])] as [number, number])
    body.push(polyline(pts, color, 1.1))
    const ly = box.y1 + 14 + 18 * k
    body.push(el('line', { x1: box.x1 + 12, y1: ly - 4, x2: box.x1 + 34, y2: ly - 4, stroke: color, 'stroke-width': 2 }))
    body.push(text(box.x1 + 40, ly, s.name, 'start', 10))
  })
  return svgDocument(width, height, body)
}
