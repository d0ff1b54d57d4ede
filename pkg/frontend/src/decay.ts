/** Decay figure: replication-averaged autocovariance per target, divided by
 * exp(intercept) of its fit, on log-log axes. */

import { parseCsv, requireColumns, toNumber } from './csv'
import { PALETTE, axisBox, el, log10Scale, polyline, svgDocument, text } from './svg'

export interface DecayCurve {
  target: string
  label: string
  slope: number
  points: Array<[number, number]>   // (tau, rho_avg / exp(intercept))
}

export function decayCurves(autocovText: string, fitsText: string): DecayCurve[] {
  const fits = parseCsv(fitsText)
  const fcols = requireColumns(fits, ['target', 'levels', 'intercept', 'slope'], 'fits.csv')
  const autocov = parseCsv(autocovText)
  const acols = requireColumns(autocov, ['target', 'tau', 'rho_avg'], 'autocov.csv')

  const curves = new Map<string, DecayCurve>()
  for (const row of fits.rows) {
    const target = row[fcols.get('target')!]
    const levels = row[fcols.get('levels')!]
    curves.set(target, {
      target,
      label: levels ? `${target} (${levels})` : target,
      slope: toNumber(row[fcols.get('slope')!], 'fits.csv slope'),
      points: [],
    })
  }
  for (const row of autocov.rows) {
    const target = row[acols.get('target')!]
    const curve = curves.get(target)
    if (!curve) throw new Error(`autocov.csv: target '${target}' missing from fits.csv`)
    const fitRow = fits.rows.find((r) => r[fcols.get('target')!] === target)!
    const intercept = toNumber(fitRow[fcols.get('intercept')!], 'fits.csv intercept')
    const tau = toNumber(row[acols.get('tau')!], 'autocov.csv tau')
    const rho = toNumber(row[acols.get('rho_avg')!], 'autocov.csv rho_avg')
    curve.points.push([tau, Math.abs(rho) / Math.exp(intercept)])
  }
  const out = [...curves.values()]
  if (out.length === 0 || out.every((c) => c.points.length === 0)) {
    throw new Error('no decay data to plot')
  }
  for (const curve of out) curve.points.sort((a, b) => a[0] - b[0])
  return out
}

export function renderDecay(autocovText: string, fitsText: string): string {
  const curves = decayCurves(autocovText, fitsText)
  const width = 640
  const height = 440
  const box = { x0: 70, y0: height - 60, x1: width - 180, y1: 30 }

  const taus = curves.flatMap((c) => c.points.map((p) => p[0]))
  const values = curves.flatMap((c) => c.points.map((p) => p[1])).filter((v) => v > 0)
  const xs = log10Scale(Math.min(...taus), Math.max(...taus) * 1.05, box.x0, box.x1)
  const ys = log10Scale(Math.min(...values) * 0.8, Math.max(...values) * 1.25, box.y0, box.y1)

  const body: string[] = [axisBox(box.x0, box.y0, box.x1, box.y1)]
  for (const t of xs.ticks) {
    body.push(el('line', { x1: xs(t), y1: box.y0, x2: xs(t), y2: box.y0 + 4, stroke: '#333333' }))
    body.push(text(xs(t), box.y0 + 16, xs.label(t)))
  }
  for (const t of ys.ticks) {
    body.push(el('line', { x1: box.x0 - 4, y1: ys(t), x2: box.x0, y2: ys(t), stroke: '#333333' }))
    body.push(text(box.x0 - 8, ys(t) + 4, ys.label(t), 'end'))
  }
  body.push(text((box.x0 + box.x1) / 2, height - 24, 'lag'))
  body.push(text(16, (box.y0 + box.y1) / 2, 'autocovariance / exp(intercept)', 'middle', 11)
    .replace('<text ', `<text transform="rotate(-90 16 ${(box.y0 + box.y1) / 2})" `))

  curves.forEach((curve, k) => {
    const color = PALETTE[k % PALETTE.length]
    const pts = curve.points.filter(([, v]) => v > 0)
      .map(([tau, v]) => [xs(tau), ys(v)] as [number, number])
    if (pts.length > 1) body.push(polyline(pts, color))
    for (const [x, y] of pts) body.push(el('circle', { cx: x, cy: y, r: 3, fill: color }))
    const ly = box.y1 + 14 + 18 * k
    body.push(el('line', { x1: box.x1 + 12, y1: ly - 4, x2: box.x1 + 34, y2: ly - 4, stroke: color, 'stroke-width': 2 }))
    body.push(text(box.x1 + 40, ly, `${curve.label}`, 'start', 10))
  })
  return svgDocument(width, height, body)
}
