/** Deterministic SVG assembly: fixed float formatting, no timestamps. */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`cannot format ${x}`)
  const s = x.toFixed(3)
  return s === '-0.000' ? '0.000' : s
}

export function el(tag: string, attrs: Record<string, string | number>, body = ''): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === 'number' ? fmt(v) : v}"`)
    .join(' ')
  return body === '' ? `<${tag} ${parts}/>` : `<${tag} ${parts}>${body}</${tag}>`
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    el('rect', { x: 0, y: 0, width, height, fill: 'white' }),
    ...body,
    '</svg>',
    '',
  ].join('\n')
}

export interface Scale {
  (value: number): number
  ticks: number[]
  label: (tick: number) => string
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number, tickCount = 5): Scale {
  const span = hi - lo || 1
  const scale = ((value: number) => outLo + ((value - lo) / span) * (outHi - outLo)) as Scale
  const step = niceStep(span / tickCount)
  const first = Math.ceil(lo / step) * step
  scale.ticks = []
  for (let t = first; t <= hi + 1e-9; t += step) scale.ticks.push(t)
  scale.label = (t) => trimNumber(t)
  return scale
}

export function log10Scale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (lo <= 0 || hi <= 0) throw new Error('log scale needs positive bounds')
  const llo = Math.log10(lo)
  const lhi = Math.log10(hi)
  const span = lhi - llo || 1
  const scale = ((value: number) => {
    if (value <= 0) throw new Error('log scale applied to nonpositive value')
    return outLo + ((Math.log10(value) - llo) / span) * (outHi - outLo)
  }) as Scale
  scale.ticks = []
  for (let e = Math.ceil(llo - 1e-9); e <= Math.floor(lhi + 1e-9); e += 1) {
    scale.ticks.push(10 ** e)
  }
  if (scale.ticks.length < 2) scale.ticks = [lo, hi]
  scale.label = (t) => trimNumber(t)
  return scale
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(Math.abs(raw) || 1))
  const unit = raw / mag
  const nice = unit >= 5 ? 10 : unit >= 2 ? 5 : unit >= 1 ? 2 : 1
  return nice * mag
}

function trimNumber(t: number): string {
  const s = Math.abs(t) >= 1e4 || (Math.abs(t) < 1e-3 && t !== 0) ? t.toExponential(0) : String(Math.round(t * 1e6) / 1e6)
  return s
}

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#17becf']

export function polyline(points: Array<[number, number]>, stroke: string, width = 1.5): string {
  const attr = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(' ')
  return el('polyline', { points: attr, fill: 'none', stroke, 'stroke-width': width })
}

export function axisBox(x0: number, y0: number, x1: number, y1: number): string {
  return el('rect', {
    x: x0, y: y1, width: x1 - x0, height: y0 - y1,
    fill: 'none', stroke: '#333333', 'stroke-width': 1,
  })
}

export function text(x: number, y: number, content: string, anchor = 'middle', size = 11): string {
  return el('text', {
    x, y, 'text-anchor': anchor, 'font-size': size,
    'font-family': 'Helvetica, Arial, sans-serif', fill: '#111111',
  }, escapeXml(content))
}

export function escapeXml(raw: string): string {
  return raw.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
}
