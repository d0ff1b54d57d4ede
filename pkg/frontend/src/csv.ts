/** Minimal CSV reading for the harness output schemas (no quoting, LF rows). */

export interface Table {
  header: string[]
  rows: string[][]
}

export function parseCsv(text: string): Table {
  const lines = text.split('\n').filter((line) => line.trim().length > 0)
  if (lines.length === 0) throw new Error('empty CSV input')
  const header = lines[0].split(',').map((h) => h.trim())
  const rows = lines.slice(1).map((line) => line.split(',').map((c) => c.trim()))
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new Error(`CSV row has ${row.length} fields, header has ${header.length}`)
    }
  }
  return { header, rows }
}

/** Validate that every required column is present; returns column indices. */
export function requireColumns(table: Table, required: string[], what: string): Map<string, number> {
  const index = new Map<string, number>()
  for (const name of required) {
    const i = table.header.indexOf(name)
    if (i < 0) {
      throw new Error(`${what}: missing column '${name}' (header: ${table.header.join(',')})`)
    }
    index.set(name, i)
  }
  return index
}

export function toNumber(raw: string, context: string): number {
  const value = Number(raw)
  if (!Number.isFinite(value)) throw new Error(`${context}: not a number: '${raw}'`)
  return value
}
