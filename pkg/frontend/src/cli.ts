#!/usr/bin/env node
/** plots <decay|paths|excursion> --in <csv> [--fits <csv>] --out <svg> */

import { readFileSync, writeFileSync } from 'fs'
import { renderDecay } from './decay'
import { renderPaths } from './paths'
import { renderExcursion } from './excursion'

const USAGE = `usage:
  plots decay --in autocov.csv --fits fits.csv --out decay.svg
  plots paths --in paths.csv --out paths.svg
  plots excursion --in excursion.csv --out excursion.svg`

export interface PlotJob {
  kind: 'decay' | 'paths' | 'excursion'
  input: string
  fits?: string
  output: string
}

function parseArgs(argv: string[]): { kind: string, opts: Map<string, string> } {
  const [kind, ...rest] = argv
  const opts = new Map<string, string>()
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i]
    const value = rest[i + 1]
    if (!flag.startsWith('--') || value === undefined) {
      throw new UsageError(`bad argument '${flag}'`)
    }
    opts.set(flag.slice(2), value)
  }
  return { kind: kind ?? '', opts }
}

class UsageError extends Error {}

export function run(argv: string[]): number {
  let parsed
  try {
    parsed = parseArgs(argv)
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err))
    console.error(USAGE)
    return 2
  }
  const { kind, opts } = parsed
  const input = opts.get('in')
  const output = opts.get('out')
  if (!input || !output || !['decay', 'paths', 'excursion'].includes(kind)) {
    console.error(USAGE)
    return 2
  }
  if (kind === 'decay' && !opts.get('fits')) {
    console.error('decay needs --fits fits.csv')
    console.error(USAGE)
    return 2
  }
  const job: PlotJob = {
    kind: kind as PlotJob['kind'],
    input,
    fits: opts.get('fits'),
    output,
  }
  try {
    let svg: string
    if (job.kind === 'decay') {
      svg = renderDecay(readFileSync(job.input, 'utf8'), readFileSync(job.fits!, 'utf8'))
    } else if (job.kind === 'paths') {
      svg = renderPaths(readFileSync(job.input, 'utf8'))
    } else {
      svg = renderExcursion(readFileSync(job.input, 'utf8'))
    }
    writeFileSync(job.output, svg)
    console.log(`wrote ${job.output}`)
    return 0
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`)
    return 1
  }
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)))
}
