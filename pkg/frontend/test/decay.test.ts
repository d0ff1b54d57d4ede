import assert from 'node:assert/strict'
import { test } from 'node:test'
import { decayCurves, renderDecay } from '../src/decay'
import { fixture } from './helpers'

function syntheticPowerLaws(): { autocov: string, fits: string } {
  // exact power laws: rho = e^c tau^slope -> normalized curve tau^slope
  const taus = [1, 2, 3, 4, 5, 6]
  const targets = [
    { name: 'field', slope: -0.4, intercept: 0.3 },
    { name: 'resid1', slope: -0.8, intercept: -2.0 },
  ]
  let autocov = 'target,tau,rho_avg\n'
  let fits = 'target,levels,intercept,slope,q_T,B,T\n'
  for (const t of targets) {
    fits += `${t.name},,${t.intercept},${t.slope},6,10,100\n`
    for (const tau of taus) {
      autocov += `${t.name},${tau},${Math.exp(t.intercept) * tau ** t.slope}\n`
    }
  }
  return { autocov, fits }
}

test('synthetic power laws give straight lines in log-log space', () => {
  const { autocov, fits } = syntheticPowerLaws()
  const curves = decayCurves(autocov, fits)
  for (const curve of curves) {
    const logs = curve.points.map(([tau, v]) => [Math.log(tau), Math.log(v)])
    const slope0 = (logs[1][1] - logs[0][1]) / (logs[1][0] - logs[0][0])
    for (let i = 2; i < logs.length; i++) {
      const slope = (logs[i][1] - logs[i - 1][1]) / (logs[i][0] - logs[i - 1][0])
      assert.ok(Math.abs(slope - slope0) < 1e-9, `collinear for ${curve.target}`)
    }
    assert.ok(Math.abs(slope0 - curve.slope) < 1e-9)
  }
  const svg = renderDecay(autocov, fits)
  assert.match(svg, /^<svg /)
  assert.match(svg, /polyline/)
})

test('fixture run: residual sits below the field at the largest lag', () => {
  const curves = decayCurves(fixture('autocov.csv'), fixture('fits.csv'))
  const byName = new Map(curves.map((c) => [c.target, c]))
  const field = byName.get('field')!
  const resid = byName.get('resid1')!
  const last = (c: typeof field) => c.points[c.points.length - 1]
  assert.equal(last(field)[0], last(resid)[0])
  assert.ok(last(resid)[1] < last(field)[1],
    `resid ${last(resid)[1]} should be below field ${last(field)[1]}`)
})

test('fixture renders without error and is deterministic', () => {
  const a = renderDecay(fixture('autocov.csv'), fixture('fits.csv'))
  const b = renderDecay(fixture('autocov.csv'), fixture('fits.csv'))
  assert.equal(a, b)
  assert.match(a, /autocovariance/)
})

test('missing column is reported with a schema message', () => {
  assert.throws(() => renderDecay('target,tau\nfield,1\n', fixture('fits.csv')),
    /missing column 'rho_avg'/)
})
