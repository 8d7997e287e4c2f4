/** Deterministic tfjs backend selection: wasm when available, else cpu. */

import * as path from 'path'
import * as tf from '@tensorflow/tfjs'

let ready: Promise<void> | null = null

export function initBackend(): Promise<void> {
  if (!ready) {
    ready = (async () => {
      try {
        const wasm = require('@tensorflow/tfjs-backend-wasm')
        wasm.setWasmPaths(
          path.join(path.dirname(require.resolve('@tensorflow/tfjs-backend-wasm')), '/'),
        )
        // single-threaded for reproducible accumulation order
        wasm.setThreadsCount(1)
        await tf.setBackend('wasm')
      } catch {
        await tf.setBackend('cpu')
      }
      await tf.ready()
    })()
  }
  return ready
}
