/** PNG and PPM (P6) image I/O; pixels as H x W x 3 floats in [0, 1]. */

import * as fs from 'fs'
import { PNG } from 'pngjs'

export interface RgbImage {
  height: number
  width: number
  /** row-major H x W x 3, values in [0, 1] */
  data: Float32Array
}

function fromPng(buf: Buffer): RgbImage {
  const png = PNG.sync.read(buf)
  const out = new Float32Array(png.height * png.width * 3)
  for (let i = 0; i < png.height * png.width; i++) {
    out[3 * i] = png.data[4 * i] / 255
    out[3 * i + 1] = png.data[4 * i + 1] / 255
    out[3 * i + 2] = png.data[4 * i + 2] / 255
  }
  return { height: png.height, width: png.width, data: out }
}

function fromPpm(buf: Buffer): RgbImage {
  // P6 <width> <height> <maxval>\n followed by binary RGB triples
  let pos = 2
  const fields: number[] = []
  while (fields.length < 3) {
    while (pos < buf.length && /\s/.test(String.fromCharCode(buf[pos]))) pos++
    if (buf[pos] === 0x23) { // comment line
      while (pos < buf.length && buf[pos] !== 0x0a) pos++
      continue
    }
    let start = pos
    while (pos < buf.length && !/\s/.test(String.fromCharCode(buf[pos]))) pos++
    fields.push(parseInt(buf.subarray(start, pos).toString('ascii'), 10))
  }
  pos++ // single whitespace after maxval
  const [width, height, maxval] = fields
  if (!(width > 0 && height > 0 && maxval === 255)) {
    throw new Error(`unsupported PPM header: ${width}x${height}, maxval ${maxval}`)
  }
  const count = width * height * 3
  if (buf.length - pos < count) throw new Error('truncated PPM payload')
  const out = new Float32Array(count)
  for (let i = 0; i < count; i++) {
    out[i] = buf[pos + i] / 255
  }
  return { height, width, data: out }
}

export function readImage(path: string): RgbImage {
  const buf = fs.readFileSync(path)
  if (buf.length >= 2 && buf[0] === 0x50 && buf[1] === 0x36) {
    return fromPpm(buf)
  }
  return fromPng(buf)
}

export function writePng(path: string, image: RgbImage): void {
  const png = new PNG({ height: image.height, width: image.width })
  for (let i = 0; i < image.height * image.width; i++) {
    for (let c = 0; c < 3; c++) {
      const v = Math.min(1, Math.max(0, image.data[3 * i + c]))
      png.data[4 * i + c] = Math.floor(v * 255 + 0.5)
    }
    png.data[4 * i + 3] = 255
  }
  fs.writeFileSync(path, PNG.sync.write(png))
}
