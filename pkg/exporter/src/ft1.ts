/**
 * FT1 binary tensor format, byte-compatible with the engine's reader.
 *
 * Layout (little-endian): magic "FT1\0", u8 version (1), u8 dtype
 * (1 = float32), u8 ndim, u8 reserved (0), ndim x u32 dims, then the
 * row-major float32 payload.
 */

const MAGIC = Buffer.from([0x46, 0x54, 0x31, 0x00])
const VERSION = 1
const DTYPE_F32 = 1

export interface Ft1Tensor {
  dims: number[]
  data: Float32Array
}

export function encodeFT1(data: Float32Array, dims: number[]): Buffer {
  const count = dims.reduce((a, b) => a * b, 1)
  if (count !== data.length) {
    throw new Error(`dims ${dims.join('x')} do not match payload length ${data.length}`)
  }
  if (dims.length < 1 || dims.length > 255) {
    throw new Error(`unsupported ndim ${dims.length}`)
  }
  const header = Buffer.alloc(8 + 4 * dims.length)
  MAGIC.copy(header, 0)
  header.writeUInt8(VERSION, 4)
  header.writeUInt8(DTYPE_F32, 5)
  header.writeUInt8(dims.length, 6)
  header.writeUInt8(0, 7)
  dims.forEach((d, i) => header.writeUInt32LE(d, 8 + 4 * i))
  const payload = Buffer.alloc(4 * count)
  for (let i = 0; i < count; i++) {
    payload.writeFloatLE(data[i], 4 * i)
  }
  return Buffer.concat([header, payload])
}

export function decodeFT1(buf: Buffer): Ft1Tensor {
  if (buf.length < 8 || !buf.subarray(0, 4).equals(MAGIC)) {
    throw new Error('not an FT1 file (bad magic)')
  }
  const version = buf.readUInt8(4)
  const dtype = buf.readUInt8(5)
  const ndim = buf.readUInt8(6)
  const reserved = buf.readUInt8(7)
  if (version !== VERSION) throw new Error(`unsupported FT1 version ${version}`)
  if (dtype !== DTYPE_F32) throw new Error(`unsupported FT1 dtype ${dtype}`)
  if (reserved !== 0) throw new Error(`nonzero reserved byte ${reserved}`)
  const offset = 8 + 4 * ndim
  if (buf.length < offset) throw new Error('truncated FT1 header')
  const dims: number[] = []
  for (let i = 0; i < ndim; i++) {
    dims.push(buf.readUInt32LE(8 + 4 * i))
  }
  const count = dims.reduce((a, b) => a * b, 1)
  if (buf.length - offset !== 4 * count) {
    throw new Error(`payload length ${buf.length - offset} does not match dims ${dims.join('x')}`)
  }
  const data = new Float32Array(count)
  for (let i = 0; i < count; i++) {
    data[i] = buf.readFloatLE(offset + 4 * i)
  }
  return { dims, data }
}
