/**
 * CLI: export VGG relu features of an image to an FT1 file, or decode an
 * FT1 feature file back to a PNG image.
 *
 * Usage:
 *   cli export <image> --layer relu4_1 --out feats.ft1 [--weights DIR | --random-weights] [--seed N]
 *   cli decode <file.ft1> --layer relu4_1 --out image.png [--decoder-weights DIR | --random-weights] [--seed N]
 */

import * as fs from 'fs'
import * as tf from '@tensorflow/tfjs'
import { initBackend } from './backend'
import { decodeFT1, encodeFT1 } from './ft1'
import { readImage, writePng } from './image'
import {
  DOWNLOAD_HINT,
  LAYER_CHANNELS,
  LAYER_STRIDE,
  LayerLabel,
  buildDecoder,
  buildEncoder,
  loadWeightsInto,
} from './vgg'

export interface ExportManifest {
  imagePath: string
  layer: LayerLabel
  ft1Path: string
  channels: number
  height: number
  width: number
}

interface Args {
  command: string
  input: string
  layer: LayerLabel
  out: string
  weights?: string
  decoderWeights?: string
  randomWeights: boolean
  seed: number
}

function parseArgs(argv: string[]): Args {
  const positional: string[] = []
  const flags: Record<string, string | boolean> = {}
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i]
    if (a.startsWith('--')) {
      const key = a.slice(2)
      if (key === 'random-weights') {
        flags[key] = true
      } else {
        flags[key] = argv[++i]
      }
    } else {
      positional.push(a)
    }
  }
  const [command, input] = positional
  if (!command || !input) {
    throw new Error('usage: cli <export|decode> <input> --layer L --out PATH [options]')
  }
  const layer = (flags['layer'] as string) ?? 'relu4_1'
  if (!(layer in LAYER_CHANNELS)) {
    throw new Error(`unknown layer ${layer}; expected one of ${Object.keys(LAYER_CHANNELS).join(', ')}`)
  }
  const out = flags['out'] as string
  if (!out) throw new Error('--out is required')
  return {
    command,
    input,
    layer: layer as LayerLabel,
    out,
    weights: flags['weights'] as string | undefined,
    decoderWeights: flags['decoder-weights'] as string | undefined,
    randomWeights: flags['random-weights'] === true,
    seed: parseInt((flags['seed'] as string) ?? '1', 10),
  }
}

async function prepareModel(
  build: (seed: number) => tf.LayersModel,
  weightsDir: string | undefined,
  randomWeights: boolean,
  seed: number,
): Promise<tf.LayersModel> {
  const model = build(seed)
  if (weightsDir) {
    await loadWeightsInto(model, weightsDir)
  } else if (!randomWeights) {
    throw new Error(DOWNLOAD_HINT)
  }
  return model
}

export async function runExport(args: Args): Promise<ExportManifest> {
  await initBackend()
  const image = readImage(args.input)
  const stride = LAYER_STRIDE[args.layer]
  if (image.height % stride || image.width % stride) {
    throw new Error(
      `image ${image.height}x${image.width} not divisible by the layer stride ${stride}`,
    )
  }
  const model = await prepareModel(
    (s) => buildEncoder(args.layer, s), args.weights, args.randomWeights, args.seed,
  )
  const input = tf.tensor4d(image.data, [1, image.height, image.width, 3])
  const output = model.predict(input) as tf.Tensor4D
  const chw = tf.transpose(output, [0, 3, 1, 2])
  const data = (await chw.data()) as Float32Array
  const [, c, h, w] = chw.shape
  fs.writeFileSync(args.out, encodeFT1(Float32Array.from(data), [c, h, w]))
  const manifest: ExportManifest = {
    imagePath: args.input,
    layer: args.layer,
    ft1Path: args.out,
    channels: c,
    height: h,
    width: w,
  }
  fs.writeFileSync(args.out + '.manifest.json', JSON.stringify(manifest, null, 2) + '\n')
  tf.dispose([input, output, chw])
  return manifest
}

export async function runDecode(args: Args): Promise<void> {
  await initBackend()
  const tensor = decodeFT1(fs.readFileSync(args.input))
  if (tensor.dims.length !== 3) {
    throw new Error(`expected a 3-d (C,H,W) feature tensor, got ${tensor.dims.join('x')}`)
  }
  const [c, h, w] = tensor.dims
  if (c !== LAYER_CHANNELS[args.layer]) {
    throw new Error(
      `feature file has ${c} channels but ${args.layer} expects ${LAYER_CHANNELS[args.layer]}`,
    )
  }
  const model = await prepareModel(
    (s) => buildDecoder(args.layer, s),
    args.decoderWeights,
    args.randomWeights,
    args.seed,
  )
  const chw = tf.tensor4d(tensor.data, [1, c, h, w])
  const hwc = tf.transpose(chw, [0, 2, 3, 1])
  const output = model.predict(hwc) as tf.Tensor4D
  const data = (await output.data()) as Float32Array
  const [, oh, ow] = output.shape
  writePng(args.out, { height: oh, width: ow, data: Float32Array.from(data) })
  tf.dispose([chw, hwc, output])
}

export async function main(argv: string[]): Promise<number> {
  let args: Args
  try {
    args = parseArgs(argv)
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err))
    return 1
  }
  try {
    if (args.command === 'export') {
      const manifest = await runExport(args)
      console.log(
        `wrote ${manifest.ft1Path}: ${manifest.channels}x${manifest.height}x${manifest.width} (${manifest.layer})`,
      )
    } else if (args.command === 'decode') {
      await runDecode(args)
      console.log(`wrote ${args.out}`)
    } else {
      console.error(`unknown command ${args.command}`)
      return 1
    }
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err))
    return 1
  }
  return 0
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code
  })
}
