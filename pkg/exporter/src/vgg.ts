/**
 * VGG-19 encoder prefixes (through relu{1..4}_1) and the symmetric
 * decoders that invert them with nearest-neighbor up-sampling.
 *
 * Layer naming follows the Keras VGG-19 convention (block4_conv1, ...)
 * so weights can be copied from a converted pretrained model. Without a
 * weights directory the models can be built with seeded random weights
 * for structural tests; those produce no meaningful stylization.
 */

import * as fs from 'fs'
import * as path from 'path'
import * as tf from '@tensorflow/tfjs'

export type LayerLabel = 'relu1_1' | 'relu2_1' | 'relu3_1' | 'relu4_1'

export const LAYER_CHANNELS: Record<LayerLabel, number> = {
  relu1_1: 64,
  relu2_1: 128,
  relu3_1: 256,
  relu4_1: 512,
}

/** Downsampling factor from image to features. */
export const LAYER_STRIDE: Record<LayerLabel, number> = {
  relu1_1: 1,
  relu2_1: 2,
  relu3_1: 4,
  relu4_1: 8,
}

// 'P' marks a 2x2 max pool; numbers are conv output channels.
type Token = number | 'P'

const ENCODER_TOKENS: Record<LayerLabel, Token[]> = {
  relu1_1: [64],
  relu2_1: [64, 64, 'P', 128],
  relu3_1: [64, 64, 'P', 128, 128, 'P', 256],
  relu4_1: [64, 64, 'P', 128, 128, 'P', 256, 256, 256, 256, 'P', 512],
}

function kerasConvName(block: number, conv: number): string {
  return `block${block}_conv${conv}`
}

export function buildEncoder(layer: LayerLabel, seed = 1): tf.LayersModel {
  const model = tf.sequential()
  let block = 1
  let conv = 1
  let first = true
  for (const token of ENCODER_TOKENS[layer]) {
    if (token === 'P') {
      model.add(tf.layers.maxPooling2d({ poolSize: 2, strides: 2 }))
      block += 1
      conv = 1
      continue
    }
    model.add(
      tf.layers.conv2d({
        filters: token,
        kernelSize: 3,
        padding: 'same',
        activation: 'relu',
        name: kerasConvName(block, conv),
        kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 97 * block + conv }),
        ...(first ? { inputShape: [null as unknown as number, null as unknown as number, 3] } : {}),
      }),
    )
    conv += 1
    first = false
  }
  return model
}

export function buildDecoder(layer: LayerLabel, seed = 1): tf.LayersModel {
  const tokens = ENCODER_TOKENS[layer]
  // Walk the encoder backwards: each conv inverts to a conv emitting its
  // input channel count; each pool inverts to nearest-neighbor upsampling.
  const outputs: Token[] = []
  let inChannels = 3
  for (const token of tokens) {
    if (token === 'P') {
      outputs.push('P')
    } else {
      outputs.push(inChannels)
      inChannels = token
    }
  }
  outputs.reverse()
  const model = tf.sequential()
  let first = true
  outputs.forEach((token, i) => {
    if (token === 'P') {
      model.add(tf.layers.upSampling2d({ size: [2, 2], interpolation: 'nearest' }))
      return
    }
    const last = i === outputs.length - 1
    model.add(
      tf.layers.conv2d({
        filters: token,
        kernelSize: 3,
        padding: 'same',
        activation: last ? undefined : 'relu',
        name: `dec_${layer}_conv${i}`,
        kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 31 * i }),
        ...(first ? { inputShape: [null as unknown as number, null as unknown as number, LAYER_CHANNELS[layer]] } : {}),
      }),
    )
    first = false
  })
  return model
}

/** IO handler that reads a tfjs layers-model directory from local disk. */
function diskIoHandler(modelJsonPath: string): tf.io.IOHandler {
  return {
    load: async () => {
      const dir = path.dirname(modelJsonPath)
      const modelJson = JSON.parse(fs.readFileSync(modelJsonPath, 'utf8'))
      const manifest = modelJson.weightsManifest as Array<{
        paths: string[]
        weights: tf.io.WeightsManifestEntry[]
      }>
      const specs: tf.io.WeightsManifestEntry[] = []
      const buffers: Buffer[] = []
      for (const group of manifest) {
        specs.push(...group.weights)
        for (const p of group.paths) {
          buffers.push(fs.readFileSync(path.join(dir, p)))
        }
      }
      const blob = Buffer.concat(buffers)
      return {
        modelTopology: modelJson.modelTopology,
        format: modelJson.format,
        generatedBy: modelJson.generatedBy,
        convertedBy: modelJson.convertedBy,
        weightSpecs: specs,
        weightData: blob.buffer.slice(blob.byteOffset, blob.byteOffset + blob.byteLength),
      }
    },
  }
}

/**
 * Copy pretrained weights into a freshly built model by layer name.
 * The source is a tfjs layers-model directory (model.json + shards).
 */
export async function loadWeightsInto(model: tf.LayersModel, weightsDir: string): Promise<void> {
  const modelJson = path.join(weightsDir, 'model.json')
  if (!fs.existsSync(modelJson)) {
    throw new Error(`no model.json in ${weightsDir}`)
  }
  const source = await tf.loadLayersModel(diskIoHandler(modelJson))
  for (const layer of model.layers) {
    if (layer.getWeights().length === 0) continue
    const src = source.layers.find((l) => l.name === layer.name)
    if (!src) {
      throw new Error(`pretrained model has no layer named ${layer.name}`)
    }
    layer.setWeights(src.getWeights())
  }
  source.dispose()
}

export const DOWNLOAD_HINT = `No pretrained weights found. Provide a tfjs layers-model directory via
--weights (encoder) or --decoder-weights (decoder), e.g. a VGG-19 model
converted with:

    pip install tensorflowjs
    python -c "import tensorflow as tf; tf.keras.applications.VGG19(weights='imagenet').save('vgg19.h5')"
    tensorflowjs_converter --input_format keras vgg19.h5 ./vgg19-tfjs

or pass --random-weights for seeded random initialization (structural
testing only; no meaningful stylization).`
