#!/usr/bin/env python3
"""Regenerates the files under fixtures/.

images/  Public-domain photographs shipped with scikit-image, downsampled
         to 128x128: astronaut (NASA) and coffee (CC0).
mnist/   A synthetic 28x28 digit set (seven-segment glyphs with jitter and
         noise), a hand-built 784-128-10 network in SAPW format, and the
         reference report whose `predictions` come from a plain numpy
         integer implementation of the quantized inference.

Usage: python3 scripts/make_fixtures.py [fixtures-dir]
"""

import json
import struct
import sys
from pathlib import Path

import numpy as np
from skimage import data, transform

SIZE = 128
SEED = 20241015


def write_pnm(path, img):
    img = np.asarray(img, dtype=np.uint8)
    magic = b"P5" if img.ndim == 2 else b"P6"
    h, w = img.shape[:2]
    path.write_bytes(magic + f"\n{w} {h}\n255\n".encode() + img.tobytes())


def downsample(img):
    out = transform.resize(img, (SIZE, SIZE), anti_aliasing=True, preserve_range=True)
    return np.clip(np.round(out), 0, 255).astype(np.uint8)


def gray(rgb):
    return np.clip(np.round(rgb.astype(np.float64).mean(axis=2)), 0, 255).astype(np.uint8)


def make_images(root):
    root.mkdir(parents=True, exist_ok=True)
    astronaut = downsample(data.astronaut())
    coffee = data.coffee()
    h, w = coffee.shape[:2]
    side = min(h, w)
    coffee = downsample(coffee[(h - side) // 2:(h + side) // 2, (w - side) // 2:(w + side) // 2])
    write_pnm(root / "astronaut.ppm", astronaut)
    write_pnm(root / "astronaut.pgm", gray(astronaut))
    write_pnm(root / "coffee.pgm", gray(coffee))


# Seven-segment layout: a (top), b (top right), c (bottom right), d (bottom),
# e (bottom left), f (top left), g (middle).
DIGIT_SEGMENTS = {
    0: "abcdef", 1: "bc", 2: "abdeg", 3: "abcdg", 4: "bcfg",
    5: "acdfg", 6: "acdefg", 7: "abc", 8: "abcdefg", 9: "abcdfg",
}
SEGMENTS = "abcdefg"


GLYPH = (6, 22, 2, 13, 26)  # x0, x1, y_top, y_mid, y_bottom


def segment_mask(seg, dx=0, dy=0, thick=2):
    """Boolean 28x28 mask of one stroke of a glyph, shifted by (dx, dy)."""
    x0, x1, y0, ym, y1 = GLYPH
    t = thick
    boxes = {
        "a": (x0, x1, y0, y0 + t), "g": (x0, x1, ym, ym + t), "d": (x0, x1, y1 - t, y1),
        "f": (x0, x0 + t, y0, ym + t), "b": (x1 - t, x1, y0, ym + t),
        "e": (x0, x0 + t, ym, y1), "c": (x1 - t, x1, ym, y1),
    }
    return _box(boxes[seg], dx, dy)


def detector_mask(seg):
    """Core of a stroke without its corners, widened to tolerate +-2 px shifts."""
    x0, x1, y0, ym, y1 = GLYPH
    boxes = {
        "a": (x0 + 5, x1 - 5, y0 - 2, y0 + 5), "g": (x0 + 5, x1 - 5, ym - 2, ym + 5),
        "d": (x0 + 5, x1 - 5, y1 - 5, y1 + 2),
        "f": (x0 - 2, x0 + 5, y0 + 5, ym - 3), "b": (x1 - 5, x1 + 2, y0 + 5, ym - 3),
        "e": (x0 - 2, x0 + 5, ym + 6, y1 - 5), "c": (x1 - 5, x1 + 2, ym + 6, y1 - 5),
    }
    return _box(boxes[seg], 0, 0)


def _box(box, dx, dy):
    xa, xb, ya, yb = box
    m = np.zeros((28, 28), dtype=bool)
    m[max(ya + dy, 0):min(yb + dy, 28), max(xa + dx, 0):min(xb + dx, 28)] = True
    return m


def render(digit, rng):
    dx, dy = rng.integers(-2, 3, size=2)
    thick = int(rng.integers(2, 4))
    img = np.zeros((28, 28))
    for seg in DIGIT_SEGMENTS[digit]:
        img[segment_mask(seg, dx, dy, thick)] = rng.uniform(170, 255)
    # occasional dropped or spurious segment makes the task non-trivial
    if rng.random() < 0.08:
        seg = SEGMENTS[rng.integers(7)]
        img[segment_mask(seg, dx, dy, thick)] = 0 if seg in DIGIT_SEGMENTS[digit] else 200
    img += rng.normal(0, 18, size=img.shape)
    img[img < 30] = 0
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


def make_network(rng):
    """Float weights of a 784-128-10 network: 7 segment detectors, 121 noise units."""
    w1 = np.zeros((128, 784))
    for j, seg in enumerate(SEGMENTS):
        on = detector_mask(seg).astype(float)
        w1[j] = on.ravel() / on.sum()
    w1[7:] = rng.normal(0, 0.01, size=(121, 784)) * (rng.random((121, 784)) < 0.1)
    b1 = np.zeros(128)
    b1[:7] = -0.1
    w2 = rng.normal(0, 0.02, size=(10, 128))
    b2 = np.zeros(10)
    for c, segs in DIGIT_SEGMENTS.items():
        for j, seg in enumerate(SEGMENTS):
            w2[c, j] = 1.0 if seg in segs else -1.0
        b2[c] = -0.1 * len(segs)
    return w1, b1, w2, b2


def float_forward(w1, b1, w2, b2, x):
    h = np.maximum(x @ w1.T + b1, 0)
    return (h @ w2.T + b2).argmax(axis=1), h


def quantize(w):
    scale = np.abs(w).max() / 127.0
    return np.clip(np.round(w / scale), -127, 127).astype(np.int8), scale


def int_reference(layers, pixels):
    """Plain integer inference; must match the Rust network bit for bit."""
    act = pixels.astype(np.int64)
    for i, (q, bias, ws, ins, outs) in enumerate(layers):
        acc = act @ q.astype(np.int64).T + bias.astype(np.int64)
        if i == len(layers) - 1:
            return acc.argmax(axis=1)
        factor = ws * ins / outs
        req = np.floor(acc.astype(np.float64) * factor + 0.5)
        act = np.where(acc > 0, np.clip(req, 0, 255), 0).astype(np.int64)


def make_mnist(root, count=1000):
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    labels = rng.integers(0, 10, size=count).astype(np.uint8)
    pixels = np.stack([render(int(d), rng) for d in labels]).reshape(count, 784)

    w1, b1, w2, b2 = make_network(rng)
    x = pixels / 255.0
    float_pred, hidden = float_forward(w1, b1, w2, b2, x)

    in_scale1 = 1.0 / 255.0
    q1, ws1 = quantize(w1)
    out_scale1 = np.percentile(hidden.max(axis=1), 99) / 255.0
    bias1 = np.round(b1 / (ws1 * in_scale1)).astype(np.int32)
    q2, ws2 = quantize(w2)
    bias2 = np.round(b2 / (ws2 * out_scale1)).astype(np.int32)
    layers = [
        (q1, bias1, ws1, in_scale1, out_scale1),
        (q2, bias2, ws2, out_scale1, 1.0),
    ]
    quant_pred = int_reference(layers, pixels)

    blob = b"SAPW" + struct.pack("<II", 1, len(layers))
    for q, bias, ws, ins, outs in layers:
        rows, cols = q.shape
        blob += struct.pack("<IIddd", rows, cols, ws, ins, outs)
        blob += q.astype(np.int8).tobytes() + bias.astype("<i4").tobytes()
    (root / "synthetic.sapw").write_bytes(blob)
    (root / "synthetic-images-idx3-ubyte").write_bytes(
        struct.pack(">IIII", 0x803, count, 28, 28) + pixels.astype(np.uint8).tobytes())
    (root / "synthetic-labels-idx1-ubyte").write_bytes(
        struct.pack(">II", 0x801, count) + labels.tobytes())
    report = {
        "float_accuracy": float((float_pred == labels).mean()),
        "quantized_reference_accuracy": float((quant_pred == labels).mean()),
        "predictions": [int(p) for p in quant_pred],
    }
    (root / "synthetic-reference.json").write_text(json.dumps(report) + "\n")
    agree = float((quant_pred == float_pred).mean())
    print(f"float acc {report['float_accuracy']:.3f}  "
          f"quantized acc {report['quantized_reference_accuracy']:.3f}  "
          f"float/quantized agreement {agree:.3f}")


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures"
    make_images(root / "images")
    make_mnist(root / "mnist")


if __name__ == "__main__":
    main()
