#!/usr/bin/env python3
"""Builds the bundled MNIST IDX fixtures under data/mnist/.

Pulls the `mnist` npm package (which ships 10,000 raw MNIST samples as JSON,
~1,000 per digit class), recovers the original 8-bit grayscale values, and
writes a balanced 1,000-image training set and a disjoint 1,000-image test
set in the standard IDX format (big-endian, magic 0x00000803 / 0x00000801).

Usage: python3 scripts/fetch_mnist.py [--out data/mnist]
Requires: npm (network access to a registry mirror).
"""

import argparse
import json
import os
import struct
import subprocess
import sys
import tarfile
import tempfile

PER_CLASS_TRAIN = 100
PER_CLASS_TEST = 100
SIDE = 28


def fetch_package(workdir: str) -> str:
    subprocess.run(["npm", "pack", "mnist"], cwd=workdir, check=True,
                   stdout=subprocess.DEVNULL)
    tgz = next(f for f in os.listdir(workdir) if f.endswith(".tgz"))
    with tarfile.open(os.path.join(workdir, tgz)) as tf:
        tf.extractall(workdir)
    return os.path.join(workdir, "package", "src", "digits")


def load_class(digits_dir: str, digit: int):
    with open(os.path.join(digits_dir, f"{digit}.json")) as f:
        flat = json.load(f)["data"]
    n = len(flat) // (SIDE * SIDE)
    images = []
    for i in range(n):
        chunk = flat[i * SIDE * SIDE:(i + 1) * SIDE * SIDE]
        images.append(bytes(round(v * 255) for v in chunk))
    return images


def write_idx_images(path: str, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), SIDE, SIDE))
        for img in images:
            f.write(img)


def write_idx_labels(path: str, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/mnist")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        digits_dir = fetch_package(tmp)
        per_class = [load_class(digits_dir, d) for d in range(10)]

    for d, imgs in enumerate(per_class):
        if len(imgs) < PER_CLASS_TRAIN + PER_CLASS_TEST:
            sys.exit(f"class {d}: only {len(imgs)} samples")

    # Round-robin over classes so every prefix of the files stays balanced.
    train_imgs, train_labels, test_imgs, test_labels = [], [], [], []
    for i in range(PER_CLASS_TRAIN):
        for d in range(10):
            train_imgs.append(per_class[d][i])
            train_labels.append(d)
    for i in range(PER_CLASS_TRAIN, PER_CLASS_TRAIN + PER_CLASS_TEST):
        for d in range(10):
            test_imgs.append(per_class[d][i])
            test_labels.append(d)

    write_idx_images(os.path.join(args.out, "train-images-idx3-ubyte"), train_imgs)
    write_idx_labels(os.path.join(args.out, "train-labels-idx1-ubyte"), train_labels)
    write_idx_images(os.path.join(args.out, "test-images-idx3-ubyte"), test_imgs)
    write_idx_labels(os.path.join(args.out, "test-labels-idx1-ubyte"), test_labels)
    print(f"wrote {len(train_imgs)} train / {len(test_imgs)} test images to {args.out}")


if __name__ == "__main__":
    main()
