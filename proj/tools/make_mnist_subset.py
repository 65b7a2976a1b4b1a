#!/usr/bin/env python3
"""Builds the bundled MNIST subset under data/mnist/.

Source: the 5,000-digit MNIST excerpt (500 per class) shipped inside the
mlxtend wheel as mlxtend/data/data/mnist_5k.csv.gz. The digits are split
into 4,000 training and 1,000 test samples (100 per class), shuffled with a
fixed seed and written as gzip-compressed IDX files.

usage: make_mnist_subset.py <mlxtend wheel or mnist_5k.csv.gz> <out dir>
"""
import gzip
import io
import struct
import sys
import zipfile
from pathlib import Path

import numpy as np


def read_source(path: Path) -> np.ndarray:
    if path.suffix == ".whl":
        with zipfile.ZipFile(path) as z:
            raw = z.read("mlxtend/data/data/mnist_5k.csv.gz")
    else:
        raw = path.read_bytes()
    return np.loadtxt(io.BytesIO(gzip.decompress(raw)), delimiter=",").astype(np.uint8)


def write_idx(path: Path, images: np.ndarray, labels: np.ndarray, stem: str) -> None:
    with gzip.GzipFile(path / f"{stem}-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 2051, len(images), 28, 28))
        f.write(images.tobytes())
    with gzip.GzipFile(path / f"{stem}-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 2049, len(labels)))
        f.write(labels.tobytes())


def main() -> None:
    data = read_source(Path(sys.argv[1]))
    out = Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    images, labels = data[:, :784], data[:, 784]
    rng = np.random.default_rng(20180101)
    test_idx, train_idx = [], []
    for digit in range(10):
        idx = rng.permutation(np.flatnonzero(labels == digit))
        test_idx.extend(idx[:100])
        train_idx.extend(idx[100:])
    train_idx = rng.permutation(train_idx)
    test_idx = rng.permutation(test_idx)
    write_idx(out, images[train_idx], labels[train_idx], "train")
    write_idx(out, images[test_idx], labels[test_idx], "t10k")


if __name__ == "__main__":
    main()
