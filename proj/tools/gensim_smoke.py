#!/usr/bin/env python3
"""Load compskip exports with gensim and compare them with the text export.

Usage: gensim_smoke.py VECTORS.txt VECTORS.bin
"""
import sys

import numpy as np
from gensim.models import KeyedVectors


def read_text(path):
    with open(path, encoding="utf-8") as f:
        n, d = map(int, f.readline().split())
        rows = [line.rstrip("\n").split(" ") for line in f]
    assert len(rows) == n, f"expected {n} rows, got {len(rows)}"
    return [r[0] for r in rows], np.array([[float(x) for x in r[1:]] for r in rows], dtype=np.float32), d


def main():
    text_path, bin_path = sys.argv[1], sys.argv[2]
    words, ref, d = read_text(text_path)
    for path, binary in ((text_path, False), (bin_path, True)):
        kv = KeyedVectors.load_word2vec_format(path, binary=binary)
        assert kv.index_to_key == words, "word order differs"
        assert kv.vector_size == d
        assert np.array_equal(kv.vectors, ref), "vectors differ"
        print(f"{path}: {len(kv)} x {kv.vector_size} loaded, identical to text export")
    probe = words[0]
    print(f"most_similar({probe!r}):", kv.most_similar(probe, topn=3))


if __name__ == "__main__":
    main()
