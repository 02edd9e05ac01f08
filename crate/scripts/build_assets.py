"""Regenerate the plain-text data assets under crates/core/data/.

Inputs (all from PyPI):
  textblob-aptagger 0.2.0   averaged-perceptron weights (MIT)
  spacy-lookups-data 1.0.5  WordNet-derived lemma tables (WordNet 3.0 license)
  wordfreq 3.x              frequency-ranked English word list

Usage: python3 scripts/build_assets.py <aptagger pickle> <spacy lookups data dir>
"""
import gzip
import json
import os
import pickle
import sys

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data")


def write_lines(path, lines, header):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for h in header:
            f.write("# " + h + "\n")
        for line in lines:
            f.write(line + "\n")


def tagger(pickle_path):
    weights, tagdict, classes = pickle.load(open(pickle_path, "rb"), encoding="latin1")
    lines = []
    for feat in sorted(weights):
        parts = [f"{tag} {w!r}" for tag, w in sorted(weights[feat].items()) if w != 0]
        if parts:
            lines.append(feat + "\t" + "\t".join(parts))
    write_lines(os.path.join(OUT, "tagger", "weights.tsv"), lines,
                ["averaged perceptron weights: feature<TAB>TAG weight<TAB>TAG weight ...",
                 "classes: " + " ".join(sorted(classes))])
    write_lines(os.path.join(OUT, "tagger", "tagdict.tsv"),
                [f"{w}\t{t}" for w, t in sorted(tagdict.items())],
                ["unambiguous frequent words: word<TAB>TAG"])


def lemmas(data_dir):
    load = lambda name: json.load(gzip.open(os.path.join(data_dir, name)))
    exc = load("en_lemma_exc.json.gz")
    index = load("en_lemma_index.json.gz")
    rules = load("en_lemma_rules.json.gz")
    for pos in ("noun", "verb", "adj", "adv"):
        write_lines(os.path.join(OUT, "lemma", pos + ".exc"),
                    [f"{w} {' '.join(v)}" for w, v in sorted(exc.get(pos, {}).items())],
                    [f"{pos} exceptions: inflected lemma..."])
        write_lines(os.path.join(OUT, "lemma", pos + ".idx"),
                    sorted(w for w in index.get(pos, []) if " " not in w),
                    [f"{pos} base forms"])
    lines = []
    for pos in ("noun", "verb", "adj"):
        for old, new in rules[pos]:
            lines.append(f"{pos}\t{old}\t{new}")
    write_lines(os.path.join(OUT, "lemma", "rules.tsv"), lines,
                ["suffix rules in application order: pos<TAB>suffix<TAB>replacement"])


def common_words():
    from wordfreq import top_n_list

    words = [w for w in top_n_list("en", 3000) if w.isalpha() and w.isascii()]
    write_lines(os.path.join(OUT, "words", "common_en.txt"), words[:2000],
                ["most frequent English words, most frequent first (wordfreq)"])


if __name__ == "__main__":
    tagger(sys.argv[1])
    lemmas(sys.argv[2])
    common_words()
