#!/usr/bin/env python3
"""Generate the bundled synthetic treebank (data/synthetic/).

An invented suffix-marked mini-language so the pipeline runs offline:
nouns take case suffixes (-ka nominative, -mo accusative, -ne dative,
-su oblique), verbs end in -ti, pronouns and determiners are closed
classes. Trees are flat: arguments and their determiners hang off a
final root verb, so crop and rotate both have material to work with.

Deterministic: same seed, same files.
"""

import argparse
import random

NOUN_STEMS = [
    "taro", "miko", "satu", "veli", "ketu", "lima", "noru", "pesa",
    "rona", "silu", "tavi", "umo", "vika", "yole", "zanu", "helo",
]
VERB_STEMS = ["rau", "meki", "soli", "veda", "kano", "tupi", "nola", "hiva"]
PRONOUNS = ["minu", "sinu", "hanu"]
DETERMINERS = ["se", "yo"]

CASE = {"nsubj": "ka", "obj": "mo", "iobj": "ne", "obl": "su"}


def make_sentence(rng, sid):
    slots = ["nsubj"]
    for rel, prob in (("obj", 0.8), ("iobj", 0.45), ("obl", 0.5)):
        if rng.random() < prob:
            slots.append(rel)

    lines = []
    tokens = []  # (form, upos, head_offset_from_verb, deprel)
    for rel in slots:
        if rel == "nsubj" and rng.random() < 0.25:
            tokens.append((rng.choice(PRONOUNS), "PRON", "V", rel))
            continue
        noun = rng.choice(NOUN_STEMS) + CASE[rel]
        if rng.random() < 0.4:
            tokens.append((rng.choice(DETERMINERS), "DET", "N", "det"))
            tokens.append((noun, "NOUN", "V", rel))
        else:
            tokens.append((noun, "NOUN", "V", rel))

    verb_pos = len(tokens) + 1
    tokens.append((rng.choice(VERB_STEMS) + "ti", "VERB", "R", "root"))
    has_punct = rng.random() < 0.7
    if has_punct:
        tokens.append((".", "PUNCT", "V", "punct"))

    forms = [t[0] for t in tokens]
    lines.append(f"# sent_id = synth-{sid:04d}")
    lines.append("# text = " + " ".join(forms))
    for i, (form, upos, head_kind, rel) in enumerate(tokens, start=1):
        if head_kind == "R":
            head = 0
        elif head_kind == "N":
            head = i + 1  # determiner precedes its noun
        else:
            head = verb_pos
        lines.append(f"{i}\t{form}\t_\t{upos}\t_\t_\t{head}\t{rel}\t_\t_")
    lines.append("")
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20)
    ap.add_argument("--sentences", type=int, default=200)
    ap.add_argument("--outdir", default="data/synthetic")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    sentences = [make_sentence(rng, i + 1) for i in range(args.sentences)]

    n_train = int(args.sentences * 0.75)
    n_dev = int(args.sentences * 0.125)
    splits = {
        "train": sentences[:n_train],
        "dev": sentences[n_train : n_train + n_dev],
        "test": sentences[n_train + n_dev :],
    }
    for name, chunk in splits.items():
        path = f"{args.outdir}/{name}.conllu"
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(chunk))
            f.write("\n")
        print(f"{path}: {len(chunk)} sentences")


if __name__ == "__main__":
    main()
