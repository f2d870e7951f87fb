#!/usr/bin/env python3
"""Re-encode the UCI Adult training file into 123 binary svmlight features.

The encoding follows the usual a1a..a9a layout: continuous attributes are cut
into quintiles (capital gain/loss into zero / non-zero), categorical attributes
get one indicator per category, in the order listed in adult.names. Missing
values ('?') produce no feature.

The 32561 rows are shuffled with a fixed seed and split 11220 / 21341, the
same sizes as the a6a train / test files.

    python3 tools/adult_to_svmlight.py adult.data data/
"""
import gzip
import os
import random
import sys

CATEGORIES = {
    1: "Private, Self-emp-not-inc, Self-emp-inc, Federal-gov, Local-gov, State-gov, Without-pay, Never-worked",
    3: "Bachelors, Some-college, 11th, HS-grad, Prof-school, Assoc-acdm, Assoc-voc, 9th, 7th-8th, 12th, Masters, 1st-4th, 10th, Doctorate, 5th-6th, Preschool",
    5: "Married-civ-spouse, Divorced, Never-married, Separated, Widowed, Married-spouse-absent, Married-AF-spouse",
    6: "Tech-support, Craft-repair, Other-service, Sales, Exec-managerial, Prof-specialty, Handlers-cleaners, Machine-op-inspct, Adm-clerical, Farming-fishing, Transport-moving, Priv-house-serv, Protective-serv, Armed-Forces",
    7: "Wife, Own-child, Husband, Not-in-family, Other-relative, Unmarried",
    8: "White, Asian-Pac-Islander, Amer-Indian-Eskimo, Other, Black",
    9: "Female, Male",
    13: "United-States, Cambodia, England, Puerto-Rico, Canada, Germany, Outlying-US(Guam-USVI-etc), India, Japan, Greece, South, China, Cuba, Iran, Honduras, Philippines, Italy, Poland, Jamaica, Vietnam, Mexico, Portugal, Ireland, France, Dominican-Republic, Laos, Ecuador, Taiwan, Haiti, Columbia, Hungary, Guatemala, Nicaragua, Scotland, Thailand, Yugoslavia, El-Salvador, Trinadad&Tobago, Peru, Hong, Holand-Netherlands",
}
QUINTILE = {0, 2, 4, 12}
ZERO_NONZERO = {10, 11}
TRAIN_SIZE = 11220
SEED = 20190601


def main(src, out_dir):
    rows = [l.strip().split(", ") for l in open(src) if l.strip()]
    cuts = {}
    for c in QUINTILE:
        vals = sorted(float(r[c]) for r in rows)
        cuts[c] = [vals[int(q * len(vals))] for q in (0.2, 0.4, 0.6, 0.8)]

    layout = []
    offset = 1
    for c in range(14):
        layout.append(offset)
        if c in QUINTILE:
            offset += 5
        elif c in ZERO_NONZERO:
            offset += 2
        else:
            offset += len(CATEGORIES[c].split(", "))
    assert offset - 1 == 123

    def encode(r):
        idx = []
        for c in range(14):
            v = r[c]
            if v == "?":
                continue
            if c in QUINTILE:
                idx.append(layout[c] + sum(1 for t in cuts[c] if t <= float(v)))
            elif c in ZERO_NONZERO:
                idx.append(layout[c] + (0 if float(v) == 0 else 1))
            else:
                idx.append(layout[c] + CATEGORIES[c].split(", ").index(v))
        label = "+1" if r[14].startswith(">50K") else "-1"
        return label + "".join(" %d:1" % i for i in idx) + "\n"

    order = list(range(len(rows)))
    random.Random(SEED).shuffle(order)
    train = sorted(order[:TRAIN_SIZE])
    test = sorted(order[TRAIN_SIZE:])
    for name, part in (("a6a-surrogate.train.gz", train), ("a6a-surrogate.test.gz", test)):
        path = os.path.join(out_dir, name)
        with open(path, "wb") as raw:
            with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0, filename="") as f:
                for i in part:
                    f.write(encode(rows[i]).encode())
        print(path, len(part))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
