#!/usr/bin/env python3
"""Convert KEEL raw .dat files (as shipped in the `keel-ds` wheel) to LIBSVM text.

Usage: keel_to_libsvm.py <keel raw dir> <output dir>

Label mapping follows the class counts of the LIBSVM copies of these datasets:
diabetes 500/268, sonar 97/111, australian 307/383, german 300/700 (positive/negative).
Nominal attributes of german are one-hot encoded. Feature values are left unscaled;
the loader scales them to [-1, 1].
"""
import sys
from pathlib import Path

POSITIVE = {
    "pima": "tested_negative",
    "sonar": "R",
    "australian": "1",
    "german": "2",
}
OUT_NAME = {"pima": "diabetes", "sonar": "sonar", "australian": "australian", "german": "german"}


def rows(path):
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        yield [tok.strip() for tok in line.split(",")]


def is_number(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def convert(name, src, dst):
    data = list(rows(src))
    ncol = len(data[0]) - 1
    nominal = [not all(is_number(r[j]) for r in data) for j in range(ncol)]
    levels = {j: sorted({r[j] for r in data}) for j in range(ncol) if nominal[j]}
    lines = []
    for r in data:
        feats = []
        for j in range(ncol):
            if nominal[j]:
                feats.extend(1.0 if r[j] == lvl else 0.0 for lvl in levels[j])
            else:
                feats.append(float(r[j]))
        label = "+1" if r[-1] == POSITIVE[name] else "-1"
        pairs = [f"{i + 1}:{v:g}" for i, v in enumerate(feats) if v != 0.0]
        lines.append(" ".join([label] + pairs))
    Path(dst).write_text("\n".join(lines) + "\n")
    pos = sum(1 for l in lines if l.startswith("+1"))
    print(f"{OUT_NAME[name]}: n={len(lines)} pos={pos} neg={len(lines) - pos} d={len(feats)}")


if __name__ == "__main__":
    raw, out = Path(sys.argv[1]), Path(sys.argv[2])
    for name in POSITIVE:
        convert(name, raw / f"{name}.dat", out / OUT_NAME[name])
