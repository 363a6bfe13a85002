"""One-off export of the bundled evaluation CSVs into src/simproj/data.

The digit export degrades scikit-learn's 8x8 digits (classes 2/4/7/9,
500 seeded samples) with sub-pixel shifts and Gaussian pixel noise so the
initial 2D projection quality lands in the regime the interaction
experiments are designed for. Parameters are frozen; rerunning this
script reproduces the committed files byte for byte.
"""

import csv
from pathlib import Path

import numpy as np
from scipy.ndimage import shift
from sklearn.datasets import load_breast_cancer, load_digits, load_wine

OUT = Path(__file__).resolve().parent.parent / "src" / "simproj" / "data"

SUBSET_SEED = 42
DEGRADE_SEED = 3
NOISE_SD = 2.5
MAX_SHIFT = 1.0
DIGIT_CLASSES = (2, 4, 7, 9)
N_DIGITS = 500


def write_csv(path, features, labels, feature_names):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + ["label"])
        for row, label in zip(features, labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def export_digits():
    d = load_digits()
    rng = np.random.default_rng(SUBSET_SEED)
    pool = np.where(np.isin(d.target, DIGIT_CLASSES))[0]
    idx = rng.choice(pool, N_DIGITS, replace=False)
    imgs, labels = d.images[idx], d.target[idx]

    rng = np.random.default_rng(DEGRADE_SEED)
    shifted = []
    for im in imgs:
        dx, dy = rng.uniform(-MAX_SHIFT, MAX_SHIFT, 2)
        shifted.append(shift(im, (dy, dx), order=1, mode="constant"))
    X = np.array(shifted).reshape(len(imgs), -1)
    X = X + rng.normal(0.0, NOISE_SD, X.shape)
    names = [f"px{i}" for i in range(X.shape[1])]
    write_csv(OUT / "digits500.csv", X, labels, names)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    wine = load_wine()
    write_csv(OUT / "wine.csv", wine.data, wine.target,
              [n.replace("/", "_") for n in wine.feature_names])
    cancer = load_breast_cancer()
    write_csv(OUT / "cancer.csv", cancer.data, cancer.target,
              [n.replace(" ", "_") for n in cancer.feature_names])
    export_digits()
    (OUT / "registry.json").write_text(
        '{\n'
        '  "wine": {"path": "wine.csv", "label_column": "label"},\n'
        '  "cancer": {"path": "cancer.csv", "label_column": "label"},\n'
        '  "digits500": {"path": "digits500.csv", "label_column": "label"}\n'
        '}\n')
    print("wrote", sorted(p.name for p in OUT.iterdir()))


if __name__ == "__main__":
    main()
