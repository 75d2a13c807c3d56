#!/usr/bin/env python3
"""Rebuild the files under data/ from copies bundled in public packages.

The canonical download locations (UCI, OpenML, yann.lecun.com) are not always
reachable, so this script pulls the same tables out of package archives that
redistribute them:

  breast-cancer.csv  <- Orange 2.7 wheel, Orange/datasets/breast-cancer.tab (UCI, Ljubljana)
  heart.csv          <- Orange 2.7 wheel, Orange/datasets/heart_disease.tab (UCI, Cleveland)
  titanic.csv        <- explainerdashboard wheel, datasets/titanic_{train,test}.csv (891 rows)
  mnist/t10k-36-*    <- npm package `mnist` (MNIST test set, pixels /255 rounded to 3 dp)

Usage: python3 scripts/prepare_datasets.py [--out data]
"""

import argparse
import csv
import glob
import io
import json
import os
import struct
import subprocess
import tarfile
import tempfile
import zipfile


def fetch(workdir):
    subprocess.run(
        ["pip", "download", "--no-deps", "-q", "-d", workdir, "explainerdashboard==0.5.8"],
        check=True,
    )
    subprocess.run(
        [
            "pip", "download", "--no-deps", "-q", "-d", workdir,
            "--only-binary=:all:", "--platform", "win32", "--python-version", "27",
            "Orange==2.7.8",
        ],
        check=True,
    )
    subprocess.run(["npm", "pack", "mnist@1.1.0", "--pack-destination", workdir], check=True,
                   stdout=subprocess.DEVNULL)


def orange_rows(zf, name):
    lines = zf.read(name).decode("latin1").splitlines()
    header = lines[0].split("\t")
    return header, [l.split("\t") for l in lines[3:] if l.strip()]


def write_breast_cancer(zf, out):
    header, rows = orange_rows(zf, "Orange/datasets/breast-cancer.tab")
    with open(os.path.join(out, "breast-cancer.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["class" if h == "recurrence" else h for h in header])
        for r in rows:
            w.writerow([v if v not in ("", "?") else "?" for v in r])


CP = {"asymptomatic": 0, "atypical ang": 1, "non-anginal": 2, "typical ang": 3}
RESTECG = {"normal": 0, "ST-T abnormal": 1, "left vent hypertrophy": 2}
SLOPE = {"upsloping": 0, "flat": 1, "downsloping": 2}
THAL = {"?": 0, "fixed defect": 1, "normal": 2, "reversable defect": 3}


def write_heart(zf, out):
    header, rows = orange_rows(zf, "Orange/datasets/heart_disease.tab")
    idx = {h: i for i, h in enumerate(header)}
    cols = ["age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach",
            "exang", "oldpeak", "slope", "ca", "thal", "target"]
    with open(os.path.join(out, "heart.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            g = lambda k: r[idx[k]]
            ca = g("major vessels colored")
            w.writerow([
                g("age"),
                1 if g("gender") == "male" else 0,
                CP[g("chest pain")],
                g("rest SBP"),
                g("cholesterol"),
                g("fasting blood sugar > 120"),
                RESTECG[g("rest ECG")],
                g("max HR"),
                g("exerc ind ang"),
                g("ST by exercise"),
                SLOPE[g("slope peak exc ST")],
                4 if ca == "?" else int(float(ca)),
                THAL[g("thal")],
                g("diameter narrowing"),
            ])


def write_titanic(zf, out):
    rows = []
    for n in ("explainerdashboard/datasets/titanic_train.csv",
              "explainerdashboard/datasets/titanic_test.csv"):
        rows += list(csv.DictReader(io.StringIO(zf.read(n).decode())))
    with open(os.path.join(out, "titanic.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["Survived", "Pclass", "Sex", "Age", "Fare"])
        for r in rows:
            age = "" if float(r["Age"]) < 0 else r["Age"]
            sex = "female" if r["Sex_female"] == "1" else "male"
            w.writerow([r["Survival"], r["PassengerClass"], sex, age, r["Fare"]])


def write_mnist(tgz, out, keep=(3, 6)):
    images, labels = [], []
    with tarfile.open(tgz) as t:
        for d in keep:
            data = json.load(t.extractfile(f"package/src/digits/{d}.json"))["data"]
            assert len(data) % 784 == 0
            for k in range(len(data) // 784):
                px = data[k * 784:(k + 1) * 784]
                images.append(bytes(int(round(v * 255)) for v in px))
                labels.append(d)
    mdir = os.path.join(out, "mnist")
    os.makedirs(mdir, exist_ok=True)
    with open(os.path.join(mdir, "t10k-36-images-idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for im in images:
            f.write(im)
    with open(os.path.join(mdir, "t10k-36-labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))
    return len(images)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        fetch(tmp)
        orange = zipfile.ZipFile(glob.glob(os.path.join(tmp, "Orange-*.whl"))[0])
        write_breast_cancer(orange, args.out)
        write_heart(orange, args.out)
        write_titanic(zipfile.ZipFile(glob.glob(os.path.join(tmp, "explainerdashboard-*.whl"))[0]),
                      args.out)
        n = write_mnist(glob.glob(os.path.join(tmp, "mnist-*.tgz"))[0], args.out)
        print(f"wrote {args.out} ({n} MNIST images)")


if __name__ == "__main__":
    main()
