"""Freezes 20 hand-sized metric cases with reference values from scikit-learn.

Run from the repository root: python3 tests/data/make_metric_cases.py
"""
import json

import numpy as np
from sklearn.metrics import f1_score, precision_score, recall_score, roc_auc_score


def binary_case(rng, n, ties):
    y = rng.integers(0, 2, n)
    y[0], y[1] = 0, 1
    s = rng.integers(0, 4, n).astype(float) if ties else rng.normal(size=n) + 0.7 * y
    return {"kind": "binary", "scores": s.tolist(), "labels": y.tolist(), "auc": roc_auc_score(y, s)}


def ovo_case(rng, n, k):
    y = rng.integers(0, k, n)
    y[:k] = np.arange(k)
    logits = rng.normal(size=(n, k)) + 1.2 * np.eye(k)[y]
    p = np.exp(logits)
    p /= p.sum(axis=1, keepdims=True)
    p = np.round(p, 6)
    p[:, -1] = 1.0 - p[:, :-1].sum(axis=1)
    return {"kind": "ovo", "scores": p.tolist(), "labels": y.tolist(),
            "auc": roc_auc_score(y, p, multi_class="ovo", labels=list(range(k)))}


def macro_case(rng, n, k):
    y = rng.integers(0, k, n)
    pred = np.where(rng.random(n) < 0.6, y, rng.integers(0, k, n))
    kw = dict(average="macro", zero_division=0)
    return {"kind": "macro", "pred": pred.tolist(), "labels": y.tolist(),
            "precision": precision_score(y, pred, **kw), "recall": recall_score(y, pred, **kw),
            "f1": f1_score(y, pred, **kw)}


def main():
    rng = np.random.default_rng(2024)
    cases = []
    cases.append({"kind": "binary", "scores": [0.1, 0.4, 0.35, 0.8], "labels": [0, 0, 1, 1], "auc": 0.75})
    cases.append({"kind": "binary", "scores": [1, 2, 3, 4], "labels": [0, 0, 1, 1], "auc": 1.0})
    for n, ties in ((7, False), (12, True), (30, False), (25, True), (9, True)):
        cases.append(binary_case(rng, n, ties))
    for n, k in ((9, 3), (15, 3), (20, 4), (12, 3), (30, 5)):
        cases.append(ovo_case(rng, n, k))
    y, pred = [0, 0, 1, 1], [0, 1, 0, 1]
    kw = dict(average="macro", zero_division=0)
    cases.append({"kind": "macro", "pred": pred, "labels": y, "precision": 0.5, "recall": 0.5, "f1": 0.5})
    cases.append({"kind": "macro", "pred": [0, 0, 0, 0], "labels": [0, 1, 0, 1],
                  "precision": precision_score([0, 1, 0, 1], [0, 0, 0, 0], **kw),
                  "recall": recall_score([0, 1, 0, 1], [0, 0, 0, 0], **kw),
                  "f1": f1_score([0, 1, 0, 1], [0, 0, 0, 0], **kw)})
    for n, k in ((10, 3), (16, 3), (25, 4), (8, 2), (40, 5), (13, 3)):
        cases.append(macro_case(rng, n, k))
    assert len(cases) == 20
    with open("tests/data/metric_cases.json", "w") as f:
        json.dump(cases, f, indent=0)


if __name__ == "__main__":
    main()
