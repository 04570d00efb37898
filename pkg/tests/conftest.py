"""Shared fixtures and brute-force oracles.

The oracles re-derive every quantity with plain loops or textbook numpy so
they stay independent of the package code paths they check.
"""

import math

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def oracle_scale(x, method):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for j in range(x.shape[1]):
        col = x[:, j]
        if col.max() == col.min():
            continue
        if method == "standard":
            mu = sum(col) / len(col)
            sd = math.sqrt(sum((v - mu) ** 2 for v in col) / len(col))
            out[:, j] = (col - mu) / sd
        elif method == "minmax":
            out[:, j] = (col - col.min()) / (col.max() - col.min())
        elif method == "robust":
            q1, q3 = np.percentile(col, [25, 75])
            out[:, j] = (col - q1) / ((q3 - q1) or 1.0)
    return out


def oracle_working(x, scaling=None, interactions=False, nonlinear=False):
    x = np.asarray(x, dtype=float)
    if scaling:
        x = oracle_scale(x, scaling)
    if not interactions:
        return x
    cols = [x[:, j] for j in range(x.shape[1])]
    for i in range(x.shape[1]):
        for j in range(i + 1, x.shape[1]):
            prod = x[:, i] * x[:, j]
            cols.append(prod)
            if nonlinear:
                cols.append(np.sqrt(np.abs(prod)) if (prod <= 0).any() else np.log1p(prod))
    return np.column_stack(cols)


def oracle_distance(a, b, w, metric="euclidean", p=2.0):
    terms = [abs(math.sqrt(wi) * (ai - bi)) for ai, bi, wi in zip(a, b, w)]
    if metric == "euclidean":
        return math.sqrt(sum(t * t for t in terms))
    if metric == "manhattan":
        return sum(terms)
    return sum(t ** p for t in terms) ** (1.0 / p)


def oracle_scores(work, weights=None, metric="euclidean", p=2.0):
    """Literal D, column-mean baseline b, and sum_k |D[i][k] - b[k]|."""
    work = np.asarray(work, dtype=float)
    n, d = work.shape
    w = [1.0] * d if weights is None else list(weights)
    D = [[oracle_distance(work[i], work[k], w, metric, p) for k in range(n)] for i in range(n)]
    b = [sum(D[i][k] for i in range(n)) / n for k in range(n)]
    return np.array([sum(abs(D[i][k] - b[k]) for k in range(n)) for i in range(n)])


def oracle_percentile(values, q):
    s = sorted(values)
    p = q / 100 * (len(s) - 1)
    lo, hi = math.floor(p), math.ceil(p)
    return s[lo] + (p - lo) * (s[hi] - s[lo])


def oracle_auc(labels, scores):
    """Mann-Whitney pair count with half credit for ties."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a in pos for b in neg)
    return wins / (len(pos) * len(neg))


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[report.nodeid] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (outcome, duration) in sorted(_ACCEPTANCE.items()):
        name = nodeid.split("::")[-1]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  ({duration:.2f} s)")

