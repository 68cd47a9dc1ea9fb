"""Shared builders and independent oracles for the test suite."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from mipseries.model import LinearRow, MipInstance, Sense

# All tests run on the deterministic clock so they are machine-independent.
DET_WPS = 1e6


def make_instance(name, c, rows, lo, hi, ints=()):
    """rows: iterable of (dense coef list, Sense, rhs)."""
    n = len(c)
    built = tuple(
        LinearRow(f"r{i}", tuple((j, float(a)) for j, a in enumerate(coefs) if a),
                  sense, float(rhs))
        for i, (coefs, sense, rhs) in enumerate(rows))
    return MipInstance(name, tuple(f"x{j}" for j in range(n)),
                       np.asarray(c, dtype=float), np.asarray(lo, dtype=float),
                       np.asarray(hi, dtype=float), frozenset(ints), built)


def hard_knapsack(seed=17, n=14, m=3):
    """Multi-row binary knapsack that needs a few dozen nodes under
    reliability branching (seed 17: ~100 nodes)."""
    rng = np.random.default_rng(seed)
    c = -rng.integers(5, 30, n).astype(float)
    A = rng.integers(1, 20, (m, n)).astype(float)
    b = (A.sum(axis=1) * 0.5).round()
    rows = tuple(LinearRow(f"r{i}", tuple((j, A[i, j]) for j in range(n)),
                           Sense.LE, float(b[i])) for i in range(m))
    return MipInstance(f"knap{seed}", tuple(f"x{j}" for j in range(n)), c,
                       np.zeros(n), np.ones(n), frozenset(range(n)), rows)


def random_feasible_mip(rng, max_vars=12, max_rows=10):
    """Random pure-integer instance made feasible by construction: the rhs is
    derived from a sampled lattice point."""
    n = int(rng.integers(3, max_vars + 1))
    m = int(rng.integers(1, max_rows + 1))
    # keep the lattice small enough to enumerate (<= 2**16 points)
    widths = []
    budget = 16
    for _ in range(n):
        w = int(rng.integers(1, 4))
        bits = {1: 1, 2: 2, 3: 2}[w]
        if budget - bits < 0:
            w = 1
            bits = 1
        budget -= bits
        widths.append(w)
    lo = np.zeros(n)
    hi = np.array(widths, dtype=float)
    c = rng.integers(-6, 7, n).astype(float)
    A = rng.integers(-4, 5, (m, n)).astype(float)
    A[rng.random((m, n)) < 0.3] = 0.0
    z = np.array([rng.integers(0, w + 1) for w in widths], dtype=float)
    rows = []
    for i in range(m):
        act = float(A[i] @ z)
        u = rng.random()
        if u < 0.55:
            rows.append((A[i], Sense.LE, act + float(rng.integers(0, 5))))
        elif u < 0.9:
            rows.append((A[i], Sense.GE, act - float(rng.integers(0, 5))))
        else:
            rows.append((A[i], Sense.EQ, act))
    return make_instance(f"rand{rng.integers(1 << 30)}", c, rows, lo, hi, range(n))


def enumerate_mip(inst, tol=1e-9):
    """Brute-force lattice oracle for pure-integer instances with finite
    bounds; returns (feasible, optimum)."""
    n = inst.num_vars
    assert inst.integer_mask == frozenset(range(n))
    axes = [np.arange(int(inst.lower[j]), int(inst.upper[j]) + 1) for j in range(n)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n).astype(float)
    mask = np.ones(len(pts), dtype=bool)
    A = inst.dense_matrix()
    b = inst.rhs_array()
    for i, sense in enumerate(inst.senses()):
        act = pts @ A[i]
        if sense is Sense.LE:
            mask &= act <= b[i] + tol
        elif sense is Sense.GE:
            mask &= act >= b[i] - tol
        else:
            mask &= np.abs(act - b[i]) <= tol
    if not mask.any():
        return False, None
    vals = pts[mask] @ inst.objective
    return True, float(vals.min())


def enumerate_integer_points(inst, tol=1e-9):
    """All feasible lattice points of a pure-integer instance."""
    n = inst.num_vars
    axes = [np.arange(int(inst.lower[j]), int(inst.upper[j]) + 1) for j in range(n)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n).astype(float)
    mask = np.ones(len(pts), dtype=bool)
    A = inst.dense_matrix()
    b = inst.rhs_array()
    for i, sense in enumerate(inst.senses()):
        act = pts @ A[i]
        if sense is Sense.LE:
            mask &= act <= b[i] + tol
        elif sense is Sense.GE:
            mask &= act >= b[i] - tol
        else:
            mask &= np.abs(act - b[i]) <= tol
    return pts[mask]


def lp_vertex_oracle(inst, tol=1e-7):
    """Optimal LP value by enumerating basic solutions: every n-subset of the
    row/bound constraints taken active.  Requires finite bounds."""
    n = inst.num_vars
    cons = []
    A = inst.dense_matrix()
    b = inst.rhs_array()
    for i in range(inst.num_rows):
        cons.append((A[i], b[i]))
    eye = np.eye(n)
    for j in range(n):
        cons.append((eye[j], inst.lower[j]))
        cons.append((eye[j], inst.upper[j]))
    best = None
    for combo in itertools.combinations(range(len(cons)), n):
        M = np.array([cons[k][0] for k in combo])
        rhs = np.array([cons[k][1] for k in combo])
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, rhs)
        ok = True
        for i, sense in enumerate(inst.senses()):
            act = float(A[i] @ x)
            if sense is Sense.LE and act > b[i] + tol:
                ok = False
            elif sense is Sense.GE and act < b[i] - tol:
                ok = False
            elif sense is Sense.EQ and abs(act - b[i]) > tol:
                ok = False
            if not ok:
                break
        if ok and np.all(x >= inst.lower - tol) and np.all(x <= inst.upper + tol):
            val = float(inst.objective @ x)
            if best is None or val < best:
                best = val
    return best


@pytest.fixture
def tmp_series_dir(tmp_path):
    return tmp_path / "series"
