"""Post-hoc verification of constructed bases, and matrix and decay exports.

Everything here is recomputed from the serialized basis and the operator
configuration; construction-time caches are never consulted.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .forge.large import large_constants
from .forge.partitions import sparsify_weights
from .forge.state import SeedFamily
from .seqspace.finvec import FinVec

ORTHO_TOL = 1e-10
ENTRY_TOL = 1e-9
BOUND_SLACK = 1e-8
DECAY_REL_TOL = 1e-6
DECAY_SLACK = 1e-9
Z_SLACK = 1e-10
B_TOL = 1e-12


@dataclass(frozen=True)
class Check:
    """One verification result; ``worst`` is the largest violation seen (``<= 0`` is fine)."""

    name: str
    tolerance: float
    worst: float
    at: tuple | None
    passed: bool

    def to_json(self):
        return {
            "name": self.name,
            "tolerance": self.tolerance,
            "worst": self.worst,
            "at": list(self.at) if self.at is not None else None,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def to_json(self):
        return {"checks": [c.to_json() for c in self.checks], "pass": self.passed}

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _check(name, tol, violations, labels):
    """``violations`` are amounts by which each item exceeds its allowance."""
    violations = np.asarray(violations, dtype=float).ravel()
    if violations.size == 0:
        return Check(name, tol, 0.0, None, True)
    bad = ~np.isfinite(violations)
    if bad.any():
        i = int(np.argmax(bad))
        return Check(name, tol, math.inf, tuple(int(x) for x in labels[i]), False)
    i = int(np.argmax(violations))
    worst = float(violations[i])
    return Check(name, tol, worst, tuple(int(x) for x in labels[i]), worst <= tol)


def threads():
    """Worker count from ``FORGE_THREADS`` (default: all cores)."""
    raw = os.environ.get("FORGE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


# -- basis helpers -----------------------------------------------------------


def basis_from_state(doc):
    return [FinVec.from_json(u) for u in doc["basis"]]


def basis_digest(u):
    """SHA-256 of the canonical bytes of a vector's indices and values."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(u.indices, dtype="<i8").tobytes())
    h.update(np.ascontiguousarray(u.values, dtype="<c16").tobytes())
    return h.hexdigest()


def _dense_rows(vecs, width):
    X = np.zeros((len(vecs), width), dtype=np.complex128)
    for r, v in enumerate(vecs):
        X[r, v.indices] = v.values
    return X


def entry_grid(T, us, size=None, workers=None):
    """``A[j, n] = <T u_n, u_j>`` (0-based) for the first ``size`` vectors."""
    us = list(us)[: size if size is not None else len(us)]
    if not us:
        return np.zeros((0, 0), dtype=np.complex128)
    workers = workers or threads()
    if workers > 1 and len(us) > 8:
        with ThreadPoolExecutor(workers) as ex:
            tus = list(ex.map(T.apply, us))
    else:
        tus = [T.apply(u) for u in us]
    width = max(max(v.max_index for v in us), max(v.max_index for v in tus)) + 1
    U = _dense_rows(us, width)
    TU = _dense_rows(tus, width)
    return U.conj() @ TU.T


# -- checks --------------------------------------------------------------------


def check_orthonormality(us, tol=ORTHO_TOL):
    us = list(us)
    if not us:
        return _check("orthonormality", tol, [], [])
    width = max(v.max_index for v in us) + 1
    U = _dense_rows(us, width)
    err = np.abs(U.conj() @ U.T - np.eye(len(us)))
    n, j = np.meshgrid(np.arange(1, len(us) + 1), np.arange(1, len(us) + 1), indexing="ij")
    return _check("orthonormality", tol, err.ravel(), np.stack([n.ravel(), j.ravel()], 1))


def check_prescribed_entries(T, us, targets, tol=ENTRY_TOL, grid=None, name="prescribed_entries"):
    """``max |<T u_n, u_j> - value|`` over ``targets = [(n, j, value), ...]`` (1-based)."""
    targets = list(targets)
    if not targets:
        return _check(name, tol, [], [])
    if grid is None:
        grid = entry_grid(T, us)
    n = np.array([t[0] for t in targets]) - 1
    j = np.array([t[1] for t in targets]) - 1
    val = np.array([complex(t[2]) for t in targets])
    err = np.abs(grid[j, n] - val)
    return _check(name, tol, err, np.stack([n + 1, j + 1], 1))


def check_entry_bounds(
    T, us, bound, mode="upper", exclude_diagonal=False, diagonal_only=False, slack=BOUND_SLACK, grid=None,
    name=None,
):
    """Compare ``|<T u_n, u_j>|`` with ``bound(n, j)`` (arrays of 1-based indices).

    ``upper`` mode requires ``|entry| <= bound + slack``; ``lower`` mode
    requires ``|entry| >= bound - slack``.
    """
    if grid is None:
        grid = entry_grid(T, us)
    N = grid.shape[0]
    name = name or f"entry_bounds_{mode}"
    if N == 0:
        return _check(name, slack, [], [])
    n, j = np.meshgrid(np.arange(1, N + 1), np.arange(1, N + 1), indexing="ij")
    absA = np.abs(grid.T)  # absA[n-1, j-1] = |<T u_n, u_j>|
    b = np.broadcast_to(np.asarray(bound(n, j), dtype=float), n.shape)
    viol = absA - b if mode == "upper" else b - absA
    mask = np.ones(n.shape, dtype=bool)
    if exclude_diagonal:
        mask &= n != j
    if diagonal_only:
        mask &= n == j
    labels = np.stack([n[mask], j[mask]], 1)
    return _check(name, slack, viol[mask], labels)


def seed_residuals(us, seeds, ms):
    """``r[m][k] = ||(I - P_k) y_m||**2`` for ``k = 0 .. N``, computed by a stable tail sum."""
    us = list(us)
    out = {}
    if not us:
        return {m: np.ones(1) for m in ms}
    width = max(max(v.max_index for v in us), max((seeds(m).max_index for m in ms), default=0)) + 1
    U = _dense_rows(us, width)
    for m in ms:
        yd = _dense_rows([seeds(m)], width)[0]
        c = U.conj() @ yd
        tail = yd - c @ U
        tail -= (U.conj() @ tail) @ U
        rN = float(np.vdot(tail, tail).real)
        w = np.abs(c) ** 2
        suffix = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
        out[m] = rN + suffix
    return out


def check_decay_ledger(us, seeds, steps, model, tol=None):
    """Replay seed residual norms against the expected per-step factor.

    Parameters
    ----------
    steps : list of (n, m, factor)
        ``factor`` is the expected ratio ``||(I-P_n)y_m||**2 / ||(I-P_{n-1})y_m||**2``
        (``model="equality"``) or an upper bound for it (``model="bound"``).
    model : {"equality", "bound", "product"}
        ``product`` compares ``||(I-P_n)y_m||**2`` with the running product
        of the factors over earlier steps assigned to ``m``.
    """
    steps = [s for s in steps if s[1] is not None]
    name = f"decay_{model}"
    if tol is None:
        tol = DECAY_REL_TOL if model == "equality" else DECAY_SLACK
    if not steps:
        return _check(name, tol, [], [])
    ms = sorted({s[1] for s in steps})
    res = seed_residuals(us, seeds, ms)
    viol, labels = [], []
    if model == "product":
        prod = {m: 1.0 for m in ms}
        for n, m, f in steps:
            prod[m] *= f
            viol.append(res[m][n] - prod[m])
            labels.append((n, m))
        return _check(name, tol, viol, labels)
    for n, m, f in steps:
        before, after = res[m][n - 1], res[m][n]
        if model == "equality":
            viol.append(abs(after - before * f) / max(before * f, 1e-300))
        else:
            viol.append(after - before * f)
        labels.append((n, m))
    return _check(name, tol, viol, labels)


def check_seed_monotone(us, seeds, steps, tol=DECAY_SLACK):
    """``||(I-P_n)y_m||`` never grows and drops at every step assigned to ``m``."""
    ms = sorted({s[1] for s in steps if s[1] is not None})
    if not ms:
        return _check("seed_monotone", tol, [], [])
    res = seed_residuals(us, seeds, ms)
    viol, labels = [], []
    assigned = {(s[0], s[1]) for s in steps if s[1] is not None}
    for m in ms:
        r = np.sqrt(np.maximum(res[m], 0))
        for n in range(1, r.size):
            v = r[n] - r[n - 1]
            if (n, m) in assigned and r[n - 1] > 1e-12:
                v = v + tol  # strict decrease required
            viol.append(v)
            labels.append((n, m))
    return _check("seed_monotone", tol, viol, labels)


def check_digests(us, digests):
    """Each vector hashes to the digest recorded when it was built."""
    if digests is None:
        return None
    viol = [0.0 if basis_digest(u) == d else 1.0 for u, d in zip(us, digests)]
    if len(digests) != len(list(us)):
        viol.append(1.0)
    return _check("basis_digest", 0.0, viol, [(i + 1, i + 1) for i in range(len(viol))])


# -- whole-run verification ---------------------------------------------------------


def seed_family(doc):
    s = doc.get("seeds", {"kind": "standard", "offset": 0})
    return SeedFamily(offset=s.get("offset", 0))


def verify_run(config, state_doc, records=None, workers=None):
    """Recompute every claim for a finished (or partial) run.

    Parameters
    ----------
    config : RunConfig
    state_doc : dict
        Parsed ``state.json``.
    records : list of dict, optional
        Parsed ``steps.jsonl`` lines; enables the per-step audits and the
        digest check.

    Returns
    -------
    VerificationReport
    """
    T = config.operator_model()
    us = basis_from_state(state_doc)
    N = len(us)
    seeds = seed_family(state_doc)
    grid = entry_grid(T, us, workers=workers)
    records = list(records or [])
    checks = [check_orthonormality(us)]
    digests = [r.get("basis_sha256") for r in records] if records else None
    if digests and all(d is not None for d in digests):
        checks.append(check_digests(us, digests))
    idx = np.arange(1, N + 1)
    kind = config.construction
    p = config.params
    steps_m = [(r["n"], r["m"]) for r in records]

    if kind == "band":
        lam = config.sequence("lambda_spec").values(N)
        checks.append(check_prescribed_entries(T, us, [(n, n, lam[n - 1]) for n in idx], grid=grid, name="diagonal"))
        K = p["K"]
        zeros = [(n, j, 0.0) for n in idx for j in idx if 1 <= abs(n - j) <= K]
        checks.append(check_prescribed_entries(T, us, zeros, grid=grid, name="band_zeros"))
        eq = []
        for r in records:
            v = r["values"]
            if r["m"] is not None and r.get("decrement") is not None and not v.get("degenerate"):
                eq.append((r["n"], r["m"], v["rho"] / (v["rho"] + v["delta"])))
        checks.append(check_decay_ledger(us, seeds, eq, "equality"))
    elif kind == "tridiag":
        lam = config.sequence("lambda_spec").values(N)
        mu = config.sequence("mu_spec").values(max(N - 1, 1))
        nu = config.sequence("nu_spec").values(max(N - 1, 1))
        checks.append(check_prescribed_entries(T, us, [(n, n, lam[n - 1]) for n in idx], grid=grid, name="diagonal"))
        checks.append(
            check_prescribed_entries(T, us, [(n, n + 1, mu[n - 1]) for n in idx[:-1]], grid=grid, name="mu_entries")
        )
        checks.append(
            check_prescribed_entries(T, us, [(n + 1, n, nu[n - 1]) for n in idx[:-1]], grid=grid, name="nu_entries")
        )
        eps = p["epsilon"]
        if records:
            zs = [r["values"].get("z_norm", 0.0) - math.sqrt(eps) / 2 for r in records]
            checks.append(_check("z_norm", Z_SLACK, zs, [(r["n"], r["n"]) for r in records]))
            bs = [abs(r["values"]["b_norm"] - eps**1.5 / 32) for r in records if r["n"] > 1]
            checks.append(_check("b_norm", B_TOL, bs, [(r["n"], r["n"]) for r in records if r["n"] > 1]))
        dec = [(n, m, 1 - eps**3 / 2**12) for n, m in steps_m if n > 1]
        checks.append(check_decay_ledger(us, seeds, dec, "bound"))
    elif kind == "small":
        a = np.real(config.sequence("a_spec").values(N))
        scale = max(float(T.norm_bound), 1.0)
        checks.append(
            check_entry_bounds(
                T, us, lambda n, j: scale * np.sqrt(a[n - 1] * a[j - 1]) * (1 + BOUND_SLACK), grid=grid,
                slack=0.0, name="sqrt_weight_bound",
            )
        )
        checks.append(
            check_entry_bounds(
                T, us, lambda n, j: scale * a[n - 1] * (1 + BOUND_SLACK), diagonal_only=True, grid=grid, slack=0.0,
                name="diagonal_weight_bound",
            )
        )
        ap = sparsify_weights(a).a_prime
        eq = [
            (r["n"], r["m"], 1 - ap[r["n"] - 1] / 4)
            for r in records
            if r["m"] is not None and not r["values"].get("degenerate")
        ]
        checks.append(check_decay_ledger(us, seeds, eq, "equality"))
    else:
        C, D = p["C"], p["D"]
        c = large_constants(C, D)
        checks.append(check_entry_bounds(T, us, lambda n, j: c["d"], "lower", diagonal_only=True, grid=grid,
                                         name="diagonal_lower"))
        checks.append(check_entry_bounds(
            T, us, lambda n, j: c["c1"] * np.sqrt(np.minimum(n, j)) / np.maximum(n, j) ** 1.5, "lower",
            exclude_diagonal=True, grid=grid, name="offdiag_lower"))
        checks.append(check_entry_bounds(
            T, us, lambda n, j: c["c2"] / np.sqrt(np.maximum(n, j)), "upper", exclude_diagonal=True, grid=grid,
            name="offdiag_upper"))
        checks.extend(_defect_invariants(T, us, grid, C))
        prod = [(n, m, 1 - 1 / (2 * c["a"] * n)) for n, m in steps_m]
        checks.append(check_decay_ledger(us, seeds, prod, "product"))
        if records:
            sl = [-r["values"]["plank_slack_min"] for r in records]
            checks.append(_check("plank_certificates", 1e-10, sl, [(r["n"], r["n"]) for r in records]))
    if records:
        checks.append(check_seed_monotone(us, seeds, [(n, m, None) for n, m in steps_m]))
    return VerificationReport(tuple(c for c in checks if c is not None))


def _defect_invariants(T, us, grid, C):
    """``||(I-P_k) T u_j||**2`` and ``||(I-P_k) T* u_j||**2`` against ``C**2 j / (2k)`` for ``j <= k``."""
    N = grid.shape[0]
    if N == 0:
        return []
    tn = np.array([T.apply(u).norm2 for u in us])
    an = np.array([T.apply_adjoint(u).norm2 for u in us])
    # column j of |A|^2 holds |<T u_j, u_i>|^2; row j holds |<T* u_j, u_i>|^2
    cT = np.cumsum(np.abs(grid) ** 2, axis=0)
    cA = np.cumsum(np.abs(grid.T) ** 2, axis=0)
    out = []
    for name, norms, cum in (("defect_T", tn, cT), ("defect_T_adjoint", an, cA)):
        viol, labels = [], []
        for k in range(1, N + 1):
            j = np.arange(1, k + 1)
            resid = norms[:k] - cum[k - 1, :k]
            viol.append(C * C * j / (2 * k) - resid)
            labels.extend((k, jj) for jj in j)
        out.append(_check(name, BOUND_SLACK, np.concatenate(viol), labels))
    return out


# -- exports -----------------------------------------------------------------------


def format_complex(z):
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_complex_str(s):
    s = s.strip()
    if not s.endswith("i"):
        raise ValueError(f"not a complex literal: {s!r}")
    body = s[:-1]
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE":
            return complex(float(body[:pos]), float(body[pos:]))
    raise ValueError(f"not a complex literal: {s!r}")


def export_matrix(grid, fmt="csv"):
    """Serialize ``A[j, n] = <T u_n, u_j>`` (row ``j``, column ``n``) as text."""
    grid = np.asarray(grid)
    k = grid.shape[0]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j\\n"] + [str(n) for n in range(1, k + 1)])
        for j in range(k):
            w.writerow([str(j + 1)] + [format_complex(z) for z in grid[j]])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(
            {
                "size": k,
                "convention": "A[j][n] = <T u_n, u_j>",
                "re": [[float(z.real) for z in row] for row in grid],
                "im": [[float(z.imag) for z in row] for row in grid],
            }
        )
    raise ValueError(f"unknown format {fmt!r}")


def read_matrix(text, fmt="csv"):
    if fmt == "json":
        doc = json.loads(text)
        return np.array(doc["re"], dtype=float).reshape(doc["size"], doc["size"]) + 1j * np.array(
            doc["im"], dtype=float
        ).reshape(doc["size"], doc["size"])
    rows = list(csv.reader(io.StringIO(text)))
    k = len(rows[0]) - 1
    return np.array([[parse_complex_str(s) for s in r[1:]] for r in rows[1:]], dtype=np.complex128).reshape(k, k)


def export_decay(us, seeds, steps):
    """CSV with columns ``n, m, residual_norm`` for every step that touched a seed."""
    steps = [(n, m) for n, m in steps if m is not None]
    ms = sorted({m for _, m in steps})
    res = seed_residuals(us, seeds, ms) if ms else {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "m", "residual_norm"])
    for n, m in steps:
        w.writerow([n, m, f"{math.sqrt(max(res[m][n], 0.0)):.17g}"])
    return buf.getvalue()
