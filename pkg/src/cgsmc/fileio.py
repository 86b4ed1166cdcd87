"""File formats: data CSV, adjacency CSV, edge-probability tables,
population persistence, and the run summary.

All floats are written with repr so files round-trip losslessly and
identical runs produce byte-identical outputs.
"""

import json
import warnings
from pathlib import Path

import numpy as np
from scipy.special import logsumexp

from .errors import IngestionError
from .graphs import as_adjacency
from .smc import Population

POPULATION_SCHEMA = "cgsmc-population-v1"


def _fmt(x: float) -> str:
    return repr(float(x))


def default_labels(p: int):
    return [f"y{i + 1}" for i in range(p)]


# ---------------------------------------------------------------------------
# data CSV
# ---------------------------------------------------------------------------

def read_data_csv(path):
    """Read an observation matrix. The first row may be a header of labels;
    it is treated as one when any cell fails to parse as a number. Ragged
    rows, non-numeric cells, and empty files raise IngestionError."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    rows = [line.split(",") for line in text.splitlines() if line.strip()]
    if not rows:
        raise IngestionError(f"{path} is empty")
    labels = None
    start = 0

    def parse_row(cells, lineno):
        out = []
        for cell in cells:
            try:
                out.append(float(cell))
            except ValueError:
                raise IngestionError(
                    f"{path}:{lineno}: non-numeric cell {cell.strip()!r}"
                ) from None
        return out

    try:
        first = parse_row(rows[0], 1)
    except IngestionError:
        labels = [c.strip() for c in rows[0]]
        start = 1
        first = None
    width = len(labels) if labels is not None else len(first)
    data = [] if first is None else [first]
    for k, cells in enumerate(rows[start + (0 if first is None else 1):],
                              start=start + (0 if first is None else 1) + 1):
        if len(cells) != width:
            raise IngestionError(f"{path}:{k}: expected {width} cells, got {len(cells)}")
        data.append(parse_row(cells, k))
    if not data:
        raise IngestionError(f"{path} has a header but no data rows")
    return np.array(data, dtype=np.float64), labels


def write_data_csv(path, data, labels=None):
    data = np.asarray(data, dtype=np.float64)
    lines = []
    if labels is not None:
        lines.append(",".join(labels))
    for row in data:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# adjacency CSV (integer codes, full matrix, optional header)
# ---------------------------------------------------------------------------

def write_adjacency_csv(path, A, labels=None):
    A = np.asarray(A, dtype=np.int64)
    lines = []
    if labels is not None:
        lines.append(",".join(labels))
    for row in A:
        lines.append(",".join(str(int(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_adjacency_csv(path):
    data, labels = read_data_csv(path)
    A = data.astype(np.int64)
    if np.any(A != data):
        raise IngestionError(f"{path}: adjacency entries must be integers")
    return as_adjacency(A), labels


def read_matrix_csv(path):
    data, labels = read_data_csv(path)
    if data.shape[0] != data.shape[1]:
        raise IngestionError(f"{path}: expected a square matrix, got {data.shape}")
    return data, labels


# ---------------------------------------------------------------------------
# edge-probability tables: one upper-triangular p x p CSV per code
# ---------------------------------------------------------------------------

def write_edge_probs(outdir, tensor, labels):
    outdir = Path(outdir)
    p = tensor.p
    paths = []
    for k in range(4):
        lines = [",".join(labels)]
        for i in range(p):
            cells = ["" if j <= i else _fmt(tensor.probs[k, i, j]) for j in range(p)]
            lines.append(",".join(cells))
        path = outdir / f"edge_probs_k{k}.csv"
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    return paths


def read_edge_probs(outdir):
    outdir = Path(outdir)
    mats = []
    labels = None
    for k in range(4):
        text = (outdir / f"edge_probs_k{k}.csv").read_text()
        rows = text.splitlines()
        labels = rows[0].split(",")
        p = len(labels)
        mat = np.zeros((p, p))
        for i, line in enumerate(rows[1:]):
            for j, cell in enumerate(line.split(",")):
                if cell:
                    mat[i, j] = float(cell)
        mats.append(mat)
    return np.stack(mats), labels


# ---------------------------------------------------------------------------
# population persistence (JSON lines)
# ---------------------------------------------------------------------------

def save_population(path, population: Population, labels):
    """One header line, then one record per particle holding the adjacency
    codes (upper triangle), free parameter entries, and log weight plus the
    cached log target / log likelihood."""
    p = population.p
    header = {"schema": POPULATION_SCHEMA, "p": p, "n": int(population.n),
              "labels": list(labels)}
    lines = [json.dumps(header)]
    iu = np.triu_indices(p, 1)
    for n in range(population.n):
        A = population.adjacency[n]
        prec = population.prec[n]
        coef = population.coef[n]
        codes = [int(c) for c in A[iu]]
        prec_diag = [float(prec[i, i]) for i in range(p)]
        prec_edges = [float(prec[i, j]) for i, j in zip(*iu) if A[i, j] == 1]
        coef_entries = [float(coef[i, j]) for i in range(p) for j in range(p)
                        if A[i, j] == 3]
        rec = {
            "codes": codes,
            "prec_diag": prec_diag,
            "prec_edges": prec_edges,
            "coef": coef_entries,
            "log_weight": float(population.log_weights[n]),
            "log_target": float(population.log_targets[n]),
            "log_lik": float(population.log_liks[n]),
        }
        lines.append(json.dumps(rec))
    Path(path).write_text("\n".join(lines) + "\n")


def load_population(path):
    """Inverse of save_population. Non-normalized weights are renormalized
    with a warning."""
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise IngestionError(f"{path} is empty")
    try:
        header = json.loads(lines[0])
        if header.get("schema") != POPULATION_SCHEMA:
            raise IngestionError(
                f"{path}: unexpected schema {header.get('schema')!r}")
        p = int(header["p"])
        n = int(header["n"])
        labels = list(header["labels"])
        if len(lines) - 1 != n:
            raise IngestionError(f"{path}: header says {n} particles, "
                                 f"found {len(lines) - 1}")
        iu = np.triu_indices(p, 1)
        adjacency = np.zeros((n, p, p), dtype=np.int64)
        prec = np.zeros((n, p, p))
        coef = np.zeros((n, p, p))
        log_weights = np.zeros(n)
        log_targets = np.zeros(n)
        log_liks = np.zeros(n)
        for k, line in enumerate(lines[1:]):
            rec = json.loads(line)
            A = np.zeros((p, p), dtype=np.int64)
            A[iu] = np.asarray(rec["codes"], dtype=np.int64)
            for i, j in zip(*iu):
                A[j, i] = A[i, j] if A[i, j] < 2 else 5 - A[i, j]
            adjacency[k] = A
            for i in range(p):
                prec[k, i, i] = rec["prec_diag"][i]
            e = iter(rec["prec_edges"])
            for i, j in zip(*iu):
                if A[i, j] == 1:
                    v = next(e)
                    prec[k, i, j] = v
                    prec[k, j, i] = v
            c = iter(rec["coef"])
            for i in range(p):
                for j in range(p):
                    if A[i, j] == 3:
                        coef[k, i, j] = next(c)
            log_weights[k] = rec["log_weight"]
            log_targets[k] = rec["log_target"]
            log_liks[k] = rec["log_lik"]
    except (KeyError, ValueError, StopIteration, json.JSONDecodeError) as exc:
        raise IngestionError(f"{path}: corrupt population file: {exc}") from exc
    residual = float(logsumexp(log_weights))
    if abs(residual) > 1e-8:
        warnings.warn(f"population weights off by {residual:.3e} in log scale; "
                      "renormalizing")
        log_weights = log_weights - residual
    pop = Population(adjacency=adjacency, prec=prec, coef=coef,
                     log_weights=log_weights, log_targets=log_targets,
                     log_liks=log_liks)
    return pop, labels


# ---------------------------------------------------------------------------
# run summary
# ---------------------------------------------------------------------------

def save_run_summary(path, result, settings: dict):
    payload = {
        "schedule": [t.phi for t in result.traces],
        "ess": [t.ess for t in result.traces],
        "acceptance": {
            family: [t.stats.rate(family) for t in result.traces]
            for family in ("graph", "prec", "coef")
        },
        "sigma_rw": [t.sigma_rw for t in result.traces],
        "log_target_final": [float(x) for x in result.final.log_targets],
        "settings": settings,
        "seed": result.seed,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_run_summary(path):
    return json.loads(Path(path).read_text())
