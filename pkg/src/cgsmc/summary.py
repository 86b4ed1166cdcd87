"""Posterior summaries and graph export."""

from dataclasses import dataclass

import numpy as np

from .graphs import chain_components, is_chain_graph, mirror_code
from .model import ModelParams
from .smc import Population
from .state import Particle


@dataclass
class EdgeProbTensor:
    """probs[k, i, j] estimates P(code(i, j) = k) for each pair i < j."""

    probs: np.ndarray  # (4, p, p), populated on the strict upper triangle

    @property
    def p(self) -> int:
        return self.probs.shape[1]

    def check_normalized(self, tol: float = 1e-10) -> bool:
        p = self.p
        iu = np.triu_indices(p, 1)
        sums = self.probs[:, iu[0], iu[1]].sum(axis=0)
        return bool(np.all(np.abs(sums - 1.0) < tol))


def edge_probabilities(population: Population) -> EdgeProbTensor:
    """Weighted indicator averages per pair and code."""
    w = np.exp(population.log_weights)
    w = w / w.sum()
    p = population.p
    probs = np.zeros((4, p, p))
    for k in range(4):
        probs[k] = np.tensordot(w, population.adjacency == k, axes=1)
    mask = np.triu(np.ones((p, p), dtype=bool), 1)
    probs *= mask[None, :, :]
    return EdgeProbTensor(probs)


def map_graph(tensor: EdgeProbTensor):
    """Per-pair argmax adjacency (ties to the smallest code) and a validity
    flag: the entrywise argmax need not be a chain graph; it is reported,
    not repaired."""
    p = tensor.p
    A = np.zeros((p, p), dtype=np.int64)
    for i in range(p):
        for j in range(i + 1, p):
            code = int(np.argmax(tensor.probs[:, i, j]))
            A[i, j] = code
            A[j, i] = mirror_code(code)
    return A, is_chain_graph(A)


def top_particle(population: Population) -> Particle:
    """Particle with the highest log target at exponent 1 (ties: lowest index)."""
    if population.n == 0:
        raise ValueError("population is empty")
    idx = int(np.argmax(population.log_targets))
    graph = chain_components(population.adjacency[idx])
    params = ModelParams(population.coef[idx].copy(), population.prec[idx].copy())
    loglik = float(population.log_liks[idx])
    return Particle(graph, params, loglik,
                    float(population.log_targets[idx]) - loglik)


def export_dot(A, labels) -> str:
    """Graph description text: one node line per label, then edge lines in
    row-major upper-triangle order ("a -- b", "a -> b", or "b -> a")."""
    A = np.asarray(A)
    p = A.shape[0]
    labels = list(labels)
    if len(labels) != p:
        raise ValueError(f"need {p} labels, got {len(labels)}")
    lines = ["graph chain_graph {"]
    for name in labels:
        lines.append(f'  "{name}";')
    for i in range(p):
        for j in range(i + 1, p):
            code = int(A[i, j])
            if code == 1:
                lines.append(f'  "{labels[i]}" -- "{labels[j]}";')
            elif code == 2:
                lines.append(f'  "{labels[i]}" -> "{labels[j]}";')
            elif code == 3:
                lines.append(f'  "{labels[j]}" -> "{labels[i]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_dot(text: str):
    """Inverse of export_dot (round-trip check helper)."""
    labels = []
    edges = []
    for raw in text.splitlines():
        line = raw.strip()
        if line in ("graph chain_graph {", "}", ""):
            continue
        body = line.rstrip(";").strip()
        if " -- " in body:
            a, b = [s.strip().strip('"') for s in body.split(" -- ")]
            edges.append((a, b, 1))
        elif " -> " in body:
            a, b = [s.strip().strip('"') for s in body.split(" -> ")]
            edges.append((a, b, 2))
        else:
            labels.append(body.strip('"'))
    idx = {name: k for k, name in enumerate(labels)}
    p = len(labels)
    A = np.zeros((p, p), dtype=np.int64)
    for a, b, kind in edges:
        i, j = idx[a], idx[b]
        if kind == 1:
            A[i, j] = A[j, i] = 1
        else:
            A[i, j] = 2
            A[j, i] = 3
    return A, labels
