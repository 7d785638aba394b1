"""Undirected interaction graphs and the Laplacian curve-phase potential.

The potential of a phase vector ``psi`` is
``W = 0.5 * sum_edges |exp(i*psi_j) - exp(i*psi_k)|^2``,
which equals the Laplacian quadratic form ``0.5 * <z, L z>`` for
``z = exp(i*psi)``. Synchronized phases minimize it (W = 0); on a
circulant graph it is maximized at ``(n/2) * lambda_max`` by balanced
arrangements built from the discrete Fourier eigenvectors.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * np.pi


class DisconnectedGraph(ValueError):
    """The requested graph is not connected."""


class InteractionGraph:
    """Immutable undirected graph with its Laplacian and spectral data.

    Attributes
    ----------
    n : int
        Number of agents (nodes).
    edges : tuple of (j, k)
        Sorted unordered pairs, j < k.
    laplacian : ndarray, shape (n, n)
        Combinatorial Laplacian, rows sum to zero.
    circulant : bool
        True when the first Laplacian row generates all rows by cyclic shift.
    lambda_max : float
        Largest Laplacian eigenvalue (closed form for circulant graphs).
    """

    def __init__(self, n, edges, _offsets=None):
        n = int(n)
        if n < 0:
            raise ValueError("node count cannot be negative")
        edges = tuple(sorted(tuple(sorted((int(j), int(k)))) for j, k in edges))
        for j, k in edges:
            if j == k:
                raise ValueError("self-loops are not allowed")
            if not (0 <= j < n and 0 <= k < n):
                raise ValueError(f"edge ({j},{k}) out of range for n={n}")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges")

        lap = np.zeros((n, n))
        for j, k in edges:
            lap[j, j] += 1.0
            lap[k, k] += 1.0
            lap[j, k] -= 1.0
            lap[k, j] -= 1.0

        self.n = n
        self.edges = edges
        self.edge_count = len(edges)
        self.laplacian = lap
        self.laplacian.setflags(write=False)
        self._offsets = _offsets
        self.circulant = self._detect_circulant()

        eigvals = np.linalg.eigvalsh(lap) if n else np.zeros(0)
        if n > 1 and eigvals[1] <= 1e-10:
            raise DisconnectedGraph("graph is not connected")
        if _offsets is not None:
            self.lambda_max = float(np.max(self.circulant_eigenvalues(n, _offsets)))
        else:
            self.lambda_max = float(eigvals[-1]) if n else 0.0

        # edge index arrays for vectorized potential evaluation
        self._ej = np.array([j for j, _ in edges], dtype=int)
        self._ek = np.array([k for _, k in edges], dtype=int)

    def _detect_circulant(self):
        if self.n == 0:
            return True
        first = self.laplacian[0]
        return all(np.array_equal(np.roll(first, k), self.laplacian[k]) for k in range(self.n))

    @staticmethod
    def circulant_eigenvalues(n, offsets):
        """Closed-form Laplacian spectrum of a circulant graph.

        ``lambda_l = sum_o c_o * (1 - cos(2*pi*(l-1)*o/n))`` with ``c_o = 2``
        except ``c_o = 1`` for the diameter offset ``o = n/2``.
        """
        modes = np.arange(n)
        lam = np.zeros(n)
        for o in offsets:
            weight = 1.0 if 2 * o == n else 2.0
            lam += weight * (1.0 - np.cos(TWO_PI * modes * o / n))
        return lam

    @classmethod
    def circulant(cls, n, offsets):
        """Circulant graph: node k adjacent to k +/- o (mod n) per offset."""
        n = int(n)
        if n < 2:
            raise ValueError("circulant graph needs n >= 2")
        offsets = sorted({int(o) for o in offsets})
        if not offsets:
            raise ValueError("need at least one connection offset")
        if any(o < 1 or o > n // 2 for o in offsets):
            raise ValueError(f"offsets must lie in [1, n//2] for n={n}")
        if math.gcd(n, *offsets) != 1:
            raise DisconnectedGraph(
                f"offsets {offsets} do not connect {n} nodes (gcd > 1)"
            )
        edges = {tuple(sorted(((k + o) % n, k))) for k in range(n) for o in offsets}
        edges |= {tuple(sorted(((k - o) % n, k))) for k in range(n) for o in offsets}
        return cls(n, edges, _offsets=tuple(offsets))

    @classmethod
    def from_edges(cls, n, edges):
        """Graph from an explicit edge list; must be connected."""
        return cls(n, edges)

    def dft_modes(self):
        """Discrete Fourier eigenvectors ``f_l[k] = exp(i*(l-1)*k*2*pi/n)``
        with their eigenvalues; only meaningful for circulant graphs."""
        if not self.circulant:
            raise ValueError("DFT eigenvectors require a circulant graph")
        chi = TWO_PI * np.arange(self.n) / self.n
        vecs = np.exp(1j * np.outer(np.arange(self.n), chi))
        if self._offsets is not None:
            lams = self.circulant_eigenvalues(self.n, self._offsets)
        else:
            lams = np.array([
                float(np.real(np.conj(v) @ (self.laplacian @ v)) / self.n) for v in vecs
            ])
        return vecs, lams


def wrap_phases(psi):
    """Wrap phase vector to [0, 2*pi)."""
    return np.mod(np.asarray(psi, dtype=float), TWO_PI)


def phase_potential(graph, psi):
    """Laplacian phase potential, edge form:
    ``0.5 * sum_edges |exp(i*psi_j) - exp(i*psi_k)|^2``."""
    z = np.exp(1j * np.asarray(psi, dtype=float))
    diff = z[graph._ej] - z[graph._ek]
    return float(0.5 * np.sum(diff.real**2 + diff.imag**2))


def phase_potential_gradient(graph, psi):
    """Gradient of the phase potential:
    component k is ``-sum_{j in N_k} sin(psi_j - psi_k)``."""
    z = np.exp(1j * np.asarray(psi, dtype=float))
    return (np.conj(z) * (graph.laplacian @ z)).imag


def phase_spread(graph, psi):
    """Sum of squared phasor differences over edges; exactly twice the
    phase potential."""
    return 2.0 * phase_potential(graph, psi)


def order_parameter(psi):
    """Mean phasor ``(1/n) * sum_k exp(i*psi_k)`` (complex)."""
    psi = np.asarray(psi, dtype=float)
    if psi.size == 0:
        return 0j
    return complex(np.mean(np.exp(1j * psi)))


def graph_from_spec(spec):
    """Build a graph from a config mapping: either
    ``{"n": 7, "circulant_offsets": [1, 2]}`` or ``{"n": 7, "edges": [[j, k], ...]}``.
    """
    n = spec.get("n")
    if n is None:
        raise ValueError("graph spec needs 'n'")
    if "circulant_offsets" in spec:
        return InteractionGraph.circulant(n, spec["circulant_offsets"])
    if "edges" in spec:
        return InteractionGraph.from_edges(n, spec["edges"])
    raise ValueError("graph spec needs 'circulant_offsets' or 'edges'")
