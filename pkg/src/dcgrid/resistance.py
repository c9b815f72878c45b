"""Effective resistance, Kirchhoff index, and network-size scaling sweeps.

The spectral quantity K* = (1/n) * sum of reciprocal nonzero Laplacian
eigenvalues controls how slack-bus performance degrades with network
size; it equals K_f / n^2 where K_f is the Kirchhoff index (the sum of
all pairwise effective resistances). This module computes both routes,
checks Rayleigh monotonicity under edge removal or resistance increase,
and sweeps lattice families to expose the growth laws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import network as net_mod
from . import numerics, systems
from .errors import DisconnectedGraph, DisconnectsGraph, SameNode
from .network import Network


def reff_matrix(net: Network) -> np.ndarray:
    """All pairwise effective resistances from one Laplacian pseudoinverse."""
    pinv = numerics.pinv_laplacian(net_mod.laplacian(net))
    d = np.diag(pinv)
    return d[:, None] + d[None, :] - 2.0 * pinv


def effective_resistance(net: Network, i: int, j: int) -> float:
    """Two-terminal equivalent resistance between buses i and j."""
    if i == j:
        raise SameNode(f"effective resistance needs two distinct nodes, got {i}")
    pinv = numerics.pinv_laplacian(net_mod.laplacian(net))
    e = np.zeros(net.node_count)
    e[i], e[j] = 1.0, -1.0
    return float(e @ pinv @ e)


def kirchhoff_index(net: Network) -> float:
    """Sum of effective resistances over all unordered node pairs."""
    reff = reff_matrix(net)
    return float(np.sum(np.triu(reff, k=1)))


def kstar(net: Network) -> float:
    """Mean reciprocal nonzero Laplacian eigenvalue, K_f / n^2."""
    values = numerics.eig_sym(net_mod.laplacian(net)).values
    return float(np.sum(1.0 / values[1:])) / net.node_count


@dataclass(frozen=True)
class RayleighReport:
    """Pairwise effective-resistance shifts after an edge perturbation."""

    edge: tuple[int, int]
    new_resistance: float | None  # None means the edge was removed
    min_delta: float
    max_delta: float
    pairs: int


def rayleigh_check(net: Network, edge: tuple[int, int],
                   new_resistance: float | None = None) -> RayleighReport:
    """Remove an edge (or raise its resistance) and verify that no
    pairwise effective resistance decreases.

    Raises DisconnectsGraph when removal would split the network.
    """
    i, j = min(edge), max(edge)
    before = reff_matrix(net)
    kept = [(a, b, r) for a, b, r in net.edges if (a, b) != (i, j)]
    if len(kept) == len(net.edges):
        raise SameNode(f"edge {edge} not present in network")
    if new_resistance is None:
        try:
            perturbed = net_mod.build_network(net.node_count, kept)
        except DisconnectedGraph as exc:
            raise DisconnectsGraph(f"removing edge {edge} disconnects") from exc
    else:
        perturbed = net_mod.build_network(
            net.node_count, kept + [(i, j, new_resistance)])
    after = reff_matrix(perturbed)
    delta = after - before
    mask = ~np.eye(net.node_count, dtype=bool)
    report = RayleighReport(
        edge=(i, j), new_resistance=new_resistance,
        min_delta=float(delta[mask].min()), max_delta=float(delta[mask].max()),
        pairs=net.node_count * (net.node_count - 1) // 2)
    assert report.min_delta >= -1e-10, (
        f"effective resistance decreased by {-report.min_delta}")
    return report


# --- scaling sweeps ---

FAMILIES = ("path", "grid2d", "grid3d", "hfuzz")
# hfuzz sweeps use the 2-fuzz of the square grid
HFUZZ_RADIUS = 2


@dataclass(frozen=True)
class ScalingRecord:
    family: str
    n: int
    h2_slack: float
    h2_droop: float
    h2_dapi: float
    kstar: float
    kirchhoff: float


@dataclass(frozen=True)
class FitDiagnostics:
    """Least-squares line of h2_slack against n (paths) or log n (grids)."""

    x_kind: str
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class SweepResult:
    records: tuple[ScalingRecord, ...]
    fit: FitDiagnostics

    def to_csv(self) -> str:
        lines = ["family,n,h2_slack,h2_droop,h2_dapi,kstar,kirchhoff"]
        for r in self.records:
            lines.append(f"{r.family},{r.n},{r.h2_slack!r},{r.h2_droop!r},"
                         f"{r.h2_dapi!r},{r.kstar!r},{r.kirchhoff!r}")
        return "\n".join(lines) + "\n"


def _family_network(family: str, size: int, resistance: float) -> Network:
    if family == "path":
        return net_mod.generate_lattice(1, size, resistance)
    if family == "grid2d":
        return net_mod.generate_lattice(2, size, resistance)
    if family == "grid3d":
        return net_mod.generate_lattice(3, size, resistance)
    if family == "hfuzz":
        base = net_mod.generate_lattice(2, size, resistance)
        return net_mod.generate_hfuzz(base, HFUZZ_RADIUS, resistance)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = y - y.mean()
    r2 = 1.0 - float(resid @ resid) / float(total @ total)
    return float(slope), float(intercept), r2


def scaling_sweep(family: str, sizes, params: systems.ControllerParams,
                  ground: int = 0, resistance: float = 1.0) -> SweepResult:
    """Closed-form H2 norms and resistance indices across network sizes.

    ``sizes`` are side lengths (ascending): node counts for paths, grid
    sides for the 2-D/3-D/fuzz families. Ground defaults to node 0, the
    path end or grid corner.
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    records = []
    for size in sizes:
        net = _family_network(family, size, resistance)
        n = net.node_count
        dec = numerics.eig_sym(net_mod.laplacian(net))
        lam = np.maximum(dec.values, 0.0)
        c = params.uniform("c")
        k_p = params.uniform("k_p")
        inv_nonzero = 1.0 / lam[1:]
        kf = n * float(np.sum(inv_nonzero))
        records.append(ScalingRecord(
            family=family, n=n,
            h2_slack=systems.h2_closed_form_slack(net, params, ground),
            h2_droop=c / (2 * n) * float(np.sum(1.0 / (lam + k_p))),
            h2_dapi=c / (2 * n) * float(
                np.sum(1.0 / systems.dapi_modal_gain(lam, params))),
            kstar=kf / n**2, kirchhoff=kf))

    ns = np.array([r.n for r in records], dtype=float)
    ys = np.array([r.h2_slack for r in records])
    x_kind = "n" if family == "path" else "log_n"
    xs = ns if x_kind == "n" else np.log(ns)
    slope, intercept, r2 = _ols(xs, ys)
    return SweepResult(tuple(records),
                       FitDiagnostics(x_kind, slope, intercept, r2))
