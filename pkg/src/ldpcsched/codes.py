"""LDPC code structure: Tanner graphs, quasi-cyclic expansion, alist I/O.

Edges are numbered in check-major order: all edges of check 0 first (by
ascending variable index), then check 1, and so on.  Check ``i`` therefore
owns the contiguous edge range ``check_ptr[i]:check_ptr[i+1]``, which keeps
check-node iteration cache-friendly and makes tie-breaking by edge index
deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np


class CodeFormatError(ValueError):
    """A code file or matrix description is malformed."""


@dataclass(frozen=True)
class TannerGraph:
    """Immutable bipartite graph of an LDPC code.

    Attributes
    ----------
    n_vars, n_checks : int
        Number of variable nodes (codeword bits) and check nodes.
    edge_check, edge_var : int32 arrays of length E
        Endpoints of edge e, in check-major order.
    check_ptr : int32 array of length M+1
        Edge range of check i is ``check_ptr[i]:check_ptr[i+1]``.
    var_ptr, var_edges : int32 arrays
        ``var_edges[var_ptr[j]:var_ptr[j+1]]`` lists the edge indices
        incident to variable j, ascending.
    """

    n_vars: int
    n_checks: int
    edge_check: np.ndarray
    edge_var: np.ndarray
    check_ptr: np.ndarray
    var_ptr: np.ndarray
    var_edges: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(self.edge_var.shape[0])

    def check_edges(self, c: int) -> np.ndarray:
        """Edge indices incident to check c (a contiguous range)."""
        return np.arange(self.check_ptr[c], self.check_ptr[c + 1], dtype=np.int32)

    def var_edge_list(self, v: int) -> np.ndarray:
        """Edge indices incident to variable v."""
        return self.var_edges[self.var_ptr[v]:self.var_ptr[v + 1]]

    def check_degree(self, c: int) -> int:
        return int(self.check_ptr[c + 1] - self.check_ptr[c])

    def var_degree(self, v: int) -> int:
        return int(self.var_ptr[v + 1] - self.var_ptr[v])

    def edges(self) -> list[tuple[int, int]]:
        """All (check, var) pairs in edge-index order."""
        return list(zip(self.edge_check.tolist(), self.edge_var.tolist()))


def build_graph(n_vars: int, n_checks: int, pairs) -> TannerGraph:
    """Build a validated TannerGraph from (check, var) pairs.

    Pairs are canonicalized to check-major order.  Raises CodeFormatError on
    duplicate edges, out-of-range indices, an empty edge set, or isolated
    variable nodes (which make FER accounting ambiguous).  Warns if the graph
    is disconnected.  Check nodes of degree 1 are representable but are
    rejected by the decoders (see validate_for_decoding).
    """
    if n_vars < 1 or n_checks < 1:
        raise CodeFormatError(f"need at least one variable and one check, got N={n_vars} M={n_checks}")
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.shape[0] == 0:
        raise CodeFormatError("graph has no edges")
    checks, vars_ = pairs[:, 0], pairs[:, 1]
    if checks.min() < 0 or checks.max() >= n_checks:
        raise CodeFormatError(f"check index out of range [0, {n_checks})")
    if vars_.min() < 0 or vars_.max() >= n_vars:
        raise CodeFormatError(f"variable index out of range [0, {n_vars})")

    order = np.lexsort((vars_, checks))
    checks, vars_ = checks[order], vars_[order]
    if np.any((np.diff(checks) == 0) & (np.diff(vars_) == 0)):
        raise CodeFormatError("duplicate (check, var) edge")

    n_edges = checks.shape[0]
    check_ptr = np.zeros(n_checks + 1, dtype=np.int32)
    np.add.at(check_ptr, checks + 1, 1)
    np.cumsum(check_ptr, out=check_ptr)

    var_deg = np.bincount(vars_, minlength=n_vars)
    if var_deg.min() == 0:
        raise CodeFormatError(f"isolated variable node {int(np.argmin(var_deg))}")

    var_ptr = np.zeros(n_vars + 1, dtype=np.int32)
    var_ptr[1:] = np.cumsum(var_deg)
    # edge ids grouped by variable; stable sort keeps them ascending per var
    var_edges = np.argsort(vars_, kind="stable").astype(np.int32)

    g = TannerGraph(
        n_vars=n_vars,
        n_checks=n_checks,
        edge_check=checks.astype(np.int32),
        edge_var=vars_.astype(np.int32),
        check_ptr=check_ptr,
        var_ptr=var_ptr,
        var_edges=var_edges,
    )
    for arr in (g.edge_check, g.edge_var, g.check_ptr, g.var_ptr, g.var_edges):
        arr.setflags(write=False)
    if _count_components(g) > 1:
        warnings.warn("Tanner graph is disconnected (legal, but FER mixes independent subcodes)")
    return g


def validate_for_decoding(g: TannerGraph) -> None:
    """Structural requirements of the decoders: every check degree >= 2
    (degree-1 checks break the min-sum two-minimum rule)."""
    deg = np.diff(g.check_ptr)
    if deg.min() < 2:
        bad = int(np.argmin(deg))
        raise CodeFormatError(f"check node {bad} has degree {int(deg[bad])} (< 2)")


def _count_components(g: TannerGraph) -> int:
    """Connected components of the bipartite graph (vars 0..N-1, checks N..N+M-1)."""
    n = g.n_vars + g.n_checks
    seen = np.zeros(n, dtype=bool)
    components = 0
    for start in range(n):
        if seen[start]:
            continue
        components += 1
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            if u < g.n_vars:
                nbrs = g.n_vars + g.edge_check[g.var_edge_list(u)]
            else:
                c = u - g.n_vars
                nbrs = g.edge_var[g.check_ptr[c]:g.check_ptr[c + 1]]
            for w in nbrs:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
    return components


@dataclass(frozen=True)
class QcBaseMatrix:
    """Quasi-cyclic base matrix: entries are -1 (zero block) or a cyclic
    right-shift k in [0, z) of the z x z identity."""

    rows: int
    cols: int
    z: int
    entries: np.ndarray  # (rows, cols) int

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.int64)
        object.__setattr__(self, "entries", entries)
        if self.z < 1:
            raise CodeFormatError(f"sub-matrix size z must be >= 1, got {self.z}")
        if entries.shape != (self.rows, self.cols):
            raise CodeFormatError(
                f"entry grid is {entries.shape}, expected ({self.rows}, {self.cols})")
        bad = (entries != -1) & ((entries < 0) | (entries >= self.z))
        if np.any(bad):
            r, c = np.argwhere(bad)[0]
            raise CodeFormatError(
                f"shift {int(entries[r, c])} at block ({int(r)},{int(c)}) outside [-1, {self.z})")


def expand_qc(base: QcBaseMatrix) -> TannerGraph:
    """Expand a QC base matrix into its full Tanner graph.

    Block (r, c) with shift k contributes the z edges
    (r*z + i, c*z + ((i + k) mod z)) for i in 0..z-1.
    """
    z = base.z
    rs, cs = np.nonzero(base.entries != -1)
    if rs.size == 0:
        raise CodeFormatError("base matrix has no non-null blocks")
    ks = base.entries[rs, cs]
    i = np.arange(z)
    check = (rs[:, None] * z + i[None, :]).ravel()
    var = (cs[:, None] * z + (i[None, :] + ks[:, None]) % z).ravel()
    return build_graph(base.cols * z, base.rows * z, np.column_stack([check, var]))


def parse_qc(text: str) -> QcBaseMatrix:
    """Parse the QC text format: first line ``rows cols z``, then rows lines
    of cols integers (-1 or a shift)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CodeFormatError("line 1: empty QC file")
    head = lines[0].split()
    if len(head) != 3:
        raise CodeFormatError(f"line 1: expected 'rows cols z', got {lines[0]!r}")
    try:
        rows, cols, z = (int(x) for x in head)
    except ValueError:
        raise CodeFormatError(f"line 1: non-integer header field in {lines[0]!r}") from None
    if len(lines) != 1 + rows:
        raise CodeFormatError(f"expected {rows} entry lines, got {len(lines) - 1}")
    entries = np.empty((rows, cols), dtype=np.int64)
    for r in range(rows):
        fields = lines[1 + r].split()
        if len(fields) != cols:
            raise CodeFormatError(f"line {r + 2}: expected {cols} entries, got {len(fields)}")
        try:
            entries[r] = [int(x) for x in fields]
        except ValueError:
            raise CodeFormatError(f"line {r + 2}: non-integer entry") from None
    return QcBaseMatrix(rows=rows, cols=cols, z=z, entries=entries)


def write_qc(base: QcBaseMatrix) -> str:
    lines = [f"{base.rows} {base.cols} {base.z}"]
    for r in range(base.rows):
        lines.append(" ".join(str(int(x)) for x in base.entries[r]))
    return "\n".join(lines) + "\n"


def load_alist(text: str | bytes) -> TannerGraph:
    """Parse the conventional alist sparse-matrix text format.

    Layout: ``N M`` / max degrees / per-variable degrees / per-check degrees /
    N variable adjacency lines (1-based check indices, zero-padded) /
    M check adjacency lines (1-based variable indices, zero-padded).
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]

    def ints(line_no: int, expect: int | None = None) -> list[int]:
        if line_no >= len(rows):
            raise CodeFormatError(f"line {line_no + 1}: unexpected end of file")
        try:
            vals = [int(x) for x in rows[line_no]]
        except ValueError:
            raise CodeFormatError(f"line {line_no + 1}: non-integer field") from None
        if expect is not None and len(vals) != expect:
            raise CodeFormatError(
                f"line {line_no + 1}: expected {expect} fields, got {len(vals)}")
        return vals

    n, m = ints(0, 2)
    if n < 1 or m < 1:
        raise CodeFormatError("line 1: non-positive dimensions")
    ints(1, 2)  # max degrees; informational only
    var_deg = ints(2, n)
    check_deg = ints(3, m)

    pairs = []
    for j in range(n):
        vals = ints(4 + j)
        live = [v for v in vals if v != 0]
        if len(live) != var_deg[j]:
            raise CodeFormatError(
                f"line {5 + j}: variable {j} lists {len(live)} checks, degree says {var_deg[j]}")
        for v in live:
            if not 1 <= v <= m:
                raise CodeFormatError(f"line {5 + j}: check index {v} outside [1, {m}]")
            pairs.append((v - 1, j))
    for i in range(m):
        vals = ints(4 + n + i)
        live = [v for v in vals if v != 0]
        if len(live) != check_deg[i]:
            raise CodeFormatError(
                f"line {5 + n + i}: check {i} lists {len(live)} variables, degree says {check_deg[i]}")
        for v in live:
            if not 1 <= v <= n:
                raise CodeFormatError(f"line {5 + n + i}: variable index {v} outside [1, {n}]")

    graph = build_graph(n, m, pairs)
    # the two adjacency sections must describe the same matrix
    declared = sorted((i, v - 1) for i in range(m) for v in
                      [x for x in ints(4 + n + i) if x != 0])
    if declared != sorted(zip(graph.edge_check.tolist(), graph.edge_var.tolist())):
        raise CodeFormatError("variable and check adjacency sections disagree")
    return graph


def write_alist(graph: TannerGraph) -> str:
    """Serialize to canonical alist text; inverse of load_alist on
    (n_vars, n_checks, edge set)."""
    n, m = graph.n_vars, graph.n_checks
    var_lists = [sorted(graph.edge_check[e] + 1 for e in graph.var_edge_list(j))
                 for j in range(n)]
    check_lists = [sorted(graph.edge_var[e] + 1
                          for e in range(graph.check_ptr[i], graph.check_ptr[i + 1]))
                   for i in range(m)]
    max_vd = max(len(x) for x in var_lists)
    max_cd = max(len(x) for x in check_lists)
    out = [f"{n} {m}", f"{max_vd} {max_cd}",
           " ".join(str(len(x)) for x in var_lists),
           " ".join(str(len(x)) for x in check_lists)]
    for lst in var_lists:
        out.append(" ".join(str(v) for v in lst + [0] * (max_vd - len(lst))))
    for lst in check_lists:
        out.append(" ".join(str(v) for v in lst + [0] * (max_cd - len(lst))))
    return "\n".join(out) + "\n"


def load_code(path: str | Path, fmt: str) -> TannerGraph:
    """Load a Tanner graph from a file in 'alist' or 'qc' format."""
    text = Path(path).read_text(encoding="ascii")
    if fmt == "alist":
        return load_alist(text)
    if fmt == "qc":
        return expand_qc(parse_qc(text))
    raise CodeFormatError(f"unknown code format {fmt!r}")


def shipped_code_path(name: str) -> Path:
    """Path to a QC base matrix shipped with the package.

    Available: 'qc_rate12_z54.qc' (N=1944 rate-1/2), 'qc_rate56_z54.qc'
    (N=1944 rate-5/6).
    """
    p = resources.files("ldpcsched").joinpath("data", name)
    with resources.as_file(p) as fp:
        return Path(fp)
