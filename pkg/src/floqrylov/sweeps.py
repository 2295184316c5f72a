"""Parameter sweeps over map parameters.

Grid points are embarrassingly parallel; rows are always assembled in grid
order so the result is identical for any parallelism level. A failure at
one grid point is recorded in its row and does not abort the sweep.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .arnoldi import arnoldi_iterate, max_krylov_dim
from .errors import UsageError
from .ioutil import fmt, write_csv
from .liouville import initial_vectors, unitary_conjugation, unitary_on_state
from .maps import FloquetParams, build_kicked_harper, build_toral_qkr, load_unitary

MODELS = ("toral_qkr", "kicked_harper", "from_file")
MODES = ("state", "operator")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a model, a space, a parameter grid, and numerics config.

    diag_offset selects which diagonal of the Hessenberg matrix the
    fluctuation column reports; -1 (the default) is the subdiagonal of
    norms. max_steps caps the iteration length, None means the theoretical
    maximum for the space.
    """

    model: str
    mode: str
    grid: tuple[FloquetParams, ...]
    initial: str
    seed: int = 0
    tol: float = 1e-10
    max_steps: int | None = None
    diag_offset: int = -1
    path: str | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise UsageError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, got {self.mode!r}")
        grid = tuple(self.grid)
        if len(grid) == 0:
            raise UsageError("sweep grid must not be empty")
        for p in grid:
            if not isinstance(p, FloquetParams):
                raise UsageError(f"grid entries must be FloquetParams, got {type(p)}")
        if self.model == "from_file" and not self.path:
            raise UsageError("model 'from_file' requires a matrix path")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class SweepRow:
    """Result of one grid point; dk and h_subdiag_std are None on error."""

    index: int
    params: FloquetParams
    dk: int | None
    dk_max: int
    h_subdiag_std: float | None
    status: str
    extra: dict = field(default_factory=dict)


@dataclass(eq=False)
class SweepResult:
    rows: list[SweepRow]
    metadata: dict


def _build_matrix(spec: SweepSpec, params: FloquetParams):
    if spec.model == "toral_qkr":
        return build_toral_qkr(params)
    if spec.model == "kicked_harper":
        return build_kicked_harper(params.n_dim, params.kappa)
    u = load_unitary(spec.path)
    if u.n_dim != params.n_dim:
        raise UsageError(
            f"matrix file has N={u.n_dim} but the grid point asks for N={params.n_dim}"
        )
    return u


def _evaluate_point(spec: SweepSpec, index: int, params: FloquetParams) -> SweepRow:
    dk_max = max_krylov_dim(spec.mode, params.n_dim)
    try:
        u = _build_matrix(spec, params)
        liou = unitary_on_state(u) if spec.mode == "state" else unitary_conjugation(u)
        v0 = initial_vectors(spec.initial, params.n_dim, spec.seed)
        cap = dk_max if spec.max_steps is None else min(dk_max, spec.max_steps)
        basis = arnoldi_iterate(liou, v0, cap, spec.tol)
        diag = np.abs(np.diag(basis.hessenberg, k=spec.diag_offset))
        std = float(diag.std()) if diag.size else 0.0
        return SweepRow(
            index=index,
            params=params,
            dk=basis.dk,
            dk_max=dk_max,
            h_subdiag_std=std,
            status="ok",
            extra={"terminated": basis.terminated},
        )
    except Exception as exc:  # record per-point failures, keep sweeping
        return SweepRow(
            index=index,
            params=params,
            dk=None,
            dk_max=dk_max,
            h_subdiag_std=None,
            status=f"error: {exc}",
        )


def _spec_echo(spec: SweepSpec) -> dict:
    return {
        "model": spec.model,
        "mode": spec.mode,
        "initial": spec.initial,
        "seed": spec.seed,
        "tol": spec.tol,
        "max_steps": spec.max_steps,
        "diag_offset": spec.diag_offset,
        "path": spec.path,
        "grid": [[p.n_dim, p.kappa, p.alpha, p.beta] for p in spec.grid],
    }


def run_sweep(spec: SweepSpec, parallelism: int = 1) -> SweepResult:
    """Evaluate every grid point; identical output for any parallelism.

    The timestamp field in the metadata stays None here so results are
    directly comparable; the CLI fills it when writing the sidecar.
    """
    if parallelism < 1:
        raise UsageError(f"parallelism must be >= 1, got {parallelism}")
    points = list(enumerate(spec.grid))
    if parallelism == 1:
        rows = [_evaluate_point(spec, i, p) for i, p in points]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(lambda ip: _evaluate_point(spec, *ip), points))
    metadata = {"spec": _spec_echo(spec), "version": __version__, "timestamp": None}
    return SweepResult(rows=rows, metadata=metadata)


def dk_vs_coupling(spec: SweepSpec, parallelism: int = 1) -> SweepResult:
    """Krylov dimension against kick strength at fixed N, alpha, beta."""
    first = spec.grid[0]
    for p in spec.grid:
        if (p.n_dim, p.alpha, p.beta) != (first.n_dim, first.alpha, first.beta):
            raise UsageError("dk_vs_coupling varies kappa only; N, alpha, beta are fixed")
    result = run_sweep(spec, parallelism)
    result.metadata["sweep"] = "dk_vs_coupling"
    result.metadata["dk_max"] = max_krylov_dim(spec.mode, first.n_dim)
    return result


def fluctuation_vs_size(spec: SweepSpec, parallelism: int = 1) -> SweepResult:
    """Hessenberg-diagonal fluctuations against N for two or more couplings."""
    kappas = {p.kappa for p in spec.grid}
    if len(kappas) < 2:
        raise UsageError("fluctuation_vs_size needs two or more fixed kappa values")
    result = run_sweep(spec, parallelism)
    result.metadata["sweep"] = "fluctuation_vs_size"
    return result


def write_sweep_csv(result: SweepResult, path) -> None:
    """Write rows as "index,N,kappa,alpha,beta,dk,dk_max,h_subdiag_std,status"."""
    rows = []
    for row in result.rows:
        p = row.params
        rows.append(
            (
                str(row.index),
                str(p.n_dim),
                fmt(p.kappa),
                fmt(p.alpha),
                fmt(p.beta),
                "" if row.dk is None else str(row.dk),
                str(row.dk_max),
                "" if row.h_subdiag_std is None else fmt(row.h_subdiag_std),
                row.status,
            )
        )
    write_csv(
        path,
        ("index", "N", "kappa", "alpha", "beta", "dk", "dk_max", "h_subdiag_std", "status"),
        rows,
    )


def write_sweep_metadata(result: SweepResult, path, timestamp: str | None = None) -> None:
    """Write the metadata sidecar as sorted-key JSON."""
    import json

    meta = dict(result.metadata)
    if timestamp is not None:
        meta["timestamp"] = timestamp
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")
