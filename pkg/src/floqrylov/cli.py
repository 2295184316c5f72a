"""Command-line interface.

Subcommands: map (build and save a Floquet unitary), krylov (run the
iteration and emit coefficient/complexity tables), sweep (parameter
sweeps), spectrum (quasi-energy statistics), repro (canned parameter sets
for the standard diagnostic figures).

Option precedence: command-line flag > environment variable > config file
> built-in default. The config file is flat "key = value" text with '#'
comments. FLOQRYLOV_OUT and FLOQRYLOV_SEED override the output directory
and seed. Logging goes to stderr; the last stdout line is a
machine-parsable "key=value ..." summary. Exit code 0 means every artifact
was written and every status is success.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .arnoldi import (
    arnoldi_iterate,
    dump_basis_vectors,
    max_krylov_dim,
    write_hessenberg_csv,
    write_subdiagonal_csv,
)
from .complexity import (
    amplitudes_direct,
    amplitudes_recursive,
    complexity_trace,
    evolve_hermitian_amplitudes,
    write_amplitudes_csv,
    write_complexity_csv,
)
from .errors import ConfigError, FloqrylovError, UsageError
from .ioutil import ensure_dir, fmt, write_csv
from .lanczos import effective_hamiltonian, lanczos_iterate, write_lanczos_csv
from .liouville import (
    hermitian_commutator,
    hermitian_on_state,
    initial_vectors,
    unitary_conjugation,
    unitary_on_state,
)
from .maps import (
    FloquetParams,
    build_kicked_harper,
    build_toral_qkr,
    load_unitary,
    quasi_energies,
    save_unitary,
    unitarity_defect,
)
from .spectral import l1_to_gue, l1_to_poisson, spectrum_stats, write_histogram_csv
from .sweeps import (
    SweepSpec,
    dk_vs_coupling,
    fluctuation_vs_size,
    run_sweep,
    write_sweep_csv,
    write_sweep_metadata,
)

log = logging.getLogger("floqrylov")

ENV_OUT = "FLOQRYLOV_OUT"
ENV_SEED = "FLOQRYLOV_SEED"

# (name, type, default, help); type "list_int"/"list_float" are comma lists
COMMON_OPTIONS = [
    ("out", "str", ".", "output directory"),
    ("seed", "int", 0, "seed for random initial conditions"),
    ("tol", "float", 1e-10, "termination tolerance of the iteration"),
    ("parallelism", "int", 1, "worker threads for sweeps"),
]

COMMAND_OPTIONS = {
    "map": [
        ("model", "str", "toral_qkr", "toral_qkr or kicked_harper"),
        ("n", "int", 350, "Hilbert-space dimension"),
        ("kappa", "float", 10.0, "kick strength"),
        ("alpha", "float", 0.0, "position-grid offset"),
        ("beta", "float", 0.0, "momentum-grid offset"),
    ],
    "krylov": [
        ("model", "str", "toral_qkr", "toral_qkr, kicked_harper, or from_file"),
        ("matrix_file", "str", None, "matrix JSON for model=from_file"),
        ("n", "int", 350, "Hilbert-space dimension"),
        ("kappa", "float", 10.0, "kick strength"),
        ("alpha", "float", 0.0, "position-grid offset"),
        ("beta", "float", 0.0, "momentum-grid offset"),
        ("mode", "str", "state", "state or operator space"),
        ("method", "str", "floquet", "floquet (one-period map) or log_uf (effective Hamiltonian)"),
        ("initial", "str", "auto", "initial-condition descriptor; auto picks a random one"),
        ("max_dim", "int", None, "iteration cap; default is the theoretical maximum"),
        ("steps", "int", None, "evolution steps; default 4 * dk"),
        ("window_fraction", "float", 0.25, "saturation window fraction"),
        ("route", "str", "direct", "amplitude route: direct or recursive"),
        ("dump_basis", "bool", False, "also dump basis vectors as JSON"),
        ("dump_amplitudes", "bool", False, "also dump the amplitude table CSV"),
    ],
    "sweep": [
        ("sweep", "str", "dk_vs_coupling", "dk_vs_coupling, fluctuation_vs_size, or grid"),
        ("model", "str", "toral_qkr", "toral_qkr, kicked_harper, or from_file"),
        ("matrix_file", "str", None, "matrix JSON for model=from_file"),
        ("mode", "str", "state", "state or operator space"),
        ("initial", "str", "auto", "initial-condition descriptor"),
        ("n", "int", 350, "fixed N for dk_vs_coupling"),
        ("ns", "list_int", None, "comma list of N values for size sweeps"),
        ("kappas", "list_float", None, "comma list of kick strengths"),
        ("alpha", "float", 0.0, "position-grid offset"),
        ("beta", "float", 0.0, "momentum-grid offset"),
        ("diag_offset", "int", -1, "Hessenberg diagonal reported by the fluctuation column"),
        ("max_dim", "int", None, "iteration cap per point"),
    ],
    "spectrum": [
        ("model", "str", "toral_qkr", "toral_qkr, kicked_harper, or from_file"),
        ("matrix_file", "str", None, "matrix JSON for model=from_file"),
        ("n", "int", 350, "Hilbert-space dimension"),
        ("kappa", "float", 10.0, "kick strength"),
        ("alpha", "float", 0.0, "position-grid offset"),
        ("beta", "float", 0.0, "momentum-grid offset"),
        ("n_bins", "int", 30, "histogram bins"),
        ("s_max", "float", 4.0, "histogram range"),
    ],
    "repro": [
        ("figure", "str", "fig1", "fig1 .. fig8 or all"),
    ],
}


def read_config(path: str) -> dict:
    """Parse a flat "key = value" config file."""
    cfg = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
        cfg[key.strip()] = value.strip()
    return cfg


def _convert(name: str, typ: str, raw):
    if raw is None:
        return None
    if isinstance(raw, str):
        try:
            if typ == "int":
                return int(raw)
            if typ == "float":
                return float(raw)
            if typ == "bool":
                low = raw.lower()
                if low in ("1", "true", "yes", "on"):
                    return True
                if low in ("0", "false", "no", "off"):
                    return False
                raise ValueError(f"not a boolean: {raw!r}")
            if typ == "list_int":
                return [int(tok) for tok in raw.split(",") if tok.strip()]
            if typ == "list_float":
                return [float(tok) for tok in raw.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad value for {name!r}: {exc}")
        return raw
    return raw


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """Merge flag > env > file > default into one plain dict."""
    options = COMMON_OPTIONS + COMMAND_OPTIONS[command]
    known = {name for name, _, _, _ in options}
    file_cfg = read_config(args.config) if getattr(args, "config", None) else {}
    for key in file_cfg:
        if key not in known:
            log.warning("config file key %r is not used by command %r", key, command)
    env = {}
    if os.environ.get(ENV_OUT):
        env["out"] = os.environ[ENV_OUT]
    if os.environ.get(ENV_SEED):
        env["seed"] = os.environ[ENV_SEED]
    cfg = {}
    for name, typ, default, _ in options:
        value = getattr(args, name, None)
        if value is None and name in env:
            value = env[name]
        if value is None and name in file_cfg:
            value = file_cfg[name]
        if value is None:
            value = default
        if isinstance(value, str) and typ != "str":
            value = _convert(name, typ, value)
        cfg[name] = value
    return cfg


def _params_from(cfg: dict) -> FloquetParams:
    try:
        return FloquetParams(
            n_dim=cfg["n"], kappa=cfg["kappa"], alpha=cfg["alpha"], beta=cfg["beta"]
        )
    except UsageError as exc:
        raise ConfigError(str(exc))


def _build_unitary(cfg: dict):
    model = cfg["model"]
    if model == "toral_qkr":
        params = _params_from(cfg)
        return build_toral_qkr(params), params
    if model == "kicked_harper":
        params = _params_from(cfg)
        return build_kicked_harper(params.n_dim, params.kappa), params
    if model == "from_file":
        if not cfg.get("matrix_file"):
            raise ConfigError("model=from_file requires matrix_file")
        u = load_unitary(cfg["matrix_file"])
        return u, FloquetParams(n_dim=u.n_dim, kappa=cfg["kappa"], alpha=cfg["alpha"], beta=cfg["beta"])
    raise ConfigError(f"unknown model {model!r}")


def _resolve_initial(cfg: dict) -> str:
    initial = cfg["initial"]
    if initial != "auto":
        return initial
    return "random_state" if cfg["mode"] == "state" else "random_hermitian_operator"


def cmd_map(cfg: dict):
    if cfg["model"] not in ("toral_qkr", "kicked_harper"):
        raise ConfigError(f"map builds toral_qkr or kicked_harper, got {cfg['model']!r}")
    u, _ = _build_unitary(cfg)
    defect = unitarity_defect(u.entries)
    ensure_dir(cfg["out"])
    path = os.path.join(cfg["out"], "floquet_matrix.json")
    save_unitary(u, path)
    log.info("wrote %s (N=%d, unitarity defect %.3e)", path, u.n_dim, defect)
    return [path], {"n": u.n_dim, "defect": f"{defect:.3e}"}


def _tridiagonal_from(data) -> np.ndarray:
    h = np.diag(data.a.astype(np.complex128))
    if data.dk > 1:
        h += np.diag(data.b.astype(np.complex128), k=-1)
        h += np.diag(data.b.astype(np.complex128), k=1)
    return h


def cmd_krylov(cfg: dict):
    if cfg["mode"] not in ("state", "operator"):
        raise ConfigError(f"mode must be state or operator, got {cfg['mode']!r}")
    if cfg["method"] not in ("floquet", "log_uf"):
        raise ConfigError(f"method must be floquet or log_uf, got {cfg['method']!r}")
    if cfg["route"] not in ("direct", "recursive"):
        raise ConfigError(f"route must be direct or recursive, got {cfg['route']!r}")
    u, params = _build_unitary(cfg)
    initial = _resolve_initial(cfg)
    v0 = initial_vectors(initial, u.n_dim, cfg["seed"])
    cap = max_krylov_dim(cfg["mode"], u.n_dim)
    max_dim = cap if cfg["max_dim"] is None else min(cap, cfg["max_dim"])
    ensure_dir(cfg["out"])
    files = []

    if cfg["method"] == "floquet":
        liou = unitary_on_state(u) if cfg["mode"] == "state" else unitary_conjugation(u)
        basis = arnoldi_iterate(liou, v0, max_dim, cfg["tol"])
        dk = basis.dk
        steps = 4 * dk if cfg["steps"] is None else cfg["steps"]
        if cfg["route"] == "direct":
            series = amplitudes_direct(basis, liou, v0, steps)
        else:
            series = amplitudes_recursive(basis.hessenberg, dk, steps)
        trace = complexity_trace(series, cfg["window_fraction"])
        h_path = os.path.join(cfg["out"], "hessenberg.csv")
        write_hessenberg_csv(basis, h_path)
        sub_path = os.path.join(cfg["out"], "subdiagonal.csv")
        write_subdiagonal_csv(basis, sub_path)
        files += [h_path, sub_path]
        extras = {"dk": dk, "terminated": basis.terminated, "steps": steps}
        if cfg["dump_basis"]:
            files += dump_basis_vectors(basis, cfg["out"])
    else:
        h_f = effective_hamiltonian(u)
        liou = (
            hermitian_on_state(h_f)
            if cfg["mode"] == "state"
            else hermitian_commutator(h_f)
        )
        data = lanczos_iterate(liou, v0, max_dim, cfg["tol"])
        dk = data.dk
        steps = 4 * dk if cfg["steps"] is None else cfg["steps"]
        series = evolve_hermitian_amplitudes(data, np.arange(steps + 1, dtype=np.float64))
        trace = complexity_trace(series, cfg["window_fraction"])
        lz_path = os.path.join(cfg["out"], "lanczos.csv")
        write_lanczos_csv(data, lz_path)
        tri = _tridiagonal_from(data)
        h_path = os.path.join(cfg["out"], "hessenberg.csv")
        rows = []
        for j in range(dk):
            for k in range(max(0, j - 1), dk):
                rows.append((str(j), str(k), fmt(tri[j, k].real), fmt(tri[j, k].imag)))
        write_csv(h_path, ("j", "k", "re", "im"), rows)
        sub_path = os.path.join(cfg["out"], "subdiagonal.csv")
        write_csv(
            sub_path, ("n", "h"), [(str(n + 1), fmt(b)) for n, b in enumerate(data.b)]
        )
        files += [lz_path, h_path, sub_path]
        extras = {"dk": dk, "steps": steps}

    c_path = os.path.join(cfg["out"], "complexity.csv")
    write_complexity_csv(trace, c_path)
    files.append(c_path)
    if cfg["dump_amplitudes"]:
        a_path = os.path.join(cfg["out"], "amplitudes.csv")
        write_amplitudes_csv(series, a_path)
        files.append(a_path)
    extras["saturation_mean"] = fmt(trace.saturation_mean)
    log.info(
        "krylov %s/%s N=%d kappa=%s: dk=%d, %d files",
        cfg["mode"], cfg["method"], params.n_dim, fmt(params.kappa), dk, len(files),
    )
    return files, extras


def _sweep_grid(cfg: dict) -> tuple[FloquetParams, ...]:
    kind = cfg["sweep"]
    alpha, beta = cfg["alpha"], cfg["beta"]
    if kind == "dk_vs_coupling":
        if not cfg["kappas"]:
            raise ConfigError("dk_vs_coupling needs kappas=<comma list>")
        return tuple(
            FloquetParams(n_dim=cfg["n"], kappa=k, alpha=alpha, beta=beta)
            for k in cfg["kappas"]
        )
    if kind in ("fluctuation_vs_size", "grid"):
        if not cfg["ns"] or not cfg["kappas"]:
            raise ConfigError(f"{kind} needs ns=<comma list> and kappas=<comma list>")
        return tuple(
            FloquetParams(n_dim=n, kappa=k, alpha=alpha, beta=beta)
            for n in cfg["ns"]
            for k in cfg["kappas"]
        )
    raise ConfigError(f"unknown sweep kind {kind!r}")


def cmd_sweep(cfg: dict):
    if cfg["mode"] not in ("state", "operator"):
        raise ConfigError(f"mode must be state or operator, got {cfg['mode']!r}")
    grid = _sweep_grid(cfg)
    try:
        spec = SweepSpec(
            model=cfg["model"],
            mode=cfg["mode"],
            grid=grid,
            initial=_resolve_initial(cfg),
            seed=cfg["seed"],
            tol=cfg["tol"],
            max_steps=cfg["max_dim"],
            diag_offset=cfg["diag_offset"],
            path=cfg.get("matrix_file"),
        )
    except UsageError as exc:
        raise ConfigError(str(exc))
    runner = {
        "dk_vs_coupling": dk_vs_coupling,
        "fluctuation_vs_size": fluctuation_vs_size,
        "grid": run_sweep,
    }[cfg["sweep"]]
    result = runner(spec, cfg["parallelism"])
    ensure_dir(cfg["out"])
    csv_path = os.path.join(cfg["out"], "sweep.csv")
    meta_path = os.path.join(cfg["out"], "sweep_meta.json")
    write_sweep_csv(result, csv_path)
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    write_sweep_metadata(result, meta_path, timestamp=stamp)
    n_err = sum(1 for row in result.rows if row.status != "ok")
    for row in result.rows:
        if row.status != "ok":
            log.error("grid point %d (N=%d): %s", row.index, row.params.n_dim, row.status)
    log.info("sweep %s: %d points, %d failed", cfg["sweep"], len(result.rows), n_err)
    extras = {"points": len(result.rows), "failed_points": n_err}
    if n_err:
        extras["_failed"] = True
    return [csv_path, meta_path], extras


def cmd_spectrum(cfg: dict):
    u, params = _build_unitary(cfg)
    spectrum = quasi_energies(u, params if cfg["model"] != "from_file" else None)
    stats = spectrum_stats(spectrum, n_bins=cfg["n_bins"], s_max=cfg["s_max"])
    ensure_dir(cfg["out"])
    hist_path = os.path.join(cfg["out"], "spacing_histogram.csv")
    write_histogram_csv(stats.histogram, hist_path)
    summary = {
        "n": u.n_dim,
        "r_mean": stats.r_mean,
        "l1_to_poisson": l1_to_poisson(stats.histogram),
        "l1_to_gue": l1_to_gue(stats.histogram),
    }
    sum_path = os.path.join(cfg["out"], "spectrum_summary.json")
    with open(sum_path, "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")
    log.info("spectrum N=%d: r_mean=%.4f", u.n_dim, stats.r_mean)
    extras = {"r_mean": fmt(stats.r_mean)}
    return [hist_path, sum_path], extras


# Canned parameter sets for the standard diagnostic figures. kappa 0.5 / 10
# are the weak / strong coupling choices; offsets (0.2, 0.3) break parity
# and time-reversal where a generic spectrum is wanted.
_KAPPA_GRID = "0.25,0.5,0.75,1,1.5,2,2.5,3,4,5,6,7,8,9,10"

FIGURES = {
    "fig1": [
        ("krylov", {"mode": "state", "n": 350, "kappa": 0.5, "alpha": 0.0, "beta": 0.0}, "state_weak"),
        ("krylov", {"mode": "state", "n": 350, "kappa": 10.0, "alpha": 0.0, "beta": 0.0}, "state_strong"),
        ("krylov", {"mode": "state", "n": 350, "kappa": 10.0, "alpha": 0.2, "beta": 0.3}, "state_strong_offsets"),
    ],
    "fig2": [
        ("sweep", {"sweep": "fluctuation_vs_size", "mode": "state", "ns": "50,100,150,200,250,300,350", "kappas": "0.5,10", "alpha": 0.0, "beta": 0.0}, "fluctuation_vs_size"),
        ("sweep", {"sweep": "dk_vs_coupling", "mode": "state", "n": 350, "kappas": _KAPPA_GRID, "alpha": 0.2, "beta": 0.3}, "dk_vs_coupling"),
    ],
    "fig3": [
        ("krylov", {"mode": "state", "n": 350, "kappa": 0.5, "alpha": 0.2, "beta": 0.3}, "weak"),
        ("krylov", {"mode": "state", "n": 350, "kappa": 10.0, "alpha": 0.2, "beta": 0.3}, "strong"),
    ],
    "fig4": [
        ("krylov", {"mode": "operator", "n": 32, "kappa": 0.5, "alpha": 0.0, "beta": 0.0}, "operator_weak"),
        ("krylov", {"mode": "operator", "n": 32, "kappa": 10.0, "alpha": 0.0, "beta": 0.0}, "operator_strong"),
    ],
    "fig5": [
        ("sweep", {"sweep": "fluctuation_vs_size", "mode": "operator", "ns": "8,12,16,20,24,28,32,36,40", "kappas": "0.5,10", "alpha": 0.0, "beta": 0.0}, "fluctuation_vs_size"),
        ("sweep", {"sweep": "dk_vs_coupling", "mode": "operator", "n": 32, "kappas": _KAPPA_GRID, "alpha": 0.2, "beta": 0.3}, "dk_vs_coupling"),
    ],
    "fig6": [
        ("krylov", {"mode": "operator", "n": 32, "kappa": 0.5, "alpha": 0.2, "beta": 0.3}, "weak"),
        ("krylov", {"mode": "operator", "n": 32, "kappa": 10.0, "alpha": 0.2, "beta": 0.3}, "strong"),
    ],
    "fig7": [
        ("krylov", {"mode": "operator", "method": "log_uf", "n": 32, "kappa": 0.5, "alpha": 0.2, "beta": 0.3}, "weak"),
        ("krylov", {"mode": "operator", "method": "log_uf", "n": 32, "kappa": 10.0, "alpha": 0.2, "beta": 0.3}, "strong"),
    ],
    "fig8": [
        ("spectrum", {"n": 350, "kappa": 0.3, "alpha": 0.0, "beta": 0.0}, "poisson_like"),
        ("spectrum", {"n": 350, "kappa": 10.0, "alpha": 0.2, "beta": 0.3}, "gue_like"),
    ],
}


def preset_config(command: str, overrides: dict) -> dict:
    """Defaults plus preset overrides, with comma-list strings converted."""
    options = COMMON_OPTIONS + COMMAND_OPTIONS[command]
    cfg = {opt: default for opt, _, default, _ in options}
    cfg.update(overrides)
    for opt, typ, _, _ in options:
        if isinstance(cfg[opt], str) and typ != "str":
            cfg[opt] = _convert(opt, typ, cfg[opt])
    return cfg


def cmd_repro(cfg: dict):
    figure = cfg["figure"]
    names = list(FIGURES) if figure == "all" else [figure]
    for name in names:
        if name not in FIGURES:
            raise ConfigError(f"unknown figure {name!r}; choose fig1..fig8 or all")
    files = []
    failed = False
    for name in names:
        for command, overrides, subdir in FIGURES[name]:
            sub_cfg = preset_config(command, overrides)
            sub_cfg["out"] = os.path.join(cfg["out"], name, subdir)
            sub_cfg["seed"] = cfg["seed"]
            sub_cfg["tol"] = cfg["tol"]
            sub_cfg["parallelism"] = cfg["parallelism"]
            log.info("repro %s/%s: %s %s", name, subdir, command, overrides)
            step_files, step_extras = COMMANDS[command](sub_cfg)
            files += step_files
            failed = failed or bool(step_extras.get("_failed"))
    extras = {"figures": ",".join(names)}
    if failed:
        extras["_failed"] = True
    return files, extras


COMMANDS = {
    "map": cmd_map,
    "krylov": cmd_krylov,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "repro": cmd_repro,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floqrylov",
        description="Krylov-subspace diagnostics for Floquet quantum maps",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, options in COMMAND_OPTIONS.items():
        sub = subparsers.add_parser(command, help=f"{command} command")
        sub.add_argument("--config", type=str, default=None, help="flat key=value config file")
        for name, typ, default, help_text in COMMON_OPTIONS + options:
            flag = "--" + name.replace("_", "-")
            if typ == "bool":
                sub.add_argument(flag, dest=name, action="store_true", default=None, help=help_text)
            elif typ == "int":
                sub.add_argument(flag, dest=name, type=int, default=None, help=help_text)
            elif typ == "float":
                sub.add_argument(flag, dest=name, type=float, default=None, help=help_text)
            else:
                sub.add_argument(flag, dest=name, type=str, default=None, help=help_text)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    try:
        cfg = resolve_config(command, args)
        files, extras = COMMANDS[command](cfg)
    except ConfigError as exc:
        log.error("%s", exc)
        print(f"status=error command={command} error={str(exc)!r}")
        return 2
    except FloqrylovError as exc:
        log.error("%s", exc)
        print(f"status=error command={command} error={str(exc)!r}")
        return 1
    failed = bool(extras.pop("_failed", False))
    status = "error" if failed else "ok"
    detail = " ".join(f"{k}={v}" for k, v in extras.items())
    print(f"status={status} command={command} files={len(files)}" + (f" {detail}" if detail else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
