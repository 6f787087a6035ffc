"""Command-line experiment runner.

Subcommands bind the library into seed-deterministic demonstrations and
emit reports that embed the resolved configuration, the package version,
and every tolerance used, so a report is reproducible from its own
header.  JSON is the canonical format; CSV carries tabular series.

Exit codes: 0 when all asserted inequalities hold, 2 when a measured
quantity violates one (the offending value is printed), 1 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .groups import (
    FiniteGroup,
    FreeGroup,
    GroupError,
    IntegerLattice,
    Word,
    parse_group,
)
from .operators import DEFAULT_PSD_TOL, operator_from_json
from .repmaps import OperatorMap, defect, pd_defect, perturb_representation, proximity, regular_representation
from .stability import (
    amenable_correction,
    find_translation_witness,
    folner_convergence_experiment,
    random_vector_family,
)
from .convex import MEMBERSHIP_TOL, operator_hull_check
from .paradox import (
    MAX_FREE_RADIUS,
    min_invariance_defect,
    standard_f2_decomposition,
    tarski_defect_sweep,
)


class ConfigError(ValueError):
    """Bad usage or configuration; maps to exit code 1."""


_DEFAULTS = {
    "stability-demo": {
        "group": "cyclic(6)",
        "eps": 0.05,
        "trials": 200,
        "n_max": 3,
        "f_max": 4,
        "psd_tol": DEFAULT_PSD_TOL,
        "seed": None,
    },
    "hull-check": {
        "map": None,
        "target": None,
        "trials": 200,
        "n_max": 3,
        "tol": MEMBERSHIP_TOL,
        "seed": None,
    },
    "paradox-demo": {
        "radii": [1, 2, 3],
        "sweep_measures": 10_000,
        "sweep_radius": 6,
        "tol": 1e-9,
        "seed": None,
    },
    "folner-demo": {
        "alpha": 0.9,
        "radii": [4, 8, 16],
        "window_radius": 2,
        "seed": None,
    },
    "classify-word": {"word": None, "seed": 0},
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _resolve(subcommand: str, args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS[subcommand])
    file_cfg = _load_config(args.config)
    unknown = set(file_cfg) - set(cfg)
    if unknown:
        raise ConfigError(f"unknown config fields for {subcommand}: {sorted(unknown)}")
    cfg.update(file_cfg)
    for key in cfg:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            cfg[key] = value
    if cfg.get("seed") is None:
        raise ConfigError("a seed is mandatory; pass --seed or put one in the config")
    cfg["seed"] = int(cfg["seed"])
    for key, value in cfg.items():
        if key.endswith("tol") and (not isinstance(value, (int, float)) or value <= 0):
            raise ConfigError(f"tolerance {key} must be positive, got {value!r}")
    return cfg


def _report(subcommand: str, cfg: dict, results: dict) -> dict:
    return {
        "subcommand": subcommand,
        "version": __version__,
        "config": cfg,
        "results": results,
    }


def _emit(report: dict, table: tuple[list[str], list[list]], fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        header, rows = table
        lines = [
            f"# {key}={json.dumps(report['config'][key], sort_keys=True)}"
            for key in sorted(report["config"])
        ]
        lines.append(f"# version={report['version']}")
        lines.append(",".join(header))
        lines.extend(",".join(str(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# subcommand runners: return (results, csv table, violations)


def _run_stability_demo(cfg: dict):
    group = parse_group(str(cfg["group"]))
    if not isinstance(group, FiniteGroup):
        raise ConfigError("stability-demo needs a finite group")
    seed, trials = cfg["seed"], int(cfg["trials"])
    phi = perturb_representation(regular_representation(group), float(cfg["eps"]), seed)
    eps_measured = defect(phi).epsilon
    psi = amenable_correction(phi)
    prox = proximity(phi, psi)
    gram = pd_defect(psi, group.elements(), tol=float(cfg["psd_tol"]))
    rng = np.random.default_rng([seed, 1])
    elements = group.elements()
    found = 0
    for _ in range(trials):
        f_size = int(rng.integers(1, int(cfg["f_max"]) + 1))
        window = [elements[i] for i in rng.choice(len(elements), size=f_size, replace=False)]
        n = int(rng.integers(1, int(cfg["n_max"]) + 1))
        xi = random_vector_family(window, n, phi.dim, rng)
        zeta = random_vector_family(window, n, phi.dim, rng)
        if find_translation_witness(phi, psi, xi, zeta, elements).found:
            found += 1
    rate = found / trials
    ratio = None if eps_measured < 1e-15 else prox / eps_measured
    results = {
        "eps_measured": eps_measured,
        "proximity": prox,
        "proximity_over_eps": ratio,
        "gram_min_eig": gram.min_eigenvalue,
        "witness_rate": rate,
    }
    violations = []
    if gram.min_eigenvalue < -float(cfg["psd_tol"]):
        violations.append(f"gram_min_eig = {gram.min_eigenvalue} < -{cfg['psd_tol']}")
    if ratio is not None and ratio > 2.0:
        violations.append(f"proximity_over_eps = {ratio} > 2")
    if ratio is None and prox > 1e-10:
        violations.append(f"proximity = {prox} with zero measured defect")
    if rate < 1.0:
        violations.append(f"witness_rate = {rate} < 1.0")
    header = ["eps_measured", "proximity", "gram_min_eig", "witness_rate"]
    table = (header, [[eps_measured, prox, gram.min_eigenvalue, rate]])
    return results, table, violations


def _load_operator_map(path: str) -> OperatorMap:
    try:
        return OperatorMap.from_json(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot load operator map {path}: {exc}") from exc


def _run_hull_check(cfg: dict):
    if not cfg.get("map") or not cfg.get("target"):
        raise ConfigError("hull-check needs --map and --target files")
    phi = _load_operator_map(str(cfg["map"]))
    try:
        target = operator_from_json(json.loads(Path(str(cfg["target"])).read_text()))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot load target operator: {exc}") from exc
    result = operator_hull_check(
        phi,
        target,
        seed=cfg["seed"],
        trials=int(cfg["trials"]),
        n_max=int(cfg["n_max"]),
        tol=float(cfg["tol"]),
    )
    results = result.to_json()
    violations = []
    if not result.verdicts_agree:
        if result.member:
            violations.append(f"witness_rate = {result.witness_rate} < 1.0 for a hull member")
        else:
            violations.append(f"refutation_margin = {result.refutation_margin} <= 0")
    header = ["label", "weight"]
    rows = [[str(label), float(w)] for label, w in zip(result.labels, _full_weights(result))]
    return results, (header, rows), violations


def _full_weights(result) -> np.ndarray:
    out = np.zeros(len(result.labels))
    for i, w in result.weights.items():
        out[i] = w
    return out


def _run_paradox_demo(cfg: dict):
    radii = [int(r) for r in cfg["radii"]]
    tol = float(cfg["tol"])
    f2, z2 = FreeGroup(2), IntegerLattice(2)
    rows, violations = [], []
    table_rows = []
    for r in radii:
        row = {"radius": r}
        if r <= MAX_FREE_RADIUS:
            f2_res = min_invariance_defect(f2, r)
            row["f2_defect"] = f2_res.value
            if f2_res.value < 1.0 - tol:
                violations.append(f"f2 defect at r={r} is {f2_res.value} < 1 - {tol}")
        z2_res = min_invariance_defect(z2, r)
        bound = 2.0 / (2.0 * r + 1.0)
        row["z2_defect"] = z2_res.value
        row["z2_box_bound"] = bound
        if z2_res.value > bound + tol:
            violations.append(f"z2 defect at r={r} is {z2_res.value} > {bound}")
        rows.append(row)
        table_rows.append([r, row.get("f2_defect", ""), z2_res.value, bound])
    sweep = tarski_defect_sweep(
        FreeGroup(2).ball(int(cfg["sweep_radius"])),
        int(cfg["sweep_measures"]),
        cfg["seed"],
        standard_f2_decomposition(),
    )
    sweep_min = float(sweep.min())
    if sweep_min < 1.0 - tol:
        violations.append(f"tarski defect sweep minimum {sweep_min} < 1 - {tol}")
    results = {
        "table": rows,
        "tarski_sweep_min": sweep_min,
        "tarski_sweep_measures": int(cfg["sweep_measures"]),
    }
    header = ["radius", "f2_defect", "z2_defect", "z2_box_bound"]
    return results, (header, table_rows), violations


def _run_folner_demo(cfg: dict):
    alpha = float(cfg["alpha"])
    radii = [int(r) for r in cfg["radii"]]
    lattice = IntegerLattice(1)
    window = lattice.ball(int(cfg["window_radius"]))
    ball = lattice.ball(max(radii) + 1 + int(cfg["window_radius"]))
    phi = OperatorMap.from_function(
        lattice,
        ball,
        lambda x: np.array([[np.exp(1j * alpha * x[0] ** 2)]]),
        info={"construction": f"quadratic-phase alpha={alpha}"},
    )
    report, _ = folner_convergence_experiment(
        phi, radii, window, gram_sample=[(0,), (1,), (2,)]
    )
    results = report.to_json(lattice)
    results["increment_ratio_first_to_last"] = (
        report.increments[0] / report.increments[-1] if report.increments[-1] > 0 else None
    )
    violations = []
    if report.increments[-1] >= report.increments[0]:
        violations.append(
            f"averaging increments did not shrink: first {report.increments[0]}, "
            f"last {report.increments[-1]}"
        )
    header = ["radius", "increment"]
    rows = [[r, inc] for r, inc in zip(report.radii, report.increments)]
    return results, (header, rows), violations


def _run_classify_word(cfg: dict):
    raw = cfg.get("word")
    if not raw:
        raise ConfigError("classify-word needs a word, e.g. 'abA'")
    word = Word.parse(str(raw))
    piece = standard_f2_decomposition().classify(word)
    results = {
        "input": raw,
        "reduced": str(word),
        "length": len(word),
        "piece": piece,
    }
    return results, (["reduced", "length", "piece"], [[str(word), len(word), piece]]), []


_RUNNERS = {
    "stability-demo": _run_stability_demo,
    "hull-check": _run_hull_check,
    "paradox-demo": _run_paradox_demo,
    "folner-demo": _run_folner_demo,
    "classify-word": _run_classify_word,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ulam-lab",
        description="numerical experiments on almost-multiplicative maps and invariant measures",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="RNG seed (mandatory here or in the config)")
        p.add_argument("--out", help="write the report to this path instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("stability-demo", help="perturb a representation, average it back, search witnesses")
    common(p)
    p.add_argument("--group", help="finite group descriptor, e.g. cyclic(6) or dihedral(4)")
    p.add_argument("--eps", type=float, help="target multiplicativity defect")
    p.add_argument("--trials", type=int, help="random witness-search trials")

    p = sub.add_parser("hull-check", help="membership of a target operator in a map's convex hull")
    common(p)
    p.add_argument("--map", help="operator map JSON file")
    p.add_argument("--target", help="target operator JSON file")
    p.add_argument("--trials", type=int, help="random family trials")
    p.add_argument("--tol", type=float, help="membership distance tolerance")

    p = sub.add_parser("paradox-demo", help="invariance-defect LPs on F2 vs Z^2 plus a defect sweep")
    common(p)
    p.add_argument("--radii", type=lambda s: [int(x) for x in s.split(",")], help="ball radii, e.g. 1,2,3")
    p.add_argument("--sweep-measures", dest="sweep_measures", type=int, help="random measures in the sweep")

    p = sub.add_parser("folner-demo", help="box averaging of a quadratic-phase map on Z")
    common(p)
    p.add_argument("--alpha", type=float, help="phase coefficient of exp(i alpha k^2)")
    p.add_argument("--radii", type=lambda s: [int(x) for x in s.split(",")], help="box radii, e.g. 4,8,16")

    p = sub.add_parser("classify-word", help="locate a reduced word in the standard F2 pieces")
    common(p)
    p.add_argument("word", nargs="?", help="word in letters a,b with capitals for inverses")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args.subcommand, args)
        results, table, violations = _RUNNERS[args.subcommand](cfg)
    except (ConfigError, GroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = _report(args.subcommand, cfg, results)
    _emit(report, table, args.format, args.out)
    if violations:
        for v in violations:
            print(f"assertion failed: {v}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
