"""Command-line front end: configure, run, and export plot-ready CSVs.

Subcommands:
  optimize    active-learning QGA, classical GA, or exhaustive enumeration
  rmse-study  train-size sweep comparing forest and factorization-machine RMSE
  compare     paired QGA runs (forest vs factorization machine surrogate)
              from identical initialization

Every run writes a manifest and a resolved-config snapshot before any
computation starts; all CSVs are deterministic given config + seed (the
manifest carries the only timestamps).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__, presets
from .active_learning import (LoopConfig, STATUS_BUDGET_EXHAUSTED,
                              STATUS_CONVERGED, evaluation_budget_report,
                              run_loop)
from .baselines import CgaConfig, cga_evolve, exhaustive_search
from .dataset import LabeledDataset
from .encoding import code_to_string
from .fm import FmConfig, fm_train
from .forest import ForestConfig, rf_train
from .problem import CountingFitness, TrcProblem, default_problem
from .qga import QgaConfig, RotationSchedule, write_trace_csv
from .surrogate import evaluate_rmse

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET_EXHAUSTED = 2


# ---------------------------------------------------------------- config --

DEFAULTS = {
    "problem": {
        "layers": 6,
        "thickness_nm": [],  # empty -> default log-spaced ladder
        "lambda_min_nm": 300.0,
        "lambda_max_nm": 2500.0,
        "lambda_step_nm": 5.0,
        "ambient_n": 1.0,
        "substrate_n": 1.0,
        "materials_dir": "",
        "solar_file": "",
    },
    "qga": {
        "population_size": 25,
        "max_generations": 100,
        "mutation_rate": presets.MUTATION_RATE,
        "theta_max_pi": 0.1,
        "theta_min_pi": 0.01,
        "stagnation_fraction": 0.5,
        "memory_corruption_prob": 0.1,
    },
    "active_learning": {
        "initial_dataset_size": 25,
        "max_iterations": 10,
        "surrogate": "rf",
        "convergence_repeats": 3,
    },
    "rf": {
        "tree_count": 100,
        "max_depth": 0,  # 0 means unlimited
        "min_samples_leaf": 1,
        "feature_subsample": 1.0 / 3.0,
        "bootstrap": True,
    },
    "fm": {
        "latent_rank": 8,
        "learning_rate": 0.01,
        "epochs": 500,
        "l2_penalty": 1e-4,
    },
    "cga": {
        "population_size": 50,
        "generations": 200,
        "crossover_rate": 0.8,
        "mutation_rate": 0.0,  # 0 means 1/code_length
        "elitism_count": 1,
        "tournament_size": 3,
    },
    "study": {
        "models": ["rf", "fm"],
        "layer_counts": [8, 10, 16, 20],
        "train_sizes": [25, 50, 75, 100],
        "repeats": 10,
        "test_size": 200,
    },
    "compare": {
        "layer_counts": [8, 16],
    },
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, overlay: dict, path="") -> dict:
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in base.items()}
    for key, value in overlay.items():
        where = f"{path}.{key}" if path else key
        if key not in out:
            raise ConfigError(f"unknown config field {where!r}")
        if isinstance(out[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where} must be a table")
            out[key] = _merge(out[key], value, where)
        else:
            out[key] = value
    return out


def load_config(config_path: str | None, preset: str | None,
                seed: int) -> dict:
    config = {k: dict(v) for k, v in DEFAULTS.items()}
    if preset is not None:
        layers, m, generations, iterations, population = presets.PRESET_TABLE[preset]
        config["problem"]["layers"] = layers
        config["qga"]["population_size"] = population
        config["qga"]["max_generations"] = generations
        config["active_learning"]["initial_dataset_size"] = m
        config["active_learning"]["max_iterations"] = iterations
    if config_path:
        try:
            with open(config_path, "rb") as fh:
                user = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {config_path}")
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config parse error in {config_path}: {exc}")
        config = _merge(config, user)
    config["seed"] = int(seed)
    return config


def build_problem(config: dict) -> TrcProblem:
    from . import optics

    p = config["problem"]
    materials = None
    if p["materials_dir"]:
        materials = {}
        for name in ("sio2", "si3n4", "tio2", "al2o3"):
            path = Path(p["materials_dir"]) / f"{name}.csv"
            if not path.exists():
                raise ConfigError(f"missing material file {path}")
            materials[name] = optics.load_material_csv(path, name)
    solar = None
    if p["solar_file"]:
        if not Path(p["solar_file"]).exists():
            raise ConfigError(f"missing solar file {p['solar_file']}")
        solar = optics.load_solar_csv(p["solar_file"])
    thickness = p["thickness_nm"]
    if isinstance(thickness, list) and not thickness:
        thickness = None
    return default_problem(
        int(p["layers"]), thickness_nm=thickness,
        lambda_min_nm=p["lambda_min_nm"], lambda_max_nm=p["lambda_max_nm"],
        step_nm=p["lambda_step_nm"], materials=materials, solar=solar,
        ambient_n=p["ambient_n"], substrate_n=p["substrate_n"])


def build_loop_config(config: dict, surrogate: str | None = None) -> LoopConfig:
    q = config["qga"]
    al = config["active_learning"]
    qga = QgaConfig(
        population_size=int(q["population_size"]),
        mutation_rate=q["mutation_rate"],
        schedule=RotationSchedule(q["theta_max_pi"] * math.pi,
                                  q["theta_min_pi"] * math.pi,
                                  int(q["max_generations"])),
        stagnation_fraction=q["stagnation_fraction"],
        memory_corruption_prob=q["memory_corruption_prob"],
        rng_seed=config["seed"],
    )
    return LoopConfig(
        initial_dataset_size=int(al["initial_dataset_size"]),
        max_iterations=int(al["max_iterations"]),
        qga=qga,
        surrogate_choice=surrogate if surrogate is not None else al["surrogate"],
        rf=build_rf_config(config, config["seed"]),
        fm=build_fm_config(config, config["seed"]),
        convergence_repeats=int(al["convergence_repeats"]),
        rng_seed=config["seed"],
    )


def build_rf_config(config: dict, seed: int) -> ForestConfig:
    r = config["rf"]
    return ForestConfig(
        tree_count=int(r["tree_count"]),
        max_depth=None if int(r["max_depth"]) == 0 else int(r["max_depth"]),
        min_samples_leaf=int(r["min_samples_leaf"]),
        feature_subsample=r["feature_subsample"],
        bootstrap=bool(r["bootstrap"]),
        rng_seed=seed,
    )


def build_fm_config(config: dict, seed: int) -> FmConfig:
    f = config["fm"]
    return FmConfig(latent_rank=int(f["latent_rank"]),
                    learning_rate=f["learning_rate"], epochs=int(f["epochs"]),
                    l2_penalty=f["l2_penalty"], rng_seed=seed)


def build_cga_config(config: dict) -> CgaConfig:
    c = config["cga"]
    return CgaConfig(
        population_size=int(c["population_size"]),
        generations=int(c["generations"]),
        crossover_rate=c["crossover_rate"],
        mutation_rate=None if c["mutation_rate"] == 0 else c["mutation_rate"],
        elitism_count=int(c["elitism_count"]),
        tournament_size=int(c["tournament_size"]),
        rng_seed=config["seed"],
    )


# ------------------------------------------------------------- run setup --

def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__} to TOML")


def write_config_toml(config: dict, path: Path) -> None:
    lines = []
    for key, value in config.items():
        if not isinstance(value, dict):
            lines.append(f"{key} = {_toml_value(value)}")
    for section, table in config.items():
        if isinstance(table, dict):
            lines.append("")
            lines.append(f"[{section}]")
            for key, value in table.items():
                lines.append(f"{key} = {_toml_value(value)}")
    path.write_text("\n".join(lines) + "\n")


def start_run(command: str, args, config: dict) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "config_path": args.config or "",
        "preset": getattr(args, "preset", "") or "",
        "seed": config["seed"],
        "artifact_version": __version__,
        "started_unix": time.time(),
        "output_dir": str(out),
        "argv": sys.argv[1:],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    write_config_toml(config, out / "config.toml")
    return out


def write_spectrum_csv(problem: TrcProblem, code, path: Path) -> None:
    t, r = problem.spectral_response(code)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["wavelength_nm", "T", "R"])
        for wl, ti, ri in zip(problem.grid.wavelengths_nm, t, r):
            writer.writerow([repr(float(wl)), repr(float(ti)), repr(float(ri))])


def write_iterations_csv(records, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "proposed_code", "surrogate_fom", "true_fom",
                         "dataset_size", "duplicate", "tmm_evaluations"])
        for rec in records:
            writer.writerow([rec.iteration, code_to_string(rec.proposed_code),
                             repr(rec.predicted_fom), repr(rec.true_fom),
                             rec.dataset_size, int(rec.duplicate),
                             rec.tmm_evaluations])


# --------------------------------------------------------------- commands --

def cmd_optimize(args) -> int:
    config = load_config(args.config, args.preset, args.seed)
    problem = build_problem(config)
    out = start_run("optimize", args, config)

    if args.algo == "qga":
        loop_config = build_loop_config(config)
        result = run_loop(loop_config, problem)
        result.dataset.to_csv(out / "dataset.csv")
        write_iterations_csv(result.records, out / "iterations.csv")
        for i, ev in enumerate(result.evolve_results):
            write_trace_csv(ev.trace, out / f"qga_trace_{i}.csv")
        budget = evaluation_budget_report(result, loop_config, problem.code_length)
        (out / "budget.json").write_text(json.dumps(budget, indent=2) + "\n")
        summary = {
            "status": result.status,
            "best_code": code_to_string(result.best_code),
            "best_fom": result.best_true_fom,
            "tmm_evaluations": result.tmm_evaluations,
            "surrogate_evaluations": result.surrogate_evaluations,
        }
        if result.error:
            summary["error"] = result.error
        (out / "result.json").write_text(json.dumps(summary, indent=2) + "\n")
        write_spectrum_csv(problem, result.best_code, out / "best_spectrum.csv")
        print(f"qga: best {summary['best_code']} fom {result.best_true_fom:.6f} "
              f"({result.status}, {result.tmm_evaluations} TMM evaluations)")
        if result.status == STATUS_CONVERGED:
            return EXIT_OK
        if result.status == STATUS_BUDGET_EXHAUSTED:
            return EXIT_BUDGET_EXHAUSTED
        return EXIT_ERROR

    if args.algo == "cga":
        cga_config = build_cga_config(config)
        fitness = CountingFitness(problem.fitness)
        result = cga_evolve(cga_config, fitness, problem.code_length)
        write_trace_csv(result.trace, out / "trace.csv")
        best_fom = result.best_fitness / -100.0
        (out / "result.json").write_text(json.dumps({
            "best_code": code_to_string(result.best_code),
            "best_fom": best_fom,
            "tmm_evaluations": fitness.calls,
        }, indent=2) + "\n")
        write_spectrum_csv(problem, result.best_code, out / "best_spectrum.csv")
        print(f"cga: best {code_to_string(result.best_code)} fom {best_fom:.6f} "
              f"({fitness.calls} TMM evaluations)")
        return EXIT_OK

    # exhaustive
    fitness = CountingFitness(problem.fitness)
    result = exhaustive_search(fitness, problem.code_length)
    best_fom = result.best_fitness / -100.0
    (out / "result.json").write_text(json.dumps({
        "best_code": code_to_string(result.best_code),
        "best_fom": best_fom,
        "tmm_evaluations": result.evaluations,
        "tie_count": result.tie_count,
    }, indent=2) + "\n")
    write_spectrum_csv(problem, result.best_code, out / "best_spectrum.csv")
    print(f"exhaustive: best {code_to_string(result.best_code)} fom {best_fom:.6f} "
          f"({result.evaluations} TMM evaluations, {result.tie_count} tied)")
    return EXIT_OK


def sample_labeled(problem: TrcProblem, count: int, rng,
                   exclude: LabeledDataset | None = None) -> LabeledDataset:
    ds = LabeledDataset(problem.code_length)
    while len(ds) < count:
        code = rng.integers(0, 2, size=problem.code_length, dtype=np.uint8)
        if code in ds or (exclude is not None and code in exclude):
            continue
        ds.add(code, problem.fom(code))
    return ds


def cmd_rmse_study(args) -> int:
    config = load_config(args.config, None, args.seed)
    out = start_run("rmse-study", args, config)
    study = config["study"]
    models = [str(m) for m in study["models"]]
    unknown = set(models) - {"rf", "fm"}
    if unknown:
        raise ConfigError(f"unknown study model(s) {sorted(unknown)}")
    train_sizes = [int(s) for s in study["train_sizes"]]
    repeats = int(study["repeats"])
    rows = []
    for n_layers in study["layer_counts"]:
        problem_config = json.loads(json.dumps(config))  # deep copy
        problem_config["problem"]["layers"] = int(n_layers)
        problem = build_problem(problem_config)
        for repeat in range(repeats):
            cell_seed = np.random.SeedSequence((config["seed"], int(n_layers), repeat))
            rng = np.random.default_rng(cell_seed)
            test = sample_labeled(problem, int(study["test_size"]), rng)
            pool = sample_labeled(problem, max(train_sizes), rng, exclude=test)
            for size in train_sizes:
                train = pool.subset(range(size))
                seed_int = int(cell_seed.generate_state(1)[0])
                scores = {}
                if "rf" in models:
                    model = rf_train(train, build_rf_config(config, seed_int))
                    scores["rf"] = evaluate_rmse(model, test)
                if "fm" in models:
                    model = fm_train(train, build_fm_config(config, seed_int))
                    scores["fm"] = evaluate_rmse(model, test)
                for name in models:
                    rows.append((name, n_layers, size, repeat, scores[name]))
                report = " ".join(f"{m} {scores[m]:.5f}" for m in models)
                print(f"n{n_layers} size {size} repeat {repeat}: {report}")
    with open(out / "rmse_study.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "n_layers", "train_size", "repeat", "rmse"])
        for row in rows:
            writer.writerow([row[0], row[1], row[2], row[3], repr(row[4])])
    with open(out / "rmse_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "n_layers", "train_size", "mean_rmse", "sem_rmse"])
        for model in models:
            for n_layers in study["layer_counts"]:
                for size in train_sizes:
                    vals = np.asarray([r[4] for r in rows
                                       if r[0] == model and r[1] == n_layers
                                       and r[2] == size])
                    sem = vals.std(ddof=1) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
                    writer.writerow([model, n_layers, size,
                                     repr(float(vals.mean())), repr(float(sem))])
    return EXIT_OK


def cmd_compare(args) -> int:
    config = load_config(args.config, args.preset, args.seed)
    out = start_run("compare", args, config)
    layer_counts = ([presets.preset_layers(args.preset)] if args.preset
                    else [int(n) for n in config["compare"]["layer_counts"]])
    summary_rows = []
    for n_layers in layer_counts:
        preset_name = f"n{n_layers}"
        cell = load_config(args.config,
                           preset_name if preset_name in presets.PRESET_TABLE else None,
                           args.seed)
        problem = build_problem(cell)
        for arm in ("rf", "fm"):
            loop_config = build_loop_config(cell, surrogate=arm)
            result = run_loop(loop_config, problem)
            arm_dir = out / f"n{n_layers}_{arm}"
            arm_dir.mkdir(exist_ok=True)
            result.dataset.to_csv(arm_dir / "dataset.csv")
            write_iterations_csv(result.records, arm_dir / "iterations.csv")
            for i, ev in enumerate(result.evolve_results):
                write_trace_csv(ev.trace, arm_dir / f"qga_trace_{i}.csv")
            generations = sum(len(ev.trace) for ev in result.evolve_results)
            summary_rows.append([n_layers, arm, code_to_string(result.best_code),
                                 repr(result.best_true_fom), result.status,
                                 result.tmm_evaluations, generations])
            print(f"n{n_layers} {arm}: best fom {result.best_true_fom:.6f} "
                  f"({result.status})")
    with open(out / "compare_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_layers", "surrogate", "best_code", "best_fom",
                         "status", "tmm_evaluations", "total_generations"])
        writer.writerows(summary_rows)
    return EXIT_OK


# ------------------------------------------------------------------ main --

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgafilm",
        description="Surrogate-assisted quantum-inspired optimization of "
                    "multilayer thin films")
    sub = parser.add_subparsers(dest="command", required=True)

    opt = sub.add_parser("optimize", help="run one optimizer on the film problem")
    opt.add_argument("--algo", choices=("qga", "cga", "exhaustive"), default="qga")
    opt.add_argument("--preset", choices=presets.preset_names(), default=None)
    opt.add_argument("--config", default=None, help="TOML config overlay")
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--out", default="runs/optimize")
    opt.set_defaults(func=cmd_optimize)

    study = sub.add_parser("rmse-study", help="surrogate accuracy vs training size")
    study.add_argument("--config", default=None)
    study.add_argument("--seed", type=int, default=0)
    study.add_argument("--out", default="runs/rmse_study")
    study.set_defaults(func=cmd_rmse_study)

    comp = sub.add_parser("compare", help="paired RF-vs-FM surrogate runs")
    comp.add_argument("--preset", choices=presets.preset_names(), default=None)
    comp.add_argument("--config", default=None)
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument("--out", default="runs/compare")
    comp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
