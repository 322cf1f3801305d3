"""Command-line surface tying the toolkit together.

Subcommands: ``simulate`` (Monte Carlo benchmark), ``extract`` (SEL level-2
feature construction), ``strength`` (team strength fitting), ``train`` /
``predict`` (model files), and ``explain`` (importance / partial dependence
reports).  Every randomized command takes ``--seed`` (default 42) and is
fully deterministic given its flags.  Exit codes: 0 success, 1 domain error,
2 usage error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import math
import sys
from pathlib import Path

from .core import (
    Column,
    Dataset,
    SelLevel,
    read_csv,
    read_matrix_csv,
    write_csv,
    write_text,
)
from .errors import (
    LengthMismatchError,
    MissingFileError,
    ParseError,
    SelkitError,
    UsageError,
)
from .estimate import MatchRecord, fit_strengths, mean_goals_strength
from .explain import partial_dependence, permutation_importance
from .extract import (
    color_histogram,
    ewma,
    histogram_moments,
    moments,
    quantiles,
    tfidf,
    window_to_alpha,
)
from .learn import fit_forest, fit_gbt, fit_lasso, fit_tree, load_model, predict, save_model
from .pnm import read_pnm
from .simbench import GbtConfig, SimConfig, run_benchmark

_INTERCEPT_ROW = "__intercept__"
_HOME_EFFECT_ROW = "__home_effect__"


def _fmt(v: float) -> str:
    return repr(float(v))


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")


def _parse_range(text: str) -> tuple[float, float]:
    vals = _parse_float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected 'low,high', got {text!r}")
    return vals[0], vals[1]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selkit",
        description="SEL feature extraction, from-scratch learners, and a Monte Carlo benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the Monte Carlo benchmark and write report CSVs")
    sim.add_argument("--config", help="flat key=value file; flags override it")
    sim.add_argument("--n", type=int, default=1500, help="observations per replication")
    sim.add_argument("--m", type=int, default=400, help="latent process length")
    sim.add_argument("--reps", type=int, default=200, help="replications per covariate count")
    sim.add_argument("--p-values", type=_parse_int_list, default=(2, 5, 10, 20, 30),
                     help="comma-separated covariate counts")
    sim.add_argument("--seed", type=int, default=42)
    sim.add_argument("--train-fraction", type=float, default=0.7)
    sim.add_argument("--cauchy-scale", type=float, default=1.0)
    sim.add_argument("--beta-range", type=_parse_range, default=(-2.0, 5.0),
                     help="uniform range for slope coefficients, as 'low,high'")
    sim.add_argument("--beta-mu-range", type=_parse_range, default=(1.0, 5.0),
                     help="uniform range for the squared-location coefficient")
    sim.add_argument("--gbt-trees", type=int, default=200)
    sim.add_argument("--gbt-depth", type=int, default=3)
    sim.add_argument("--gbt-rate", type=float, default=0.1)
    sim.add_argument("--gbt-min-leaf", type=int, default=5)
    sim.add_argument("--threads", type=int, default=0,
                     help="worker count; 0 means available parallelism")
    sim.add_argument("--out", default="benchmark_report.csv")
    sim.add_argument("--wide-out", default="benchmark_wide.csv")

    ext = sub.add_parser("extract", help="construct SEL level-2 feature columns")
    ext_sub = ext.add_subparsers(dest="extract_mode", required=True)

    ext_mom = ext_sub.add_parser("moments", help="per-row moments of a process matrix")
    ext_mom.add_argument("--config", help="flat key=value file; flags override it")
    ext_mom.add_argument("--processes", required=True, help="CSV, one process per row")
    ext_mom.add_argument("--data", required=True, help="dataset CSV to append to")
    ext_mom.add_argument("--target", required=True)
    ext_mom.add_argument("--prefix", default="z")
    ext_mom.add_argument("--out", required=True)

    ext_q = ext_sub.add_parser("quantiles", help="per-row quantiles of a process matrix")
    ext_q.add_argument("--config", help="flat key=value file; flags override it")
    ext_q.add_argument("--processes", required=True)
    ext_q.add_argument("--data", required=True)
    ext_q.add_argument("--target", required=True)
    ext_q.add_argument("--probs", type=_parse_float_list, default=(0.25, 0.5, 0.75))
    ext_q.add_argument("--prefix", default="z")
    ext_q.add_argument("--out", required=True)

    ext_e = ext_sub.add_parser("ewma", help="per-row final EWMA value of a process matrix")
    ext_e.add_argument("--config", help="flat key=value file; flags override it")
    ext_e.add_argument("--processes", required=True)
    ext_e.add_argument("--data", required=True)
    ext_e.add_argument("--target", required=True)
    ext_e.add_argument("--alpha", type=float, default=0.0,
                       help="smoothing factor; overrides --window when set")
    ext_e.add_argument("--window", type=int, default=7,
                       help="span mapped to alpha = 2/(window+1)")
    ext_e.add_argument("--prefix", default="z")
    ext_e.add_argument("--out", required=True)

    ext_img = ext_sub.add_parser("image-moments", help="histogram moments of PGM/PPM images")
    ext_img.add_argument("--config", help="flat key=value file; flags override it")
    ext_img.add_argument("--images", required=True, nargs="+", help="PGM/PPM paths")
    ext_img.add_argument("--out", required=True)

    ext_tf = ext_sub.add_parser("tfidf", help="tf-idf weights of a line-per-document corpus")
    ext_tf.add_argument("--config", help="flat key=value file; flags override it")
    ext_tf.add_argument("--docs", required=True, help="text file, one document per line")
    ext_tf.add_argument("--out", required=True)

    strength = sub.add_parser("strength", help="fit team strengths from a matches CSV")
    strength.add_argument("--config", help="flat key=value file; flags override it")
    strength.add_argument("--matches", required=True,
                          help="CSV: date,home_team,away_team,home_goals,away_goals")
    strength.add_argument("--method", choices=("mle", "mean"), default="mle")
    strength.add_argument("--half-life", type=float, default=500.0)
    strength.add_argument("--reference-date", default=None, help="ISO date; default latest match")
    strength.add_argument("--out", required=True)

    train = sub.add_parser("train", help="fit a model and write it as JSON")
    train.add_argument("--config", help="flat key=value file; flags override it")
    train.add_argument("--model", required=True, choices=("lasso", "tree", "forest", "gbt"))
    train.add_argument("--data", required=True)
    train.add_argument("--target", required=True)
    train.add_argument("--out", required=True)
    train.add_argument("--lambda", dest="lam", type=float, default=0.1)
    train.add_argument("--max-depth", type=int, default=3)
    train.add_argument("--min-leaf", type=int, default=5)
    train.add_argument("--n-trees", type=int, default=200)
    train.add_argument("--mtry", type=int, default=0, help="0 means ceil(p/3)")
    train.add_argument("--learning-rate", type=float, default=0.1)
    train.add_argument("--seed", type=int, default=42)

    pred = sub.add_parser("predict", help="apply a serialized model to a CSV")
    pred.add_argument("--config", help="flat key=value file; flags override it")
    pred.add_argument("--model", required=True)
    pred.add_argument("--data", required=True)
    pred.add_argument("--out", required=True)

    exp = sub.add_parser("explain", help="permutation importance or partial dependence CSVs")
    exp.add_argument("--config", help="flat key=value file; flags override it")
    exp.add_argument("--method", required=True, choices=("permutation", "pdp"))
    exp.add_argument("--model", required=True)
    exp.add_argument("--data", required=True)
    exp.add_argument("--target", required=True)
    exp.add_argument("--feature", default=None, help="required for --method pdp")
    exp.add_argument("--grid-size", type=int, default=50)
    exp.add_argument("--shuffles", type=int, default=10)
    exp.add_argument("--seed", type=int, default=42)
    exp.add_argument("--out", required=True)

    return parser


def _config_tokens(path: str) -> list[str]:
    """Turn a flat key=value file into CLI tokens (inserted before user
    flags, so explicit flags win)."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {p}")
    tokens: list[str] = []
    for lineno, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{p}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key == "config":
            raise UsageError(f"{p}:{lineno}: nested config is not allowed")
        tokens.extend([f"--{key.replace('_', '-')}", value.strip()])
    return tokens


def dispatch(argv: list[str]) -> int:
    """Parse and run one invocation; returns the process exit status."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if getattr(ns, "config", None):
            injected = _config_tokens(ns.config)
            at = 2 if argv and argv[0] == "extract" else 1
            ns = parser.parse_args(argv[:at] + injected + argv[at:])
    except SystemExit as exc:  # argparse prints its own diagnostics
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SelkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


# --- subcommand bodies ---------------------------------------------------------


def _cmd_simulate(ns) -> int:
    cfg = SimConfig(
        n=ns.n,
        m=ns.m,
        p_values=tuple(ns.p_values),
        reps=ns.reps,
        master_seed=ns.seed,
        beta_range=ns.beta_range,
        beta_mu_range=ns.beta_mu_range,
        cauchy_scale=ns.cauchy_scale,
        train_fraction=ns.train_fraction,
        gbt=GbtConfig(ns.gbt_trees, ns.gbt_depth, ns.gbt_rate, ns.gbt_min_leaf),
    )
    threads = ns.threads if ns.threads > 0 else None
    report = run_benchmark(cfg, threads=threads)
    write_text(ns.out, report.to_long_csv())
    write_text(ns.wide_out, report.to_wide_csv())
    return 0


def _load_processes(ns):
    ds = read_csv(ns.data, ns.target)
    _, Z = read_matrix_csv(ns.processes)
    if Z.shape[0] != ds.n_rows:
        raise LengthMismatchError(
            f"process rows ({Z.shape[0]}) do not match dataset rows ({ds.n_rows})"
        )
    return ds, Z


def _cmd_extract(ns) -> int:
    return _EXTRACT_MODES[ns.extract_mode](ns)


def _extract_moments(ns) -> int:
    ds, Z = _load_processes(ns)
    summaries = [moments(Z[i]) for i in range(Z.shape[0])]
    for suffix, getter in (
        ("mean", lambda s: s.mean),
        ("variance", lambda s: s.variance),
        ("skewness", lambda s: s.skewness),
        ("excess_kurtosis", lambda s: s.excess_kurtosis),
    ):
        ds = ds.with_column(
            f"{ns.prefix}_{suffix}", [getter(s) for s in summaries], SelLevel.DESCRIPTIVE
        )
    write_csv(ds, ns.out)
    return 0


def _extract_quantiles(ns) -> int:
    ds, Z = _load_processes(ns)
    for prob in ns.probs:
        name = f"{ns.prefix}_q{round(prob * 100):02d}"
        vals = [float(quantiles(Z[i], (prob,))[0]) for i in range(Z.shape[0])]
        ds = ds.with_column(name, vals, SelLevel.DESCRIPTIVE)
    write_csv(ds, ns.out)
    return 0


def _extract_ewma(ns) -> int:
    ds, Z = _load_processes(ns)
    if ns.alpha > 0:
        alpha, label = ns.alpha, f"a{ns.alpha:g}"
    else:
        alpha, label = window_to_alpha(ns.window), f"w{ns.window}"
    vals = [float(ewma(Z[i], alpha)[-1]) for i in range(Z.shape[0])]
    ds = ds.with_column(f"{ns.prefix}_ewma_{label}", vals, SelLevel.DESCRIPTIVE)
    write_csv(ds, ns.out)
    return 0


def _extract_image_moments(ns) -> int:
    header = ["path"]
    rows = []
    for i, path in enumerate(ns.images):
        img = read_pnm(path)
        cells = [path]
        for hist in color_histogram(img):
            s = histogram_moments(hist)
            for suffix in ("mean", "variance", "skewness", "excess_kurtosis"):
                name = f"{hist.channel.value}_{suffix}"
                if i == 0:
                    header.append(name)
                cells.append(_fmt(getattr(s, suffix)))
        rows.append(",".join(cells))
    write_text(ns.out, ",".join(header) + "\n" + "\n".join(rows) + "\n")
    return 0


def _extract_tfidf(ns) -> int:
    p = Path(ns.docs)
    if not p.is_file():
        raise MissingFileError(f"no such file: {p}")
    corpus = [line.split() for line in p.read_text(encoding="utf-8").splitlines()]
    matrix = tfidf(corpus)
    lines = [",".join(matrix.vocabulary)]
    for row in matrix.rows:
        lines.append(",".join(_fmt(v) for v in row))
    write_text(ns.out, "\n".join(lines) + "\n")
    return 0


_EXTRACT_MODES = {
    "moments": _extract_moments,
    "quantiles": _extract_quantiles,
    "ewma": _extract_ewma,
    "image-moments": _extract_image_moments,
    "tfidf": _extract_tfidf,
}


def read_matches_csv(path) -> list[MatchRecord]:
    """Parse ``date,home_team,away_team,home_goals,away_goals`` rows with
    ISO-8601 dates."""
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"no such file: {p}")
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines or [c.strip() for c in lines[0].split(",")] != [
        "date", "home_team", "away_team", "home_goals", "away_goals",
    ]:
        raise ParseError(1, 0, "expected header date,home_team,away_team,home_goals,away_goals")
    matches = []
    for r, line in enumerate(lines[1:], start=2):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 5:
            raise ParseError(r, 0, f"expected 5 cells, found {len(cells)}")
        try:
            date = dt.date.fromisoformat(cells[0])
        except ValueError:
            raise ParseError(r, 1, f"bad ISO date {cells[0]!r}") from None
        try:
            home_goals, away_goals = int(cells[3]), int(cells[4])
        except ValueError:
            raise ParseError(r, 4, "goals must be integers") from None
        try:
            matches.append(MatchRecord(date, cells[1], cells[2], home_goals, away_goals))
        except ValueError as exc:
            raise ParseError(r, 0, str(exc)) from None
    if not matches:
        raise ParseError(2, 0, "no match rows")
    return matches


def write_strengths_csv(path, strengths: dict, intercept: float | None = None,
                        home_effect: float | None = None) -> None:
    """Emit ``team,strength`` rows; model-level parameters ride along as the
    reserved rows ``__intercept__`` and ``__home_effect__``."""
    lines = ["team,strength"]
    if intercept is not None:
        lines.append(f"{_INTERCEPT_ROW},{_fmt(intercept)}")
    if home_effect is not None:
        lines.append(f"{_HOME_EFFECT_ROW},{_fmt(home_effect)}")
    for team in sorted(strengths):
        lines.append(f"{team},{_fmt(strengths[team])}")
    write_text(path, "\n".join(lines) + "\n")


def _cmd_strength(ns) -> int:
    matches = read_matches_csv(ns.matches)
    if ns.method == "mean":
        teams = sorted({t for m in matches for t in (m.home_team, m.away_team)})
        write_strengths_csv(ns.out, {t: mean_goals_strength(matches, t) for t in teams})
        return 0
    reference = dt.date.fromisoformat(ns.reference_date) if ns.reference_date else None
    table = fit_strengths(matches, reference, ns.half_life)
    write_strengths_csv(ns.out, dict(table.strengths), table.intercept, table.home_effect)
    return 0


def _cmd_train(ns) -> int:
    ds = read_csv(ns.data, ns.target)
    if ns.model == "lasso":
        model = fit_lasso(ds, ns.lam)
    elif ns.model == "tree":
        model = fit_tree(ds, ns.max_depth, ns.min_leaf)
    elif ns.model == "forest":
        mtry = ns.mtry if ns.mtry > 0 else math.ceil(len(ds.feature_names) / 3)
        model = fit_forest(ds, ns.n_trees, mtry, ns.max_depth, ns.seed, ns.min_leaf)
    else:
        model = fit_gbt(ds, ns.n_trees, ns.max_depth, ns.learning_rate, ns.seed, ns.min_leaf)
    save_model(model, ns.out)
    return 0


def _cmd_predict(ns) -> int:
    model = load_model(ns.model)
    names, matrix = read_matrix_csv(ns.data)
    # the target designation is a formality here; predictions only read features
    cols = [Column(name, matrix[:, j], SelLevel.RAW) for j, name in enumerate(names)]
    ds = Dataset(cols, names[0])
    preds = predict(model, ds)
    write_text(ns.out, "prediction\n" + "\n".join(_fmt(v) for v in preds) + "\n")
    return 0


def _cmd_explain(ns) -> int:
    model = load_model(ns.model)
    ds = read_csv(ns.data, ns.target)
    if ns.method == "permutation":
        report = permutation_importance(model, ds, ns.shuffles, ns.seed)
        lines = ["feature,importance"]
        lines += [f"{name},{_fmt(value)}" for name, value in report.entries]
        write_text(ns.out, "\n".join(lines) + "\n")
        return 0
    if not ns.feature:
        raise UsageError("--feature is required for --method pdp")
    curve = partial_dependence(model, ds, ns.feature, ns.grid_size)
    lines = ["grid,value"]
    lines += [f"{_fmt(g)},{_fmt(v)}" for g, v in zip(curve.grid, curve.values)]
    write_text(ns.out, "\n".join(lines) + "\n")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "extract": _cmd_extract,
    "strength": _cmd_strength,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "explain": _cmd_explain,
}


if __name__ == "__main__":
    main()
