# ==============================================================================
# ECNN FORECASTING SUITE - MAIN ORCHESTRATOR
# ==============================================================================
#
# COMMANDES :
#   gradcheck      - vérification des gradients par différences finies
#   train          - CSV → indicateurs → normalisation → fenêtres → entraînement
#   evaluate       - prévisions à un pas sur le split de test + métriques par année
#   backtest       - stratégie achat/vente sur les prévisions + buy-&-hold
#   compare        - plusieurs configurations sur un même jeu de données
#   hidden-driver  - ECNN contre RNN sur une série à entrée cachée
#
# OPTIONS COMMUNES : --config PATH, --seed N, --out DIR, --verbose
#
# CODES DE SORTIE :
#   0 succès | 1 usage / configuration | 2 données | 3 échec numérique
#
# VARIABLES D'ENVIRONNEMENT (optionnelles) :
#   ECNN_DATA_DIR, ECNN_OUTPUT_DIR
# ==============================================================================

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import pandas as pd
from joblib import Parallel, delayed

import smoothing
import trainer
from data_collector import parse_csv
from dataset_builder import make_windows
from exceptions import ConfigError, EcnnError
from experiment_config import ExperimentConfig, load_config, write_snapshot
from gradient_checker import run_gradcheck
from model_registry import MODEL_KINDS, RecurrentModel, get_model_kind
from performance_analyzer import METRICS, metric_grid, yearly_report
from prediction_analyzer import PredictionAnalyzer, predict_split, save_checkpoint
from report_generator import ReportGenerator
from synthetic_data import run_hidden_driver
from technical_analyzer import compute_indicators
from trading_backtester import MODES, SELL_MODES, buy_and_hold, generate_signals, strategy_return, yearly_returns

CHECKPOINT_NAME = "checkpoint.ecnn"
SNAPSHOT_NAME = "resolved_config.ini"


# ==============================================================================
# UTILITAIRES
# ==============================================================================

def _configure_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(levelname)s: %(message)s',
        handlers=[
            logging.StreamHandler(sys.stdout),
        ],
        force=True,
    )


def _log_step(numero: int, emoji: str, titre: str):
    logging.info("")
    logging.info("=" * 70)
    logging.info(f"{emoji}  ÉTAPE {numero} : {titre}")
    logging.info("=" * 70)


def _log_success(message: str):
    logging.info(f"✅  {message}")


def _log_error(message: str):
    logging.error(f"❌  {message}")


def _overrides(args) -> dict:
    """Options de la ligne de commande → surcharges de sections INI."""
    get = lambda name: getattr(args, name, None)  # noqa: E731
    return {
        "data": {"path": get("data")},
        "model": {"kind": get("model"), "neurons": get("neurons")},
        "smoothing": {
            "enabled": "true" if get("smoothing") else None,
            "alpha": get("alpha"),
        },
        "training": {
            "epochs": get("epochs"),
            "window": get("window"),
            "learning_rate": get("lr"),
            "batch_size": get("batch_size"),
            "truncation": get("truncation"),
            "optimizer": get("optimizer"),
            "seed": get("seed"),
        },
        "costs": {"mode": get("mode"), "sell_mode": get("sell_mode")},
        "output": {"dir": get("out")},
    }


def _load(args, path=None) -> ExperimentConfig:
    return load_config(path if path is not None else args.config, _overrides(args))


# ==============================================================================
# PIPELINE
# ==============================================================================

def load_frame(config: ExperimentConfig):
    bars = parse_csv(config.data_path)
    return compute_indicators(bars, ma_mode=config.ma_mode)


def build_dataset(config: ExperimentConfig, frame=None):
    frame = frame if frame is not None else load_frame(config)
    transform = smoothing.SmoothingTransform(alpha=config.alpha) if config.smoothing else None
    return make_windows(frame, config.split, config.train.window, horizon=config.horizon,
                        features=list(config.features), transform=transform)


def train_model(config: ExperimentConfig, out_dir: Path, export_dataset: bool = False) -> tuple:
    """Entraîne puis écrit checkpoint, courbes de perte et configuration résolue."""
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = load_frame(config)
    kind = get_model_kind(config.model)
    m = len(config.features)
    model = RecurrentModel(kind=kind, params=kind.init(config.neurons, m, 1, config.seed))

    if config.smoothing:
        pipeline = smoothing.wrap(model, frame, config.split, config.train.window, config.alpha,
                                  horizon=config.horizon, features=list(config.features))
        pipeline.fit(config.train)
        dataset, report = pipeline.dataset, pipeline.report
    else:
        dataset = build_dataset(config, frame)
        report = trainer.fit(model, dataset, config.train)

    model = RecurrentModel(kind=kind, params=report.params)
    save_checkpoint(model, out_dir / CHECKPOINT_NAME)
    ReportGenerator(out_dir).write_loss_curves(report)
    write_snapshot(config, out_dir / SNAPSHOT_NAME)
    if export_dataset:
        dataset.to_csv(out_dir / "dataset.csv")
        if dataset.constants is not None:
            dataset.constants.save(out_dir / "normalization.csv")
    return model, dataset, report


def evaluate_model(config: ExperimentConfig, checkpoint: Path, dataset=None) -> tuple:
    dataset = dataset if dataset is not None else build_dataset(config)
    predictions = PredictionAnalyzer(checkpoint, dataset).run("test")
    report = yearly_report(predictions["date"], predictions["actual"], predictions["predicted"],
                           mode=config.period_mode, with_r2=True)
    return predictions, report


def backtest_predictions(config: ExperimentConfig, predictions: pd.DataFrame) -> tuple:
    actual = predictions["actual"].to_numpy()
    predicted = predictions["predicted"].to_numpy()
    signals = generate_signals(predicted)
    prices = predicted if config.backtest_mode == "paper-literal" else actual
    log = strategy_return(signals, prices, config.costs, mode=config.backtest_mode,
                          sell_mode=config.sell_mode, dates=predictions["date"])
    grid = yearly_returns(log, actual, predictions["date"], config.costs, config.period_mode)
    return log, grid


def run_experiment(config: ExperimentConfig, out_dir: Path) -> dict:
    """train → evaluate → backtest pour une configuration (exécutable dans un worker joblib)."""
    _, dataset, _ = train_model(config, out_dir)
    predictions, report = evaluate_model(config, out_dir / CHECKPOINT_NAME, dataset)
    log, grid = backtest_predictions(config, predictions)
    return {"label": config.label, "metrics": report, "returns": grid, "total_return": log.total_return}


# ==============================================================================
# COMMANDES
# ==============================================================================

def cmd_gradcheck(args) -> int:
    _log_step(1, "🧮", f"VÉRIFICATION DES GRADIENTS ({args.model.upper()})")
    report = run_gradcheck(
        args.model, n=args.n, m=args.m, p=args.p, T=args.T, trials=args.trials,
        tolerance=args.tol, seed=args.seed if args.seed is not None else 0,
        corrupt=args.corrupt, random_dims=args.random_dims,
    )
    for line in report.lines():
        print(line)
    return 0 if report.passed else 3


def cmd_train(args) -> int:
    config = _load(args)
    out_dir = Path(config.output_dir)
    _log_step(1, "🏋️", f"ENTRAÎNEMENT {config.label.upper()}")
    _, dataset, report = train_model(config, out_dir, export_dataset=args.export_dataset)
    _log_success(
        f"Entraînement terminé - {len(dataset)} fenêtres, meilleure époque {report.best_epoch}, "
        f"sorties dans {out_dir}"
    )
    return 0


def cmd_evaluate(args) -> int:
    config = _load(args)
    out_dir = Path(config.output_dir)
    _log_step(1, "🔮", "ÉVALUATION SUR LE SPLIT DE TEST")
    predictions, report = evaluate_model(config, Path(args.checkpoint))

    writer = ReportGenerator(out_dir)
    writer.write_predictions(predictions)
    writer.write_metric_grids({config.label: report})
    writer.write_summary(f"ÉVALUATION - {config.label}", {"Métriques": report})
    _log_success(f"MAPE moyen {report.average['MAPE']:.6f} | DA moyen {report.average['DA']:.4f}")
    return 0


def cmd_backtest(args) -> int:
    config = _load(args)
    out_dir = Path(config.output_dir)
    _log_step(1, "💹", "BACKTEST DE LA STRATÉGIE")
    predictions, _ = evaluate_model(config, Path(args.checkpoint))
    log, grid = backtest_predictions(config, predictions)
    baseline = buy_and_hold(predictions["actual"].to_numpy(), config.costs)

    writer = ReportGenerator(out_dir)
    writer.write_trade_log(log)
    writer.write_returns(grid)
    writer.write_summary(f"BACKTEST - {config.label}", {
        "Rendements (%)": grid,
        "Totaux": [
            f"Jours d'achat b = {log.buy_days}, jours de vente s = {log.sell_days}",
            f"Coûts B = {config.costs.buy}, S = {config.costs.sell}",
            f"Stratégie R = {log.total_return:.4f} %",
            f"Buy-&-hold = {baseline:.4f} %",
        ],
    })
    _log_success(f"R = {log.total_return:.4f} % | buy-&-hold = {baseline:.4f} %")
    return 0


def _compare_configs(args) -> list:
    paths = args.configs or [args.config]
    configs = [_load(args, path) for path in paths]
    if args.models:
        configs = [replace(configs[0], model=name) for name in args.models] + configs[1:]
    if len(configs) < 2:
        raise ConfigError("compare : au moins deux configurations (ou --models) requises")

    def dataset_key(c: ExperimentConfig):
        return (c.data_path.resolve(), c.split, c.train.window, c.horizon)

    reference = dataset_key(configs[0])
    for config in configs[1:]:
        if dataset_key(config) != reference:
            raise ConfigError(f"compare : jeu de données différent pour {config.label} ({config.data_path})")
    return configs


def cmd_compare(args) -> int:
    configs = _compare_configs(args)
    base_out = Path(args.out) if args.out else Path(configs[0].output_dir)
    labels = []
    for config in configs:
        label = config.label
        while label in labels:
            label += "'"
        labels.append(label)

    _log_step(1, "⚖️", f"COMPARAISON : {', '.join(labels)} (jobs={args.jobs})")
    results = Parallel(n_jobs=args.jobs)(
        delayed(run_experiment)(config, base_out / label) for config, label in zip(configs, labels)
    )

    writer = ReportGenerator(base_out)
    reports = {label: result["metrics"] for label, result in zip(labels, results)}
    writer.write_metric_grids(reports)
    returns = pd.DataFrame.from_dict(
        {label: result["returns"].loc["strategy"] for label, result in zip(labels, results)}, orient="index"
    )
    returns.loc["buy-&-hold"] = results[0]["returns"].loc["buy-&-hold"]
    writer.write_returns(returns)
    sections = {f"Grille {metric}": metric_grid(reports, metric) for metric in METRICS}
    sections["Rendements (%)"] = returns
    writer.write_summary("COMPARAISON DES MODÈLES", sections)
    _log_success(f"{len(configs)} modèle(s) comparé(s) - rapports dans {base_out}")
    return 0


def cmd_hidden_driver(args) -> int:
    _log_step(1, "🕵️", "EXPÉRIENCE À ENTRÉE CACHÉE : ECNN vs RNN")
    table = run_hidden_driver(
        seeds=args.seeds, n=args.neurons, window=args.window, epochs=args.epochs,
        learning_rate=args.lr, rows=args.rows, base_seed=args.seed if args.seed is not None else 0,
    )
    out_dir = Path(args.out or "runs")
    writer = ReportGenerator(out_dir)
    writer.write_table(table, "hidden_driver.csv")
    wins = int(table["ecnn_wins"].sum())
    writer.write_summary("ENTRÉE CACHÉE - ECNN vs RNN", {
        "Par graine": table,
        "Bilan": [f"ECNN ≤ RNN sur {wins}/{len(table)} graine(s)"],
    })
    return 0


# ==============================================================================
# LIGNE DE COMMANDE
# ==============================================================================

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="fichier INI de l'expérience")
    parser.add_argument("--seed", type=int, help="graine (surcharge [training] seed)")
    parser.add_argument("--out", help="répertoire de sortie")
    parser.add_argument("--verbose", action="store_true", help="journal DEBUG")


def _add_experiment(parser: argparse.ArgumentParser):
    parser.add_argument("--data", help="CSV au format Yahoo")
    parser.add_argument("--model", choices=sorted(MODEL_KINDS))
    parser.add_argument("--neurons", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--window", type=int)
    parser.add_argument("--lr", type=float)
    parser.add_argument("--batch-size", dest="batch_size", type=int)
    parser.add_argument("--truncation", type=int)
    parser.add_argument("--optimizer", choices=list(trainer.OPTIMIZERS))
    parser.add_argument("--smoothing", action="store_true", help="active le lissage exponentiel")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--mode", choices=list(MODES), help="mode de backtest")
    parser.add_argument("--sell-mode", dest="sell_mode", choices=list(SELL_MODES))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecnn", description="ECNN forecasting suite")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gradcheck", help="vérification des gradients")
    _add_common(p)
    p.add_argument("--model", default="ecnn", choices=sorted(MODEL_KINDS))
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--T", type=int, default=5)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--corrupt", help="tenseur dont le gradient analytique est faussé")
    p.add_argument("--random-dims", dest="random_dims", action="store_true")
    p.set_defaults(handler=cmd_gradcheck)

    p = sub.add_parser("train", help="entraîne un modèle")
    _add_common(p)
    _add_experiment(p)
    p.add_argument("--export-dataset", dest="export_dataset", action="store_true")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", help="métriques sur le split de test")
    _add_common(p)
    _add_experiment(p)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("backtest", help="stratégie de trading")
    _add_common(p)
    _add_experiment(p)
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(handler=cmd_backtest)

    p = sub.add_parser("compare", help="compare plusieurs configurations")
    _add_common(p)
    _add_experiment(p)
    p.add_argument("--configs", nargs="+", help="fichiers INI (ordre = ordre des lignes)")
    p.add_argument("--models", nargs="+", choices=sorted(MODEL_KINDS), help="variantes de --config par modèle")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("hidden-driver", help="ECNN vs RNN, entrée cachée")
    _add_common(p)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--neurons", type=int, default=8)
    p.add_argument("--window", type=int, default=7)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--rows", type=int, default=300)
    p.set_defaults(handler=cmd_hidden_driver)
    return parser


# ==============================================================================
# POINT D'ENTRÉE
# ==============================================================================

def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    _configure_logging(args.verbose)
    start_time = time.time()

    try:
        code = args.handler(args)
    except EcnnError as exc:
        _log_error(str(exc))
        logging.debug("Stacktrace complète :", exc_info=True)
        return exc.exit_code
    except Exception as exc:
        _log_error(f"ERREUR FATALE : {exc}")
        logging.critical("Stacktrace complète :", exc_info=True)
        return 1

    elapsed = time.time() - start_time
    logging.info(f"⏱️  Durée : {int(elapsed // 60)}m {int(elapsed % 60)}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
