# ==============================================================================
# MODULE: EXPERIMENT CONFIG - fichier INI + surcharges de la ligne de commande
# ------------------------------------------------------------------------------
# Sections : [data] [model] [smoothing] [split] [training] [costs] [output]
#
# Valeurs par défaut : epochs 1000, fenêtre 7, 32 neurones, η = 1e−3, lot 64,
# Adam ; coûts 0.25 % à l'achat, 0.45 % à la vente ; découpage 80/10/10.
#
# VARIABLES D'ENVIRONNEMENT (optionnelles) :
#   ECNN_DATA_DIR   - répertoire de résolution d'un chemin de données relatif
#   ECNN_OUTPUT_DIR - répertoire de sortie par défaut
# ==============================================================================

import configparser
import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from dataset_builder import SplitSpec
from exceptions import ConfigError
from model_registry import MODEL_KINDS
from performance_analyzer import PERIOD_MODES
from technical_analyzer import FEATURE_COLUMNS, MA_MODES
from trading_backtester import MODES, SELL_MODES, CostSpec
from trainer import TrainConfig

DEFAULT_DATA = Path(__file__).resolve().parent / "data" / "synthetic_ohlcv.csv"
SECTIONS = ("data", "model", "smoothing", "split", "training", "costs", "output")


@dataclass(frozen=True)
class ExperimentConfig:
    data_path: Path = DEFAULT_DATA
    features: tuple = tuple(FEATURE_COLUMNS)
    ma_mode: str = "momentum"
    horizon: int = 1
    model: str = "ecnn"
    neurons: int = 32
    smoothing: bool = False
    alpha: float = 0.8
    split: SplitSpec = field(default_factory=SplitSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    costs: CostSpec = field(default_factory=CostSpec)
    backtest_mode: str = "actual"
    sell_mode: str = "short"
    period_mode: str = "365d"
    output_dir: Path = Path("runs")

    @property
    def seed(self) -> int:
        return self.train.seed

    @property
    def label(self) -> str:
        return f"{self.model}-es" if self.smoothing else self.model

    def validate(self) -> "ExperimentConfig":
        if not self.data_path.exists():
            raise ConfigError(f"Fichier de données introuvable : {self.data_path}")
        unknown = [f for f in self.features if f not in FEATURE_COLUMNS]
        if unknown:
            raise ConfigError(f"Caractéristique(s) inconnue(s) : {', '.join(unknown)}")
        if self.ma_mode not in MA_MODES:
            raise ConfigError(f"ma_mode inconnu : {self.ma_mode} (choix : {', '.join(MA_MODES)})")
        if self.period_mode not in PERIOD_MODES:
            raise ConfigError(f"period_mode inconnu : {self.period_mode}")
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"Modèle inconnu : {self.model} (choix : {', '.join(MODEL_KINDS)})")
        if self.neurons < 1:
            raise ConfigError(f"neurons={self.neurons} < 1")
        if self.horizon < 1:
            raise ConfigError(f"horizon={self.horizon} < 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"α={self.alpha} hors de ]0, 1]")
        if self.backtest_mode not in MODES:
            raise ConfigError(f"Mode de backtest inconnu : {self.backtest_mode}")
        if self.sell_mode not in SELL_MODES:
            raise ConfigError(f"sell_mode inconnu : {self.sell_mode}")
        return self

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, train=replace(self.train, seed=seed))


def _resolve_data_path(raw: str) -> Path:
    path = Path(raw).expanduser()
    if not path.is_absolute():
        base = os.environ.get("ECNN_DATA_DIR")
        path = Path(base) / path if base else path
    return path


def _parse_split(section) -> SplitSpec:
    ranges = {}
    for name in ("train", "val", "test"):
        raw = section.get(f"{name}_range")
        if raw:
            try:
                start, end = (part.strip() for part in raw.split(":"))
            except ValueError:
                raise ConfigError(f"[split] {name}_range='{raw}' (attendu AAAA-MM-JJ:AAAA-MM-JJ)") from None
            ranges[name] = (start, end)
    if ranges:
        return SplitSpec(date_ranges=ranges)
    return SplitSpec(
        train=section.getfloat("train", 0.8),
        val=section.getfloat("val", 0.1),
        test=section.getfloat("test", 0.1),
    )


def read_parser(path=None, overrides: dict = None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    for name in SECTIONS:
        parser.add_section(name)
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Fichier de configuration introuvable : {path}")
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"Configuration illisible ({path}) : {exc}") from None
    for section, values in (overrides or {}).items():
        for key, value in values.items():
            if value is not None:
                parser.set(section, key, str(value))
    return parser


def from_parser(parser: configparser.ConfigParser) -> ExperimentConfig:
    try:
        data, model, smoothing = parser["data"], parser["model"], parser["smoothing"]
        training, costs, output = parser["training"], parser["costs"], parser["output"]

        truncation = training.get("truncation", "").strip()
        train_cfg = TrainConfig(
            epochs=training.getint("epochs", 1000),
            batch_size=training.getint("batch_size", 64),
            window=training.getint("window", 7),
            learning_rate=training.getfloat("learning_rate", 1e-3),
            truncation=int(truncation) if truncation else None,
            seed=training.getint("seed", 42),
            optimizer=training.get("optimizer", "adam").strip().lower(),
            log_every=training.getint("log_every", 100),
        )
        features = data.get("features", "").strip()
        output_dir = output.get("dir") or os.environ.get("ECNN_OUTPUT_DIR", "runs")
        config = ExperimentConfig(
            data_path=_resolve_data_path(data["path"]) if data.get("path") else DEFAULT_DATA,
            features=tuple(f.strip() for f in features.split(",")) if features else tuple(FEATURE_COLUMNS),
            ma_mode=data.get("ma_mode", "momentum").strip(),
            horizon=data.getint("horizon", 1),
            model=model.get("kind", "ecnn").strip().lower(),
            neurons=model.getint("neurons", 32),
            smoothing=smoothing.getboolean("enabled", False),
            alpha=smoothing.getfloat("alpha", 0.8),
            split=_parse_split(parser["split"]),
            train=train_cfg,
            costs=CostSpec(buy=costs.getfloat("buy", 0.0025), sell=costs.getfloat("sell", 0.0045)),
            backtest_mode=costs.get("mode", "actual").strip(),
            sell_mode=costs.get("sell_mode", "short").strip(),
            period_mode=output.get("period_mode", "365d").strip(),
            output_dir=Path(output_dir),
        )
    except ValueError as exc:
        raise ConfigError(f"Valeur de configuration invalide : {exc}") from None
    return config.validate()


def load_config(path=None, overrides: dict = None) -> ExperimentConfig:
    config = from_parser(read_parser(path, overrides))
    logging.info(
        f"⚙️  Configuration : modèle={config.label} n={config.neurons} | N={config.train.window} "
        f"| epochs={config.train.epochs} | η={config.train.learning_rate} | graine={config.seed}"
    )
    return config


def write_snapshot(config: ExperimentConfig, path) -> Path:
    """Configuration résolue : relançable telle quelle avec --config."""
    parser = configparser.ConfigParser()
    parser["data"] = {
        "path": str(config.data_path),
        "features": ",".join(config.features),
        "ma_mode": config.ma_mode,
        "horizon": str(config.horizon),
    }
    parser["model"] = {"kind": config.model, "neurons": str(config.neurons)}
    parser["smoothing"] = {"enabled": str(config.smoothing).lower(), "alpha": repr(config.alpha)}
    if config.split.date_ranges:
        parser["split"] = {f"{name}_range": f"{start}:{end}" for name, (start, end) in config.split.date_ranges.items()}
    else:
        parser["split"] = {"train": repr(config.split.train), "val": repr(config.split.val), "test": repr(config.split.test)}
    t = config.train
    parser["training"] = {
        "epochs": str(t.epochs),
        "batch_size": str(t.batch_size),
        "window": str(t.window),
        "learning_rate": repr(t.learning_rate),
        "truncation": "" if t.truncation is None else str(t.truncation),
        "seed": str(t.seed),
        "optimizer": t.optimizer,
        "log_every": str(t.log_every),
    }
    parser["costs"] = {
        "buy": repr(config.costs.buy),
        "sell": repr(config.costs.sell),
        "mode": config.backtest_mode,
        "sell_mode": config.sell_mode,
    }
    parser["output"] = {"dir": str(config.output_dir), "period_mode": config.period_mode}

    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        parser.write(handle)
    return path
