# ==============================================================================
# MODULE: REPORT GENERATOR - rapports CSV et résumé texte d'une expérience
# ------------------------------------------------------------------------------
# Fichiers produits (dans le répertoire de sortie de la commande) :
#   loss_curves.csv          epoch, train_loss, val_loss
#   predictions.csv          date, actual, predicted (une ligne par fenêtre de test)
#   metrics_<METRIQUE>.csv   grille modèles × (Year 1..k, Average)
#   trade_log.csv            date, signal, price, next_price, gross, cost, contribution
#   returns.csv              grille strategy / buy-&-hold × (Year 1..k, Average)
#   summary.txt              résumé lisible
# Pas de graphiques : predictions.csv sert d'interface de tracé.
# ==============================================================================

import logging
from pathlib import Path

import pandas as pd

from performance_analyzer import METRICS, MetricReport, metric_grid


class ReportGenerator:
    def __init__(self, output_dir):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.written = []

    def _path(self, name: str) -> Path:
        path = self.output_dir / name
        self.written.append(path)
        return path

    def write_table(self, frame: pd.DataFrame, name: str, index: bool = False, index_label=None) -> Path:
        path = self._path(name)
        frame.to_csv(path, index=index, index_label=index_label, float_format="%.10g")
        logging.info(f"   💾 {path.name}")
        return path

    def write_loss_curves(self, report, name: str = "loss_curves.csv") -> Path:
        path = report.to_csv(self._path(name))
        logging.info(f"   💾 {path.name} ({len(report.train_loss)} époque(s))")
        return path

    def write_predictions(self, predictions: pd.DataFrame, name: str = "predictions.csv") -> Path:
        frame = predictions.copy()
        if pd.api.types.is_datetime64_any_dtype(frame["date"]):
            frame["date"] = frame["date"].dt.strftime("%Y-%m-%d")
        return self.write_table(frame, name)

    def write_metric_grids(self, reports: dict, metrics=METRICS) -> list:
        """Une grille par métrique, une ligne par modèle (ordre des configurations)."""
        return [
            self.write_table(metric_grid(reports, metric), f"metrics_{metric}.csv", index=True, index_label="model")
            for metric in metrics
        ]

    def write_trade_log(self, log, name: str = "trade_log.csv") -> Path:
        frame = log.days.copy()
        if pd.api.types.is_datetime64_any_dtype(frame["date"]):
            frame["date"] = frame["date"].dt.strftime("%Y-%m-%d")
        return self.write_table(frame, name)

    def write_returns(self, grid: pd.DataFrame, name: str = "returns.csv") -> Path:
        return self.write_table(grid, name, index=True, index_label="row")

    def write_summary(self, title: str, sections: dict, name: str = "summary.txt") -> Path:
        """sections : {titre: DataFrame | MetricReport | liste de lignes | texte}."""
        lines = ["=" * 70, title, "=" * 70]
        for heading, body in sections.items():
            lines += ["", f"--- {heading} ---"]
            if isinstance(body, MetricReport):
                body = body.table
            if isinstance(body, (pd.DataFrame, pd.Series)):
                lines.append(body.to_string(float_format=lambda v: f"{v:.6f}"))
            elif isinstance(body, (list, tuple)):
                lines += [str(line) for line in body]
            else:
                lines.append(str(body))
        path = self._path(name)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logging.info(f"   💾 {path.name}")
        return path
