from typing import Dict
import pandas as pd
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from ..constants import ROUGE_METRICS, ROUGE_COLUMNS
from ..evaluation.rouge import RougeReport


def get_training_curves(log_table: pd.DataFrame) -> plt.Figure:
    """Generate visual of nll, cos(V_s, V_t) and loss per training step

    Args:
        log_table (pd.DataFrame): training records with step, nll, cos, loss columns

    Returns:
        plt.Figure: one panel per quantity
    """
    f, axes = plt.subplots(1, 3, figsize=(14, 4))

    for ax, column, label in zip(axes, ['nll', 'cos', 'loss'],
                                 ['Mean token NLL', 'cos(V_s, V_t)', 'Loss']):
        ax.plot(log_table['step'], log_table[column], '-')
        ax.set_xlabel('Step')
        ax.set_ylabel(label)

    f.tight_layout()
    plt.close(f)
    return f


def get_rouge_table(reports: Dict[str, RougeReport]) -> pd.DataFrame:
    """ROUGE F-scores, a row per system and a column per metric"""
    return pd.DataFrame(
        [[report.metric(m).f for m in ROUGE_METRICS] for report in reports.values()],
        index=list(reports.keys()), columns=[ROUGE_COLUMNS[m] for m in ROUGE_METRICS])


def get_evaluation_row(name: str, report: RougeReport) -> str:
    """Formats one system's F-scores as a results-table row (percentages)"""
    scores = '\t'.join(f'{100 * report.metric(m).f:.1f}' for m in ROUGE_METRICS)
    return f'{name}\t{scores}'
