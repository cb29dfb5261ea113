"""ROUGE-1, ROUGE-2 and ROUGE-L over token sequences (characters for this corpus).

F is the harmonic mean of precision and recall (beta = 1) for every metric.
"""
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Hashable, List, NamedTuple, Sequence, Tuple
import numpy as np
import pandas as pd

from ..constants import ROUGE_METRICS, ROUGE_COLUMNS
from ..exceptions import ArgumentError

Tokens = Sequence[Hashable]


class RougeScore(NamedTuple):
    precision: float
    recall: float
    f: float


@dataclass(frozen=True)
class RougeReport:
    rouge1: RougeScore
    rouge2: RougeScore
    rougeL: RougeScore
    pair_count: int

    def metric(self, name: str) -> RougeScore:
        return getattr(self, name)


class _Counts(NamedTuple):
    overlap: int
    candidate: int
    reference: int


def f_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.
    return 2 * precision * recall / (precision + recall)


def _score(counts: _Counts) -> RougeScore:
    if counts.candidate == 0 or counts.reference == 0:
        return RougeScore(0., 0., 0.)
    precision, recall = counts.overlap / counts.candidate, counts.overlap / counts.reference
    return RougeScore(precision, recall, f_score(precision, recall))


def ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _ngram_counts(candidate: Tokens, reference: Tokens, n: int) -> _Counts:
    if n < 1:
        raise ArgumentError(f'n must be >= 1, got {n}')
    cand, ref = ngrams(list(candidate), n), ngrams(list(reference), n)
    # clipped: each n-gram counts at most as often as it appears in the other side
    overlap = sum((cand & ref).values())
    return _Counts(overlap, sum(cand.values()), sum(ref.values()))


def lcs_length(a: Tokens, b: Tokens) -> int:
    """Longest common subsequence length by dynamic programming"""
    a, b = list(a), list(b)
    if not a or not b:
        return 0
    table = np.zeros((len(a) + 1, len(b) + 1), dtype=np.int64)
    for i, x in enumerate(a, start=1):
        for j, y in enumerate(b, start=1):
            if x == y:
                table[i, j] = table[i - 1, j - 1] + 1
            else:
                table[i, j] = max(table[i - 1, j], table[i, j - 1])
    return int(table[-1, -1])


def _lcs_counts(candidate: Tokens, reference: Tokens) -> _Counts:
    return _Counts(lcs_length(candidate, reference), len(candidate), len(reference))


def rouge_n(candidate: Tokens, reference: Tokens, n: int) -> RougeScore:
    """Clipped n-gram overlap over candidate (precision) and reference (recall) n-gram counts

    Args:
        candidate (Tokens): generated sequence
        reference (Tokens): gold sequence
        n (int): n-gram order, >= 1

    Returns:
        RougeScore: precision, recall, f; all 0 when either side has no n-grams
    """
    return _score(_ngram_counts(candidate, reference, n))


def rouge_l(candidate: Tokens, reference: Tokens) -> RougeScore:
    """LCS / len(candidate) as precision, LCS / len(reference) as recall"""
    return _score(_lcs_counts(candidate, reference))


def _pair_counts(candidate: Tokens, reference: Tokens) -> Dict[str, _Counts]:
    return {'rouge1': _ngram_counts(candidate, reference, 1),
            'rouge2': _ngram_counts(candidate, reference, 2),
            'rougeL': _lcs_counts(candidate, reference)}


def corpus_rouge(pairs: List[Tuple[Tokens, Tokens]], micro: bool = False) -> RougeReport:
    """Corpus ROUGE over (candidate, reference) pairs

    Macro-averages per-pair precision, recall and f by default. With micro=True the counts are pooled
    over the corpus first and scored once.

    Args:
        pairs (List[Tuple[Tokens, Tokens]]): (candidate, reference) pairs, non-empty
        micro (bool): pool counts instead of averaging per-pair scores

    Returns:
        RougeReport: corpus report
    """
    if not pairs:
        raise ArgumentError('corpus_rouge needs at least one pair')
    counts = [_pair_counts(c, r) for c, r in pairs]

    scores = {}
    for metric in ROUGE_METRICS:
        metric_counts = [pair[metric] for pair in counts]
        if micro:
            pooled = np.sum([list(c) for c in metric_counts], axis=0)
            scores[metric] = _score(_Counts(*(int(v) for v in pooled)))
        else:
            per_pair = np.array([list(_score(c)) for c in metric_counts])
            scores[metric] = RougeScore(*(float(v) for v in per_pair.mean(axis=0)))
    return RougeReport(pair_count=len(pairs), **scores)


def format_report(report: RougeReport) -> str:
    """Tab-separated table followed by machine-readable key=value lines"""
    table = pd.DataFrame(
        [[report.metric(m).precision, report.metric(m).recall, report.metric(m).f] for m in ROUGE_METRICS],
        index=[ROUGE_COLUMNS[m] for m in ROUGE_METRICS], columns=['precision', 'recall', 'f'])
    lines = [table.to_csv(sep='\t', index_label='metric', float_format='%.6f').rstrip('\n'), '']
    for m in ROUGE_METRICS:
        score = report.metric(m)
        lines.append(f'{m}_p={score.precision!r} {m}_r={score.recall!r} {m}_f={score.f!r}')
    lines.append(f'pair_count={report.pair_count}')
    return '\n'.join(lines) + '\n'


def parse_report(text: str) -> RougeReport:
    """Reads the key=value lines written by format_report"""
    values = {}
    for line in text.splitlines():
        for token in line.split():
            if '=' in token:
                key, value = token.split('=', 1)
                values[key] = value
    try:
        scores = {m: RougeScore(float(values[f'{m}_p']), float(values[f'{m}_r']), float(values[f'{m}_f']))
                  for m in ROUGE_METRICS}
        return RougeReport(pair_count=int(values['pair_count']), **scores)
    except KeyError as err:
        raise ArgumentError(f'report is missing {err.args[0]}')
