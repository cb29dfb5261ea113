"""LCSTS-style corpus ingestion.

One record per line: `score<TAB>text<TAB>summary`, the score field may be empty.
"""
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple
import csv
import re
import logging
import numpy as np
import pandas as pd

from .vocabulary import Vocabulary, encode
from ..constants import (MAX_SOURCE_LEN, MAX_SUMMARY_LEN, MIN_EVAL_SCORE, SCORE_RANGE, SCORE_COL, TEXT_COL,
                         SUMMARY_COL, OVERFLOW_COL, LINE_COL)
from ..exceptions import ArgumentError, CorpusParseError
from ..logging_functions import timeit

ROLES = ('train', 'dev', 'test')
FIELD_COLS = [SCORE_COL, TEXT_COL, SUMMARY_COL]


class RawRecord(NamedTuple):
    score: Optional[int]
    text: str
    summary: str
    line_number: int


class TextSummaryPair(NamedTuple):
    source_ids: Tuple[int, ...]
    summary_ids: Tuple[int, ...]
    score: Optional[int] = None


@dataclass
class CorpusSplit:
    pairs: List[TextSummaryPair]
    role: str = 'train'

    def __len__(self) -> int:
        return len(self.pairs)


def read_table(path: str, columns: List[str]) -> pd.DataFrame:
    """Reads a tab-separated UTF-8 file verbatim: no quoting, no NA conversion, one row per physical line

    Missing trailing fields may come back as NaN or '', callers fill them.
    """
    try:
        return pd.read_csv(path, sep='\t', header=None, names=columns, index_col=False, quoting=csv.QUOTE_NONE,
                           dtype=object, keep_default_na=False, skip_blank_lines=False, encoding='utf-8',
                           engine='python')
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=columns, dtype=object)


def read_lines(path: str) -> List[str]:
    """Reads one text per line, blank lines kept so line-aligned files stay aligned"""
    data = read_table(path, [TEXT_COL, OVERFLOW_COL])
    has_tab = data[OVERFLOW_COL].notna()
    if has_tab.any():
        raise CorpusParseError(int(has_tab.idxmax()) + 1, 'tab inside a text line')
    return data[TEXT_COL].fillna('').astype(str).tolist()


@timeit
def read_corpus_table(path: str) -> pd.DataFrame:
    """Parses a corpus file into a frame, blank lines removed

    Args:
        path (str): UTF-8 corpus file

    Returns:
        pd.DataFrame: `score` (float, NaN when unscored), `text`, `summary` (stripped) and 1-based `line_number`
    """
    try:
        data = read_table(path, FIELD_COLS + [OVERFLOW_COL])
    except pd.errors.ParserError as err:
        match = re.search(r'line (\d+)', str(err))
        raise CorpusParseError(int(match.group(1)) if match else 0, str(err).strip())

    data[LINE_COL] = np.arange(1, len(data) + 1)
    too_many = data.pop(OVERFLOW_COL).notna()
    data[FIELD_COLS] = data[FIELD_COLS].fillna('')
    for col in FIELD_COLS:
        data[col] = data[col].astype(str).str.strip()

    blank = (data[FIELD_COLS] == '').all(axis=1) & ~too_many
    scored = data[SCORE_COL] != ''
    is_int = data[SCORE_COL].str.fullmatch(r'[+-]?\d+').fillna(False).astype(bool)
    scores = pd.to_numeric(data[SCORE_COL].where(scored & is_int), errors='coerce')
    out_of_range = scored & is_int & ~scores.between(*SCORE_RANGE)

    malformed = too_many | (scored & ~is_int) | out_of_range
    if malformed.any():
        i = malformed.idxmax()
        if too_many[i]:
            message = 'expected 3 tab-separated fields, got more'
        elif not is_int[i]:
            message = f'score {data.at[i, SCORE_COL]!r} is not an integer'
        else:
            message = f'score {data.at[i, SCORE_COL]} outside {SCORE_RANGE}'
        raise CorpusParseError(int(data.at[i, LINE_COL]), message)

    data[SCORE_COL] = scores
    return data[~blank]


@timeit
def load_raw_records(path: str, min_score: Optional[int] = None) -> List[RawRecord]:
    """Reads and filters corpus records, order preserved

    Records with an empty text or summary are dropped, a record missing its summary field counts as one with
    an empty summary. When min_score is given, records scored below it (or unscored) are dropped as well.

    Args:
        path (str): UTF-8 corpus file
        min_score (Optional[int]): keep only records scored at least this

    Returns:
        List[RawRecord]: surviving records
    """
    data = read_corpus_table(path)

    empty = (data[TEXT_COL] == '') | (data[SUMMARY_COL] == '')
    unscored = ~empty & data[SCORE_COL].isna() & (min_score is not None)
    low_score = ~empty & (data[SCORE_COL] < (min_score if min_score is not None else -np.inf))
    kept = data[~(empty | unscored | low_score)]

    if unscored.any():
        logging.warning(f'{path}: {unscored.sum()} records without a score dropped (min_score={min_score})')
    logging.debug(f'CORPUS LOADED: {path} kept={len(kept)} empty={empty.sum()} low_score={low_score.sum()}')

    return [RawRecord(None if np.isnan(score) else int(score), text, summary, int(line_number))
            for score, text, summary, line_number in kept[FIELD_COLS + [LINE_COL]].itertuples(index=False)]


def encode_corpus(v: Vocabulary, records: List[RawRecord], role: str = 'train',
                  max_source_len: int = MAX_SOURCE_LEN, max_summary_len: int = MAX_SUMMARY_LEN) -> CorpusSplit:
    """Encodes records to id sequences, truncating source and summary"""
    if role not in ROLES:
        raise ArgumentError(f'role must be one of {ROLES}, got {role!r}')
    if max_source_len < 1 or max_summary_len < 1:
        raise ArgumentError('truncation limits must be >= 1')

    pairs = [TextSummaryPair(tuple(encode(v, r.text[:max_source_len])),
                             tuple(encode(v, r.summary[:max_summary_len])),
                             r.score)
             for r in records]
    return CorpusSplit(pairs, role)


def load_corpus(path: str, v: Vocabulary, role: str = 'train', min_score: Optional[int] = None,
                max_source_len: int = MAX_SOURCE_LEN, max_summary_len: int = MAX_SUMMARY_LEN) -> CorpusSplit:
    """Loads, filters and encodes a corpus file

    Dev and test splits default to min_score 3, the human relevance cut used for evaluation.

    Args:
        path (str): corpus file
        v (Vocabulary): vocabulary used for encoding
        role (str): train, dev or test
        min_score (Optional[int]): minimum relevance score, None keeps everything (train default)
        max_source_len (int): source truncation in characters
        max_summary_len (int): summary truncation in characters

    Returns:
        CorpusSplit: encoded pairs
    """
    if min_score is None and role in ('dev', 'test'):
        min_score = MIN_EVAL_SCORE
    records = load_raw_records(path, min_score)
    return encode_corpus(v, records, role, max_source_len, max_summary_len)
