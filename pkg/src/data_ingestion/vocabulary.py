from collections import Counter
from typing import Dict, Iterable, List, Sequence
import logging

from ..constants import PAD_ID, BOS_ID, EOS_ID, UNK_ID, RESERVED_TOKENS, UNK_CHAR, VOCAB_SIZE
from ..exceptions import ArgumentError, ConsistencyError
from ..logging_functions import timeit


class Vocabulary:
    """Character <-> id map, ids 0..3 reserved for PAD, BOS, EOS, UNK. Immutable once built."""

    def __init__(self, chars: Sequence[str], max_size: int = VOCAB_SIZE):
        if len(chars) + len(RESERVED_TOKENS) > max_size:
            raise ArgumentError(f'{len(chars)} characters do not fit in max_size {max_size}')
        self.id_to_char: List[str] = list(RESERVED_TOKENS) + list(chars)
        self.char_to_id: Dict[str, int] = {c: i for i, c in enumerate(chars, start=len(RESERVED_TOKENS))}
        if len(self.char_to_id) != len(chars):
            raise ArgumentError('vocabulary characters must be unique')
        self.max_size = max_size

    def __len__(self) -> int:
        return len(self.id_to_char)

    def __contains__(self, char: str) -> bool:
        return char in self.char_to_id

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.id_to_char == other.id_to_char


@timeit
def build_vocabulary(texts: Iterable[str], max_size: int = VOCAB_SIZE) -> Vocabulary:
    """Keeps the max_size - 4 most frequent characters, ties go to whichever appeared first

    Args:
        texts (Iterable[str]): corpus texts, iterated once
        max_size (int): total vocabulary size including reserved tokens

    Returns:
        Vocabulary: vocabulary, anything not kept encodes to UNK
    """
    if max_size < len(RESERVED_TOKENS) + 1:
        raise ArgumentError(f'max_size must be >= {len(RESERVED_TOKENS) + 1}, got {max_size}')

    # Counter keeps first-occurrence order and sorted() is stable, so ties are deterministic
    counts = Counter()
    for text in texts:
        counts.update(text)
    if not counts:
        raise ArgumentError('cannot build a vocabulary from an empty corpus')

    ranked = sorted(counts.items(), key=lambda kv: -kv[1])
    kept = [char for char, _ in ranked[:max_size - len(RESERVED_TOKENS)]]

    logging.debug(f'VOCABULARY BUILT: {len(kept)} of {len(counts)} characters kept')
    return Vocabulary(kept, max_size)


def encode(v: Vocabulary, text: str) -> List[int]:
    """One id per unicode scalar value, unseen characters -> UNK"""
    return [v.char_to_id.get(char, UNK_ID) for char in text]


def decode(v: Vocabulary, ids: Iterable[int]) -> str:
    """Ids back to text, PAD/BOS/EOS are dropped and UNK renders as the replacement character

    Args:
        v (Vocabulary): vocabulary
        ids (Iterable[int]): ids to decode

    Returns:
        str: decoded text
    """
    chars = []
    for i in ids:
        i = int(i)
        if not 0 <= i < len(v):
            raise ArgumentError(f'id {i} out of range for vocabulary of size {len(v)}')
        if i in (PAD_ID, BOS_ID, EOS_ID):
            continue
        chars.append(UNK_CHAR if i == UNK_ID else v.id_to_char[i])
    return ''.join(chars)


def save_vocabulary(v: Vocabulary, path: str):
    """Writes `id<TAB>char` lines, the first four being the reserved tokens"""
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for i, char in enumerate(v.id_to_char):
            f.write(f'{i}\t{char}\n')


def load_vocabulary(path: str, max_size: int = VOCAB_SIZE) -> Vocabulary:
    with open(path, encoding='utf-8', newline='\n') as f:
        lines = [line[:-1] if line.endswith('\n') else line for line in f]

    header = [line.split('\t', 1) for line in lines[:len(RESERVED_TOKENS)]]
    expected = [[str(i), token] for i, token in enumerate(RESERVED_TOKENS)]
    if header != expected:
        raise ConsistencyError(f'{path}: reserved-token header {header} does not match {expected}')

    chars = []
    for line_number, line in enumerate(lines[len(RESERVED_TOKENS):], start=len(RESERVED_TOKENS) + 1):
        try:
            idx, char = line.split('\t', 1)
        except ValueError:
            raise ConsistencyError(f'{path}: line {line_number} is not `id<TAB>char`')
        if int(idx) != line_number - 1:
            raise ConsistencyError(f'{path}: line {line_number} has id {idx}, expected {line_number - 1}')
        chars.append(char)

    return Vocabulary(chars, max(max_size, len(chars) + len(RESERVED_TOKENS)))
