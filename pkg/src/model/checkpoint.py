"""Checkpoint directories.

A checkpoint is a directory with
  manifest.txt   model config and training step as key=value lines
  params.bin     every named parameter as (name, shape, row-major float64 little-endian values)
  optimizer.bin  optimizer moments in the same record format (optional)
  vocab.tsv      the vocabulary the model was trained with (optional)
"""
import os
import logging
from collections import OrderedDict
from typing import Dict, NamedTuple, Optional
import numpy as np

from ..config import ModelConfig, configs_from_dict, parse_key_values, dump_config
from ..constants import MANIFEST_FILE, PARAMS_FILE, OPTIMIZER_FILE, VOCAB_FILE
from ..data_ingestion.vocabulary import Vocabulary, save_vocabulary, load_vocabulary
from ..exceptions import ConsistencyError
from .params import ModelParams, from_arrays

_UINT = np.dtype('<u4')
_FLOAT = np.dtype('<f8')
# manifest keys that are not model config fields
_STATE_KEYS = ('step', 'optimizer_step')


class Checkpoint(NamedTuple):
    params: ModelParams
    config: ModelConfig
    step: int
    vocab: Optional[Vocabulary] = None
    optimizer_step: int = 0
    optimizer_arrays: Optional[Dict[str, np.ndarray]] = None


def write_arrays(path: str, arrays: Dict[str, np.ndarray]):
    """Writes named rank-2 arrays: count, then per array name length, name, rows, cols, values"""
    with open(path, 'wb') as f:
        f.write(np.array([len(arrays)], dtype=_UINT).tobytes())
        for name, data in arrays.items():
            encoded = name.encode('utf-8')
            f.write(np.array([len(encoded)], dtype=_UINT).tobytes())
            f.write(encoded)
            f.write(np.array(data.shape, dtype=_UINT).tobytes())
            f.write(np.ascontiguousarray(data, dtype=_FLOAT).tobytes())


def read_arrays(path: str) -> Dict[str, np.ndarray]:
    with open(path, 'rb') as f:
        buffer = f.read()

    def read(dtype, count, offset):
        values = np.frombuffer(buffer, dtype=dtype, count=count, offset=offset)
        return values, offset + values.nbytes

    arrays = OrderedDict()
    (n,), offset = read(_UINT, 1, 0)
    for _ in range(int(n)):
        (name_len,), offset = read(_UINT, 1, offset)
        name = buffer[offset:offset + int(name_len)].decode('utf-8')
        offset += int(name_len)
        (rows, cols), offset = read(_UINT, 2, offset)
        values, offset = read(_FLOAT, int(rows) * int(cols), offset)
        # copy so the array is writable and owns its memory
        arrays[name] = values.reshape(int(rows), int(cols)).astype(np.float64)
    if offset != len(buffer):
        raise ConsistencyError(f'{path}: {len(buffer) - offset} trailing bytes')
    return arrays


def save_checkpoint(directory: str, params: ModelParams, config: ModelConfig, step: int = 0,
                    vocab: Vocabulary = None, optimizer_step: int = 0,
                    optimizer_arrays: Dict[str, np.ndarray] = None) -> str:
    """Writes a checkpoint directory (created if missing)

    Args:
        directory (str): target directory
        params (ModelParams): parameters to save
        config (ModelConfig): config the parameters belong to
        step (int): training step reached
        vocab (Vocabulary): vocabulary, saved alongside when given
        optimizer_step (int): optimizer step count
        optimizer_arrays (Dict[str, np.ndarray]): optimizer state to resume from

    Returns:
        str: the directory
    """
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, MANIFEST_FILE), 'w', encoding='utf-8') as f:
        f.write(dump_config(config))
        f.write(f'step={step}\noptimizer_step={optimizer_step}\n')

    write_arrays(os.path.join(directory, PARAMS_FILE), params.arrays())
    if optimizer_arrays is not None:
        write_arrays(os.path.join(directory, OPTIMIZER_FILE), optimizer_arrays)
    if vocab is not None:
        save_vocabulary(vocab, os.path.join(directory, VOCAB_FILE))

    logging.info(f'CHECKPOINT SAVED: {directory} (step {step})')
    return directory


def load_checkpoint(directory: str) -> Checkpoint:
    """Reads a checkpoint directory, checking parameter names and shapes against its manifest"""
    with open(os.path.join(directory, MANIFEST_FILE), encoding='utf-8') as f:
        values = parse_key_values(f.read())
    state = {key: int(values.pop(key, 0)) for key in _STATE_KEYS}
    config, _ = configs_from_dict(values)

    params = from_arrays(read_arrays(os.path.join(directory, PARAMS_FILE)), config)

    optimizer_path = os.path.join(directory, OPTIMIZER_FILE)
    optimizer_arrays = read_arrays(optimizer_path) if os.path.exists(optimizer_path) else None
    vocab_path = os.path.join(directory, VOCAB_FILE)
    vocab = load_vocabulary(vocab_path, config.vocab_size) if os.path.exists(vocab_path) else None

    logging.debug(f'CHECKPOINT LOADED: {directory} (step {state["step"]})')
    return Checkpoint(params, config, state['step'], vocab, state['optimizer_step'], optimizer_arrays)
