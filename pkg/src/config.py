"""Model and training configuration plus the key=value file format they are stored in."""
from dataclasses import dataclass, fields, asdict, replace
from typing import Dict, Optional, Tuple, Any

from .constants import (
    VOCAB_SIZE, EMBED_DIM, HIDDEN_DIM, GATE_HIDDEN_DIM, SRB_LAMBDA, CELL_KINDS, BATCH_SIZE, LEARNING_RATE,
    ADAM_BETAS, ADAM_EPS, CLIP_NORM, MAX_SOURCE_LEN, MAX_SUMMARY_LEN, BEAM_SIZE, MAX_DECODE_LEN)
from .exceptions import ConfigError


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int = VOCAB_SIZE
    embed_dim: int = EMBED_DIM
    hidden_dim: int = HIDDEN_DIM
    gate_hidden_dim: int = GATE_HIDDEN_DIM
    # 0 means same as hidden_dim
    attn_dim: int = 0
    srb_lambda: float = SRB_LAMBDA
    cell_kind: str = 'lstm'
    use_gate: bool = True
    use_attention: bool = True
    use_srb: bool = True

    @property
    def attention_dim(self) -> int:
        return self.attn_dim or self.hidden_dim

    def validate(self) -> 'ModelConfig':
        for name in ('vocab_size', 'embed_dim', 'hidden_dim', 'gate_hidden_dim'):
            if getattr(self, name) < 1:
                raise ConfigError(f'{name} must be >= 1, got {getattr(self, name)}')
        if self.attn_dim < 0:
            raise ConfigError(f'attn_dim must be >= 0, got {self.attn_dim}')
        if self.srb_lambda < 0:
            raise ConfigError(f'srb_lambda must be >= 0, got {self.srb_lambda}')
        if self.cell_kind not in CELL_KINDS:
            raise ConfigError(f'cell_kind must be one of {CELL_KINDS}, got {self.cell_kind!r}')
        return self


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = BATCH_SIZE
    learning_rate: float = LEARNING_RATE
    betas: Tuple[float, float] = ADAM_BETAS
    eps: float = ADAM_EPS
    epochs: int = 10
    seed: int = 0
    clip_norm: float = CLIP_NORM
    # in optimizer steps, 0 disables intermediate checkpoints
    checkpoint_interval: int = 0
    corpus: Optional[str] = None
    dev_corpus: Optional[str] = None
    vocab: Optional[str] = None
    checkpoint_dir: Optional[str] = None
    max_source_len: int = MAX_SOURCE_LEN
    max_summary_len: int = MAX_SUMMARY_LEN
    min_score: Optional[int] = None
    beam: int = BEAM_SIZE
    max_len: int = MAX_DECODE_LEN
    length_normalize: bool = False
    micro_average: bool = False

    def validate(self) -> 'TrainConfig':
        if self.batch_size < 1:
            raise ConfigError(f'batch_size must be >= 1, got {self.batch_size}')
        if self.learning_rate <= 0:
            raise ConfigError(f'learning_rate must be > 0, got {self.learning_rate}')
        if self.clip_norm <= 0:
            raise ConfigError(f'clip_norm must be > 0, got {self.clip_norm}')
        if not all(0 <= b < 1 for b in self.betas):
            raise ConfigError(f'betas must lie in [0, 1), got {self.betas}')
        if self.epochs < 0 or self.checkpoint_interval < 0:
            raise ConfigError('epochs and checkpoint_interval must be non-negative')
        if self.beam < 1:
            raise ConfigError(f'beam must be >= 1, got {self.beam}')
        return self


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ('true', '1', 'yes'):
        return True
    if lowered in ('false', '0', 'no'):
        return False
    raise ValueError(f'not a boolean: {value!r}')


def _parse_value(raw: str, default: Any) -> Any:
    raw = raw.strip()
    if isinstance(default, bool):
        return _parse_bool(raw)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        return tuple(float(v) for v in raw.split(','))
    # Optional fields default to None
    if raw.lower() in ('', 'none'):
        return None
    return raw


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, tuple):
        return ','.join(repr(v) for v in value)
    if isinstance(value, float):
        # repr round-trips float64 exactly
        return repr(value)
    if value is None:
        return 'none'
    return str(value)


# Optional int fields have no typed default to infer from
_OPTIONAL_INTS = {'min_score'}


def parse_key_values(text: str) -> Dict[str, str]:
    """Parses key=value lines, ignoring blank lines and lines starting with #

    Args:
        text (str): file contents

    Returns:
        Dict[str, str]: raw string values by key
    """
    values = {}
    for i, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if '=' not in line:
            raise ConfigError(f'line {i}: expected key=value, got {line!r}')
        key, value = line.split('=', 1)
        values[key.strip()] = value.strip()
    return values


def configs_from_dict(values: Dict[str, str], model_config: ModelConfig = None,
                      train_config: TrainConfig = None) -> Tuple[ModelConfig, TrainConfig]:
    """Applies raw key=value pairs on top of (default) configs, unknown keys raise ConfigError"""
    model_config = model_config or ModelConfig()
    train_config = train_config or TrainConfig()

    model_fields = {f.name for f in fields(ModelConfig)}
    train_fields = {f.name for f in fields(TrainConfig)}
    # `lambda` is how the model weight is usually written
    aliases = {'lambda': 'srb_lambda'}

    model_updates, train_updates = {}, {}
    for key, raw in values.items():
        key = aliases.get(key, key)
        try:
            if key in model_fields:
                model_updates[key] = _parse_value(raw, getattr(model_config, key))
            elif key in _OPTIONAL_INTS:
                train_updates[key] = None if raw.lower() in ('', 'none') else int(raw)
            elif key in train_fields:
                train_updates[key] = _parse_value(raw, getattr(TrainConfig(), key))
            else:
                raise ConfigError(f'unknown config key {key!r}')
        except ValueError as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(f'bad value for {key!r}: {raw!r} ({err})') from err

    return (replace(model_config, **model_updates).validate(),
            replace(train_config, **train_updates).validate())


def load_config(path: str) -> Tuple[ModelConfig, TrainConfig]:
    """Reads a key=value config file mirroring ModelConfig and TrainConfig fields

    Args:
        path (str): config file path

    Returns:
        Tuple[ModelConfig, TrainConfig]: validated configs, defaults for anything not given
    """
    with open(path, encoding='utf-8') as f:
        return configs_from_dict(parse_key_values(f.read()))


def dump_config(*configs) -> str:
    """Formats configs as key=value lines that load_config reads back identically"""
    lines = []
    for config in configs:
        lines.extend(f'{key}={_format_value(value)}' for key, value in asdict(config).items())
    return '\n'.join(lines) + '\n'
