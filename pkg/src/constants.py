# reserved token ids, fixed so checkpoints and tests stay stable
PAD_ID = 0
BOS_ID = 1
EOS_ID = 2
UNK_ID = 3
RESERVED_TOKENS = ['<pad>', '<s>', '</s>', '<unk>']
# what an UNK id renders as when decoding back to text
UNK_CHAR = '�'

# ingestion limits (characters)
MAX_SOURCE_LEN = 150
MAX_SUMMARY_LEN = 30
# dev and test splits only keep human relevance scores >= this
MIN_EVAL_SCORE = 3
SCORE_RANGE = (1, 5)

# corpus file columns, anything past the summary lands in the overflow column
SCORE_COL = 'score'
TEXT_COL = 'text'
SUMMARY_COL = 'summary'
OVERFLOW_COL = 'overflow'
LINE_COL = 'line_number'

# model defaults
VOCAB_SIZE = 4000
EMBED_DIM = 400
HIDDEN_DIM = 500
GATE_HIDDEN_DIM = 1000
SRB_LAMBDA = 0.0001
CELL_KINDS = ('lstm', 'gru')
INIT_SCALE = 0.08

# training defaults
BATCH_SIZE = 32
LEARNING_RATE = 0.001
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8
CLIP_NORM = 5.0

# decoding defaults
BEAM_SIZE = 4
MAX_DECODE_LEN = 30

# cosine below this norm is treated as undefined and returns 0
COSINE_EPS = 1e-12

# gradient checking
FD_STEP = 1e-5
FD_REL_TOL = 1e-4
FD_ABS_TOL = 1e-7

# files inside a checkpoint directory
MANIFEST_FILE = 'manifest.txt'
PARAMS_FILE = 'params.bin'
OPTIMIZER_FILE = 'optimizer.bin'
VOCAB_FILE = 'vocab.tsv'

# files inside a training output directory
CHECKPOINT_DIR = 'step_{:06d}'
FINAL_CHECKPOINT_DIR = 'final'
BEST_CHECKPOINT_DIR = 'best'
TRAIN_LOG_FILE = 'train_log.tsv'
TRAIN_CURVES_FILE = 'training_curves.png'
ABLATION_TABLE_FILE = 'ablation.tsv'

TRAIN_LOGGER = 'srb.train'
ROUGE_METRICS = ['rouge1', 'rouge2', 'rougeL']
ROUGE_COLUMNS = {'rouge1': 'ROUGE-1', 'rouge2': 'ROUGE-2', 'rougeL': 'ROUGE-L'}

# the four systems of the ablation table, in report order
ABLATION_VARIANTS = {
    'RNN': {'use_attention': False, 'use_srb': False, 'use_gate': False},
    'RNN context': {'use_attention': True, 'use_srb': False, 'use_gate': False},
    'RNN context + SRB': {'use_attention': True, 'use_srb': True, 'use_gate': False},
    '+Attention': {'use_attention': True, 'use_srb': True, 'use_gate': True},
}
