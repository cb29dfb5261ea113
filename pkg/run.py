import sys
import getopt
import logging

from src.exceptions import SRBError
from src.logging_functions import configure_logging
from src.pipeline import run_train, run_summarize, run_evaluate, run_ablate, run_rouge

USAGE = """usage:
  python run.py train --corpus PATH --vocab PATH --config PATH --out DIR [--seed N] [--resume DIR]
  python run.py summarize --ckpt PATH --input PATH [--beam K] [--max-len M]
  python run.py evaluate --ckpt PATH --corpus PATH [--config PATH] [--beam K] [--max-len M]
  python run.py ablate --corpus PATH --out DIR [--config PATH] [--vocab PATH] [--eval-corpus PATH]
  python run.py rouge --candidates PATH --references PATH [--micro]
"""

OPTIONS = {
    'train': ['corpus=', 'vocab=', 'config=', 'out=', 'seed=', 'resume='],
    'summarize': ['ckpt=', 'input=', 'beam=', 'max-len='],
    'evaluate': ['ckpt=', 'corpus=', 'config=', 'beam=', 'max-len='],
    'ablate': ['corpus=', 'out=', 'config=', 'vocab=', 'eval-corpus='],
    'rouge': ['candidates=', 'references=', 'micro'],
}


def optional_int(args, key):
    return int(args[key]) if key in args else None


def main(argv):
    if not argv or argv[0] not in OPTIONS:
        print(USAGE, file=sys.stderr)
        return 2
    command = argv[0]
    args = {arg: val for (arg, val) in getopt.getopt(argv[1:], '', OPTIONS[command])[0]}

    configure_logging(command)
    logging.debug(f'ARGS: {command} {args}')

    if command == 'train':
        run_train(corpus_path=args['--corpus'], vocab_path=args.get('--vocab'), config_path=args.get('--config'),
                  out_dir=args['--out'], seed=optional_int(args, '--seed'), resume=args.get('--resume'))
    elif command == 'summarize':
        for summary in run_summarize(args['--ckpt'], args['--input'], optional_int(args, '--beam'),
                                     optional_int(args, '--max-len')):
            print(summary)
    elif command == 'evaluate':
        _, report = run_evaluate(args['--ckpt'], args['--corpus'], args.get('--config'),
                                 optional_int(args, '--beam'), optional_int(args, '--max-len'))
        print(report, end='')
    elif command == 'ablate':
        table = run_ablate(args['--corpus'], args['--out'], args.get('--config'), args.get('--vocab'),
                           args.get('--eval-corpus'))
        print(table.to_csv(sep='\t', index_label='model'), end='')
    elif command == 'rouge':
        print(run_rouge(args['--candidates'], args['--references'], '--micro' in args), end='')
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main(sys.argv[1:]))
    except (SRBError, KeyError, getopt.GetoptError) as err:
        logging.exception('RUN FAILED')
        print(f'error: {err}\n{USAGE}', file=sys.stderr)
        sys.exit(1)
