import os
import sys
import time
import logging
from datetime import datetime
from functools import wraps

from .constants import TRAIN_LOGGER


def timeit(method):

    @wraps(method)
    def timed(*args, **kw):
        ts = time.time()
        result = method(*args, **kw)
        te = time.time()

        logging.info('%s %2.2f sec' %
                     (method.__name__.upper(), te-ts))
        return result

    return timed


def configure_logging(command: str, log_dir: str = 'logs') -> str:
    """Logs everything to a per-run file and routes per-step training records to stdout

    Args:
        command (str): CLI command being run, used in the log file name
        log_dir (str): folder for log files, created if missing

    Returns:
        str: path of the log file
    """
    os.makedirs(log_dir, exist_ok=True)
    log_file = os.path.join(log_dir, f'{command.upper()}_RUN: {datetime.now()}.log')

    logging.basicConfig(level=logging.DEBUG,
                        filename=log_file,
                        format=' %(asctime)s - %(levelname)s - %(message)s',)

    # stop matplotlib fonts appending to logs
    logging.getLogger('matplotlib.font_manager').disabled = True
    logging.getLogger('matplotlib').setLevel(logging.WARNING)

    # step records are already tab separated, print them bare
    stdout = logging.StreamHandler(sys.stdout)
    stdout.setFormatter(logging.Formatter('%(message)s'))
    stdout.setLevel(logging.INFO)
    logging.getLogger(TRAIN_LOGGER).addHandler(stdout)

    return log_file
