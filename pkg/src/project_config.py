import os
import sys
import logging

from dotenv import load_dotenv

# Pick up a local .env before reading any variables
load_dotenv()

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

# Caps on the enumeration size. Every n-valued cap is replaced by ISOPOLY_MAX_N when set.
DEFAULT_CAPS = {
    'psi_n_exhaustive': 8,
    'psi_n_branch_and_bound': 10,
    'psi_nn': 6,
    'face': 6,
    'cloud': 5,
    'lab_adjacency_n': 4,
    'oracle': 10,
    'adjacency_points': 24,
}

# Caps counted in points rather than vertices of Kn; ISOPOLY_MAX_N leaves these alone
POINT_CAPS = {'adjacency_points'}

EXIT_CODES = {
    'ok': 0,
    'internal_error': 1,
    'input_error': 2,
    'cap_exceeded': 3,
}


logger = logging.getLogger(__name__)


def _env_int(name):
    """Returns the integer value of an environment variable, or None if it is unset or malformed."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return None
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not an integer")
        return None


def load_config():
    """Builds the configuration dictionary from defaults and the environment."""
    caps = dict(DEFAULT_CAPS)
    max_n = _env_int('ISOPOLY_MAX_N')
    if max_n is not None:
        for name in caps:
            if name not in POINT_CAPS:
                caps[name] = max_n

    return {
        'caps': caps,
        'defaults': {
            'seed': 0,
            'trials': 25,
            'entry_bound': 9,
            'threads': 1,
            'format': 'json',
            'log_level': os.getenv('ISOPOLY_LOG_LEVEL', 'WARNING').upper(),
        },
        'exit_codes': dict(EXIT_CODES),
    }


config = load_config()


def get_cap(name):
    """Returns the current value of a named cap, re-reading the environment."""
    return load_config()['caps'][name]


def setup_logging(level=None):
    """Configures root logging on stderr so stdout carries only reports."""
    level = level or config['defaults']['log_level']
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.WARNING),
                        format=LOG_FORMAT, stream=sys.stderr, force=True)
