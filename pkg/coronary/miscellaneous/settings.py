import configparser
import logging
import os

import munch

logger = logging.getLogger(__name__)

coronary_path = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_FILE = os.path.join(coronary_path, 'config.ini')

config = configparser.ConfigParser()
config.read(DEFAULT_CONFIG_FILE)

GEOMETRY = 'geometry'
STENOSIS = 'stenosis'
PCAT = 'pcat'
CLASSIFIER = 'classifier'
PIPELINE = 'pipeline'


def _coerce(value):
    """Convert an ini string into int, float, tuple of numbers or str.

    :param value: raw string from the ini file
    :return: typed value

    """

    value = value.strip()
    if ',' in value:
        return tuple(_coerce(part) for part in value.split(','))
    for kind in (int, float):
        try:
            return kind(value)
        except ValueError:
            pass
    if value.lower() in ('true', 'false'):
        return value.lower() == 'true'
    return value


def get_setting(section, key, default=None):
    """Gets a value from the packaged config file if present

    :param section: ini section, e.g. 'stenosis'
    :param key: option name, e.g. 'sd_core'
    :param default: returned when the option is absent
    :return: typed value

    """

    if config.has_option(section, key):
        return _coerce(config[section][key])
    return default


def load_config(path=None, seed=None, jobs=None):
    """Build the pipeline configuration.

    The packaged config.ini is read first; sections and options of the
    user file (if given) override it one option at a time.

    :param path: optional user ini file
    :param seed: optional seed overriding [pipeline] seed
    :param jobs: optional worker count overriding [pipeline] jobs
    :return: munch.Munch with one Munch per section

    """

    parser = configparser.ConfigParser()
    parser.read(DEFAULT_CONFIG_FILE)
    if path is not None:
        if not os.path.exists(path):
            raise FileNotFoundError('config file {} does not exist'.format(path))
        logger.info('loading configuration overrides from {}'.format(path))
        parser.read(path)

    result = munch.Munch()
    for section in parser.sections():
        result[section] = munch.Munch(
            (key, _coerce(value)) for key, value in parser.items(section))
    if seed is not None:
        result[PIPELINE].seed = int(seed)
    if jobs is not None:
        result[PIPELINE].jobs = int(jobs)
    return result
