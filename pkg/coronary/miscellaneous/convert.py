''' convert numbers and documents to their canonical text form '''

import enum
import hashlib
import json
import math

import numpy as np

FLOAT_FORMAT = '.17g'


def format_float(value):
    ''' format a float with 17 significant digits; non-finite becomes None '''
    value = float(value)
    if not math.isfinite(value):
        return None
    text = format(value, FLOAT_FORMAT)
    if 'e' not in text and '.' not in text:
        text += '.0'
    return text


def to_builtin(obj):
    ''' convert numpy scalars/arrays, tuples and mappings to plain python '''
    if isinstance(obj, dict):
        return {str(key): to_builtin(value) for key, value in obj.items()}
    if hasattr(obj, '_asdict'):
        return to_builtin(obj._asdict())
    if isinstance(obj, np.ndarray):
        return [to_builtin(value) for value in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_builtin(value) for value in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def _dump(obj, indent, level):
    pad = '\n' + ' ' * (indent * (level + 1)) if indent else ''
    end = '\n' + ' ' * (indent * level) if indent else ''
    sep = ',' + pad if indent else ','
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        text = format_float(obj)
        return 'null' if text is None else text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = ['{}: {}'.format(json.dumps(key), _dump(obj[key], indent, level + 1))
                 for key in sorted(obj)]
        return '{' + pad + sep.join(items) + end + '}'
    if isinstance(obj, list):
        if not obj:
            return '[]'
        # numeric rows stay on one line to keep weight matrices readable
        if all(isinstance(value, (int, float)) and not isinstance(value, bool) for value in obj):
            return '[' + ', '.join(_dump(value, 0, 0) for value in obj) + ']'
        return '[' + pad + sep.join(_dump(value, indent, level + 1) for value in obj) + end + ']'
    raise TypeError('cannot serialize {!r}'.format(type(obj)))


def canonical_json(obj, indent=1):
    ''' serialize with sorted keys and 17-significant-digit floats '''
    return _dump(to_builtin(obj), indent, 0) + '\n'


def write_json(path, obj):
    ''' write a canonical JSON document '''
    with open(path, 'w') as fh:
        fh.write(canonical_json(obj))


def config_hash(config):
    ''' sha256 of the canonical JSON form of a configuration '''
    text = canonical_json(config, indent=0)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()
