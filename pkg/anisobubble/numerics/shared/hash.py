from functools import reduce
import math
import numpy as np
import re


def dig(obj_arg, arr_or_string):
    if type(arr_or_string) is str:
        arr_or_string = arr_or_string.split('.')
    arr = list(map(str.strip, arr_or_string))

    def _build(obj, key):
        if obj is None:
            return None
        tup = re.split(r'\[(\d+)\]$', key)
        if len(tup) >= 2:
            key, index = tup[0], int(tup[1])
            seq = obj.get(key) if key else obj
            if not isinstance(seq, (list, tuple)) or index >= len(seq):
                return None
            return seq[index]
        elif isinstance(obj, dict):
            return obj.get(key)
        return None
    return reduce(_build, arr, obj_arg)


def group_by(func, arr):
    def _build(obj, item):
        val = func(item)
        if not obj.get(val):
            obj[val] = []
        obj[val].append(item)
        return obj
    return reduce(_build, arr, {})


def deep_merge_dict(a, b):
    c = a.copy()
    for key, value in b.items():
        if isinstance(value, dict) and isinstance(c.get(key), dict):
            c[key] = deep_merge_dict(c[key], value)
        else:
            c[key] = value
    return c


def replace_nan_values(obj):
    """
    Recursively converts numpy scalars and arrays to plain Python values and replaces
    NaN and infinities by None.
    """
    if isinstance(obj, dict):
        return {k: replace_nan_values(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [replace_nan_values(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return replace_nan_values(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value) or math.isinf(value):
            return None
        return value
    return obj
