from anisobubble.cli.constants import (
    CONFIG_VERSION,
    DEFAULT_CONFIG,
    REQUIRED_FIELDS,
    SUBCOMMANDS,
    TOLERANCE_KEYS,
)
from anisobubble.numerics.anisotropy.constants import NORM_FAMILIES, NormFamily
from anisobubble.numerics.anisotropy.norms import norm_from_dict
from anisobubble.numerics.errors import ConfigError
from anisobubble.numerics.quadrature.constants import RULE_KINDS, SUPPORTED_DIMENSIONS
from anisobubble.numerics.shared.hash import deep_merge_dict, dig
from anisobubble.numerics.stability.constants import PERTURBATION_KINDS
import copy
import json
import logging
import numbers
import os

logger = logging.getLogger(__name__)

QUADRATURE_NUMBERS = [
    'angular_order',
    'nodes',
    'order',
    's_max',
    's_min',
    'scale',
    'step',
    'tail_exponent',
]


def read_config_file(path):
    if not os.path.exists(path):
        raise ConfigError('config', f'file \'{path}\' does not exist')
    with open(path) as file:
        try:
            raw = json.load(file)
        except json.JSONDecodeError as err:
            raise ConfigError('config', f'invalid JSON at line {err.lineno}: {err.msg}')
    if not isinstance(raw, dict):
        raise ConfigError('config', 'the top level must be an object')
    for field in REQUIRED_FIELDS:
        if dig(raw, field) is None:
            raise ConfigError(field, 'required field is missing')
    return raw


def load_config(path=None, overrides=None):
    """
    DEFAULT_CONFIG deep-merged with the file at path and then with overrides, validated.
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        config = deep_merge_dict(config, read_config_file(path))
    if overrides:
        config = deep_merge_dict(config, overrides)
    validate_config(config)
    return config


def flag_overrides(seed=None, threads=None, tol_scale=None, draws=None, out_dir=None):
    overrides = {}
    if seed is not None:
        overrides['seed'] = seed
    if threads is not None:
        overrides['threads'] = threads
    if tol_scale is not None:
        overrides['tolerance_scale'] = tol_scale
    if draws is not None:
        overrides['commands'] = {'xi-p': {'draws': draws}}
    if out_dir is not None:
        overrides['output'] = {'dir': out_dir}
    return overrides


def command_config(config, subcommand):
    """
    The section commands.<subcommand> with every tolerance multiplied by tolerance_scale.
    """
    section = copy.deepcopy(dig(config, ['commands', subcommand]) or {})
    scale = config.get('tolerance_scale', 1.0)
    for key in TOLERANCE_KEYS:
        if section.get(key) is not None:
            section[key] = section[key] * scale
    return section


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _require_number(value, path, low=None, high=None, strict=False):
    if not _is_number(value):
        raise ConfigError(path, f'expected a number, got {value!r}')
    if low is not None and (value <= low if strict else value < low):
        raise ConfigError(path, f'must be {">" if strict else ">="} {low}, got {value}')
    if high is not None and value > high:
        raise ConfigError(path, f'must be <= {high}, got {value}')


def _require_int(value, path, low=None):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(path, f'expected an integer, got {value!r}')
    if low is not None and value < low:
        raise ConfigError(path, f'must be >= {low}, got {value}')


def _require_list(value, path):
    if not isinstance(value, list):
        raise ConfigError(path, f'expected a list, got {value!r}')


def _validate_norm(norm):
    family = norm.get('family')
    if family not in [f.value for f in NORM_FAMILIES]:
        raise ConfigError('norm.family', f'the norm family \'{family}\' is not supported')
    params = norm.get('params') or {}
    if not isinstance(params, dict):
        raise ConfigError('norm.params', 'expected an object')
    if family == NormFamily.QUADRATIC.value:
        if 'matrix' in params:
            _require_list(params['matrix'], 'norm.params.matrix')
        else:
            _require_list(params.get('diagonal', []), 'norm.params.diagonal')
            for i, value in enumerate(params.get('diagonal', [])):
                _require_number(value, f'norm.params.diagonal[{i}]', 0, strict=True)
    elif family == NormFamily.QUARTIC_BLEND.value:
        _require_number(params.get('epsilon', 0.0), 'norm.params.epsilon', 0)


def _validate_cell(n, p, n_path, p_path):
    if n not in SUPPORTED_DIMENSIONS:
        raise ConfigError(n_path, f'the dimension {n!r} is not supported')
    _require_number(p, p_path)
    if not 1 < p < n:
        raise ConfigError(p_path, f'need 1 < p < n = {n}, got {p}')


def _validate_matrix(matrix):
    ns = matrix.get('n')
    ps = matrix.get('p')
    _require_list(ns, 'matrix.n')
    _require_list(ps, 'matrix.p')
    if len(ns) != len(ps):
        raise ConfigError('matrix.p', f'expected {len(ns)} entries to pair with matrix.n')
    for i, (n, p) in enumerate(zip(ns, ps)):
        _validate_cell(n, p, f'matrix.n[{i}]', f'matrix.p[{i}]')


def _validate_quadrature(quadrature):
    if not isinstance(quadrature, dict):
        raise ConfigError('quadrature', 'expected an object')
    kind = quadrature.get('kind')
    if kind is not None and kind not in [k.value for k in RULE_KINDS]:
        raise ConfigError('quadrature.kind', f'the rule kind \'{kind}\' is not supported')
    for key in QUADRATURE_NUMBERS:
        if quadrature.get(key) is not None:
            _require_number(quadrature[key], f'quadrature.{key}')


def _validate_commands(commands):
    if not isinstance(commands, dict):
        raise ConfigError('commands', 'expected an object')
    for name in commands:
        if name not in [s.value for s in SUBCOMMANDS]:
            raise ConfigError(f'commands.{name}', 'unknown subcommand')
        for key in TOLERANCE_KEYS:
            value = dig(commands, [name, key])
            if value is not None:
                _require_number(value, f'commands.{name}.{key}', 0, strict=True)

    _require_int(dig(commands, 'xi-p.draws'), 'commands.xi-p.draws', 1)
    _require_int(dig(commands, 'xi-p.max_terms'), 'commands.xi-p.max_terms', 1)
    for i, p in enumerate(dig(commands, 'xi-p.exponents') or []):
        _require_number(p, f'commands.xi-p.exponents[{i}]', 1, strict=True)
    _require_int(dig(commands, 'residual.bumps'), 'commands.residual.bumps', 1)
    _require_int(dig(commands, 'decompose.k_max'), 'commands.decompose.k_max', 1)
    _require_number(dig(commands, 'proof-bubble.t_ball'), 'commands.proof-bubble.t_ball', 0, 1, strict=True)

    for i, cell in enumerate(dig(commands, 'shoot-radial.cells') or []):
        if not isinstance(cell, list) or len(cell) != 2:
            raise ConfigError(f'commands.shoot-radial.cells[{i}]', 'expected [n, p]')
        _validate_cell(
            cell[0],
            cell[1],
            f'commands.shoot-radial.cells[{i}]',
            f'commands.shoot-radial.cells[{i}]',
        )

    sweep = commands.get('stability-sweep') or {}
    for i, family in enumerate(sweep.get('families', [])):
        if family not in [k.value for k in PERTURBATION_KINDS]:
            raise ConfigError(
                f'commands.stability-sweep.families[{i}]',
                f'the perturbation family \'{family}\' is not supported',
            )
    for i, eps in enumerate(sweep.get('eps', [])):
        _require_number(eps, f'commands.stability-sweep.eps[{i}]', 0)


def validate_config(config):
    """
    Raises ConfigError naming the dotted path of the first invalid field.
    """
    if config.get('version') != CONFIG_VERSION:
        raise ConfigError('version', f'expected {CONFIG_VERSION}, got {config.get("version")!r}')
    if not isinstance(config.get('norm'), dict):
        raise ConfigError('norm', 'expected an object')
    _validate_norm(config['norm'])
    _validate_matrix(config.get('matrix') or {})
    _validate_quadrature(config.get('quadrature') or {})
    _require_int(config.get('seed'), 'seed', 0)
    if config.get('threads') is not None:
        _require_int(config['threads'], 'threads', 1)
    _require_number(config.get('tolerance_scale'), 'tolerance_scale', 0, strict=True)
    if not isinstance(dig(config, 'output.dir'), str):
        raise ConfigError('output.dir', 'expected a directory path')
    _validate_commands(config.get('commands') or {})

    for n in sorted(set(config['matrix']['n'])):
        try:
            norm_from_dict(dict(config['norm'], n=n))
        except ValueError as err:
            raise ConfigError('norm.params', str(err))
    logger.debug(f'validate_config: {len(config["matrix"]["n"])} matrix cells')


def norm_for(config, n):
    return norm_from_dict(dict(config['norm'], n=n))


def matrix_cells(config):
    return [(int(n), float(p)) for n, p in zip(config['matrix']['n'], config['matrix']['p'])]
