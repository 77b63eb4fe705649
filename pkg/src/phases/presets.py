"""
Named Phase Presets
===================

Each preset names a concrete phase used throughout the docs, the CLI and
the self-test: the three panels of the standard soliton gallery (line,
X-shaped 2-soliton, Y-shaped resonant) plus a few reference phases.
"""

from fractions import Fraction
from typing import Any, Dict

from src.phases.constructors import Phase, PhaseSpec, phase_from_spec

PHASE_PRESETS: Dict[str, Dict[str, Any]] = {
    'fig1_left': {
        'description': 'Oblique line soliton with k = (-1/2, 1); crest amplitude 9/8.',
        'kind': 'Line',
        'params': {'a1': 1, 'a2': 1, 'k1': Fraction(-1, 2), 'k2': 1},
    },

    'fig1_center': {
        'description': 'X-shaped 2-soliton with k = (-1, -1/2, 1/2, 1).',
        'kind': 'TwoSoliton',
        'params': {'k': [-1, Fraction(-1, 2), Fraction(1, 2), 1], 'ordered': True},
    },

    'fig1_right': {
        'description': 'Y-shaped resonant 3-soliton with k = (-3/10, 0, 1/2); three legs meet at the origin.',
        'kind': 'Resonant',
        'params': {'a': [1, 1, 1], 'k': [Fraction(-3, 10), 0, Fraction(1, 2)]},
    },

    'kdv_vertical': {
        'description': 'Vertical (KdV) line soliton with k = (1, -1).',
        'kind': 'Line',
        'params': {'a1': 1, 'a2': 1, 'k1': 1, 'k2': -1},
    },

    'oblique_line': {
        'description': 'Oblique line soliton with k = (1, 2); ΘW_y is a single exponential.',
        'kind': 'Line',
        'params': {'a1': 1, 'a2': 1, 'k1': 1, 'k2': 2},
    },

    'resonant_4': {
        'description': 'Resonant 4-soliton with k = (-1, 0, 1/2, 2) and unit amplitudes.',
        'kind': 'Resonant',
        'params': {'a': [1, 1, 1, 1], 'k': [-1, 0, Fraction(1, 2), 2]},
    },
}


def get_preset_config(preset_name: str) -> Dict[str, Any]:
    """
    Get configuration for a named preset.

    Args:
        preset_name: One of the keys of PHASE_PRESETS

    Returns:
        Dictionary with description, kind and params

    Raises:
        ValueError: If preset name is not recognized
    """
    if preset_name not in PHASE_PRESETS:
        available = ', '.join(PHASE_PRESETS.keys())
        raise ValueError(f"Unknown preset '{preset_name}'. Available: {available}")

    config = PHASE_PRESETS[preset_name].copy()
    config['params'] = dict(config['params'])
    return config


def list_presets() -> Dict[str, str]:
    """Return a dictionary of preset names and descriptions."""
    return {name: config['description'] for name, config in PHASE_PRESETS.items()}


def build_preset(preset_name: str) -> Phase:
    config = get_preset_config(preset_name)
    return phase_from_spec(PhaseSpec(config['kind'], config['params']))
