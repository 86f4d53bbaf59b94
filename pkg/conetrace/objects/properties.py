from fractions import Fraction
import math
from typing import Annotated

from pydantic import PlainSerializer, PlainValidator, WithJsonSchema


def _parse_complex(value) -> complex:
    if isinstance(value, dict):
        try:
            return complex(float(value['re']), float(value['im']))
        except KeyError as e:
            raise ValueError(f"complex value needs 're' and 'im', missing {e}")
    if isinstance(value, (complex, float, int)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"cannot read a complex number from {value!r}")


def _dump_complex(value: complex) -> dict:
    return {'re': value.real, 'im': value.imag}


def _parse_fraction(value) -> Fraction:
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, (Fraction, int, str)):
        return Fraction(value)
    if isinstance(value, float) and math.isfinite(value):
        return Fraction(value).limit_denominator(10 ** 6)
    raise ValueError(f"cannot read a rational number from {value!r}")


ComplexNumber = Annotated[
    complex,
    PlainValidator(_parse_complex),
    PlainSerializer(_dump_complex, when_used='json'),
    WithJsonSchema({'type': 'object',
                    'properties': {'re': {'type': 'number'}, 'im': {'type': 'number'}},
                    'required': ['re', 'im']}),
]
"""Complex number, serialized as ``{"re": ..., "im": ...}`` in JSON."""

Rational = Annotated[
    Fraction,
    PlainValidator(_parse_fraction),
    PlainSerializer(str, when_used='json'),
    WithJsonSchema({'type': 'string', 'pattern': r'^-?\d+(/\d+)?$'}),
]
"""Exact rational exponent, serialized as ``"-1/2"``."""
