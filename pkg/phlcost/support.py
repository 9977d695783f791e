# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0116
'''
Helpers shared by the JSON writers and the command line.
'''

import json
import logging
from fractions import Fraction


def rational(text) -> Fraction:
    '''Parse "3", "3/2", "0.25" or an int into an exact Fraction.

    :param text: Rational written as integer, num/den or decimal.
    :return Fraction:'''
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    assert isinstance(text, str)
    return Fraction(text.strip())


def rational_str(value: Fraction) -> str:
    '''"2" for integers, "3/2" otherwise.'''
    return str(Fraction(value))


def decimal_str(value: Fraction):
    '''Terminating decimal form of value, or None when the denominator
    has prime factors other than 2 and 5.'''
    value = Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    places = max(twos, fives, 1)
    scaled = abs(value) * 10 ** places
    assert scaled.denominator == 1
    digits = str(scaled.numerator).rjust(places + 1, '0')
    text = f'{digits[:-places]}.{digits[-places:]}'
    return '-' + text if value < 0 else text


def dump_json(obj) -> str:
    '''Stable JSON text: sorted keys, two space indent.'''
    return json.dumps(obj, sort_keys=True, indent=2)


def parse_assignment(text: str):
    '''Split NAME=VALUE from the command line.

    :return tuple: (name, value) or None when malformed.'''
    if '=' not in text:
        logging.debug('parse_assignment: malformed %s', text)
        return None
    name, value = text.split('=', 1)
    name = name.strip()
    if not name:
        return None
    return name, value.strip()
