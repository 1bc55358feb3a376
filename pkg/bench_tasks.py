import re

from errors import ConfigError
from regexes import BANDWIDTH_REGEX, OMEGA_REGEX

# Function that accepts a value and a regex pattern string for input validation
def validate_pattern(value, pattern):
    return re.fullmatch(pattern, str(value).strip()) is not None

# Function that accepts a list of dicts and the field to check, for bulk input validation
def validate_bulk(data_list, index):
    for data in data_list:
        if data[index] is not None and not validate_pattern(data[index], data['pattern']):
            return False

    return True

def resolve_bandwidth(value, n):
    """Turns an explicit bandwidth or the relative form 'n-5' into an integer for dimension n."""
    text = str(value).strip()
    if not validate_pattern(text, BANDWIDTH_REGEX):
        raise ConfigError(f"bandwidth '{value}' is neither an integer nor of the form n-<k>")

    m = n - int(text[2:]) if text.startswith('n-') else int(text)
    if not 0 <= m <= n - 1:
        raise ConfigError(f"bandwidth {text} resolves to {m}, outside [0, {n - 1}] for n={n}")
    return m

def parse_omega(value):
    text = str(value).strip().lower()
    if not validate_pattern(text, OMEGA_REGEX):
        raise ConfigError(f"omega must be a number or 'auto', got '{value}'")
    if text == 'auto':
        return 'auto'

    omega = float(text)
    if not 0.0 < omega <= 2.0:
        raise ConfigError(f"omega must lie in (0, 2], got {omega}")
    return omega
