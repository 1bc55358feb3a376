# regex patterns for command-line values
BANDWIDTH_REGEX = r"^(\d+|n-\d+)$"
OMEGA_REGEX = r"^(auto|\d+(\.\d+)?)$"
METHOD_REGEX = r"^(sor|gsor|gj|ggs|direct)$"
PROBLEM_REGEX = r"^[a-z0-9][a-z0-9\-]*$"
