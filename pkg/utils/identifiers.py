"""PDDL identifier validation utilities."""

import re
from typing import Tuple


class IdentifierValidator:
    """Validates PDDL names, variables and generated identifier stems."""

    NAME_PATTERN = r"[a-z][a-z0-9_\-]*"
    VARIABLE_PATTERN = r"\?[a-z][a-z0-9_\-]*"

    # Words with a fixed meaning in PDDL syntax; never valid as symbol names
    RESERVED_WORDS = [
        "and",
        "not",
        "or",
        "imply",
        "exists",
        "forall",
        "when",
        "either",
        "define",
        "increase",
        "decrease",
        "assign",
        "number",
        "-",
        "=",
    ]

    def __init__(self, max_length: int = 128):
        self.max_length = max_length
        self._compile_patterns()

    def _compile_patterns(self):
        """Pre-compile regex patterns for efficiency."""
        self._name_re = re.compile(f"^{self.NAME_PATTERN}$", re.IGNORECASE)
        self._variable_re = re.compile(f"^{self.VARIABLE_PATTERN}$", re.IGNORECASE)
        self._stem_re = re.compile(r"^[a-z][a-z0-9_\-]*$", re.IGNORECASE)

    def validate_name(self, name: str) -> Tuple[bool, str]:
        """
        Validate a PDDL name (action, predicate, type, object).

        Args:
            name: The candidate identifier

        Returns:
            Tuple of (is_valid, error_message)
        """
        if not name:
            return False, "Empty identifier"
        if len(name) > self.max_length:
            return False, f"Identifier exceeds maximum length of {self.max_length} characters"
        if name.lower() in self.RESERVED_WORDS:
            return False, f"Reserved word: {name}"
        if not self._name_re.match(name):
            return False, f"Illegal identifier: {name}"
        return True, ""

    def is_name(self, name: str) -> bool:
        return self.validate_name(name)[0]

    def is_variable(self, name: str) -> bool:
        return bool(self._variable_re.match(name))

    def is_stem(self, prefix: str) -> bool:
        """Check that ``prefix`` followed by a running index is a legal name."""
        return bool(self._stem_re.match(prefix)) and prefix.lower() not in self.RESERVED_WORDS

    def sanitize_stem(self, prefix: str) -> str:
        """
        Turn arbitrary text into a legal identifier stem.

        Args:
            prefix: The text to sanitize

        Returns:
            Lowercase stem safe for ``<stem><index>`` object names
        """
        sanitized = re.sub(r"[^a-z0-9_\-]", "", prefix.lower())
        if not sanitized or not sanitized[0].isalpha():
            sanitized = "o" + sanitized
        return sanitized


_default_validator = IdentifierValidator()


def is_name(name: str) -> bool:
    """Module-level shortcut used by the parser and codecs."""
    return _default_validator.is_name(name)


def is_variable(name: str) -> bool:
    return _default_validator.is_variable(name)
