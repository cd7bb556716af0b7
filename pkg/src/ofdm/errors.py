from __future__ import annotations


class CodeSizeError(ValueError):
    def __init__(self, size: int, limit: int) -> None:
        super().__init__(f"Code has {size} codewords, enumeration limit is {limit}")
        self.size = size
        self.limit = limit


class UnresolvedQuantileError(ValueError):
    def __init__(self, epsilon: float, min_epsilon: float) -> None:
        super().__init__(f"epsilon={epsilon:g} is below the curve resolution {min_epsilon:g}")
        self.epsilon = epsilon
        self.min_epsilon = min_epsilon


class ConfigParseError(ValueError):
    """YAML syntax error with a 1-based source position."""

    def __init__(self, path: str, line: int, column: int, problem: str) -> None:
        super().__init__(f"{path}:{line}:{column}: {problem}")
        self.path = path
        self.line = line
        self.column = column
        self.problem = problem
