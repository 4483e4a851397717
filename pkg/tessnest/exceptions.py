"""
Custom exceptions for tessnest.

This module defines specific exception types so that callers (and the CLI exit
code mapping) can tell bad input apart from numerical trouble.
"""

from typing import Any, Optional, Tuple


class TessNestError(Exception):
    """Base exception for all tessnest errors."""

    _init_args: Tuple[Any, ...] = ()

    def __reduce__(self) -> Tuple[Any, ...]:
        # worker processes send errors back pickled; rebuild from the original fields
        if self._init_args:
            return type(self), self._init_args
        return super().__reduce__()


class InvalidInputError(TessNestError, ValueError):
    """Raised when an argument violates an operation's precondition."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        self._init_args = (message, field)
        super().__init__(f"Invalid input{f' for {field}' if field else ''}: {message}")


class GeometryError(TessNestError):
    """Raised when a constructed tessellation fails its own bookkeeping."""

    def __init__(self, message: str):
        self._init_args = (message,)
        super().__init__(f"Geometry error: {message}")


class ExactnessError(TessNestError):
    """Raised when a cell meeting the window is not certified exact."""

    def __init__(
        self,
        message: str,
        cell: Optional[int] = None,
        replicate: Optional[int] = None,
        rho: Optional[float] = None,
    ):
        self.cell = cell
        self.replicate = replicate
        self.rho = rho
        self.detail = message
        self._init_args = (message, cell, replicate, rho)
        where = []
        if replicate is not None:
            where.append(f"replicate {replicate}")
        if rho is not None:
            where.append(f"rho {rho:g}")
        if cell is not None:
            where.append(f"cell {cell}")
        context = f" ({', '.join(where)})" if where else ""
        super().__init__(f"Exactness error{context}: {message}")


class UnsupportedModelError(TessNestError):
    """Raised when a model combination has no implemented formula or generator."""

    def __init__(self, message: str, model: Optional[str] = None):
        self.model = model
        self._init_args = (message, model)
        super().__init__(
            f"Unsupported model{f' {model}' if model else ''}: {message}"
        )


class ConfigError(TessNestError):
    """Raised when a configuration document is malformed."""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        self._init_args = (message, key)
        super().__init__(f"Config error{f' at {key}' if key else ''}: {message}")


class DataFormatError(TessNestError):
    """Raised when an external data file cannot be parsed."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        self._init_args = (message, row)
        super().__init__(
            f"Data format error{f' in row {row}' if row is not None else ''}: {message}"
        )
