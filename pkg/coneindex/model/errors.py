"""
CONE INDEX is distributed subject to a Software License Agreement found
in the file LICENSE that is included with this distribution.
SPDX-License-Identifier: EPICS

Exceptions raised by the numerical core.
"""


class DomainError(ValueError):
    """
    A precondition of an operation is violated (bad dimension, mass,
    radius below the horizon, unknown level, ...).
    """

    def __init__(self, operation, message, **inputs):
        self.operation = operation
        self.inputs = inputs
        details = ", ".join(f"{k}={v}" for k, v in inputs.items())
        super().__init__(f"{operation}: {message}" + (f" ({details})" if details else ""))


class NumericError(RuntimeError):
    """
    A numerical procedure failed: factorization breakdown, quadrature
    evaluation cap, integrator residual above tolerance.
    """

    def __init__(self, operation, message, pivot_index=None, **inputs):
        self.operation = operation
        self.inputs = inputs
        self.pivot_index = pivot_index
        details = ", ".join(f"{k}={v}" for k, v in inputs.items())
        if pivot_index is not None:
            details = f"pivot_index={pivot_index}" + (f", {details}" if details else "")
        super().__init__(f"{operation}: {message}" + (f" ({details})" if details else ""))
