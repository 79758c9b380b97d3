"""
Kernels numba podem ser desligados (COLDSTART_JIT_ENABLED=false) para depurar
no interpretador; os resultados são os mesmos nos dois modos.
"""

from ..core.config import settings

JIT_ENABLED = settings.JIT_ENABLED

if JIT_ENABLED:
    from numba import njit
else:
    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f
        return wrapper

__all__ = ["njit", "JIT_ENABLED"]
