from .async_client import AsyncCokernelToolkit
from .sync_client import CokernelToolkit

__all__ = [
    'AsyncCokernelToolkit',
    'CokernelToolkit'
]
