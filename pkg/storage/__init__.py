from .local import LocalStorage
from .factory import get_storage

__all__ = ['LocalStorage', 'get_storage']
