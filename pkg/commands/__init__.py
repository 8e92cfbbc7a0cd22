from .simulate import cmd_simulate
from .validate import cmd_validate
from .nonuniform import cmd_nonuniform

__all__ = ['cmd_simulate', 'cmd_validate', 'cmd_nonuniform']
