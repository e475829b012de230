from ._roughw import *  # noqa: F401,F403
from ._roughw import __doc__  # noqa: F401
