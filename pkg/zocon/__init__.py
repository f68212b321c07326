from .core import *
from . import util
from . import lp
from . import oracle
from . import resolution
from . import cuts
from . import liftproject
from . import search
from . import modelfile
