from cokernel_toolkit.base import CokernelToolkitBase
from cokernel_toolkit.core.log import Log
from .toolkit.groups import Groups
from .toolkit.hall_littlewood import HallLittlewood
from .toolkit.matrix_lab import MatrixLab
from .toolkit.measures import Measures
from .toolkit.moments import Moments
from .toolkit.samplers import Samplers
from .toolkit.validation import Validation
logger = Log(__name__)


class CokernelToolkit(CokernelToolkitBase):
    """Implementación síncrona del toolkit"""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.measures = Measures(self)
        self.groups = Groups(self)
        self.moments = Moments(self)
        self.hall_littlewood = HallLittlewood(self)
        self.samplers = Samplers(self)
        self.matrix_lab = MatrixLab(self)
        self.validation = Validation(self)
