from cokernel_toolkit.base import CokernelToolkitBase
from cokernel_toolkit.core.log import Log
from .toolkit.groups import Groups
from .toolkit.hall_littlewood import HallLittlewood
from .toolkit.matrix_lab import AsyncMatrixLab
from .toolkit.measures import Measures
from .toolkit.moments import Moments
from .toolkit.samplers import AsyncSamplers
from .toolkit.validation import Validation
logger = Log(__name__)


class AsyncCokernelToolkit(CokernelToolkitBase):
    """
    Implementación asíncrona del toolkit.

    El muestreo y el Monte Carlo se reparten en procesos; las consultas exactas
    son las mismas que en la versión síncrona.
    """

    def __init__(self, *args, jobs: int = 1, **kwargs):
        super().__init__(*args, **kwargs)
        if not isinstance(jobs, int) or jobs < 1:
            logger.error(f"jobs debe ser un entero positivo, recibido {jobs!r}")
            raise ValueError(f"jobs debe ser >= 1 (recibido {jobs!r}).")
        self.jobs = jobs
        self.measures = Measures(self)
        self.groups = Groups(self)
        self.moments = Moments(self)
        self.hall_littlewood = HallLittlewood(self)
        self.samplers = AsyncSamplers(self)
        self.matrix_lab = AsyncMatrixLab(self)
        self.validation = Validation(self)
