"""
Logging de ``cokernel_toolkit``.

Cada módulo crea su logger con ``Log(__name__)``, de modo que todos cuelgan del
espacio de nombres ``cokernel_toolkit`` (medidas, muestreadores, Monte Carlo,
batería de identidades y CLI). El nivel inicial sale de ``LOG_LEVEL`` (o del
``.env``) y por defecto es WARNING: los errores de validación de parámetros se
registran con ``logger.error`` antes de lanzar la excepción, y los avances de
las simulaciones largas quedan en INFO. ``set_package_level`` cambia el nivel de
todos los loggers ya creados; es lo que usa ``CokernelToolkit(log_level=...)``.
"""
import logging
import os
from logging.handlers import TimedRotatingFileHandler

from dotenv import load_dotenv

load_dotenv(override=True)

PACKAGE = 'cokernel_toolkit'
FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Log:
    """Logger de un módulo del paquete, con salida a consola y opcionalmente a archivo rotado a medianoche."""

    def __init__(self, name=PACKAGE, log_level=None, log_to_file=False, log_filename=f'{PACKAGE}.log'):
        """Inicializa el logger.

        Args:
            name (str): Nombre del logger, normalmente el ``__name__`` del módulo.
            log_level (str, opcional): Nivel de logging ('DEBUG', 'INFO', 'WARNING', etc.); si falta, ``LOG_LEVEL``.
            log_to_file (bool, opcional): Si debe escribir también en un archivo (por defecto, desactivado).
            log_filename (str, opcional): Archivo de log (si log_to_file es True).
        """
        self.logger = logging.getLogger(name)
        self.logger.handlers = []  # Un Log por módulo: recrearlo no duplica la salida

        # La salida del paquete no pasa por el logger raíz de la aplicación que lo importe
        self.logger.propagate = False

        log_level = log_level or os.getenv('LOG_LEVEL', 'WARNING').upper()
        self.logger.setLevel(log_level)

        formatter = logging.Formatter(FORMAT)

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)

        if log_to_file:
            file_handler = TimedRotatingFileHandler(log_filename, when="midnight", interval=1)
            file_handler.suffix = "%Y%m%d"
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

    def __getattr__(self, name):
        """Delega ``info``, ``error``, ``setLevel``, etc. en el ``logging.Logger`` subyacente."""
        return getattr(self.logger, name)


def set_package_level(log_level: str):
    """Aplica un nivel a todos los loggers de ``cokernel_toolkit`` ya creados."""
    for name, item in logging.Logger.manager.loggerDict.items():
        if name.startswith(PACKAGE) and isinstance(item, logging.Logger):
            item.setLevel(log_level.upper())


logger = Log(PACKAGE)
