from .common import exceptions, utils, enums
from . import types, geometry, fractal, solver, verifier
