from .render import FigureSpec, DataError, SchemaError, render

__version__ = "0.1.0"
