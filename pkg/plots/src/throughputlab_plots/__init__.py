from .render import PlotInputError, PlotSpec, build_figures, dump_figures, render

__all__ = ["PlotInputError", "PlotSpec", "build_figures", "dump_figures", "render"]

__version__ = "0.1.0"
