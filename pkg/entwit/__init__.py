"""entwit - entanglement-structure witnesses for graph states"""

try:
    from .version import version as __version__
except ImportError:
    __version__ = "0.1.0"
