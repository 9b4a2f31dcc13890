"""Hybrid Petri net toolkit (Python surface of the C++ core)."""

try:
    from hpn._hpn import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    from _hpn import *  # noqa: F401,F403  (in-tree build: module on sys.path)
