"""
cmdeg
~~~~~

Completely-monotonic-degree laboratory for the remainders of the Stirling
expansion of log Gamma: exact Bernoulli numbers, certified high-precision
kernels, semi-infinite quadrature, and empirical degree brackets.

:copyright: (c) 2026 cmdeg contributors
:license: MIT, see LICENSE for more details.
"""

__version__ = "0.1.0"
__author__ = "cmdeg contributors"
__email__ = "maintainers@cmdeg.dev"
