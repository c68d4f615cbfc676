"""
Simulators and cost ledgers for physical matrix-multiplication machines.

Two physical machines (a gravity-fed splitter-tree network for integer
products, a kinetic grid of unit-mass blocks for Boolean products), the two
aggregation gadgets (frictionless-track OR, heat-diffusion averaging) and the
rate/energy process model are simulated deterministically. Every run keeps
an itemized ledger of model time and model energy, and outputs are checked
against plain oracles.

Versionning
-----------
We use semantic versioning (https://semver.org) compliant with distutils
and the PEP-440.
To declare a beta, use this schema:
    - X.Y.ZbN i.e. "2.4.5b1"
"""

__version__ = "0.1b1"
