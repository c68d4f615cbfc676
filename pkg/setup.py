"""
Simulators and cost ledgers for physical matrix-multiplication machines.

Flow networks, kinetic grids and rate/energy process schedules, each priced
in model time and energy units and checked against exact oracles.
"""
from setuptools import setup


setup()
