# This file marks the tests directory as a Python package
