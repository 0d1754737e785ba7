# This file marks the schemas directory as a Python package
