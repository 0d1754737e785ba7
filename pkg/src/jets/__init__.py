# This file marks the jets directory as a Python package
