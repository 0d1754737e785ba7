# This file marks the kernel directory as a Python package
