# This file marks the database directory as a Python package
