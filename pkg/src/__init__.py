"""
reflx - abductive reflection for neuro-symbolic reasoning
"""

__version__ = "1.0.0"
__author__ = "reflx developers"
__description__ = "Graph neural networks that flag their own errors for a symbolic solver to repair"
