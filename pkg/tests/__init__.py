"""
Test suite for reflx
Covers autodiff, models, knowledge bases, the reflection pipeline, training and the CLI
"""
