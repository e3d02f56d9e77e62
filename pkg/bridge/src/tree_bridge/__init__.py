"""Bridge between scikit-learn decision trees and the array-compilation
toolchain's file formats."""

from .export import ExportError, export_fitted_tree, tree_document
from .datasets import fetch_demo_datasets

__version__ = "0.1.0"
