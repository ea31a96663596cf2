"""Reference model server for the shared HTTP prediction protocol."""

from .app import create_app
from .models import ServedModel, load_model, train_demo

__version__ = "0.1.0"
