"""Storage modules for the MB engine."""

from .file_manager import FileManager, data_path, read_json, write_json
from .report_writer import ReportWriter
from . import codec

__all__ = ['FileManager', 'ReportWriter', 'codec', 'data_path', 'read_json', 'write_json']
