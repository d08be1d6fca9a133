"""CLI, JSON I/O, property suites and the constant-diameter search."""
from .io import SchemaError, VersionMismatch, body_io, read_body, write_body
from .search import SearchRecord, WOutOfRange, search_gap
from .suites import SUITES, SuiteResult, UnknownSuite, replay, run_suite
