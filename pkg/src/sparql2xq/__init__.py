"""Translate SPARQL 1.1 Update operations into XQuery Update programs over mapped XML."""

from .errors import *  # noqa: F401,F403
from .mapping import MappingSet, load_mappings
from .oracle import apply_sparql, check_equivalence, project
from .parser import parse_update, to_sparql
from .translator import translate
from .xmlstore import execute, parse_xml, serialize_xml
from .xquery import serialize, tokenize

__version__ = "0.1.0"
