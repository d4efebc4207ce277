"""Free Denjoy actions of Z^d on the circle and the invariants of their crossed products."""

__version__ = "0.3.0"

SPEC_SCHEMA = "denjoy-action/1"
REPORT_SCHEMA = "denjoy-report/1"
