from dataclasses import dataclass, field

from django.conf import settings

CSV = 'csv'
JSON = 'json'
FORMATS = (CSV, JSON)

COMMANDS = (
    'spectral-width',
    'fidelity',
    'verify-bounds',
    'spread-identity',
    'sparse-check',
    'propagate',
    'threshold',
    'recursion',
    'level',
    'spinboson',
    'hyperfine',
)


@dataclass(frozen=True)
class RunConfig:
    """One command invocation: parameters are validated per command"""
    command: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str | None = None
    format: str = CSV


@dataclass
class Report:
    """Result tables and pass/fail verdicts of one command run

    Tables are lists of rows (dicts with the same keys). Verdicts only
    come from bound checks; query commands leave them empty.

    Documents hold serialized inputs such as the circuit layout, in the
    shape the command accepts them back as parameters.
    """
    command: str
    seed: int
    parameters: dict
    tables: dict[str, list[dict]] = field(default_factory=dict)
    documents: dict[str, dict] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)
    version: str = field(default_factory=lambda: settings.FTNM_VERSION)
    schema_version: str = field(
        default_factory=lambda: settings.FTNM_SCHEMA_VERSION
    )

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    @property
    def failed_checks(self) -> list[str]:
        return [name for name, ok in self.verdicts.items() if not ok]

    def add_table(self, name: str, rows: list[dict]) -> None:
        self.tables[name] = rows

    def add_document(self, name: str, document: dict) -> None:
        self.documents[name] = document

    def add_verdict(self, name: str, passed: bool) -> None:
        self.verdicts[name] = bool(passed)
