"""
The 18 facial action units tracked per frame, in fixed ascending code order.
"""

from typing import Dict, List, NamedTuple, Tuple


class ActionUnit(NamedTuple):
    code: str
    name: str

    @property
    def presence_column(self) -> str:
        return f"{self.code}_c"


class AUCatalog:
    """Ordered, immutable list of action unit descriptors."""

    def __init__(self, units: Tuple[ActionUnit, ...]):
        codes = [unit.code for unit in units]
        if len(set(codes)) != len(codes):
            raise ValueError(f"duplicate AU codes in catalog: {codes}")
        self._units = tuple(units)
        self._index: Dict[str, int] = {code: i for i, code in enumerate(codes)}

    def __len__(self) -> int:
        return len(self._units)

    def __iter__(self):
        return iter(self._units)

    def __getitem__(self, position: int) -> ActionUnit:
        return self._units[position]

    @property
    def codes(self) -> List[str]:
        return [unit.code for unit in self._units]

    @property
    def presence_columns(self) -> List[str]:
        return [unit.presence_column for unit in self._units]

    def index_of(self, code: str) -> int:
        """Position of ``code`` in the fixed order."""
        return self._index[code]

    def name_of(self, code: str) -> str:
        return self._units[self._index[code]].name


AU_CATALOG = AUCatalog((
    ActionUnit("AU01", "Inner Brow Raiser"),
    ActionUnit("AU02", "Outer Brow Raiser"),
    ActionUnit("AU04", "Brow Lowerer"),
    ActionUnit("AU05", "Upper Lid Raiser"),
    ActionUnit("AU06", "Cheek Raiser"),
    ActionUnit("AU07", "Lid Tightener"),
    ActionUnit("AU09", "Nose Wrinkler"),
    ActionUnit("AU10", "Upper Lip Raiser"),
    ActionUnit("AU12", "Lip Corner Puller"),
    ActionUnit("AU14", "Dimpler"),
    ActionUnit("AU15", "Lip Corner Depressor"),
    ActionUnit("AU17", "Chin Raiser"),
    ActionUnit("AU20", "Lip Stretcher"),
    ActionUnit("AU23", "Lip Tightener"),
    ActionUnit("AU25", "Lips Part"),
    ActionUnit("AU26", "Jaw Drop"),
    ActionUnit("AU28", "Lip Suck"),
    ActionUnit("AU45", "Blink"),
))

AU_COUNT = len(AU_CATALOG)
