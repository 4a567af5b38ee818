"""Per-step records and the result of a coordinator run"""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

CSV_COLUMNS = ["step", "wall_ms", "compute_ms", "comm_ms", "samples", "samples_per_sec", "bytes_down", "bytes_up"]


@dataclass
class StepRecord:
    step: int
    wall_ms: float
    compute_ms: float
    comm_ms: float
    samples: int
    samples_per_sec: float
    bytes_down: int
    bytes_up: int
    update_ms: float = 0.0
    batch_sizes: List[int] = field(default_factory=list)


@dataclass
class RunResult:
    """Step records plus the final parameters, name -> float32 array in enumeration order"""

    records: List[StepRecord] = field(default_factory=list)
    parameters: Dict[str, np.ndarray] = field(default_factory=dict)
    aborted: Optional[str] = None

    @property
    def completed_steps(self) -> int:
        return len(self.records)

    def to_frame(self) -> pd.DataFrame:
        rows = [{k: v for k, v in asdict(r).items() if k in CSV_COLUMNS} for r in self.records]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def write_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False)
