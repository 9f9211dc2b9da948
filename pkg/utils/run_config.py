"""
Run documents: one input section plus solver, render and output settings.

An input section may be given inline or as a path to a JSON file holding
the section; paths are resolved relative to the run document.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hypercircle.errors import InputError

INPUT_KINDS = ('sphere_points', 'flat_cone_surface', 'angle_data', 'cover_spec')

Layer = Literal['edges', 'vertex_circles', 'face_circles', 'domain']
ChartPoint = Union[List[float], str]


class SpherePointsSection(BaseModel):
    model_config = ConfigDict(extra='forbid')

    points: Optional[List[List[float]]] = None
    chart: Optional[List[ChartPoint]] = None
    v1: List[int] = Field(default_factory=list)

    @model_validator(mode='after')
    def one_point_list(self):
        if (self.points is None) == (self.chart is None):
            raise ValueError("give exactly one of 'points' (unit 3-vectors) or 'chart' (stereographic)")
        return self


class CoverSpecSection(SpherePointsSection):
    sheets: int = Field(ge=1)
    branch: List[Dict[str, Any]] = Field(default_factory=list)


class FlatConeSection(BaseModel):
    model_config = ConfigDict(extra='forbid')

    faces: List[List[int]]
    face_edges: Optional[List[List[Any]]] = None
    lengths: Union[List[List[float]], Dict[str, float]]
    budget: Optional[int] = Field(default=None, ge=1)


class AngleDataSection(BaseModel):
    model_config = ConfigDict(extra='forbid')

    faces: Optional[List[List[int]]] = None
    face_edges: Optional[List[List[Any]]] = None
    polygons: Optional[List[int]] = None
    identifications: Optional[List[List[int]]] = None
    theta: List[float]
    Theta: Optional[List[float]] = None
    v1: List[int] = Field(default_factory=list)
    v1_all: bool = False

    @model_validator(mode='after')
    def one_description(self):
        if (self.faces is None) == (self.polygons is None):
            raise ValueError("give exactly one of 'faces' or 'polygons' + 'identifications'")
        if self.polygons is not None and self.identifications is None:
            raise ValueError("'polygons' needs 'identifications'")
        return self


class SolverSection(BaseModel):
    model_config = ConfigDict(extra='forbid')

    grad_tol: float = Field(default=1e-10, gt=0.0)
    max_iter: int = Field(default=1000, ge=1)
    lm_memory: int = Field(default=10, ge=1)
    threads: Optional[int] = Field(default=None, ge=1)
    init_a1: bool = True
    trace: bool = False
    fold_symmetry: bool = False


class RenderSection(BaseModel):
    model_config = ConfigDict(extra='forbid')

    depth: int = Field(default=2, ge=0)
    layers: List[Layer] = Field(default_factory=lambda: ['edges', 'vertex_circles', 'face_circles', 'domain'])
    size: int = Field(default=800, ge=64)
    seed_vertex: Optional[int] = None


class RunConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    description: Optional[str] = None
    sphere_points: Optional[SpherePointsSection] = None
    flat_cone_surface: Optional[FlatConeSection] = None
    angle_data: Optional[AngleDataSection] = None
    cover_spec: Optional[CoverSpecSection] = None
    k_inf: Optional[int] = None
    output_dir: Optional[str] = None
    validate_input: bool = False
    solver: SolverSection = Field(default_factory=SolverSection)
    render: RenderSection = Field(default_factory=RenderSection)

    @model_validator(mode='after')
    def exactly_one_input(self):
        given = [k for k in INPUT_KINDS if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"a run document needs exactly one input section, got {given or 'none'}")
        return self

    @property
    def input_kind(self) -> str:
        return next(k for k in INPUT_KINDS if getattr(self, k) is not None)

    @property
    def input_section(self) -> BaseModel:
        return getattr(self, self.input_kind)


def _resolve_sections(doc: Dict[str, Any], base: Path) -> Dict[str, Any]:
    out = dict(doc)
    for kind in INPUT_KINDS:
        ref = out.get(kind)
        if isinstance(ref, str):
            path = (base / ref).resolve()
            if not path.is_file():
                raise InputError(f"{kind} file not found: {path}", {'path': str(path)})
            with open(path, 'r', encoding='utf-8') as f:
                out[kind] = json.load(f)
    return out


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read and validate a run document. Raises InputError or pydantic ValidationError."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"run document not found: {path}", {'path': str(path)})
    try:
        with open(path, 'r', encoding='utf-8') as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}", {'path': str(path)}) from e
    if not isinstance(doc, dict):
        raise InputError(f"{path} must hold a JSON object")
    return RunConfig.model_validate(_resolve_sections(doc, path.parent))
