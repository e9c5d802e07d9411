"""
Transformation-path notation, the seed registry and transformation maps.

A path is a seed name followed by steps, e.g. ``H_C-1aD3aC2aE3cB``: one
digit for a single-variable step, two digits for a pair step, then the
source letter and the target letter. ``F_1`` and ``F1`` name the same seed.
"""

import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from lark import Lark, LarkError
from lark.exceptions import UnexpectedInput

from .config.constants import (
    SINGLE_LETTERS, PAIR_LETTERS, SEEDS_FILE, SCHEMA_MAP, DEFAULT_MAP_DEPTH,
)
from .errors import (
    AmbiguousMatch, ClassMismatch, ModelError, NoMatch, PathSyntaxError, StepFailed, UnknownSeed,
)
from .mb_model import canonicalize, integrals_equal, relabel
from .models import LedgerEntry, MBIntegral, TransformPath, TransformStep
from .rules import apply_step_detailed, enumerate_steps, figure_reading
from .storage import codec
from .storage.file_manager import data_path

logger = logging.getLogger(__name__)


def normalize_seed(name: str) -> str:
    """Registry key of a seed name: underscores are not significant."""
    return name.replace('_', '')


# ---------------------------------------------------------------------------
# Seed registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Symmetry:
    """Simultaneous relabeling of integration variables, parameters and point variables."""
    zmap: Tuple[Tuple[int, int], ...]
    param_map: Tuple[Tuple[str, str], ...] = ()
    var_map: Tuple[Tuple[str, str], ...] = ()

    @classmethod
    def of(cls, zmap: Mapping[int, int], param_map: Optional[Mapping[str, str]] = None,
           var_map: Optional[Mapping[str, str]] = None) -> 'Symmetry':
        def clean(mapping):
            return tuple(sorted((k, v) for k, v in (mapping or {}).items() if k != v))
        return cls(tuple(sorted((int(k), int(v)) for k, v in zmap.items())), clean(param_map), clean(var_map))

    @classmethod
    def identity(cls, nvars: int) -> 'Symmetry':
        return cls.of({i: i for i in range(1, nvars + 1)})

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'Symmetry':
        return cls.of({int(k): int(v) for k, v in data.get('z', {}).items()},
                      data.get('params', {}), data.get('vars', {}))

    def compose(self, other: 'Symmetry') -> 'Symmetry':
        """self after other."""
        z1, z2 = dict(self.zmap), dict(other.zmap)
        p1, p2 = dict(self.param_map), dict(other.param_map)
        v1, v2 = dict(self.var_map), dict(other.var_map)
        params = {k: p1.get(p2.get(k, k), p2.get(k, k)) for k in set(p1) | set(p2)}
        variables = {k: v1.get(v2.get(k, k), v2.get(k, k)) for k in set(v1) | set(v2)}
        return Symmetry.of({k: z1[z2[k]] for k in z2}, params, variables)

    def apply(self, m: MBIntegral) -> MBIntegral:
        return relabel(m, dict(self.zmap), dict(self.param_map), dict(self.var_map))


def close_group(generators: Sequence[Symmetry], nvars: int) -> List[Symmetry]:
    """All compositions of the generators, identity first."""
    group = [Symmetry.identity(nvars)]
    seen = set(group)
    queue = deque(group)
    while queue:
        element = queue.popleft()
        for generator in generators:
            product = generator.compose(element)
            if product not in seen:
                seen.add(product)
                group.append(product)
                queue.append(product)
    return group


@dataclass
class Seed:
    name: str
    integral: MBIntegral
    generators: Tuple[Symmetry, ...] = ()
    aliases: Tuple[str, ...] = ()


class SeedRegistry:
    """MB representations that paths start from, stored in their written Gamma order."""

    def __init__(self):
        self._seeds: Dict[str, Seed] = {}
        self._keys: Dict[str, str] = {}

    def register(self, name: str, integral: MBIntegral, generators: Iterable[Symmetry] = (),
                 aliases: Iterable[str] = ()) -> Seed:
        integral.check()
        seed = Seed(name, integral, tuple(generators), tuple(aliases))
        self._seeds[name] = seed
        for key in (name,) + seed.aliases:
            self._keys[normalize_seed(key)] = name
        return seed

    def __contains__(self, name: str) -> bool:
        return normalize_seed(name) in self._keys

    def names(self) -> List[str]:
        return list(self._seeds)

    def seed(self, name: str) -> Seed:
        try:
            return self._seeds[self._keys[normalize_seed(name)]]
        except KeyError:
            raise UnknownSeed(f"unknown seed '{name}'")

    def get(self, name: str) -> MBIntegral:
        """The seed integral as written."""
        return self.seed(name).integral

    def canonical_name(self, name: str) -> str:
        return self.seed(name).name

    def symmetry_group(self, name: str) -> List[Symmetry]:
        seed = self.seed(name)
        return close_group(seed.generators, seed.integral.nvars)

    @classmethod
    def load(cls, path: str) -> 'SeedRegistry':
        registry = cls()
        for entry in codec.read_seeds(path):
            registry.register(entry['name'], entry['integral'],
                              [Symmetry.from_dict(s) for s in entry['symmetries']], entry['aliases'])
        logger.debug(f"loaded {len(registry.names())} seeds from {path}")
        return registry


@lru_cache(maxsize=1)
def default_seeds() -> SeedRegistry:
    """Shipped seeds: 2F1, F1, F2, F3, F4 and H_C."""
    return SeedRegistry.load(str(data_path(SEEDS_FILE)))


# ---------------------------------------------------------------------------
# Path grammar
# ---------------------------------------------------------------------------

_PATH_GRAMMAR = r"""
    path: SEED ("-" step+)?
    step: VARS SOURCE TARGET

    SEED: /[A-Za-z0-9_]+/
    VARS: /[1-9][1-9]?/
    SOURCE: /[a-z]/
    TARGET: /[A-Z]/
"""

_PATH_PARSER = Lark(_PATH_GRAMMAR, start='path', parser='lalr')


def _build_step(vars_token, source, target) -> TransformStep:
    vars = tuple(int(d) for d in str(vars_token))
    letters = SINGLE_LETTERS if len(vars) == 1 else PAIR_LETTERS
    label = f"{vars_token}{source}{target}"
    if str(source) not in letters or str(target).lower() not in letters:
        kind = "single-variable" if len(vars) == 1 else "pair"
        raise ClassMismatch(f"step {label}: letters must be {kind} letters ({letters})")
    if len(set(vars)) != len(vars):
        raise PathSyntaxError(f"step {label}: pair indices must differ", vars_token.start_pos)
    return TransformStep(vars, str(source), str(target))


def parse_path(text: str, seeds: Optional[SeedRegistry] = None) -> TransformPath:
    """
    Parse a path string.

    Args:
        text: e.g. "F_1-2aE1aE" or "H_C-23lK"
        seeds: registry the seed must belong to; the shipped seeds by default

    Raises:
        PathSyntaxError: malformed string, with the offending position
        ClassMismatch: letters do not fit the number of digits (e.g. "2aK")
        UnknownSeed: the seed is not registered
    """
    try:
        tree = _PATH_PARSER.parse(text.strip())
    except UnexpectedInput as e:
        raise PathSyntaxError(f"invalid path {text!r} at position {e.pos_in_stream}", e.pos_in_stream)
    except LarkError as e:
        raise PathSyntaxError(f"invalid path {text!r}: {e}")
    seed_token, *step_trees = tree.children
    steps = tuple(_build_step(*s.children) for s in step_trees)
    seeds = seeds or default_seeds()
    if str(seed_token) not in seeds:
        raise UnknownSeed(f"unknown seed '{seed_token}'")
    return TransformPath(str(seed_token), steps)


def print_path(path: TransformPath) -> str:
    """Inverse of parse_path."""
    if not path.steps:
        return path.seed
    return path.seed + '-' + ''.join(step.label for step in path.steps)


# ---------------------------------------------------------------------------
# Path application
# ---------------------------------------------------------------------------

def apply_path_with_ledger(path: TransformPath, seeds: Optional[SeedRegistry] = None
                           ) -> Tuple[MBIntegral, List[LedgerEntry]]:
    """
    Apply the steps of a path to its seed, left to right.

    A pair step that does not match as printed is retried with its figure
    reading (23lK read as 23kL); the ledger records the step actually applied.

    Raises:
        UnknownSeed: the seed is not registered
        StepFailed: a step does not apply; carries its 1-based index and label
    """
    seeds = seeds or default_seeds()
    m = seeds.get(path.seed)
    ledger = []
    for index, step in enumerate(path.steps, start=1):
        applied = step
        try:
            m_next, ext, factor = apply_step_detailed(m, step)
        except NoMatch as e:
            alternate = figure_reading(m, step)
            if alternate is None:
                raise StepFailed(f"step {index} ({step.label}) failed: {e}", index, step.label)
            logger.warning(f"step {index} ({step.label}) does not match as printed; applying {alternate.label}")
            try:
                m_next, ext, factor = apply_step_detailed(m, alternate)
            except (NoMatch, AmbiguousMatch) as e2:
                raise StepFailed(f"step {index} ({step.label}) failed: {e2}", index, step.label)
            applied = alternate
        except (AmbiguousMatch, ModelError) as e:
            raise StepFailed(f"step {index} ({step.label}) failed: {e}", index, step.label)
        m = m_next
        ledger.append(LedgerEntry(index, step.label, applied.label, factor, ext.describe()))
        logger.debug(f"{print_path(path)}: step {index} {applied.label}, factor {factor}")
    logger.info(f"applied {print_path(path)} ({len(path.steps)} steps)")
    return canonicalize(m), ledger


def apply_path(path: TransformPath, seeds: Optional[SeedRegistry] = None) -> MBIntegral:
    """Canonical integral reached by a path."""
    return apply_path_with_ledger(path, seeds)[0]


# ---------------------------------------------------------------------------
# Transformation maps
# ---------------------------------------------------------------------------

@dataclass
class MapNode:
    id: int
    path: TransformPath
    integral: MBIntegral
    depth: int

    @property
    def label(self) -> str:
        return print_path(self.path)


@dataclass(frozen=True)
class MapEdge:
    source: int
    target: int
    step: TransformStep


def _structure_key(m: MBIntegral):
    return m.nvars, m.gammas, m.prefactor.gamma_ratios, m.prefactor.constant


class _DedupIndex:
    """Finds map nodes equal to an integral up to the seed's symmetry group."""

    def __init__(self, group: Sequence[Symmetry]):
        self.group = list(group)
        self._buckets: Dict[Any, List[Tuple[MBIntegral, 'MapNode']]] = {}

    def add(self, node: MapNode) -> None:
        canonical = canonicalize(node.integral)
        self._buckets.setdefault(_structure_key(canonical), []).append((canonical, node))

    def find(self, m: MBIntegral) -> Optional[MapNode]:
        for symmetry in self.group:
            image = canonicalize(symmetry.apply(m))
            for candidate, node in self._buckets.get(_structure_key(image), []):
                if integrals_equal(image, candidate):
                    return node
        return None


@dataclass
class TransformMap:
    """Nodes reached from a seed by breadth-first application of every matching step."""
    seed: str
    depth: int
    nodes: List[MapNode] = field(default_factory=list)
    edges: List[MapEdge] = field(default_factory=list)
    group: List[Symmetry] = field(default_factory=list)

    def find(self, m: MBIntegral) -> Optional[MapNode]:
        """The node equal to ``m`` modulo the symmetry group, if any."""
        index = _DedupIndex(self.group or [Symmetry.identity(m.nvars)])
        for node in self.nodes:
            index.add(node)
        return index.find(m)

    def labels(self) -> List[str]:
        return [node.label for node in self.nodes]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema': SCHEMA_MAP,
            'seed': self.seed,
            'depth': self.depth,
            'nodes': [{'id': n.id, 'path': n.label, 'depth': n.depth,
                       'integral': n.integral.to_dict()} for n in self.nodes],
            'edges': [{'from': e.source, 'to': e.target, 'step': e.step.label} for e in self.edges],
        }

    def to_dot(self) -> str:
        """Graphviz text of the map."""
        lines = [f'digraph "{self.seed}" {{', '  rankdir=LR;']
        for n in self.nodes:
            lines.append(f'  n{n.id} [label="{n.label}"];')
        for e in self.edges:
            lines.append(f'  n{e.source} -> n{e.target} [label="{e.step.label}"];')
        lines.append('}')
        return '\n'.join(lines) + '\n'


def _expand(m: MBIntegral) -> List[Tuple[TransformStep, MBIntegral]]:
    children = []
    for step in enumerate_steps(m):
        try:
            children.append((step, apply_step_detailed(m, step)[0]))
        except (NoMatch, AmbiguousMatch, ModelError) as e:
            logger.debug(f"skipping {step.label}: {e}")
    return children


def build_map(seed: str, depth: int = DEFAULT_MAP_DEPTH, symmetry: Optional[Sequence[Symmetry]] = None,
              seeds: Optional[SeedRegistry] = None, threads: int = 1) -> TransformMap:
    """
    Breadth-first transformation map of a seed.

    Args:
        seed: seed name
        depth: number of steps from the seed
        symmetry: permutation group used for deduplication; the seed's declared group by default
        seeds: seed registry
        threads: worker threads expanding the frontier

    Returns:
        TransformMap whose edges only join a level to the next one
    """
    seeds = seeds or default_seeds()
    root_integral = seeds.get(seed)
    group = list(symmetry) if symmetry is not None else seeds.symmetry_group(seed)
    tmap = TransformMap(seed, depth, group=group)
    index = _DedupIndex(group)

    root = MapNode(0, TransformPath(seed), root_integral, 0)
    tmap.nodes.append(root)
    index.add(root)
    frontier = [root]
    for level in range(1, depth + 1):
        if not frontier:
            break
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                expansions = list(pool.map(lambda node: _expand(node.integral), frontier))
        else:
            expansions = [_expand(node.integral) for node in frontier]
        next_frontier = []
        for parent, children in zip(frontier, expansions):
            for step, integral in children:
                existing = index.find(integral)
                if existing is None:
                    node = MapNode(len(tmap.nodes), parent.path.extend(step), integral, level)
                    tmap.nodes.append(node)
                    index.add(node)
                    next_frontier.append(node)
                    tmap.edges.append(MapEdge(parent.id, node.id, step))
                elif existing.depth == level:
                    tmap.edges.append(MapEdge(parent.id, existing.id, step))
        logger.info(f"map of {seed}: level {level} adds {len(next_frontier)} nodes")
        frontier = next_frontier
    return tmap
