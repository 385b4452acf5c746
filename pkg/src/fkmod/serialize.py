"""JSON (de)serialization for spaces, modules, morphisms and verdicts.

File formats
------------

Space::

    {"points": ["1", "2"], "covers": [["2", "1"]]}

where a cover pair [y, x] means y covers x (x is below y).

Module::

    {"space": <space object or path string>,
     "kind": "st" | "b" | "tb" | "r",
     "groups": {<slot key>: {"gens": n, "rels": [[...]]}},
     "maps": {<map key>: [[...]]},
     "unit": [...]}          # optional, makes the module pointed

Slot keys: st groups are "lc:<comma-joined sorted points>:<parity>";
b/tb/r groups are "k1:<x>", "bd:<x>", "open:<x>", "cl:<x>".  Map keys:
st maps are "i:<U>-><Y>:<p>", "r:<Y>-><C>:<p>" and "d:<C>-><U>:<pq>"
with <pq> the source/target parity pair ("10" or "01"); b/tb maps are
"r:<x>><y>", "d:<x>><y>", "i:<x>><y>" per cover arrow plus "u:<x>"; r
maps are "d:<x>", "i:<x>" (boundary inclusion) and "i:<y>><x>" per
cover arrow.

Morphism::

    {"kind": "...", "source": <module or path>, "target": <module or path>,
     "components": {<slot key>: [[...]]}}

Matrices are nested integer arrays, one row per source generator.
"""

from __future__ import annotations

import json
import os

from .space import FiniteSpace
from .invariants import (Module, ModuleMap, PointedModule, ShapeIncomplete,
                         required_maps, required_slots)
from .zmodule import FgGroup, GroupMap, IntMatrix


class SerializationError(ValueError):
    pass


_RESERVED = set(",:>")


def _check_names(points) -> None:
    for p in points:
        if not p or _RESERVED & set(str(p)):
            raise SerializationError(
                f"point name {p!r} is empty or contains a reserved character")


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------

def space_to_dict(sp: FiniteSpace) -> dict:
    _check_names(sp.points)
    return {"points": list(sp.points),
            "covers": [[sp.points[y], sp.points[x]] for y, x in sp.cover_pairs()]}


def space_from_dict(d: dict) -> FiniteSpace:
    try:
        points = [str(p) for p in d["points"]]
        covers = [(str(a), str(b)) for a, b in d["covers"]]
    except (KeyError, TypeError, ValueError) as e:
        raise SerializationError(f"bad space object: {e}") from e
    _check_names(points)
    return FiniteSpace(points, covers)


# ---------------------------------------------------------------------------
# Key encoding
# ---------------------------------------------------------------------------

def _mask_str(sp: FiniteSpace, mask: int) -> str:
    return ",".join(sp.sorted_ids(mask))


def _mask_parse(sp: FiniteSpace, s: str) -> int:
    mask = 0
    if s:
        for name in s.split(","):
            mask |= 1 << sp.index(name)
    return mask


def slot_key_str(kind: str, sp: FiniteSpace, key) -> str:
    if kind == "st":
        mask, p = key
        return f"lc:{_mask_str(sp, mask)}:{p}"
    tag, x = key
    name = {"k1": "k1", "bd": "bd", "op": "open", "cl": "cl"}[tag]
    return f"{name}:{sp.points[x]}"


def map_key_str(kind: str, sp: FiniteSpace, key) -> str:
    if kind == "st":
        tag = key[0]
        if tag == "i":
            _, u, y, p = key
            return f"i:{_mask_str(sp, u)}->{_mask_str(sp, y)}:{p}"
        if tag == "r":
            _, y, c, p = key
            return f"r:{_mask_str(sp, y)}->{_mask_str(sp, c)}:{p}"
        _, c, u, p = key
        return f"d:{_mask_str(sp, c)}->{_mask_str(sp, u)}:{p}{1 - p}"
    tag = key[0]
    if kind in ("b", "tb"):
        if tag == "u":
            return f"u:{sp.points[key[1]]}"
        return f"{tag}:{sp.points[key[1]]}>{sp.points[key[2]]}"
    # kind r
    if tag == "d":
        return f"d:{sp.points[key[1]]}"
    if tag == "ib":
        return f"i:{sp.points[key[1]]}"
    return f"i:{sp.points[key[1]]}>{sp.points[key[2]]}"


def _key_tables(kind: str, sp: FiniteSpace):
    slots = {slot_key_str(kind, sp, k): k for k in required_slots(kind, sp)}
    maps = {map_key_str(kind, sp, k): k for k in required_maps(kind, sp)}
    return slots, maps


# ---------------------------------------------------------------------------
# Matrices and groups
# ---------------------------------------------------------------------------

def _matrix_to_list(m: IntMatrix) -> list:
    return [list(r) for r in m.data]


def _matrix_from_list(rows, cols_hint=None) -> IntMatrix:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise SerializationError("matrix must be a list of rows")
    ncols = len(rows[0]) if rows else (cols_hint or 0)
    try:
        data = [[int(v) for v in r] for r in rows]
    except (TypeError, ValueError) as e:
        raise SerializationError(f"non-integer matrix entry: {e}") from e
    for r in data:
        if len(r) != ncols:
            raise SerializationError("ragged matrix")
    return IntMatrix(len(data), ncols, data)


def _group_to_dict(g: FgGroup) -> dict:
    return {"gens": g.gens, "rels": _matrix_to_list(g.rels)}


def _group_from_dict(d) -> FgGroup:
    try:
        gens = int(d["gens"])
    except (KeyError, TypeError, ValueError) as e:
        raise SerializationError(f"bad group object: {e}") from e
    rels = _matrix_from_list(d.get("rels", []), cols_hint=gens)
    if rels.cols != gens and rels.rows:
        raise SerializationError("relation width does not match gens")
    if not rels.rows:
        rels = IntMatrix(0, gens, [])
    return FgGroup(gens, rels)


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------

def module_to_dict(m: Module, unit=None, space_ref=None) -> dict:
    sp = m.space
    out = {"space": space_ref if space_ref is not None else space_to_dict(sp),
           "kind": m.kind,
           "groups": {slot_key_str(m.kind, sp, k): _group_to_dict(m.groups[k])
                      for k in required_slots(m.kind, sp)},
           "maps": {map_key_str(m.kind, sp, k): _matrix_to_list(m.maps[k].matrix)
                    for k in required_maps(m.kind, sp)}}
    if unit is not None:
        out["unit"] = [int(v) for v in unit]
    return out


def _resolve_space(ref, base_dir: str) -> FiniteSpace:
    if isinstance(ref, str):
        path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
        with open(path) as fh:
            try:
                ref = json.load(fh)
            except json.JSONDecodeError as e:
                raise SerializationError(f"bad JSON in {path}: {e}") from e
    if not isinstance(ref, dict):
        raise SerializationError("space must be an object or a path")
    return space_from_dict(ref)


def module_from_dict(d: dict, base_dir: str = ".") -> Module | PointedModule:
    if not isinstance(d, dict):
        raise SerializationError("module file must contain a JSON object")
    kind = d.get("kind")
    if kind not in ("st", "b", "tb", "r"):
        raise SerializationError(f"unknown kind {kind!r}")
    sp = _resolve_space(d.get("space"), base_dir)
    slot_tab, map_tab = _key_tables(kind, sp)
    groups: dict = {}
    raw_groups = d.get("groups", {})
    if not isinstance(raw_groups, dict):
        raise SerializationError("groups must be an object")
    for ks, gd in raw_groups.items():
        if ks not in slot_tab:
            raise SerializationError(f"unknown group key {ks!r}")
        groups[slot_tab[ks]] = _group_from_dict(gd)
    for ks, key in slot_tab.items():
        if key not in groups:
            raise ShapeIncomplete(f"missing group {ks!r}")
    from .invariants import map_endpoints
    maps: dict = {}
    raw_maps = d.get("maps", {})
    if not isinstance(raw_maps, dict):
        raise SerializationError("maps must be an object")
    for ks, rows in raw_maps.items():
        if ks not in map_tab:
            raise SerializationError(f"unknown map key {ks!r}")
        key = map_tab[ks]
        a, b = map_endpoints(kind, key)
        mat = _matrix_from_list(rows, cols_hint=groups[b].gens)
        if mat.rows != groups[a].gens:
            raise SerializationError(f"map {ks!r} has {mat.rows} rows, "
                                     f"expected {groups[a].gens}")
        if mat.rows and mat.cols != groups[b].gens:
            raise SerializationError(f"map {ks!r} has {mat.cols} columns, "
                                     f"expected {groups[b].gens}")
        if not mat.rows:
            mat = IntMatrix(groups[a].gens, groups[b].gens, [])
        try:
            maps[key] = GroupMap(groups[a], groups[b], mat)
        except ValueError as e:
            raise SerializationError(f"map {ks!r} is not well defined: {e}") from e
    for ks, key in map_tab.items():
        if key not in maps:
            raise ShapeIncomplete(f"missing map {ks!r}")
    m = Module(kind, sp, groups, maps)
    if "unit" in d:
        try:
            unit = tuple(int(v) for v in d["unit"])
        except (TypeError, ValueError) as e:
            raise SerializationError(f"bad unit vector: {e}") from e
        return PointedModule(m, unit)
    return m


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------

def morphism_to_dict(f: ModuleMap, source_ref=None, target_ref=None) -> dict:
    kind = f.src.kind
    sp = f.src.space
    return {"kind": kind,
            "source": source_ref if source_ref is not None
            else module_to_dict(f.src),
            "target": target_ref if target_ref is not None
            else module_to_dict(f.dst),
            "components": {slot_key_str(kind, sp, k): _matrix_to_list(v.matrix)
                           for k, v in sorted(f.components.items(),
                                              key=lambda kv: str(kv[0]))}}


def morphism_components_from_dict(d: dict, src: Module, dst: Module) -> ModuleMap:
    if src.kind != dst.kind:
        raise SerializationError("source and target kinds differ")
    kind = src.kind
    sp = src.space
    slot_tab, _ = _key_tables(kind, sp)
    raw = d.get("components")
    if not isinstance(raw, dict):
        raise SerializationError("components must be an object")
    comps: dict = {}
    for ks, rows in raw.items():
        if ks not in slot_tab:
            raise SerializationError(f"unknown component key {ks!r}")
        key = slot_tab[ks]
        mat = _matrix_from_list(rows, cols_hint=dst.groups[key].gens)
        if not mat.rows:
            mat = IntMatrix(src.groups[key].gens, dst.groups[key].gens, [])
        try:
            comps[key] = GroupMap(src.groups[key], dst.groups[key], mat)
        except ValueError as e:
            raise SerializationError(f"component {ks!r} ill defined: {e}") from e
    for ks, key in slot_tab.items():
        if key not in comps:
            raise ShapeIncomplete(f"missing component {ks!r}")
    return ModuleMap(src, dst, comps)


def morphism_from_dict(d: dict, base_dir: str = ".") -> ModuleMap:
    def load_side(ref):
        if isinstance(ref, str):
            path = ref if os.path.isabs(ref) else os.path.join(base_dir, ref)
            with open(path) as fh:
                try:
                    ref = json.load(fh)
                except json.JSONDecodeError as e:
                    raise SerializationError(f"bad JSON in {path}: {e}") from e
            side = module_from_dict(ref, base_dir=os.path.dirname(path) or ".")
        else:
            side = module_from_dict(ref, base_dir=base_dir)
        return side.module if isinstance(side, PointedModule) else side

    src = load_side(d.get("source"))
    dst = load_side(d.get("target"))
    if d.get("kind") not in (None, src.kind):
        raise SerializationError("morphism kind does not match its modules")
    return morphism_components_from_dict(d, src, dst)


# ---------------------------------------------------------------------------
# File helpers
# ---------------------------------------------------------------------------

def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise SerializationError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SerializationError(f"bad JSON in {path}: {e}") from e


def dump_json(obj, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
