"""Problem-domain projection: a validated model becomes a semantic net of
frames (one per frame class) and relations, serialisable as JSON, DOT and
PlantUML. «link» classes produce no frame; references routed through one
collapse to a relation with `via` set."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import model as m
from .model import TypeKind
from .stereotypes import Stereotype
from .validator import ValidatedModel


@dataclass(frozen=True)
class Slot:
    name: str
    concept: str | None
    type: str


@dataclass(frozen=True)
class Procedure:
    name: str
    concept: str | None
    stereotype: str


@dataclass(frozen=True)
class Frame:
    name: str
    concept: str
    slots: tuple[Slot, ...]
    procedures: tuple[Procedure, ...]


@dataclass(frozen=True)
class Relation:
    kind: str  # generalization | composition | reference | channel
    source: str
    target: str
    via: str | None = None


@dataclass(frozen=True)
class Ontology:
    frames: tuple[Frame, ...]
    relations: tuple[Relation, ...]

    def frame_named(self, name: str) -> Frame | None:
        for f in self.frames:
            if f.name == name:
                return f
        return None


def extract_ontology(vm: ValidatedModel) -> Ontology:
    """Project the model onto its semantic net. Frames keep declaration
    order; slots and procedures are the class's own (inheritance is carried
    by generalization relations, not by repeating inherited slots)."""
    frame_names = {c.name for c in vm.model.classes if m.is_frame(c)}
    frames: list[Frame] = []
    relations: list[Relation] = []

    for c in vm.model.classes:
        if not m.is_frame(c):
            continue
        slots = tuple(
            Slot(a.name, a.concept, str(a.type)) for a in c.attrs
        )
        procedures = tuple(
            Procedure(op.name, op.concept, str(op.stereotype)) for op in c.ops
        )
        frames.append(Frame(c.name, c.concept or "", slots, procedures))

        if c.extends is not None and c.extends in frame_names:
            relations.append(Relation("generalization", c.name, c.extends))
        for a in c.attrs:
            if a.stereotype is Stereotype.PARTS:
                elem = a.type.class_name
                if elem in frame_names:
                    relations.append(Relation("composition", c.name, elem))
            elif a.stereotype is Stereotype.REF and a.type.kind is TypeKind.ENTITY:
                target = a.type.class_name
                if target in frame_names:
                    relations.append(Relation("reference", c.name, target))
                else:
                    # collapse through «link» classes to reachable frames
                    for reached in _frames_through_links(vm, target, frame_names):
                        relations.append(
                            Relation("reference", c.name, reached, via=target)
                        )

    for assoc in vm.model.associations:
        relations.append(Relation("channel", assoc.end_a, assoc.end_b))

    return Ontology(tuple(frames), tuple(relations))


def _frames_through_links(
    vm: ValidatedModel, link_name: str, frame_names: set[str]
) -> list[str]:
    """Breadth-first through link classes; frame targets in discovery order."""
    found: list[str] = []
    visited = {link_name}
    queue = [link_name]
    while queue:
        current = queue.pop(0)
        for a in vm.attr_table.get(current, ()):
            if a.type.kind is not TypeKind.ENTITY:
                continue
            target = a.type.class_name
            if target in frame_names:
                if target not in found:
                    found.append(target)
            elif target not in visited:
                visited.add(target)
                queue.append(target)
    return found


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------

def _slot_doc(s: Slot) -> dict:
    doc: dict = {"name": s.name, "type": s.type}
    if s.concept is not None:
        doc["concept"] = s.concept
    return doc


def _proc_doc(p: Procedure) -> dict:
    doc: dict = {"name": p.name, "stereotype": p.stereotype}
    if p.concept is not None:
        doc["concept"] = p.concept
    return doc


def export_json(onto: Ontology) -> str:
    """Deterministic key-sorted JSON; see docs/ontology.schema.json."""
    doc = {
        "frames": [
            {
                "name": f.name,
                "concept": f.concept,
                "slots": [_slot_doc(s) for s in f.slots],
                "procedures": [_proc_doc(p) for p in f.procedures],
            }
            for f in onto.frames
        ],
        "relations": [
            {
                "kind": r.kind,
                "from": r.source,
                "to": r.target,
                **({"via": r.via} if r.via is not None else {}),
            }
            for r in onto.relations
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def import_json(text: str) -> Ontology:
    """Inverse of export_json: reconstructs an equal Ontology value."""
    doc = json.loads(text)
    frames = tuple(
        Frame(
            f["name"],
            f["concept"],
            tuple(Slot(s["name"], s.get("concept"), s["type"]) for s in f["slots"]),
            tuple(
                Procedure(p["name"], p.get("concept"), p["stereotype"])
                for p in f["procedures"]
            ),
        )
        for f in doc["frames"]
    )
    relations = tuple(
        Relation(r["kind"], r["from"], r["to"], r.get("via"))
        for r in doc["relations"]
    )
    return Ontology(frames, relations)


# --------------------------------------------------------------------------
# DOT
# --------------------------------------------------------------------------

def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(onto: Ontology) -> str:
    """Digraph with frames as nodes and relations as labeled edges."""
    lines = ["digraph ontology {"]
    lines.append("    node [shape=box];")
    for f in onto.frames:
        label = _dot_escape(f.name)
        if f.concept:
            label += "\\n" + _dot_escape(f.concept)
        lines.append(f'    {_dot_quote(f.name)} [label="{label}"];')
    for r in onto.relations:
        label = r.kind if r.via is None else f"{r.kind} via {r.via}"
        lines.append(
            f'    {_dot_quote(r.source)} -> {_dot_quote(r.target)} '
            f'[label="{_dot_escape(label)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


# --------------------------------------------------------------------------
# PlantUML
# --------------------------------------------------------------------------

_UML_ARROWS = {
    "composition": "*--",
    "reference": "-->",
}


def emit_plantuml(vm: ValidatedModel) -> str:
    """Class diagram of the whole model (frames and link classes alike),
    with stereotypes inline and concept tags as notes."""
    lines = ["@startuml"]
    for c in vm.model.classes:
        head = "abstract class" if c.abstract else "class"
        lines.append(f"{head} {c.name} <<{c.stereotype}>> {{")
        for a in c.attrs:
            concept = f' // "{a.concept}"' if a.concept else ""
            lines.append(f"    {a.name} : {a.type} <<{a.stereotype}>>{concept}")
        for op in c.ops:
            params = ", ".join(f"{p.name}: {p.type}" for p in op.params)
            ret = f" : {op.return_type}" if op.return_type else ""
            lines.append(f"    {op.name}({params}){ret} <<{op.stereotype}>>")
        lines.append("}")
        if c.concept is not None:
            lines.append(f"note bottom of {c.name} : {c.concept}")
    for c in vm.model.classes:
        if c.extends is not None:
            lines.append(f"{c.extends} <|-- {c.name}")
    for c in vm.model.classes:
        for a in c.attrs:
            if a.stereotype is Stereotype.PARTS:
                lines.append(f'{c.name} *-- {a.type.class_name} : {a.name}')
            elif a.stereotype is Stereotype.REF and a.type.kind is TypeKind.ENTITY:
                lines.append(f'{c.name} --> {a.type.class_name} : {a.name}')
    for assoc in vm.model.associations:
        lines.append(
            f"{assoc.end_a} -- {assoc.end_b} : {assoc.name} <<{assoc.stereotype}>>"
        )
    lines.append("@enduml")
    return "\n".join(lines) + "\n"
