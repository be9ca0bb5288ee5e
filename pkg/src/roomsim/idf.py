"""Lossless parsing, querying, editing and serialization of EnergyPlus IDF text.

The grammar is deliberately schema-free: an object is ``ClassName, f1, ..., fn;``
spanning any number of lines, ``!`` starts a comment running to end-of-line and
blank lines are ignored.  Comments are preserved (attached to the nearest
preceding field, or to the document head) but never interpreted.  Documents are
immutable values; every edit returns a new document.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import RoomSimError

_DELIMITERS = set(",;!")


class IdfError(RoomSimError):
    code = "invalid_idf"


class IdfParseError(IdfError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnterminatedObjectError(IdfParseError):
    code = "unterminated_object"


class EmptyClassNameError(IdfParseError):
    code = "empty_class_name"


class MacroDirectiveError(IdfParseError):
    code = "macro_unsupported"


class KeyFieldOutOfRangeError(IdfError):
    code = "key_field_out_of_range"


@dataclass(frozen=True)
class IdfObject:
    """One IDF object: a class name plus an ordered, non-empty field list.

    ``trailing_comments`` holds, per field, the comments that followed it in
    the source text; it is always the same length as ``fields``.
    """

    class_name: str
    fields: tuple[str, ...]
    trailing_comments: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        name = self.class_name.strip()
        if not name:
            raise EmptyClassNameError("object class name is empty")
        if _DELIMITERS & set(name):
            raise IdfError(f"class name {name!r} contains a delimiter character")
        # same normalization the parser applies: trim and collapse whitespace
        fields = tuple(" ".join(str(f).split()) for f in self.fields)
        if not fields:
            raise IdfError(f"object {name!r} has no fields")
        for value in fields:
            if _DELIMITERS & set(value):
                raise IdfError(f"field value {value!r} contains a delimiter character")
        comments = tuple(tuple(c) for c in self.trailing_comments)
        if not comments:
            comments = tuple(() for _ in fields)
        if len(comments) != len(fields):
            raise IdfError(
                f"object {name!r}: {len(comments)} comment slots for {len(fields)} fields"
            )
        object.__setattr__(self, "class_name", name)
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "trailing_comments", comments)

    @property
    def name(self) -> str:
        """The first field, which names the object for most IDF classes."""
        return self.fields[0]

    def field(self, index: int, default: str = "") -> str:
        return self.fields[index] if index < len(self.fields) else default

    def matches_class(self, class_name: str) -> bool:
        return self.class_name.lower() == class_name.lower()

    def with_field(self, index: int, value: str) -> "IdfObject":
        """Return a copy with field ``index`` set, padding with empty fields."""
        fields = list(self.fields)
        comments = list(self.trailing_comments)
        while len(fields) <= index:
            fields.append("")
            comments.append(())
        fields[index] = value
        return dataclasses.replace(
            self, fields=tuple(fields), trailing_comments=tuple(comments)
        )


@dataclass(frozen=True)
class IdfDocument:
    """An ordered, immutable collection of IDF objects."""

    objects: tuple[IdfObject, ...] = ()
    leading_comments: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "leading_comments", tuple(self.leading_comments))

    def find_objects(self, class_name: str) -> tuple[IdfObject, ...]:
        """All objects of ``class_name`` (case-insensitive), in document order."""
        want = class_name.lower()
        return tuple(o for o in self.objects if o.class_name.lower() == want)

    def find_first(self, class_name: str) -> IdfObject | None:
        found = self.find_objects(class_name)
        return found[0] if found else None

    def upsert_object(
        self, class_name: str, key_field_index: int, obj: IdfObject
    ) -> "IdfDocument":
        """Replace the object of ``class_name`` matching ``obj`` on the key field,
        or append ``obj`` if no match exists.  The replaced object keeps its
        document position."""
        if not obj.matches_class(class_name):
            raise IdfError(
                f"upsert object class {obj.class_name!r} does not match {class_name!r}"
            )
        if not 0 <= key_field_index < len(obj.fields):
            raise KeyFieldOutOfRangeError(
                f"key field index {key_field_index} out of range for object "
                f"with {len(obj.fields)} fields"
            )
        key = obj.fields[key_field_index].lower()
        objects = list(self.objects)
        for i, existing in enumerate(objects):
            if (
                existing.matches_class(class_name)
                and key_field_index < len(existing.fields)
                and existing.fields[key_field_index].lower() == key
            ):
                objects[i] = obj
                return dataclasses.replace(self, objects=tuple(objects))
        objects.append(obj)
        return dataclasses.replace(self, objects=tuple(objects))

    def remove_objects(
        self, class_name: str, where: Callable[[IdfObject], bool] | None = None
    ) -> "IdfDocument":
        """Drop all objects of ``class_name`` (optionally filtered by ``where``)."""
        want = class_name.lower()

        def keep(o: IdfObject) -> bool:
            if o.class_name.lower() != want:
                return True
            return not (where is None or where(o))

        return dataclasses.replace(
            self, objects=tuple(o for o in self.objects if keep(o))
        )

    def append_objects(self, objs: Iterable[IdfObject]) -> "IdfDocument":
        return dataclasses.replace(self, objects=self.objects + tuple(objs))

    def replace_at(self, index: int, obj: IdfObject) -> "IdfDocument":
        objects = list(self.objects)
        objects[index] = obj
        return dataclasses.replace(self, objects=tuple(objects))


def parse_idf(text: str) -> IdfDocument:
    """Parse IDF text into a document.

    Raises UnterminatedObjectError if the text ends inside an object,
    EmptyClassNameError for a delimiter with no preceding class name, and
    MacroDirectiveError for ``##...`` macro lines (unsupported).
    """
    leading: list[str] = []
    raw_objects: list[tuple[str, list[str], list[list[str]]]] = []

    tokens: list[str] | None = None  # class name + completed fields of the open object
    comments: list[list[str]] = []  # per completed field, aligned with tokens[1:]
    pending: list[str] = []  # comments parked between class name and first field
    attach: list[str] | None = None  # bucket of the last completed field
    chars: list[str] = []
    open_line = 0

    def finish_token(lineno: int) -> None:
        nonlocal tokens, attach
        value = " ".join("".join(chars).split())
        chars.clear()
        if tokens is None:
            if not value:
                raise EmptyClassNameError("delimiter with no class name", lineno)
            tokens = [value]
            attach = None
            return
        tokens.append(value)
        bucket = list(pending)
        pending.clear()
        comments.append(bucket)
        attach = bucket

    def finish_object(lineno: int) -> None:
        nonlocal tokens, comments
        assert tokens is not None
        class_name, *fields = tokens
        if not fields:
            raise IdfParseError(f"object {class_name!r} has no fields", lineno)
        # comment buckets stay live: a comment after the terminating ';' still
        # belongs to the last field, so objects are materialized only at the end
        raw_objects.append((class_name, fields, comments))
        tokens = None
        comments = []

    for lineno, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith("##"):
            raise MacroDirectiveError("macro directives are not supported", lineno)
        for i, ch in enumerate(line):
            if ch == "!":
                comment = line[i + 1 :].strip()
                if attach is not None:
                    attach.append(comment)
                elif tokens is not None or "".join(chars).strip():
                    pending.append(comment)
                else:
                    leading.append(comment)
                break
            if ch in ",;":
                finish_token(lineno)
                if ch == ";":
                    finish_object(lineno)
            else:
                if tokens is None and not ch.isspace() and not "".join(chars).strip():
                    open_line = lineno
                chars.append(ch)
        else:
            if chars:
                chars.append(" ")
    if tokens is not None or "".join(chars).strip():
        raise UnterminatedObjectError("end of input inside an object", open_line)
    objects = tuple(
        IdfObject(class_name, tuple(fields), tuple(tuple(c) for c in buckets))
        for class_name, fields, buckets in raw_objects
    )
    return IdfDocument(objects, tuple(leading))


def _comment_lines(comments: Sequence[str], indent: str) -> list[str]:
    return [f"{indent}! {c}".rstrip() for c in comments]


def serialize_idf(doc: IdfDocument) -> str:
    """Serialize a document to canonical IDF text.

    One field per line with four-space indent, ``;`` after the final field,
    comments re-emitted next to their fields.  The serializer is a fixed point
    on its own output: ``serialize(parse(serialize(d))) == serialize(d)``.
    """
    sections: list[str] = []
    if doc.leading_comments:
        sections.append("\n".join(_comment_lines(doc.leading_comments, "")))
    for obj in doc.objects:
        lines = [f"{obj.class_name},"]
        last = len(obj.fields) - 1
        for i, (value, field_comments) in enumerate(
            zip(obj.fields, obj.trailing_comments)
        ):
            terminator = ";" if i == last else ","
            line = f"    {value}{terminator}"
            if field_comments:
                line += f"    ! {field_comments[0]}".rstrip()
            lines.append(line)
            lines.extend(_comment_lines(field_comments[1:], "    "))
        sections.append("\n".join(lines))
    if not sections:
        return ""
    return "\n\n".join(sections) + "\n"
