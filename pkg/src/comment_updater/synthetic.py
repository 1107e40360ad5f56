"""Small patterned corpus of code/comment co-changes for smoke training."""

from __future__ import annotations

import random

from .corpus import Sample

NAMES = (
    "count total size index value limit offset width height score weight price length depth "
    "level rate amount balance speed timeout"
).split()


def _rename_parameter(a: str, b: str) -> tuple[str, str, str, str]:
    return (
        f"int scaled(int {a}) {{ return {a} * 2; }}",
        f"int scaled(int {b}) {{ return {b} * 2; }}",
        f"/** Returns the {a} multiplied by two */",
        f"/** Returns the {b} multiplied by two */",
    )


def _null_check(a: str, b: str) -> tuple[str, str, str, str]:
    return (
        f"String describe(String {a}) {{ return {a}.trim(); }}",
        f"String describe(String {a}) {{ if ({a} == null) {{ return null; }} return {a}.trim(); }}",
        f"/** Returns the trimmed {a} */",
        f"/** Returns the trimmed {a} or null if {a} is null */",
    )


def _rename_field(a: str, b: str) -> tuple[str, str, str, str]:
    return (
        f"int current() {{ return this.{a}; }}",
        f"int current() {{ return this.{b}; }}",
        f"/** Gets the current {a} of this object */",
        f"/** Gets the current {b} of this object */",
    )


def _drop_parameter(a: str, b: str) -> tuple[str, str, str, str]:
    return (
        f"int combine(int {a}, int {b}) {{ return {a} + {b}; }}",
        f"int combine(int {a}) {{ return {a} + 1; }}",
        f"/** Adds the {a} and the {b} */",
        f"/** Adds the {a} */",
    )


def _flip_sign(a: str, b: str, positive: bool) -> tuple[str, str, str, str]:
    old_op, new_op = (">", "<") if positive else ("<", ">")
    old_word, new_word = ("positive", "negative") if positive else ("negative", "positive")
    return (
        f"boolean check(int {a}) {{ return {a} {old_op} 0; }}",
        f"boolean check(int {a}) {{ return {a} {new_op} 0; }}",
        f"/** Checks whether the {a} is {old_word} */",
        f"/** Checks whether the {a} is {new_word} */",
    )


def toy_corpus(n: int = 50, seed: int = 0) -> list[Sample]:
    """``n`` samples cycling through five edit patterns with random identifiers."""
    rng = random.Random(seed)
    patterns = [
        _rename_parameter,
        _null_check,
        _rename_field,
        _drop_parameter,
        lambda a, b: _flip_sign(a, b, positive=rng.random() < 0.5),
    ]
    samples = []
    for i in range(n):
        a, b = rng.sample(NAMES, 2)
        old_code, new_code, old_comment, new_comment = patterns[i % len(patterns)](a, b)
        samples.append(Sample(old_code, new_code, old_comment, new_comment, f"toy{i:03d}"))
    return samples
