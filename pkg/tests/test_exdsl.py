import pytest
from hypothesis import given, settings, strategies as st

from leakybv.exdsl import KEY_ORDER, ExperimentSpec, ParseError, parse, parse_with_diagnostics, render
from leakybv.gf2 import BitString, SubsetMask

LEAKY = "experiment leaky_bv { n=6  a=101101  S={1,4}  mode=exact  output=csv }"


def _errors(text):
    spec, diags = parse_with_diagnostics(text)
    return spec, [d for d in diags if d.severity == "error"]


def test_leaky_example():
    spec = parse(LEAKY)
    assert spec.kind == "leaky_bv"
    assert spec.n == 6
    assert spec.a == BitString.from_str("101101")
    assert spec.S == SubsetMask.of([1, 4], 6)
    assert spec.k == 2


def test_sampled_bv_example():
    spec = parse("experiment bv { n=4 a=1011 mode=shots shots=1000 seed=7 output=json }")
    assert (spec.mode, spec.shots, spec.seed, spec.output) == ("shots", 1000, 7, "json")


def test_length_diagnostic_position():
    text = "experiment leaky_bv {\n  n = 3\n  a = 10\n  S = {3}\n}\n"
    spec, errs = _errors(text)
    assert spec is None
    assert len(errs) == 1
    assert errs[0].message == "a has length 2, expected n=3"
    assert (errs[0].line, errs[0].column) == (3, 7)
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.diagnostics == errs


def test_round_trip_and_key_order():
    spec = parse(LEAKY)
    text = render(spec)
    assert parse(text) == spec
    keys = [line.split("=")[0].strip() for line in text.splitlines()[1:-1]]
    assert keys == sorted(keys, key=KEY_ORDER.index)
    assert "\r" not in text and text.endswith("}\n")


def test_random_tokens_preserved():
    spec = parse("experiment leaky_bv { n = 5 a = random S = random_subset k = 2 }")
    assert spec.a == "random" and spec.S == "random_subset" and spec.k == 2
    text = render(spec)
    assert "a = random\n" in text and "S = random_subset\n" in text
    assert parse(text) == spec


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("experiment leaky_bv { n = 3 n = 3 a = 101 S = {3} }", "duplicate key 'n'"),
        ("experiment leaky_bv { n = 3 a = 101 S = {3} zz = 1 }", "unknown key 'zz'"),
        ("experiment leaky_bv { n = 3 a = 101 }", "missing"),
        ("experiment leaky_bv { n = 3 a = 101 S = {4} }", ""),
        ("experiment bv { n = 2 a = 11 mode = exact shots = 10 }", "shots"),
        ("experiment teleport { n = 2 }", "teleport"),
        ("experiment deutsch_jozsa { n = 2 f = 0001 promise = constant_or_balanced }", ""),
        ("experiment leaky_bv { n = 3 a = 101 S = {3}", "'}'"),
    ],
)
def test_rejections_carry_positions(text, fragment):
    spec, errs = _errors(text)
    assert spec is None and errs
    assert any(fragment in d.message for d in errs)
    lines = text.splitlines()
    for d in errs:
        assert 1 <= d.line <= len(lines)
        assert 1 <= d.column <= len(lines[d.line - 1])


def test_unsorted_subset_is_a_warning():
    spec, diags = parse_with_diagnostics("experiment leaky_bv { n = 3 a = 101 S = {3,1} }")
    assert spec.S == SubsetMask.of([1, 3], 3)
    assert [d.severity for d in diags] == ["warning"]


def test_comments_crlf_and_bytes():
    text = "# header\r\nexperiment parity {  # inline\r\n  bits = 11111\r\n}\r\n"
    spec = parse(text)
    assert spec.bits == BitString.from_str("11111")
    assert parse(text.encode()) == spec
    _, errs = _errors(b"experiment parity { bits = \xff }")
    assert errs


def test_other_kinds_parse():
    g = parse("experiment grover { n = 4 marked = 1010 }")
    assert g.iterations == "optimal"
    h = parse("experiment holevo_curve { n = 3 }")
    assert h.trials == 1 and h.subset_policy == "nested_prefix"
    d = parse("experiment deutsch_jozsa { n = 2 f = 0110 promise = constant_or_balanced }")
    assert d.f == "0110"


# --- round-trip property ----------------------------------------------------

@st.composite
def valid_sources(draw):
    kind = draw(st.sampled_from(["leaky_bv", "bv", "deutsch_jozsa", "grover", "parity", "holevo_curve"]))
    n = draw(st.integers(1, 6))
    bits = lambda m: "".join(draw(st.lists(st.sampled_from("01"), min_size=m, max_size=m)))
    b = {}
    if kind == "parity":
        b["bits"] = bits(draw(st.integers(1, 12)))
    else:
        b["n"] = str(n)
    if kind in ("leaky_bv", "bv"):
        b["a"] = draw(st.sampled_from(["random", bits(n)]))
    if kind == "leaky_bv":
        if draw(st.booleans()):
            b["S"] = "random_subset"
            b["k"] = str(draw(st.integers(0, n)))
        else:
            members = draw(st.sets(st.integers(1, n)))
            b["S"] = "{" + ",".join(map(str, sorted(members))) + "}"
    if kind == "deutsch_jozsa":
        b["f"] = bits(1 << n)
    if kind == "grover":
        b["marked"] = bits(n)
        b["iterations"] = draw(st.sampled_from(["optimal", str(draw(st.integers(0, 9)))]))
    if kind == "holevo_curve":
        b["trials"] = str(draw(st.integers(1, 4)))
        b["subset_policy"] = draw(st.sampled_from(["nested_prefix", "random"]))
    if kind in ("leaky_bv", "bv", "deutsch_jozsa", "grover") and draw(st.booleans()):
        b["mode"] = "shots"
        b["shots"] = str(draw(st.integers(1, 10**6)))
    b["seed"] = str(draw(st.integers(0, 2**64 - 1)))
    b["output"] = draw(st.sampled_from(["csv", "json"]))
    items = draw(st.permutations(list(b.items())))
    sep = draw(st.sampled_from([" ", "\n", "\r\n", "  # note\n"]))
    return f"experiment {kind} {{" + sep + sep.join(f"{k} = {v}" for k, v in items) + sep + "}"


@given(valid_sources())
def test_render_parse_identity(text):
    spec = parse(text)
    assert isinstance(spec, ExperimentSpec)
    assert parse(render(spec)) == spec
    assert render(parse(render(spec))) == render(spec)


@settings(max_examples=300)
@given(st.binary(max_size=2048))
def test_fuzz_bytes_never_crash(blob):
    spec, diags = parse_with_diagnostics(blob)
    assert (spec is None) == any(d.severity == "error" for d in diags)
    assert all(d.line >= 1 and d.column >= 1 for d in diags)


@settings(max_examples=300)
@given(st.text(alphabet="experimnt_leakybv{}=#01234 \n\r,Sardom", max_size=400))
def test_fuzz_dsl_alphabet_positions_in_source(text):
    spec, diags = parse_with_diagnostics(text)
    lines = text.replace("\r\n", "\n").split("\n")
    for d in diags:
        assert 1 <= d.line <= max(len(lines), 1)
        assert 1 <= d.column <= max(len(lines[d.line - 1]), 1)


def test_large_noise_terminates():
    import random

    r = random.Random(5)
    blob = bytes(r.randrange(256) for _ in range(64 * 1024))
    parse_with_diagnostics(blob)
    parse_with_diagnostics("experiment bv { n = " + "9" * 5000 + " }")
