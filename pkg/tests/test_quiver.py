import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from quiverhall.errors import QuiverParseError
from quiverhall.quiver import QuiverSpec, euler_form, parse_quiver, positive_roots

A2 = "vertices: 1 2\narrows: 1->2\n"
A3_SINK = "vertices: 1 2 3\narrows: 1->2 3->2\n"
D4 = "vertices: 1 2 3 4\narrows: 1->4 2->4 3->4\n"


def test_parse_a2():
    q = parse_quiver(A2)
    assert q.vertices == ("1", "2")
    assert q.arrows == (("1", "2"),)


def test_parse_middle_sink():
    q = parse_quiver(A3_SINK)
    assert q.arrows == (("1", "2"), ("3", "2"))


def test_parse_comments_and_blank_lines():
    q = parse_quiver("# a comment\nvertices: a b\n\narrows: a->b  # trailing\n")
    assert q.vertices == ("a", "b")


def test_parse_rejects_cycle():
    with pytest.raises(QuiverParseError) as exc:
        parse_quiver("vertices: 1 2\narrows: 1->2 2->1\n")
    assert exc.value.code == "non-dynkin"


def test_parse_rejects_unknown_vertex():
    with pytest.raises(QuiverParseError) as exc:
        parse_quiver("vertices: 1 2\narrows: 1->3\n")
    assert exc.value.code == "unknown-vertex"


def test_parse_rejects_syntax_garbage():
    with pytest.raises(QuiverParseError) as exc:
        parse_quiver("vertices: 1 2\nfoo: bar\n")
    assert exc.value.code == "syntax"
    with pytest.raises(QuiverParseError) as exc:
        parse_quiver("arrows: 1->2\n")
    assert exc.value.code == "syntax"


def test_parse_rejects_affine_and_wild_shapes():
    # degree-4 vertex (affine D_4)
    with pytest.raises(QuiverParseError):
        parse_quiver("vertices: 0 1 2 3 4\narrows: 1->0 2->0 3->0 4->0\n")
    # two branch vertices
    with pytest.raises(QuiverParseError):
        parse_quiver(
            "vertices: 1 2 3 4 5 6\narrows: 1->2 3->2 2->5 4->5 5->6\n"
        )


def test_euler_form_examples():
    q = parse_quiver(A2)
    assert euler_form(q, (1, 0), (0, 1)) == -1
    assert euler_form(q, (1, 1), (1, 1)) == 1
    assert euler_form(q, (2, 3), (0, 0)) == 0


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_euler_form_is_bilinear(data):
    q = parse_quiver(D4)
    vec = st.tuples(*(st.integers(0, 5) for _ in range(4)))
    d1, d2, e = data.draw(vec), data.draw(vec), data.draw(vec)
    s = tuple(a + b for a, b in zip(d1, d2))
    assert euler_form(q, s, e) == euler_form(q, d1, e) + euler_form(q, d2, e)
    assert euler_form(q, e, s) == euler_form(q, e, d1) + euler_form(q, e, d2)


def test_positive_roots_a2():
    q = parse_quiver(A2)
    assert positive_roots(q) == [(0, 1), (1, 0), (1, 1)]


@pytest.mark.parametrize(
    "text,count",
    [
        (A2, 3),
        ("vertices: 1 2 3\narrows: 1->2 2->3\n", 6),
        (A3_SINK, 6),
        (D4, 12),
        ("vertices: 1 2 3 4 5\narrows: 1->3 2->3 3->4 4->5\n", 20),  # D5
        (
            "vertices: 1 2 3 4 5 6\narrows: 1->2 2->3 6->3 3->4 4->5\n",
            36,
        ),  # E6
    ],
)
def test_positive_root_counts(text, count):
    q = parse_quiver(text)
    assert len(positive_roots(q)) == count


def test_positive_roots_d4_contains_highest_root():
    q = parse_quiver(D4)
    roots = positive_roots(q)
    assert (1, 1, 1, 2) in roots


def test_positive_roots_disjoint_union():
    q = parse_quiver("vertices: 1 2\narrows:\n")
    assert positive_roots(q) == [(0, 1), (1, 0)]


def test_roots_are_real():
    for text in (A2, A3_SINK, D4):
        q = parse_quiver(text)
        for r in positive_roots(q):
            assert euler_form(q, r, r) == 1


def test_roots_do_not_depend_on_orientation():
    flipped = parse_quiver("vertices: 1 2 3 4\narrows: 4->1 2->4 3->4\n")
    straight = parse_quiver(D4)
    assert positive_roots(flipped) == positive_roots(straight)


def test_quiver_hash_is_stable():
    assert parse_quiver(A2).content_hash() == parse_quiver(A2).content_hash()
    assert parse_quiver(A2).content_hash() != parse_quiver(D4).content_hash()
