import numpy as np
import pytest

from scene2locale.fixtures import render_sign
from scene2locale.geometry import BBox
from scene2locale.pipeline.config import data_path
from scene2locale.seqnet import gate_language, load_params, recognize
from scene2locale.seqnet.recognize import head_confidence, reading_order


@pytest.fixture(scope="module")
def en_head():
    return load_params(data_path("heads", "en.s2lp"))


def test_gate_picks_highest_above_threshold():
    assert gate_language({"en": 0.9, "hi": 0.6}) == "en"
    assert gate_language({"en": 0.4, "hi": 0.6}) == "hi"
    assert gate_language({"en": 0.4, "hi": 0.3}) is None


def test_gate_tie_goes_to_first_head():
    assert gate_language({"hi": 0.7, "en": 0.7}) == "hi"


def test_gate_empty_raises():
    with pytest.raises(ValueError):
        gate_language({})


def test_head_confidence_is_geometric_mean_of_step_maxima():
    p = np.array([[0.5, 0.5], [0.8, 0.2]])
    assert head_confidence(p) == pytest.approx(np.sqrt(0.5 * 0.8))


def test_reading_order_rows_then_x():
    a = BBox(50, 0, 60, 10)
    b = BBox(0, 1, 10, 11)
    c = BBox(0, 30, 10, 40)
    assert reading_order([c, a, b]) == [[b, a], [c]]


def test_two_words_on_a_row_read_left_to_right(en_head):
    img, boxes = render_sign(["RANIGANJ", "BAZAR"])
    rec = recognize(img, boxes[::-1], [en_head])
    assert rec.text == "RANIGANJ BAZAR"
    assert rec.language == "en"


def test_rows_are_newline_separated(en_head):
    top, tb = render_sign(["KAHARA"])
    bottom, bb = render_sign(["BIHAR"])
    w = max(top.shape[1], bottom.shape[1])
    img = np.zeros((top.shape[0] + bottom.shape[0], w, 3))
    img[:top.shape[0], :top.shape[1]] = top
    img[top.shape[0]:, :bottom.shape[1]] = bottom
    shifted = BBox(bb[0].x_min, bb[0].y_min + top.shape[0], bb[0].x_max, bb[0].y_max + top.shape[0])
    assert recognize(img, [shifted, tb[0]], [en_head]).text == "KAHARA\nBIHAR"


def test_no_boxes_is_an_error(en_head):
    with pytest.raises(ValueError):
        recognize(np.zeros((10, 10, 3)), [], [en_head])


def test_high_threshold_gates_everything_out(en_head):
    img, boxes = render_sign(["KAHARA"])
    rec = recognize(img, boxes, [en_head], threshold=1.01)
    assert rec.text == "" and rec.language is None


def test_bundled_head_reads_every_training_word(en_head):
    from scene2locale.seqnet import TOY_WORDS
    from scene2locale.seqnet.font import word_strips
    from scene2locale.seqnet.recognize import recognize_strips

    for w in TOY_WORDS:
        text, lang, _ = recognize_strips(word_strips(w), [en_head])
        assert (text, lang) == (w, "en")
