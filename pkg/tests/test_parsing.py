import pytest

from bbops.cli.parsing import (
    MAX_LIST_LENGTH,
    parse_function,
    parse_n_list,
    parse_t_list,
    parse_x_list,
    read_samples,
)
from bbops.cli.validation import (
    validate_derivative_request,
    validate_operator_options,
    validate_points,
)
from bbops.config_models import OperatorVariant
from bbops.errors import FunctionParseError, IngestionError
from bbops.functions import FunctionKind, abs_half, polynomial


@pytest.fixture
def samples_csv(tmp_path):
    path = tmp_path / "samples.csv"
    path.write_text("x,value\n1.0,1.0\n0.0,0.0\n0.5,0.25\n0.5,0.25\n", encoding="utf-8")
    return path


def test_parse_polynomial_token():
    f = parse_function("poly:0,0,1")
    assert f == polynomial([0.0, 0.0, 1.0])
    assert f(0.5) == pytest.approx(0.25)


def test_parse_holder_token():
    f = parse_function("holder:0.5")
    assert f.kind == FunctionKind.HOLDER
    assert f(0.25) == pytest.approx(0.5)


@pytest.mark.parametrize("token", ["abs_half", " abs_half ", "holder:1"])
def test_parse_abs_half_forms(token):
    assert parse_function(token).kind == abs_half().kind


@pytest.mark.parametrize(
    "token",
    ["poly:", "poly:a,b", "holder", "holder:0", "holder:1.5", "sin_pi:2", "cosine", "csv:"],
)
def test_parse_function_rejects_bad_tokens(token):
    with pytest.raises(FunctionParseError):
        parse_function(token)


def test_parse_csv_token(samples_csv):
    f = parse_function(f"csv:{samples_csv}")
    assert f.kind == FunctionKind.SAMPLED
    assert f.knots == (0.0, 0.5, 1.0)
    assert f(0.75) == pytest.approx(0.625)


def test_read_samples_sorts_and_drops_exact_duplicates(samples_csv):
    xs, values = read_samples(str(samples_csv))
    assert xs == [0.0, 0.5, 1.0]
    assert values == [0.0, 0.25, 1.0]


def test_read_samples_missing_file(tmp_path):
    with pytest.raises(IngestionError, match="not found"):
        read_samples(str(tmp_path / "missing.csv"))


@pytest.mark.parametrize(
    "content, message",
    [
        ("0.0,0.0\n0.5,1.0\n0.5,2.0\n1.0,0.0\n", "strictly increasing"),
        ("0.1,0.0\n1.0,1.0\n", "x-range"),
        ("0.0,0.0\n", "at least two"),
        ("0.0,0.0\n0.5\n1.0,1.0\n", "two columns"),
        ("0.0,0.0\nhalf,1.0\n1.0,1.0\n", "non-numeric"),
    ],
)
def test_read_samples_rejects_malformed_files(tmp_path, content, message):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(IngestionError, match=message):
        read_samples(str(path))


def test_parse_n_list_geometric():
    values = parse_n_list("16:8192:x2")
    assert values == [16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192]


@pytest.mark.parametrize(
    "text, expected",
    [("2:10:+2", [2, 4, 6, 8, 10]), ("4,8,16", [4, 8, 16]), ("10", [10])],
)
def test_parse_n_list_forms(text, expected):
    assert parse_n_list(text) == expected


@pytest.mark.parametrize("text", ["16:8192:x1", "2:10", "2:10:*2", "a,b", "0:8:x2", "10:2:+1"])
def test_parse_n_list_rejects_bad_text(text):
    with pytest.raises(ValueError):
        parse_n_list(text)


def test_parse_n_list_caps_length():
    with pytest.raises(ValueError, match=str(MAX_LIST_LENGTH)):
        parse_n_list(f"1:{MAX_LIST_LENGTH + 5}:+1")


def test_parse_t_list_halving():
    values = parse_t_list("0.125:0.000244140625:x0.5")
    assert values == [2.0**-p for p in range(3, 13)]


def test_parse_t_list_forms():
    assert parse_t_list("0.1,0.05") == [0.1, 0.05]
    assert parse_t_list("0.01:0.04:x2") == pytest.approx([0.01, 0.02, 0.04])


@pytest.mark.parametrize("text", ["0.1:0.01:x1", "0:0.1:x0.5", "0.1:0.01:/2", "t"])
def test_parse_t_list_rejects_bad_text(text):
    with pytest.raises(ValueError):
        parse_t_list(text)


def test_parse_x_list():
    assert parse_x_list("0,0.37,1") == [0.0, 0.37, 1.0]
    with pytest.raises(ValueError):
        parse_x_list("")


def test_validate_operator_options():
    assert validate_operator_options(OperatorVariant.GENERALIZED, [4, 8], 2.0, 0.5) == []
    errors = validate_operator_options(OperatorVariant.BERNSTEIN, [1, 8], 2.0, 0.5)
    assert len(errors) == 3
    assert any("--beta does not apply" in e for e in errors)
    assert validate_operator_options(OperatorVariant.GENERALIZED, [4], 0.5, 1.5) == [
        "--alpha must be >= 1, got 0.5",
        "--beta must lie in [0, 1], got 1.5",
    ]


def test_validate_points():
    assert validate_points([0.0, 1.0], lam=0.5, ts=[0.1]) == []
    assert len(validate_points([1.2], lam=2.0, ts=[0.0])) == 3


def test_validate_derivative_request():
    assert validate_derivative_request(OperatorVariant.BERNSTEIN_BEZIER) == []
    assert validate_derivative_request(OperatorVariant.BETA_BERNSTEIN)
