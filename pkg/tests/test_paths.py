import pytest

from deadlistener.paths import (
    AccessPath,
    Argument,
    CallReturn,
    Instance,
    PathSyntaxError,
    PropertyRead,
    parse_path,
    rewrite_chained_aliases,
    serialize_path,
)


def test_serialize_response_object_path():
    path = AccessPath("http", (PropertyRead("request"), Argument(1), Argument(0)))
    assert serialize_path(path) == "require(http).request(1)(0)"


def test_serialize_call_and_instance_steps():
    path = AccessPath("events", (PropertyRead("EventEmitter"), Instance()))
    assert serialize_path(path) == "require(events).EventEmitter[new]()"
    path = AccessPath("http", (PropertyRead("request"), CallReturn()))
    assert serialize_path(path) == "require(http).request()"


def test_parse_instance_path():
    path = parse_path("require(events).EventEmitter[new]()")
    assert path.root_package == "events"
    assert path.steps == (PropertyRead("EventEmitter"), Instance())


def test_parse_scoped_and_dotted_packages():
    assert parse_path("require(socket.io-client).connect()").root_package == "socket.io-client"
    assert parse_path("require(@scope/pkg).run()").root_package == "@scope/pkg"


def test_round_trip_handful():
    for text in [
        "require(http)",
        "require(http).request()",
        "require(http).request(1)(0)",
        "require(net).connect().setNoDelay()",
        "require(events).EventEmitter[new]().on(1)(0)",
        "require(fs).createReadStream(10)",
    ]:
        assert serialize_path(parse_path(text)) == text


@pytest.mark.parametrize(
    "bad",
    [
        "",
        "http.request()",
        "require()",
        "require(http).request(",
        "require(http).request(x)",
        "require(http).",
        "require(http).1abc",
        "require(http)[old]()",
        "require(http) .request",
    ],
)
def test_parse_rejects_malformed(bad):
    with pytest.raises(PathSyntaxError):
        parse_path(bad)


def test_rewrite_removes_registration_suffix():
    path = parse_path("require(http).request(1)(0).on()")
    assert serialize_path(rewrite_chained_aliases(path)) == "require(http).request(1)(0)"


def test_rewrite_removes_repeated_suffixes():
    path = parse_path("require(http).request(1)(0).on().on()")
    assert serialize_path(rewrite_chained_aliases(path)) == "require(http).request(1)(0)"
    path = parse_path("require(x).once().prependListener()")
    assert serialize_path(rewrite_chained_aliases(path)) == "require(x)"


def test_rewrite_fixpoint_on_clean_path():
    path = parse_path("require(http).request()")
    assert rewrite_chained_aliases(path) is path


def test_rewrite_keeps_callback_parameter_paths():
    # .on(1)(0) denotes the callback's first parameter, not the receiver
    path = parse_path("require(http).request().on(1)(0)")
    assert rewrite_chained_aliases(path) == path


def test_rewrite_keeps_non_registration_calls():
    path = parse_path("require(net).connect().setNoDelay()")
    assert rewrite_chained_aliases(path) == path
