import json

import numpy as np
import pytest

from sideinfo.errors import ChannelFormatError
from sideinfo.generators import (
    make_erasure_parity,
    make_random_access_mac,
    random_bc,
    random_degraded_relay,
    random_state_channel,
)
from sideinfo.channels import noiseless
from sideinfo.io import content_hash, dumps_channel, loads_channel, read_channel, write_channel


@pytest.mark.parametrize("make", [
    lambda: make_erasure_parity(2),
    lambda: random_state_channel(5, tx="random", rx="random"),
    lambda: make_random_access_mac(noiseless(2), 0.3, rx_knows=True),
    lambda: random_bc(2),
    lambda: random_degraded_relay(1, ns=2),
])
def test_round_trip_exact(tmp_path, make):
    c = make()
    path = tmp_path / "c.json"
    digest = write_channel(c, path)
    back = read_channel(path)
    assert back == c
    assert type(back) is type(c)
    assert content_hash(back) == digest
    assert dumps_channel(back) == path.read_text()


def _doc():
    return json.loads(dumps_channel(make_erasure_parity(1)))


def test_unknown_kind_names_tag():
    d = _doc()
    d["kind"] = "quantum"
    with pytest.raises(ChannelFormatError) as e:
        loads_channel(json.dumps(d))
    assert "quantum" in str(e.value)
    assert e.value.where == "kind"


def test_extent_mismatch_names_path():
    d = _doc()
    d["alphabets"]["x"] = 3
    with pytest.raises(ChannelFormatError) as e:
        loads_channel(json.dumps(d))
    assert e.value.where == "transition"
    d = _doc()
    d["transition"][0][1] = d["transition"][0][1][:-1]
    with pytest.raises(ChannelFormatError) as e:
        loads_channel(json.dumps(d))
    assert e.value.where == "transition[0][1]"


def test_syntax_error_has_line():
    with pytest.raises(ChannelFormatError) as e:
        loads_channel('{\n  "kind": "single",\n  oops\n}')
    assert e.value.where.startswith("line 3")


def test_version_and_missing_field():
    d = _doc()
    d["format_version"] = "2.0"
    with pytest.raises(ChannelFormatError, match="major"):
        loads_channel(json.dumps(d))
    d = _doc()
    del d["state_law"]
    with pytest.raises(ChannelFormatError) as e:
        loads_channel(json.dumps(d))
    assert e.value.where == "state_law"


def test_invalid_values_reported_unless_unchecked():
    d = _doc()
    d["transition"][0][0][0] = 0.5
    with pytest.raises(ChannelFormatError) as e:
        loads_channel(json.dumps(d))
    assert e.value.where.startswith("transition[0, 0]")
    c = loads_channel(json.dumps(d), check=False)
    assert c.transition[0, 0, 0] == 0.5


def test_non_finite_refused():
    c = random_state_channel(0)
    bad = type(c)(c.state_law, np.where(c.transition > 0, np.nan, 0.0))
    with pytest.raises(ValueError):
        dumps_channel(bad)
