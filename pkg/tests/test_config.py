import json

import pytest

from gproxim.config import ConfigError, instance_from_dict, load_instance
from gproxim.fixtures import fixture_config_path, fixture_names
from gproxim.gspace import Point


def minimal_doc():
    return {
        "dimension": 1,
        "g": "x1 - u1",
        "sets": {"X": {"box": [[0, 1]], "resolution": [11]}},
    }


class TestLoading:
    def test_minimal(self):
        inst = instance_from_dict(minimal_doc())
        assert inst.dimension == 1
        assert inst.g.name == "g"
        assert len(inst.set_("X")) == 11

    def test_grid_tolerance_defaults_to_half_step(self):
        inst = instance_from_dict(minimal_doc())
        assert inst.tol.eps_prox == pytest.approx(0.05)

    def test_exact_sets_default_to_tight_band(self):
        doc = minimal_doc()
        doc["sets"] = {"X": {"points": [[0], [1]]}}
        assert instance_from_dict(doc).tol.eps_prox == 1e-9

    def test_explicit_tolerances_win(self):
        doc = minimal_doc()
        doc["tolerances"] = {"eps_prox": 1e-6}
        assert instance_from_dict(doc).tol.eps_prox == 1e-6

    def test_maps_and_convex_and_schedule(self):
        doc = {
            "dimension": 2,
            "g": "x2 - u2",
            "sets": {
                "A": {"box": [[0, 0], [-1, 0]], "resolution": [1, 11]},
                "B": {"box": [[0, 0], [0, 1]], "resolution": [1, 11]},
            },
            "maps": {"f": {"exprs": ["x1", "-x2"], "domain": "A", "codomain": "B"}},
            "convex": {
                "exprs": ["l*x1 + (1-l)*u1", "l*x2 + (1-l)*u2"],
                "r": [0, 0], "s": [0, 0], "lambda_grid": 5,
            },
            "schedule": {"rule": "harmonic", "stages": 3},
        }
        inst = instance_from_dict(doc)
        assert inst.map_("f").apply(Point((0.0, -1.0))) == Point((0.0, 1.0))
        assert inst.map_() is inst.map_("f")  # unique map needs no name
        assert inst.convex.lambda_grid == (0.0, 0.25, 0.5, 0.75, 1.0)
        assert inst.schedule.values == (0.5, 1 / 3, 0.25)


class TestErrors:
    @pytest.mark.parametrize(
        "mutate,path_fragment",
        [
            (lambda d: d.pop("dimension"), "$"),
            (lambda d: d.pop("g"), "$"),
            (lambda d: d.update(g="x1 +"), "g"),
            (lambda d: d.update(g="x9 - u1"), "g"),
            (lambda d: d.update(sets={}), "sets"),
            (lambda d: d["sets"].update(Y={"points": []}), "sets.Y"),
            (lambda d: d["sets"].update(Y={"points": [[0, 1]]}), "sets.Y"),
            (lambda d: d["sets"].update(Y={"box": [[1, 0]]}), "sets.Y"),
            (
                lambda d: d.update(
                    maps={"f": {"exprs": ["x1"], "domain": "NOPE", "codomain": "X"}}
                ),
                "maps.f",
            ),
            (lambda d: d.update(tolerances={"eps_prox": -1}), "tolerances"),
            (lambda d: d.update(schedule={"values": [0.5, 0.7]}), "schedule"),
        ],
    )
    def test_bad_documents_carry_a_path(self, mutate, path_fragment):
        doc = minimal_doc()
        mutate(doc)
        with pytest.raises(ConfigError) as err:
            instance_from_dict(doc)
        assert path_fragment in str(err.value)

    def test_invalid_json_reports_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"dimension": 1,,}')
        with pytest.raises(ConfigError) as err:
            load_instance(path)
        assert "line" in str(err.value)

    def test_lambda_grid_must_include_endpoints(self):
        doc = minimal_doc()
        doc["convex"] = {
            "exprs": ["l*x1 + (1-l)*u1"], "r": [0], "s": [0],
            "lambda_grid": [0.0, 0.5],
        }
        with pytest.raises(ConfigError):
            instance_from_dict(doc)


class TestRoundTrip:
    @pytest.mark.parametrize("name", fixture_names())
    def test_every_shipped_config_round_trips(self, name, tmp_path):
        inst = load_instance(fixture_config_path(name))
        out = tmp_path / "rt.json"
        out.write_text(json.dumps(inst.to_dict(), indent=2))
        again = load_instance(out)
        assert again == inst
        assert again.to_dict() == inst.to_dict()

    def test_synthetic_round_trip(self):
        inst = instance_from_dict(minimal_doc())
        assert instance_from_dict(inst.to_dict()) == inst
