import json
import tempfile
import unittest
from pathlib import Path

from dotenv import load_dotenv

from mcp_hyperplanes.config import load_corpus_profile, load_profiles_from_json
from mcp_hyperplanes.harness import CorpusSpec
from mcp_hyperplanes.mcp_env import HyperplanesConfig, get_config, reset_config

load_dotenv()

PROFILES = {
    "profiles": {
        "nightly": {"seed": 11, "count": 80, "max_vertices": 300},
        "smoke": {"seed": 7, "count": 5, "families": ["canonical-star", "prisms"], "named": False},
    }
}


class TestCorpusProfiles(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / "corpus.json"
        self.path.write_text(json.dumps(PROFILES))

    def tearDown(self):
        self.tmp.cleanup()

    def test_first_profile_is_the_default(self):
        spec = load_corpus_profile(profile_file=self.path)
        self.assertEqual((spec.seed, spec.count, spec.max_vertices), (11, 80, 300))
        self.assertEqual(spec.families, CorpusSpec().families)

    def test_named_profile(self):
        spec = load_corpus_profile("smoke", self.path)
        self.assertEqual(spec.families, ("canonical-star", "prisms"))
        self.assertFalse(spec.named)

    def test_unknown_profile(self):
        with self.assertRaises(ValueError):
            load_corpus_profile("weekly", self.path)

    def test_unknown_keys_are_rejected(self):
        self.path.write_text(json.dumps({"profiles": {"bad": {"seed": 1, "depth": 4}}}))
        with self.assertRaises(ValueError):
            load_corpus_profile(profile_file=self.path)

    def test_missing_file_falls_back_to_defaults(self):
        missing = Path(self.tmp.name) / "absent.json"
        self.assertIsNone(load_profiles_from_json(missing))
        self.assertEqual(load_corpus_profile(profile_file=missing), CorpusSpec())
        with self.assertRaises(ValueError):
            load_corpus_profile("smoke", missing)

    def test_malformed_json(self):
        self.path.write_text("{not json")
        self.assertIsNone(load_profiles_from_json(self.path))


class TestEnvironmentSettings(unittest.TestCase):
    def setUp(self):
        reset_config()

    def tearDown(self):
        reset_config()

    def test_override_takes_precedence(self):
        get_config().override(face_guard=123)
        self.assertEqual(get_config().face_guard, 123)

    def test_settings_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "settings.json"
            path.write_text(json.dumps({"hyperplanes": {"coset_guard": 77}}))
            config = HyperplanesConfig(path)
        self.assertEqual(config.coset_guard, 77)
        self.assertEqual(config.ball_guard, 20000)

    def test_non_positive_override_is_rejected(self):
        with self.assertRaises(ValueError):
            get_config().override(workers=0)


if __name__ == "__main__":
    unittest.main()
