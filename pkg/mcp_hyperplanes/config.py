import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from .harness import CorpusSpec, FAMILY_NAMES

logger = logging.getLogger(__name__)

# Path to the corpus profiles JSON file (relative to module location)
module_dir = Path(__file__).parent.parent  # Go up from mcp_hyperplanes to project root
CONFIG_FILE_PATH = module_dir / "config" / "corpus.json"

PROFILE_KEYS = ("seed", "count", "max_vertices", "steps", "families", "named")


def load_profiles_from_json(file_path: Path = CONFIG_FILE_PATH) -> Optional[Dict[str, Any]]:
    """Load corpus profiles from a JSON file.

    Returns None if file doesn't exist or is malformed.
    """
    if not file_path.exists():
        logger.info(f"Corpus profile file not found at {file_path} - using built-in defaults")
        return None

    try:
        with open(file_path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in corpus profile file {file_path}: {e}")
        return None
    except Exception as e:
        logger.error(f"Error loading corpus profiles from {file_path}: {e}")
        return None


def _spec_from_profile(profile: Dict[str, Any]) -> CorpusSpec:
    unknown = set(profile) - set(PROFILE_KEYS)
    if unknown:
        raise ValueError(f"Unknown corpus profile keys: {', '.join(sorted(unknown))}")
    values = dict(profile)
    if "families" in values:
        values["families"] = tuple(values["families"])
        for name in values["families"]:
            if name not in FAMILY_NAMES:
                raise ValueError(
                    f"Invalid family '{name}'. Valid options: {', '.join(FAMILY_NAMES)}"
                )
    return CorpusSpec(**values)


def load_corpus_profile(
    profile_name: Optional[str] = None, profile_file: Optional[Path] = None
) -> CorpusSpec:
    """Resolve a corpus profile into a CorpusSpec.

    Args:
        profile_name: Name of the profile; the first profile of the file when omitted
        profile_file: Path to a custom profile file instead of config/corpus.json
    """
    data = load_profiles_from_json(profile_file) if profile_file else load_profiles_from_json()

    if not data or "profiles" not in data or not data["profiles"]:
        if profile_name:
            raise ValueError(f"Corpus profile '{profile_name}' requested but no profiles found")
        logger.info("No corpus profiles configured - using the default corpus")
        return CorpusSpec()

    if profile_name:
        if profile_name not in data["profiles"]:
            raise ValueError(f"Corpus profile '{profile_name}' not found")
        profile = data["profiles"][profile_name]
    else:
        # Use first profile as default
        profile_name = next(iter(data["profiles"]))
        profile = data["profiles"][profile_name]

    spec = _spec_from_profile(profile)
    logger.info(
        f"Loaded corpus profile '{profile_name}': seed {spec.seed}, {spec.count} random graphs"
    )
    return spec
