# Handle both module and direct script execution
import os
import sys

if __name__ == "__main__":
    # Add parent directory to path for direct script execution
    sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    from mcp_hyperplanes.cli_io import dispatch
else:
    # Relative imports for module execution
    from .cli_io import dispatch


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
