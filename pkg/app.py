import sys

from edgeoffload.cli import main

# `python app.py solve --instance data/two_node.json` works without installing the package
if __name__ == "__main__":
    sys.exit(main())
