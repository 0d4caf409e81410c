import sys

from .entwit import main

if __name__ == "__main__":
    sys.exit(main())
