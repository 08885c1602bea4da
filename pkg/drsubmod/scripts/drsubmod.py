import sys
from pathlib import Path

# Add the src directory to the Python path to allow for absolute imports
sys.path.append(str(Path(__file__).parent.parent / 'src'))

from drsubmod.cli import main

if __name__ == '__main__':
    main()
