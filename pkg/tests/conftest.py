# keeps `import helpers` working no matter where pytest is invoked from
import os
import sys

sys.path.insert(0, os.path.dirname(__file__))
