import sys

from provcalc.main import main

sys.exit(main())
