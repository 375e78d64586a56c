import sys

from powerdiv.main import main

sys.exit(main())
