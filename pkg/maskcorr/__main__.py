import sys

from maskcorr.main import main

sys.exit(main())
