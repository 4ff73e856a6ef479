import sys

from imc_sim.main import main

sys.exit(main())
