from htensor.cli import main
import sys

sys.exit(main())
