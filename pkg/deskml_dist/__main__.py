"""python -m deskml_dist coordinator|worker [options]"""

import sys

from .cli import coordinator_main, worker_main

if __name__ == "__main__":
    role = "coordinator"
    if len(sys.argv) > 1 and sys.argv[1] in ("coordinator", "worker"):
        role = sys.argv.pop(1)
    if role == "worker":
        worker_main()
    else:
        coordinator_main()
