import sys

from dotenv import load_dotenv

from src.cli import main

# Load environment variables (OPKIT_SIZE_CAP, OPKIT_LOG_DIR)
load_dotenv()

if __name__ == "__main__":
    sys.exit(main())
