import logging
import os
from datetime import datetime

from src.utils import get_log_dir

# Configure logger
logger = logging.getLogger("opkit")
logger.setLevel(logging.INFO)


def _attach_file_handler():
    log_dir = get_log_dir()
    try:
        os.makedirs(log_dir, exist_ok=True)
    except OSError:
        return
    log_file = os.path.join(log_dir, f"opkit_{datetime.now().strftime('%Y%m%d')}.log")
    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(logging.INFO)
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)
    # library modules log under the package name
    package_logger = logging.getLogger("src")
    package_logger.setLevel(logging.INFO)
    package_logger.addHandler(file_handler)


# Add handler
if not logger.handlers:
    _attach_file_handler()


def log_run(command: str, input_data, output_data):
    """
    Logs the input and outcome of one command run.
    """
    logger.info(f"--- COMMAND: {command} ---")
    input_str = str(input_data) if not isinstance(input_data, str) else input_data
    output_str = str(output_data) if not isinstance(output_data, str) else output_data
    logger.info(f"INPUT: {input_str[:500]}...")  # Truncate for readability
    logger.info(f"OUTPUT: {output_str}")
    logger.info("-" * 50)
