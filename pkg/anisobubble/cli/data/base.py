from anisobubble.numerics.shared.hash import replace_nan_values
from numpyencoder import NumpyEncoder
import json
import logging
import os
import pandas as pd
import tempfile

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = '%.12g'
CSV_LINE_TERMINATOR = '\r\n'


class ArtifactWriter:
    """
    Writes <name>.json and <name>.csv under an output directory. Every file is written to a
    temporary file in the same directory and moved into place with os.replace.
    """

    def __init__(self, path):
        self.dir = os.path.abspath(path)

    def _ensure_dir(self):
        if not os.path.isdir(self.dir):
            os.makedirs(self.dir, exist_ok=True)

    def _write_atomic(self, file_name, write):
        self._ensure_dir()
        target = os.path.join(self.dir, file_name)
        fd, tmp_path = tempfile.mkstemp(dir=self.dir, prefix=f'.{file_name}.', suffix='.tmp')
        try:
            with os.fdopen(fd, 'w', newline='', encoding='utf8') as file:
                write(file)
            os.replace(tmp_path, target)
        except Exception:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
        logger.debug(f'Wrote {target}')
        return target

    def write_json_file(self, file_name, obj):
        """
        Pretty-printed with sorted keys; NaN and infinities become null.
        """
        def _write(file):
            json.dump(replace_nan_values(obj), file, cls=NumpyEncoder, indent=2, sort_keys=True)
            file.write('\n')

        return self._write_atomic(file_name, _write)

    def write_csv_file(self, file_name, rows, columns=None):
        """
        RFC 4180 CSV with CRLF line endings and a fixed column order.
        """
        df = pd.DataFrame(rows, columns=columns)

        def _write(file):
            file.write(df.to_csv(
                index=False,
                float_format=CSV_FLOAT_FORMAT,
                lineterminator=CSV_LINE_TERMINATOR,
            ))

        return self._write_atomic(file_name, _write)

    def read_json_file(self, file_name, default_value=None):
        file_path = os.path.join(self.dir, file_name)
        if not os.path.exists(file_path):
            return default_value
        with open(file_path) as file:
            return json.load(file)
