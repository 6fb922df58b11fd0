from .utils import open_sesame
from .csv import read_csv, read_meta, write_csv
from .fields import read_field, write_field
from .json import read_json, write_json
