import sys
sys.path.insert(0, 'src')
from file_service import FileService
from main import inventory
from validator import NetlistValidator

# Parse each netlist given on the command line and print its inventory
files = FileService()
validator = NetlistValidator()
for path in sys.argv[1:] or ['src/tests/fixtures/full_adder.blif']:
    g = files.read_netlist(path)
    ok = validator.validate_structure(g)
    print(path, 'ok' if ok else 'INVALID: ' + validator.get_last_error())
    for key, value in inventory(g).items():
        if value:
            print(f'  {key} {value}')
