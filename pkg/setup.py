from setuptools import setup, find_packages

setup(
    name='netlist-redactor',
    version='1.0.0',
    packages=find_packages(where='src', exclude=['tests']),
    package_dir={'': 'src'},
    py_modules=[
        'bitstream', 'cones', 'critical', 'design', 'equivalence', 'errors', 'fabric',
        'file_service', 'logic', 'main', 'metrics', 'models', 'netlist', 'netlist_formats',
        'params_manager', 'redactor', 'rng', 'simulator', 'validator', 'variant_manifest',
    ],
    data_files=[('.', ['src/default_params.json', 'src/variant_presets.yaml'])],
    install_requires=[
        'networkx>=2.6',
        'numpy>=1.22',
        'PyYAML>=5.4.0',
        'pytest>=6.0.0',
    ],
    entry_points={'console_scripts': ['netlist-redactor=main:main']},
    python_requires='>=3.10',
)
