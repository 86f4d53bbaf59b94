from setuptools import setup, find_packages

from os import path

this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(name='conetrace',
      use_scm_version={
          "root": ".",
          "relative_to": __file__,
          "local_scheme": "node-and-timestamp"
      },
      setup_requires=['setuptools_scm'],
      description='Diffractive wave-trace predictions and resonance bands for flat surfaces with conic singularities.',
      long_description=long_description,
      long_description_content_type='text/markdown',
      license='Apache License 2.0',
      packages=find_packages(exclude=['test', 'test.*']),
      install_requires=[
          'numpy', 'scipy', 'pydantic>=2.9', 'shapely>=2.0'
      ],
      entry_points={
          'console_scripts': ['conetrace=conetrace.cli:main'],
      },
      keywords=['spectral geometry', 'wave trace', 'diffraction', 'cone points'],
      zip_safe=False,
      classifiers=[
          'Programming Language :: Python',
          'Intended Audience :: Science/Research',
          'License :: OSI Approved :: Apache Software License'
      ],
      )
