import setuptools

with open("README.md", "r") as fh:
      long_description = fh.read()

setuptools.setup(
      name='coronary-pcat',
      version='0.1.0',
      author="Coronary PCAT developers",
      description="Python modules to classify coronary branches, detect stenoses and "
                  "measure pericoronary adipose tissue from CCTA-derived data.",
      long_description=long_description,
      long_description_content_type="text/markdown",
      packages=setuptools.find_packages(exclude=["*.tests", "*.unittests", "*.unittest", "*.sample_tests"]),
      install_requires=['numpy', 'scipy', 'pandas', 'scikit-learn', 'munch'],
      extras_require={'test': ['pytest']},
      package_data={'coronary': ['config.ini']},
      include_package_data=True,
      entry_points={
            'console_scripts': [
                  'coronary-pcat=coronary.analysis.pipeline.actions.cli:main',
            ],
      },
      classifiers=[
            "Programming Language :: Python :: 3 :: Only",
            "Programming Language :: Python :: Implementation :: CPython",
            "License :: OSI Approved :: Apache Software License",
            "Operating System :: POSIX :: Linux",
      ],
)
