from setuptools import find_packages, setup

with open("README.md", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="cmdeg",
    version="0.1.0",
    author="cmdeg contributors",
    author_email="maintainers@cmdeg.dev",
    description=(
        "Completely-monotonic-degree lab for Stirling remainders of log Gamma. "
        "Certified high-precision kernels, quadrature and degree brackets."
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/cmdeg/cmdeg",
    project_urls={
        "Bug Tracker": "https://github.com/cmdeg/cmdeg/issues",
        "Source Code": "https://github.com/cmdeg/cmdeg",
    },
    packages=find_packages(exclude=["tests*", "examples*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Framework :: Django",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Programming Language :: Python :: 3.13",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.11",
    install_requires=[
        "Django>=4.2",
        "mpmath>=1.3",
        "numpy>=1.24",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0",
            "pytest-cov>=4.0",
            "pytest-django>=4.5",
            "ruff>=0.1.0",
            "mypy>=1.0",
            "django-stubs>=4.2",
        ],
    },
    entry_points={
        "console_scripts": ["cmdeg=cmdeg.management:main"],
    },
    include_package_data=True,
    zip_safe=False,
    keywords="gamma stirling completely monotonic laplace transform mpmath",
)
