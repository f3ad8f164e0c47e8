"""rwdetect: behavioral ransomware detection toolkit.

Pipeline: sparse binary behavioral features -> mutual-information
feature selection -> six classical classifiers -> confusion-matrix
evaluation, plus a batch adapter that scores raw sandbox behavioral
reports against a saved model.
"""

__version__ = "0.1.0"
