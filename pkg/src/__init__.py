"""AuditML - audit-risk identification with from-scratch RF, SVM and KNN."""

__version__ = "0.1.0"
