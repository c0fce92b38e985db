# Configuration and report models
