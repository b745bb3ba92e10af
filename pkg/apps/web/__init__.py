# Package marker for module-based execution.
