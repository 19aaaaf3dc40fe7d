"""Talk a program into existence: a constrained conversational agent that
builds, stores, and runs small action-list programs."""

__version__ = "0.1.0"
