"""codemix: code-mixed machine-translation experiments, metrics, and a RAG chatbot."""

__version__ = "0.1.0"
