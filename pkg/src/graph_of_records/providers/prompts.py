"""Prompt templates for query simulation and retrieval-augmented generation."""

QUERY_SIMULATION_TEMPLATE = (
    "You are a great questioner of any text, and are adept at asking valuable and insightful "
    "questions. Your goal is to generate 1 summary question for the text provided below. The "
    "generated summary question should try to simulate the tone of human questions as much as "
    "possible, and make sure that the generated question must be interrogative sentences and a "
    "summary question. Important! Please make sure this text must be a complete and "
    "non-redundant answer to the generated summary question. Please directly output the "
    "generated summary question, do not output irrelevant text.\n\n"
    "DOCUMENT:\n{document}"
)

RAG_TEMPLATE = (
    "Refer to the following supporting materials and answer the question with brief but "
    "complete explanations.\n\n"
    "SUPPORTING MATERIALS:\n{materials}\n\n"
    "QUESTION:\n{question}"
)

MATERIALS_SEPARATOR = "\n\n"

_SIMULATION_PREFIX, _, _ = QUERY_SIMULATION_TEMPLATE.partition("{document}")
_RAG_PREFIX, _, _ = RAG_TEMPLATE.partition("{materials}")
_RAG_QUESTION_MARKER = "\n\nQUESTION:\n"


def build_query_simulation_prompt(document: str) -> str:
    return QUERY_SIMULATION_TEMPLATE.format(document=document)


def build_rag_prompt(question: str, materials: list[str]) -> str:
    """Fill the RAG template; materials are joined best-first with blank lines."""
    return RAG_TEMPLATE.format(materials=MATERIALS_SEPARATOR.join(materials), question=question)


def parse_query_simulation_prompt(prompt: str) -> str | None:
    """The DOCUMENT slot of a query-simulation prompt, or None for other prompts."""
    if not prompt.startswith(_SIMULATION_PREFIX):
        return None
    return prompt[len(_SIMULATION_PREFIX) :]


def parse_rag_prompt(prompt: str) -> tuple[str, str] | None:
    """(materials, question) of a RAG prompt, or None for other prompts."""
    if not prompt.startswith(_RAG_PREFIX):
        return None
    materials, marker, question = prompt[len(_RAG_PREFIX) :].rpartition(_RAG_QUESTION_MARKER)
    if not marker:
        return None
    return materials, question
