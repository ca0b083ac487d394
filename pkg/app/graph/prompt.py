"""Evolution prompt construction and program extraction from LLM replies."""
import re
from typing import List, Sequence

from langchain_core.prompts import PromptTemplate

from app.dsl.grammar import reference
from app.exceptions import EvolutionError
from app.models.evolution import Candidate
from app.models.scores import MetricName

FENCE = "```"
FENCED_BLOCK = re.compile(r"```(?:[\w+-]*\n)?(.*?)```", re.DOTALL)

DOMAIN_GUIDELINES = """\
- Low token log-probabilities and high entropies signal uncertainty of the generating model.
- Late tokens of a claim often carry the factual content; positional weighting can help.
- Aggregations other than the plain sum (max, min, std, weighted dot products) capture
  localized doubt that averages wash out.
- Length normalization separates intrinsic doubt from mere verbosity.
- Correlations between signals and position describe how confidence evolves in a sequence."""

OUTPUT_FORMAT = (
    "Propose one new program that you expect to score higher than the examples. "
    "Reply with the program alone, enclosed in a fenced code block delimited by triple "
    "backticks. Comments starting with # are allowed inside the program."
)

PROMPT_TEMPLATE = PromptTemplate.from_template(
    "{task}\n\n"
    "## Language\n"
    "Programs are single expressions in the language below, evaluated once per generation. "
    "Higher values must mean more uncertainty.\n\n"
    "{reference}\n\n"
    "{guidelines}"
    "{constraints}"
    "## Example candidates\n"
    "Fitness is {metric} on the training data (higher is better).\n\n"
    "{examples}\n\n"
    "## Output format\n"
    "{output_format}\n"
)


def _example_block(index: int, parent: Candidate) -> str:
    return (
        f"### Example {index} (fitness {parent.fitness:.4f})\n"
        f"{FENCE}\n{parent.source}\n{FENCE}"
    )


def build_prompt(
    task_description: str,
    parents: Sequence[Candidate],
    constraints: Sequence[str] = (),
    metric: MetricName = MetricName.ROC_AUC,
    domain_knowledge: bool = False,
) -> str:
    """
    Render the mutation prompt.

    The result is a pure function of its arguments; each parent contributes exactly one
    fenced source block and its fitness to 4 decimals.

    Args:
        task_description: task section text
        parents: example candidates, shown in the given order
        constraints: extra requirement lines, copied verbatim
        metric: fitness metric named in the examples header
        domain_knowledge: include the uncertainty design guidelines section

    Raises:
        EvolutionError: no parents, or a failed parent
    """
    if not parents:
        raise EvolutionError("build_prompt needs at least one parent")
    if any(parent.failed for parent in parents):
        raise EvolutionError("failed candidates cannot be shown as examples")
    guidelines = f"## Design guidelines\n{DOMAIN_GUIDELINES}\n\n" if domain_knowledge else ""
    constraint_lines = "".join(f"- {line}\n" for line in constraints)
    constraint_section = f"## Constraints\n{constraint_lines}\n" if constraints else ""
    examples = "\n\n".join(_example_block(i, p) for i, p in enumerate(parents, start=1))
    return PROMPT_TEMPLATE.format(
        task=task_description.strip(),
        reference=reference(),
        guidelines=guidelines,
        constraints=constraint_section,
        metric=MetricName(metric).value,
        examples=examples,
        output_format=OUTPUT_FORMAT,
    )


def extract_programs(llm_text: str) -> List[str]:
    """Sources of all fenced code blocks, or the whole text when there are none."""
    if FENCE in llm_text:
        blocks = FENCED_BLOCK.findall(llm_text)
    else:
        blocks = [llm_text]
    return [block.strip() for block in blocks if block.strip()]
