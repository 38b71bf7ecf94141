"""
LangGraph construction for the Darboux pipeline.
Every stage is wrapped so that a raised PadicError is recorded in the
state together with the stage name and the graph ends there.
"""

import logging
from typing import Any, Callable, Dict

from langgraph.graph import END, StateGraph

from app.darboux import nodes
from app.darboux.state import DarbouxState
from app.exceptions import PadicError
from app.padic.context import Context

logger = logging.getLogger("padic_darboux")

STAGES = (
    ("normalize", nodes.normalize_node),
    ("alpha", nodes.alpha_node),
    ("primitive", nodes.primitive_node),
    ("split", nodes.split_node),
    ("moser", nodes.moser_node),
    ("t_evidence", nodes.t_evidence_node),
    ("flow", nodes.flow_node),
    ("constancy", nodes.constancy_node),
)


class DarbouxGraphBuilder:
    """Build and run the stage graph for one context."""

    def __init__(self, ctx: Context):
        """
        Initialize graph builder.

        Args:
            ctx: prime and truncation orders shared by every stage
        """
        self.ctx = ctx
        self.graph = None

    def _create_node_wrapper(self, node_func: Callable, node_name: str) -> Callable:
        """
        Wrap a stage so it always returns a dict.

        Args:
            node_func: the stage function
            node_name: stage name recorded on failure

        Returns:
            Wrapped function
        """
        def wrapper(state: DarbouxState) -> Dict[str, Any]:
            logger.debug(f"Executing stage: {node_name}")
            try:
                result = node_func(state)
            except PadicError as e:
                logger.error(f"Stage {node_name} failed: {type(e).__name__}: {e}")
                return {"error": e, "failed_stage": node_name}
            logger.debug(f"Stage {node_name} returned keys: {sorted(result)}")
            return result

        return wrapper

    @staticmethod
    def _route_after(state: DarbouxState) -> str:
        return "end" if state.get("error") is not None else "continue"

    def build(self):
        """Build the stage graph: a chain that exits early on the first error."""
        logger.info("Building Darboux stage graph")
        graph = StateGraph(DarbouxState)
        for name, func in STAGES:
            graph.add_node(name, self._create_node_wrapper(func, name))

        for (name, _), (following, _) in zip(STAGES, STAGES[1:]):
            graph.add_conditional_edges(name, self._route_after, {"continue": following, "end": END})
        graph.add_edge(STAGES[-1][0], END)
        graph.set_entry_point(STAGES[0][0])

        self.graph = graph.compile()
        return self.graph

    def invoke(self, state: DarbouxState) -> Dict[str, Any]:
        """
        Run the graph.

        Args:
            state: initial state with at least `omega1`

        Returns:
            Final state dict
        """
        if not self.graph:
            self.build()
        initial = dict(state)
        initial.setdefault("ctx", self.ctx)
        initial.setdefault("residuals", {})
        initial.setdefault("certificates", {})
        initial.setdefault("stages", [])
        result = self.graph.invoke(initial)
        logger.info(f"Darboux graph finished stages {result.get('stages', [])}")
        return result
