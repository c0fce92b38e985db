"""
LangGraph-based Fit Orchestrator
"""
import time
from typing import Dict, Any, Optional, TypedDict
from pathlib import Path
from dataclasses import dataclass, field

from langgraph.graph import StateGraph, START, END
from rich.console import Console

from config.settings import Settings
from ..datasets import ImageDataset, VideoDataset
from ..models.config import RunConfig
from ..models.report import EvaluationReport
from ..stages import (
    DataLoaderStage, ModelBuilderStage, TrainerStage, EvaluatorStage, RendererStage,
    FRAMES_DIR, GRID_NAME, RECONSTRUCTION_NAME, StageResult,
)
from ..utils.run_output import (
    CONFIG_NAME, create_debug_directory, prepare_run_directory, save_debug_summary, save_stage_debug,
)


class FitState(TypedDict):
    """State object for the fit workflow."""
    # Input parameters
    run: RunConfig
    resume: Optional[Path]
    force: bool
    show_progress: bool
    debug_enabled: bool

    # Processing state
    current_step: str
    dataset: Any
    model_state: Any
    outcome: Any
    evaluation: Any

    # Results and metadata
    success: bool
    error: Optional[str]
    exception: Optional[BaseException]
    outputs: Dict[str, Path]

    # Debug and timing
    debug_path: Optional[Path]
    stage_results: Dict[str, Dict[str, Any]]
    start_time: float


@dataclass
class FitResult:
    """Result of one fit run."""
    success: bool
    run_dir: Optional[Path] = None
    iteration: int = 0
    report: Optional[EvaluationReport] = None
    outputs: Dict[str, Path] = field(default_factory=dict)
    error: Optional[str] = None
    exception: Optional[BaseException] = None
    stage_results: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    total_time: Optional[float] = None


# Graph node -> (debug step, stage key)
STEPS = {
    "load_data": (1, "loader"),
    "build_model": (2, "model_builder"),
    "train": (3, "trainer"),
    "evaluate": (4, "evaluator"),
    "render": (5, "renderer"),
}


class FitOrchestrator:
    """LangGraph-based orchestrator for one training run."""

    def __init__(self, settings: Settings, console: Optional[Console] = None):
        self.settings = settings
        self.console = console or Console()

        self.loader = DataLoaderStage(settings)
        self.model_builder = ModelBuilderStage(settings)
        self.trainer = TrainerStage(settings, self.console)
        self.evaluator = EvaluatorStage(settings)
        self.renderer = RendererStage(settings)

        self.workflow = self._build_workflow()

    def _build_workflow(self):
        """Build the LangGraph workflow."""
        workflow = StateGraph(FitState)

        workflow.add_node("initialize", self._initialize)
        workflow.add_node("load_data", self._load_data)
        workflow.add_node("build_model", self._build_model)
        workflow.add_node("train", self._train)
        workflow.add_node("evaluate", self._evaluate)
        workflow.add_node("render", self._render)
        workflow.add_node("finalize", self._finalize)

        workflow.add_edge(START, "initialize")
        chain = ["initialize", "load_data", "build_model", "train", "evaluate", "render"]
        # Any failing step routes straight to finalize
        for current, following in zip(chain, chain[1:]):
            workflow.add_conditional_edges(
                current,
                self._should_continue,
                {
                    "continue": following,
                    "end": "finalize"
                }
            )
        workflow.add_edge("render", "finalize")
        workflow.add_edge("finalize", END)

        return workflow.compile()

    def _should_continue(self, state: FitState) -> str:
        return "continue" if state["success"] else "end"

    def _initialize(self, state: FitState) -> FitState:
        """Prepare the run directory and echo the resolved configuration."""
        state["current_step"] = "initialize"
        state["start_time"] = time.time()
        state["stage_results"] = {}
        state["outputs"] = {}
        run = state["run"]
        try:
            out = prepare_run_directory(run.out, state["force"], state["resume"])
            run.save(out / CONFIG_NAME)
            state["outputs"]["config"] = out / CONFIG_NAME
            if state["debug_enabled"]:
                state["debug_path"] = create_debug_directory(out)
        except Exception as e:
            state["success"] = False
            state["error"] = str(e)
            state["exception"] = e
        return state

    def _record(self, state: FitState, node: str, result: StageResult, step_start: float) -> None:
        """Store a stage's outcome in the state and its debug file."""
        step, name = STEPS[node]
        step_time = time.time() - step_start
        state["stage_results"][name] = {
            "success": result.success,
            "processing_time_ms": round(step_time * 1000),
            "error": result.error,
        }
        if not result.success:
            state["success"] = False
            state["error"] = result.error
            state["exception"] = result.exception
        if state["debug_enabled"] and state["debug_path"] is not None:
            save_stage_debug(
                state["debug_path"], name, step,
                result.success, result.metadata,
                {"current_step": node}, result.error, step_time
            )

    def _load_data(self, state: FitState) -> FitState:
        state["current_step"] = "load_data"
        step_start = time.time()
        result = self.loader.process(state["run"])
        state["dataset"] = result.data
        self._record(state, "load_data", result, step_start)
        return state

    def _build_model(self, state: FitState) -> FitState:
        state["current_step"] = "build_model"
        step_start = time.time()
        result = self.model_builder.process(state["run"], state["resume"])
        state["model_state"] = result.data
        self._record(state, "build_model", result, step_start)
        return state

    def _train(self, state: FitState) -> FitState:
        state["current_step"] = "train"
        step_start = time.time()
        result = self.trainer.process(state["run"], state["dataset"], state["model_state"], state["show_progress"])
        state["outcome"] = result.data
        if result.success:
            state["outputs"]["checkpoint"] = result.data.checkpoint
        self._record(state, "train", result, step_start)
        return state

    def _evaluate(self, state: FitState) -> FitState:
        """Final metrics from the model as reloaded from its checkpoint."""
        state["current_step"] = "evaluate"
        step_start = time.time()
        outcome = state["outcome"]
        run = state["run"]
        result = self.evaluator.process(
            run, state["dataset"], outcome.model, outcome.iteration, outcome.rows, out=Path(run.out)
        )
        state["evaluation"] = result.data
        if result.success:
            state["outputs"]["metrics"] = Path(run.out) / "metrics.csv"
        self._record(state, "evaluate", result, step_start)
        return state

    def _render(self, state: FitState) -> FitState:
        state["current_step"] = "render"
        step_start = time.time()
        run = state["run"]
        dataset = state["dataset"]
        out = Path(run.out)
        if isinstance(dataset, ImageDataset):
            target, size = out / RECONSTRUCTION_NAME, (dataset.height, dataset.width)
        elif isinstance(dataset, VideoDataset):
            target, size = out / FRAMES_DIR, (dataset.num_frames, dataset.height, dataset.width)
        else:
            target, size = out / GRID_NAME, (run.eval_res,)
        evaluation = state["evaluation"]
        result = self.renderer.process(
            run.task, state["outcome"].model, target, size,
            sdf_grid=evaluation.sdf_grid if evaluation is not None else None,
        )
        if result.success:
            state["outputs"]["reconstruction"] = target
        self._record(state, "render", result, step_start)
        return state

    def _finalize(self, state: FitState) -> FitState:
        """Finalize processing and save debug summary."""
        state["current_step"] = "finalize"
        total_time = time.time() - state["start_time"]

        if state["debug_enabled"] and state["debug_path"] is not None:
            save_debug_summary(
                state["debug_path"],
                state["run"].out,
                state["success"],
                total_time,
                state["stage_results"]
            )
        return state

    def fit(
        self,
        run: RunConfig,
        resume: Optional[Path] = None,
        force: bool = False,
        show_progress: bool = True,
        debug_enabled: bool = False,
    ) -> FitResult:
        """Run the fit workflow for one resolved run configuration."""
        initial_state = FitState(
            run=run,
            resume=Path(resume) if resume else None,
            force=force,
            show_progress=show_progress,
            debug_enabled=debug_enabled,
            current_step="",
            dataset=None,
            model_state=None,
            outcome=None,
            evaluation=None,
            success=True,
            error=None,
            exception=None,
            outputs={},
            debug_path=None,
            stage_results={},
            start_time=0.0,
        )

        try:
            final_state = self.workflow.invoke(initial_state)
        except Exception as e:
            return FitResult(success=False, error=f"Workflow execution failed: {str(e)}", exception=e)

        outcome = final_state["outcome"]
        evaluation = final_state["evaluation"]
        return FitResult(
            success=final_state["success"],
            run_dir=Path(run.out),
            iteration=outcome.iteration if outcome is not None else 0,
            report=evaluation.report if evaluation is not None else None,
            outputs=final_state["outputs"],
            error=final_state["error"],
            exception=final_state["exception"],
            stage_results=final_state["stage_results"],
            total_time=time.time() - final_state["start_time"],
        )

    def get_workflow_graph(self):
        """Get the workflow graph for visualization."""
        return self.workflow

    def get_mermaid_diagram(self) -> str:
        """Mermaid source of the workflow graph."""
        return self.workflow.get_graph().draw_mermaid()
