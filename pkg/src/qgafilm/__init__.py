"""Quantum-inspired genetic algorithm with surrogate-assisted active
learning, applied to binary-encoded multilayer thin-film design."""

from .active_learning import (IterationRecord, LoopConfig, LoopResult,
                              bootstrap_dataset, evaluation_budget_report,
                              run_loop)
from .baselines import CgaConfig, CgaResult, cga_evolve, exhaustive_search
from .dataset import LabeledDataset
from .encoding import MaterialCodec, code_to_string, string_to_code
from .fm import FmConfig, FmModel, fm_train
from .forest import ForestConfig, RandomForestModel, rf_train
from .optics import (LayerStack, MaterialTable, SpectralGrid, fom,
                     spectral_response, transmittance)
from .problem import TrcProblem, default_problem
from .qga import (BestRecord, EvolveResult, GenerationRecord, QgaConfig,
                  RotationSchedule, evolve, measure, mutate, warm_start)
from .surrogate import cross_validate, evaluate_rmse, load_model, save_model

__version__ = "0.1.0"
